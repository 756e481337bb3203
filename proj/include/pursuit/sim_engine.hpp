#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "pursuit/evader.hpp"
#include "pursuit/pontryagin.hpp"
#include "pursuit/simple_motion.hpp"

namespace pursuit {

struct TrajectoryEvent {
  double time = 0.0;
  std::string tag;
};

/// Discrete run record. Row k holds the state, resource and ledgers at time
/// t_k and the controls applied on [t_k, t_{k+1}); the final row is a
/// terminal snapshot with zero controls.
struct Trajectory {
  std::vector<double> times;
  std::vector<VectorXd> z;
  std::vector<VectorXd> u;
  std::vector<VectorXd> v;
  std::vector<double> lambda;   ///< resolving value actually played per step
  std::vector<double> r;        ///< resource 1 - int lambda
  std::vector<double> u_spent;  ///< pursuer ledger at t_k
  std::vector<double> v_spent;  ///< evader ledger at t_k
  std::vector<TrajectoryEvent> events;
  double dt = 0.0;

  std::size_t rows() const { return times.size(); }
  bool has_event(const std::string& tag) const;
  int count_events(const std::string& tag) const;
};

struct RunReport {
  bool captured = false;
  std::optional<double> capture_time;
  double bound_theta = 0.0;  ///< applicable guaranteed-time bound
  double final_miss = 0.0;   ///< |z| - l, or |z1| for the damped-motion game
  bool budget_ok_u = true;
  bool budget_ok_v = true;
  std::vector<std::string> invariant_violations;
};

struct SimpleMotionRun {
  SimpleMotionParams params;
  VectorXd z0;
};

struct PontryaginRun {
  PontryaginParams params;
  PontryaginState z0;
  double horizon = 0.0;  ///< strategy horizon T = theta
};

using RunContext = std::variant<SimpleMotionRun, PontryaginRun>;

/// Post-hoc invariant checks over a completed trajectory: per-step energy
/// identity, budget caps, resource monotonicity, parallel-approach residual
/// (l = 0), the monotone capture certificate and the mode-switch count.
/// Violations are returned as data, never thrown.
std::vector<std::string> monitor_invariants(const Trajectory& traj,
                                            const RunContext& ctx);

/// Integrates z' = u - v under the parallel-approach strategy (which uses the
/// initial z0 throughout) against the realized evader, with exact resource
/// bookkeeping: in the step where the resource would cross zero the played
/// resolving value is clamped so the integral of lambda lands exactly at 1.
/// Requires dt <= bound/1000 (StepTooCoarse otherwise).
std::pair<Trajectory, RunReport> run_simple_motion(
    const SimpleMotionParams& params, const VectorXd& z0,
    const EvaderSpec& evader, double dt, bool monitors = true);

/// Integrates the damped-motion game with exact per-step propagation of the
/// linear part and zero-order-hold controls, running the two-mode pursuit to
/// the guaranteed horizon theta. Requires dt <= theta/1000.
std::pair<Trajectory, RunReport> run_pontryagin(const PontryaginParams& params,
                                                const PontryaginState& z0,
                                                const EvaderSpec& evader,
                                                double dt, bool monitors = true);

}  // namespace pursuit

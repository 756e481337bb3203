#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "pursuit/game_core.hpp"

namespace pursuit {

enum class EvaderKind {
  zero,
  constant_decay,
  radial_flee,
  perpendicular,
  piecewise,
  seeded_random,
};

/// Description of an admissible evader control. The realized signal is
/// piecewise constant on the simulation grid and is normalized in closed form
/// so its exact L2 energy over [0, inf) is budget_fraction * sigma^2.
struct EvaderSpec {
  EvaderKind kind = EvaderKind::zero;
  VectorXd direction;               ///< constant_decay only; normalized on use
  double decay = 1.0;               ///< envelope rate k > 0
  std::uint64_t seed = 0;           ///< piecewise / seeded_random
  std::vector<double> breakpoints;  ///< piecewise; derived from seed when empty
  double budget_fraction = 1.0;     ///< share of sigma^2 to expend, in [0, 1]
};

/// A realized evader control: the value on [k dt, (k+1) dt) for each step k.
class EvaderSignal {
 public:
  EvaderSignal(Index dim, double dt) : dim_(dim), dt_(dt) {}

  VectorXd at_step(Index k) const;
  /// Exact L2 energy of the realized signal over [0, inf).
  double realized_energy() const { return energy_; }
  Index dim() const { return dim_; }

 private:
  friend EvaderSignal make_evader(const EvaderSpec&, double, double, Index,
                                  const VectorXd&, double);
  Index dim_;
  double dt_;
  double energy_ = 0.0;
  // Exponential-envelope form: value(k) = amp * exp(-decay * k * dt) * dir.
  bool analytic_ = false;
  VectorXd dir_;
  double amp_ = 0.0;
  double decay_ = 0.0;
  // Table form: constant value up to (exclusive) end step, zero afterwards.
  std::vector<Index> end_steps_;
  std::vector<VectorXd> values_;
};

/// Realizes an evader spec on the grid of step dt for a game of the given
/// dimension; z0 provides the radial direction for radial_flee/perpendicular.
/// Throws BadSpec on unknown kinds and nonpositive decay rates.
EvaderSignal make_evader(const EvaderSpec& spec, double sigma, double horizon,
                         Index dim, const VectorXd& z0, double dt);

/// Deterministic opponent suite: every kind with seeds_per_kind seed-derived
/// parameter variants (decay rate, budget fraction, directions).
std::vector<EvaderSpec> evader_suite(int seeds_per_kind);

}  // namespace pursuit

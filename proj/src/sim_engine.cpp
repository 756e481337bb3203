#include "pursuit/sim_engine.hpp"

#include <cmath>

namespace pursuit {

namespace {

constexpr double kCaptureGeomTol = 1e-9;   // relative on l
constexpr double kBudgetTolU = 1e-6;       // relative on rho^p
constexpr double kBudgetTolV = 1e-9;       // relative on sigma^p
constexpr double kIdentityTol = 1e-10;

bool is_capped_row(const Trajectory& traj, std::size_t k) {
  for (const auto& ev : traj.events)
    if (ev.tag == "lambda_capped" &&
        std::abs(ev.time - traj.times[k]) < 0.5 * traj.dt)
      return true;
  return false;
}

}  // namespace

bool Trajectory::has_event(const std::string& tag) const {
  for (const auto& ev : events)
    if (ev.tag == tag) return true;
  return false;
}

int Trajectory::count_events(const std::string& tag) const {
  int n = 0;
  for (const auto& ev : events)
    if (ev.tag == tag) ++n;
  return n;
}

std::pair<Trajectory, RunReport> run_simple_motion(
    const SimpleMotionParams& params, const VectorXd& z0,
    const EvaderSpec& evader, double dt, bool monitors) {
  params.validate();
  if (z0.size() != params.n) throw ValidationError("z0 dimension mismatch");
  if (z0.norm() <= params.l)
    throw InsideTerminal("initial state inside terminal set");
  const double bound = capture_bound(z0, params.rho, params.sigma, params.l);
  if (!(dt > 0.0) || dt > bound / 1000.0)
    throw StepTooCoarse("need 0 < dt <= bound/1000 = " +
                        std::to_string(bound / 1000.0));
  const double horizon = 1.1 * bound;
  const double delta = params.delta();
  const EvaderSignal signal =
      make_evader(evader, params.sigma, horizon, params.n, z0, dt);

  Trajectory traj;
  traj.dt = dt;
  RunReport report;
  report.bound_theta = bound;

  VectorXd z = z0;
  double r = 1.0;
  BudgetLedger ledger_u{2.0, params.rho * params.rho, 0.0};
  BudgetLedger ledger_v{2.0, params.sigma * params.sigma, 0.0};
  const VectorXd zero_ctrl = VectorXd::Zero(params.n);

  for (Index k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    const bool geometric = z.norm() <= params.l * (1.0 + kCaptureGeomTol);
    const bool resource = r <= 0.0;
    if (geometric || resource) {
      traj.times.push_back(t);
      traj.z.push_back(z);
      traj.u.push_back(zero_ctrl);
      traj.v.push_back(zero_ctrl);
      traj.lambda.push_back(0.0);
      traj.r.push_back(r);
      traj.u_spent.push_back(ledger_u.spent_p);
      traj.v_spent.push_back(ledger_v.spent_p);
      if (geometric) traj.events.push_back({t, "capture_geometric"});
      if (resource) traj.events.push_back({t, "capture_resource"});
      report.captured = true;
      report.capture_time = t;
      break;
    }
    if (t > horizon) {
      traj.times.push_back(t);
      traj.z.push_back(z);
      traj.u.push_back(zero_ctrl);
      traj.v.push_back(zero_ctrl);
      traj.lambda.push_back(0.0);
      traj.r.push_back(r);
      traj.u_spent.push_back(ledger_u.spent_p);
      traj.v_spent.push_back(ledger_v.spent_p);
      traj.events.push_back({t, "horizon_exceeded"});
      report.captured = false;
      break;
    }

    const VectorXd v = signal.at_step(k);
    const double lam_full = lambda_l(v, z0, delta, params.l);
    const bool capped = lam_full * dt > r;
    const double lam = capped ? r / dt : lam_full;
    const VectorXd u = pi_l_strategy_at(v, z0, lam, params.l);

    traj.times.push_back(t);
    traj.z.push_back(z);
    traj.u.push_back(u);
    traj.v.push_back(v);
    traj.lambda.push_back(lam);
    traj.r.push_back(r);
    traj.u_spent.push_back(ledger_u.spent_p);
    traj.v_spent.push_back(ledger_v.spent_p);
    if (capped) traj.events.push_back({t, "lambda_capped"});

    z += dt * (u - v);
    ledger_u = budget_spend(ledger_u, u.squaredNorm(), dt);
    ledger_v = budget_spend(ledger_v, v.squaredNorm(), dt);
    r = capped ? 0.0 : r - lam * dt;
  }

  report.final_miss = traj.z.back().norm() - params.l;
  report.budget_ok_u = ledger_u.admissible(kBudgetTolU);
  report.budget_ok_v = ledger_v.admissible(kBudgetTolV);
  if (ledger_u.exceeded())
    traj.events.push_back({traj.times.back(), "budget_exceeded_pursuer"});
  if (ledger_v.exceeded())
    traj.events.push_back({traj.times.back(), "budget_exceeded_evader"});
  if (monitors)
    report.invariant_violations =
        monitor_invariants(traj, SimpleMotionRun{params, z0});
  return {std::move(traj), std::move(report)};
}

std::pair<Trajectory, RunReport> run_pontryagin(const PontryaginParams& params,
                                                const PontryaginState& z0,
                                                const EvaderSpec& evader,
                                                double dt, bool monitors) {
  params.validate();
  if (z0.z1.size() != params.n || z0.z2.size() != params.n ||
      z0.z3.size() != params.n)
    throw ValidationError("z0 block dimensions must equal n");
  if (z0.z1.norm() == 0.0) throw DegenerateXi("z01 must be nonzero");

  const double theta = guaranteed_time_theta(params, z0);
  if (!(dt > 0.0) || dt > theta / 1000.0)
    throw StepTooCoarse("need 0 < dt <= theta/1000 = " +
                        std::to_string(theta / 1000.0));
  // Constant step that lands exactly on the horizon.
  const Index n_steps = static_cast<Index>(std::ceil(theta / dt - 1e-12));
  const double h = theta / static_cast<double>(n_steps);

  const EvaderSignal signal =
      make_evader(evader, params.sigma, theta, params.n, z0.z1, h);

  const VectorXd xi_T = xi(params, theta, z0);
  const double xi_sq = xi_T.squaredNorm();

  // Exact per-step propagation constants (zero-order-hold controls).
  const double ea = std::exp(-params.alpha * h);
  const double eb = std::exp(-params.beta * h);
  const double aw = alpha_fun(params.alpha, h);
  const double bw = beta_fun(params.beta, h);
  const double ia = (h - aw) / params.alpha;
  const double ib = (h - bw) / params.beta;

  Trajectory traj;
  traj.dt = h;
  RunReport report;
  report.bound_theta = theta;

  VectorXd z1 = z0.z1, z2 = z0.z2, z3 = z0.z3;
  double r = 1.0;
  PursuitMode mode = PursuitMode::approach;
  BudgetLedger ledger_u{2.0, params.rho * params.rho, 0.0};
  BudgetLedger ledger_v{2.0, params.sigma * params.sigma, 0.0};
  const VectorXd zero_ctrl = VectorXd::Zero(params.n);

  const auto record = [&](double t, const VectorXd& u, const VectorXd& v,
                          double lam) {
    traj.times.push_back(t);
    VectorXd state(3 * params.n);
    state << z1, z2, z3;
    traj.z.push_back(std::move(state));
    traj.u.push_back(u);
    traj.v.push_back(v);
    traj.lambda.push_back(lam);
    traj.r.push_back(r);
    traj.u_spent.push_back(ledger_u.spent_p);
    traj.v_spent.push_back(ledger_v.spent_p);
  };

  for (Index k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * h;
    const VectorXd v = signal.at_step(k);
    VectorXd u;
    double lam = 0.0;
    bool capped = false;
    if (mode == PursuitMode::approach) {
      const double lam11 = switching_integrand(params, theta, t, v, xi_T) / xi_sq;
      capped = lam11 * h > r;
      lam = capped ? r / h : lam11;
      u = approach_control(params, theta, t, v, xi_T, lam);
    } else {
      u = neutralize_control(params, theta, t, v);
    }
    record(t, u, v, lam);
    if (capped) traj.events.push_back({t, "lambda_capped"});

    // z1 update uses the pre-step z2, z3.
    z1 += aw * z2 - bw * z3 + params.b * ia * u - params.c * ib * v;
    z2 = ea * z2 + params.b * aw * u;
    z3 = eb * z3 + params.c * bw * v;
    ledger_u = budget_spend(ledger_u, u.squaredNorm(), h);
    ledger_v = budget_spend(ledger_v, v.squaredNorm(), h);
    if (mode == PursuitMode::approach) {
      r = capped ? 0.0 : r - lam * h;
      if (r <= 0.0) {
        r = 0.0;
        mode = PursuitMode::neutralize;
        traj.events.push_back(
            {static_cast<double>(k + 1) * h, "mode_switch"});
      }
    }
  }
  record(theta, zero_ctrl, zero_ctrl, 0.0);

  report.final_miss = z1.norm();
  report.captured = report.final_miss <= 1e-3 * z0.z1.norm();
  if (report.captured) report.capture_time = theta;
  report.budget_ok_u = ledger_u.admissible(kBudgetTolU);
  report.budget_ok_v = ledger_v.admissible(kBudgetTolV);
  if (ledger_u.exceeded())
    traj.events.push_back({theta, "budget_exceeded_pursuer"});
  if (ledger_v.exceeded())
    traj.events.push_back({theta, "budget_exceeded_evader"});
  if (monitors)
    report.invariant_violations =
        monitor_invariants(traj, PontryaginRun{params, z0, theta});
  return {std::move(traj), std::move(report)};
}

std::vector<std::string> monitor_invariants(const Trajectory& traj,
                                            const RunContext& ctx) {
  std::vector<std::string> violations;
  const std::size_t n = traj.rows();
  if (n == 0) {
    violations.push_back("empty trajectory");
    return violations;
  }

  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (!(traj.times[k + 1] > traj.times[k])) {
      violations.push_back("times not strictly increasing at row " +
                           std::to_string(k + 1));
      break;
    }
    if (std::abs(traj.times[k + 1] - traj.times[k] - traj.dt) > 1e-9 * traj.dt) {
      violations.push_back("non-constant step at row " + std::to_string(k + 1));
      break;
    }
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (traj.r[k + 1] > traj.r[k] + 1e-12) {
      violations.push_back("resource r increased at row " + std::to_string(k + 1));
      break;
    }
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (traj.u_spent[k + 1] < traj.u_spent[k] ||
        traj.v_spent[k + 1] < traj.v_spent[k]) {
      violations.push_back("budget ledger decreased at row " +
                           std::to_string(k + 1));
      break;
    }
  }

  if (std::holds_alternative<SimpleMotionRun>(ctx)) {
    const auto& run = std::get<SimpleMotionRun>(ctx);
    const double delta = run.params.delta();
    const double l = run.params.l;
    const double z0n = run.z0.norm();
    BudgetLedger cap_u{2.0, run.params.rho * run.params.rho,
                       traj.u_spent.back()};
    BudgetLedger cap_v{2.0, run.params.sigma * run.params.sigma,
                       traj.v_spent.back()};
    if (!cap_u.admissible(kBudgetTolU))
      violations.push_back("pursuer energy exceeds rho^2");
    if (!cap_v.admissible(kBudgetTolV))
      violations.push_back("evader energy exceeds sigma^2");

    for (std::size_t k = 0; k < n; ++k) {
      const double lhs = traj.u[k].squaredNorm();
      const double rhs = traj.v[k].squaredNorm() + delta * traj.lambda[k];
      const double tol = kIdentityTol * (1.0 + traj.v[k].squaredNorm());
      const bool capped = is_capped_row(traj, k);
      if ((capped && lhs > rhs + tol) || (!capped && std::abs(lhs - rhs) > tol)) {
        violations.push_back("energy identity violated at row " +
                             std::to_string(k));
        break;
      }
    }
    if (l == 0.0) {
      for (std::size_t k = 0; k < n; ++k) {
        if ((traj.z[k] - traj.r[k] * run.z0).norm() > 1e-6 * z0n) {
          violations.push_back("parallel-approach residual at row " +
                               std::to_string(k));
          break;
        }
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (traj.r[k] < 0.0) continue;
      if (traj.z[k].norm() - l > (z0n - l) * traj.r[k] + 1e-6 * z0n) {
        violations.push_back("monotone capture certificate at row " +
                             std::to_string(k));
        break;
      }
    }
  } else {
    const auto& run = std::get<PontryaginRun>(ctx);
    const double delta = run.params.delta();
    BudgetLedger cap_u{2.0, run.params.rho * run.params.rho,
                       traj.u_spent.back()};
    BudgetLedger cap_v{2.0, run.params.sigma * run.params.sigma,
                       traj.v_spent.back()};
    if (!cap_u.admissible(kBudgetTolU))
      violations.push_back("pursuer energy exceeds rho^2");
    if (!cap_v.admissible(kBudgetTolV))
      violations.push_back("evader energy exceeds sigma^2");

    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double fk = f_kernel(run.params, run.horizon - traj.times[k]);
      const double lhs = traj.u[k].squaredNorm();
      const double rhs =
          fk * fk * traj.v[k].squaredNorm() + delta * traj.lambda[k];
      const double tol = kIdentityTol * (1.0 + traj.v[k].squaredNorm());
      const bool capped = is_capped_row(traj, k);
      if ((capped && lhs > rhs + tol) || (!capped && std::abs(lhs - rhs) > tol)) {
        violations.push_back("energy identity violated at row " +
                             std::to_string(k));
        break;
      }
    }
    const int switches = traj.count_events("mode_switch");
    if (switches != 1)
      violations.push_back("expected exactly one mode switch, saw " +
                           std::to_string(switches));
  }
  return violations;
}

}  // namespace pursuit

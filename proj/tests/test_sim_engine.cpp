#include <doctest.h>

#include <cmath>

#include "pursuit/sim_engine.hpp"

using namespace pursuit;

namespace {

VectorXd vec2(double x, double y) {
  VectorXd v(2);
  v << x, y;
  return v;
}

SimpleMotionParams sm_params(double rho, double sigma, double l, Index n) {
  SimpleMotionParams p;
  p.rho = rho;
  p.sigma = sigma;
  p.l = l;
  p.n = n;
  return p;
}

PontryaginState scalar_state(double z1, double z2 = 0.0, double z3 = 0.0) {
  PontryaginState z0;
  z0.z1 = VectorXd::Constant(1, z1);
  z0.z2 = VectorXd::Constant(1, z2);
  z0.z3 = VectorXd::Constant(1, z3);
  return z0;
}

double realized_sum(const EvaderSignal& sig, double dt, double t_max) {
  double sum = 0.0;
  const Index n = static_cast<Index>(t_max / dt);
  for (Index k = 0; k < n; ++k) sum += sig.at_step(k).squaredNorm() * dt;
  return sum;
}

}  // namespace

TEST_SUITE("sim-engine") {

TEST_CASE("simple motion, zero evader: analytic capture times") {
  EvaderSpec zero;
  const auto [traj, report] =
      run_simple_motion(sm_params(2.0, 1.0, 0.0, 2), vec2(3, 0), zero, 1e-4);
  CHECK(report.captured);
  CHECK(std::abs(*report.capture_time - 3.0) < 0.01);
  CHECK(report.bound_theta == doctest::Approx(9.0));
  CHECK(report.invariant_violations.empty());
  // lambda is the constant delta / |z0|^2 = 1/3 away from the last step
  CHECK(traj.lambda.front() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(traj.r.front() == 1.0);
  // row count matches the grid
  CHECK(traj.rows() ==
        static_cast<std::size_t>(std::lround(*report.capture_time / 1e-4)) + 1);
  CHECK(traj.r.back() <= 0.0);

  const auto [traj_l, report_l] =
      run_simple_motion(sm_params(2.0, 1.0, 1.0, 2), vec2(3, 0), zero, 1e-4);
  CHECK(report_l.captured);
  CHECK(std::abs(*report_l.capture_time - 4.0 / 3.0) < 0.01);
  CHECK(traj_l.lambda.front() == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(report_l.invariant_violations.empty());
}

TEST_CASE("simple motion: pursuer spends exactly the energy identity total") {
  EvaderSpec zero;
  const auto [traj, report] =
      run_simple_motion(sm_params(2.0, 1.0, 0.0, 2), vec2(3, 0), zero, 1e-4);
  // v = 0: total spend is delta * int lambda = delta
  CHECK(traj.u_spent.back() == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(report.budget_ok_u);
  CHECK(report.budget_ok_v);
}

TEST_CASE("simple motion: suite subset stays within the guaranteed bound") {
  const VectorXd z0 = vec2(2.5, -1.0);
  for (const EvaderSpec& spec : evader_suite(2)) {
    for (double l : {0.0, 0.7}) {
      const SimpleMotionParams params = sm_params(2.0, 1.0, l, 2);
      const double bound = capture_bound(z0, 2.0, 1.0, l);
      const double dt = 5e-4;
      const auto [traj, report] = run_simple_motion(params, z0, spec, dt);
      CHECK(report.captured);
      CHECK(*report.capture_time <= bound * (1.0 + 1e-6) + dt);
      CHECK(report.budget_ok_u);
      CHECK(report.budget_ok_v);
      CHECK(report.invariant_violations.empty());
    }
  }
}

TEST_CASE("simple motion: preconditions") {
  EvaderSpec zero;
  CHECK_THROWS_AS(
      run_simple_motion(sm_params(2.0, 1.0, 0.0, 2), vec2(3, 0), zero, 0.1),
      StepTooCoarse);
  CHECK_THROWS_AS(
      run_simple_motion(sm_params(2.0, 1.0, 2.0, 2), vec2(1, 0), zero, 1e-4),
      InsideTerminal);
}

TEST_CASE("evader: realized energy normalization is exact") {
  EvaderSpec spec;
  spec.kind = EvaderKind::constant_decay;
  spec.decay = 1.0;
  spec.budget_fraction = 1.0;
  spec.direction = vec2(1, 0);
  const double sigma = 1.3;
  const double dt = 1e-3;
  const EvaderSignal sig = make_evader(spec, sigma, 10.0, 2, vec2(3, 0), dt);
  CHECK(sig.realized_energy() == doctest::Approx(sigma * sigma).epsilon(1e-14));
  // the zero-order-hold sum reproduces the closed-form normalization
  CHECK(realized_sum(sig, dt, 40.0) ==
        doctest::Approx(sigma * sigma).epsilon(1e-12));

  // fractional budget scales the energy
  spec.budget_fraction = 0.4;
  const EvaderSignal frac = make_evader(spec, sigma, 10.0, 2, vec2(3, 0), dt);
  CHECK(realized_sum(frac, dt, 40.0) ==
        doctest::Approx(0.4 * sigma * sigma).epsilon(1e-12));
}

TEST_CASE("evader: piecewise and seeded_random are admissible and reproducible") {
  for (EvaderKind kind : {EvaderKind::piecewise, EvaderKind::seeded_random}) {
    EvaderSpec spec;
    spec.kind = kind;
    spec.seed = 11;
    spec.budget_fraction = 1.0;
    const double sigma = 2.0, dt = 1e-3, horizon = 5.0;
    const EvaderSignal a = make_evader(spec, sigma, horizon, 2, vec2(3, 0), dt);
    const EvaderSignal b = make_evader(spec, sigma, horizon, 2, vec2(3, 0), dt);
    const double sum = realized_sum(a, dt, horizon);
    CHECK(sum <= sigma * sigma * (1.0 + 1e-12));
    CHECK(sum == doctest::Approx(sigma * sigma).epsilon(1e-10));
    for (Index k = 0; k < static_cast<Index>(horizon / dt); k += 97)
      CHECK((a.at_step(k) - b.at_step(k)).norm() == 0.0);

    EvaderSpec other = spec;
    other.seed = 12;
    const EvaderSignal c = make_evader(other, sigma, horizon, 2, vec2(3, 0), dt);
    bool differs = false;
    for (Index k = 0; k < static_cast<Index>(horizon / dt) && !differs; ++k)
      differs = (a.at_step(k) - c.at_step(k)).norm() > 0.0;
    CHECK(differs);
  }
}

TEST_CASE("evader: zero kind and spec guards") {
  EvaderSpec zero;
  const EvaderSignal sig = make_evader(zero, 2.0, 5.0, 2, vec2(1, 0), 1e-3);
  CHECK(sig.at_step(0).norm() == 0.0);
  CHECK(sig.realized_energy() == 0.0);

  EvaderSpec bad;
  bad.kind = EvaderKind::constant_decay;
  bad.decay = 0.0;
  CHECK_THROWS_AS(make_evader(bad, 1.0, 5.0, 2, vec2(1, 0), 1e-3), BadSpec);
  EvaderSpec over;
  over.budget_fraction = 1.5;
  CHECK_THROWS_AS(make_evader(over, 1.0, 5.0, 2, vec2(1, 0), 1e-3), BadSpec);
}

TEST_CASE("evader: radial flee closes the resolving-function gate") {
  // strong evader: delta = 0.39, flee speed shuts lambda off until it decays
  EvaderSpec flee;
  flee.kind = EvaderKind::radial_flee;
  flee.decay = 1.0;
  const SimpleMotionParams params = sm_params(2.0, 1.9, 0.0, 2);
  const auto [traj, report] = run_simple_motion(params, vec2(3, 0), flee, 0.05);
  CHECK(report.captured);
  CHECK(traj.lambda.front() == 0.0);  // gate closed at t = 0
  bool reopened = false;
  for (double lam : traj.lambda) reopened = reopened || lam > 0.0;
  CHECK(reopened);
  CHECK(report.invariant_violations.empty());
  // the evader's first sample points away from the pursuer
  CHECK(traj.v.front().dot(vec2(3, 0)) < 0.0);
}

TEST_CASE("damped-motion run: base example captures at theta") {
  EvaderSpec zero;
  PontryaginParams params;
  params.rho = 2.0;
  params.sigma = 1.0;
  params.n = 1;
  const PontryaginState z0 = scalar_state(1.0);
  const double theta = guaranteed_time_theta(params, z0);
  CHECK(theta == doctest::Approx(2.3055654735759826).epsilon(1e-10));

  const auto [traj, report] = run_pontryagin(params, z0, zero, theta / 5000.0);
  CHECK(report.captured);
  CHECK(report.final_miss < 1e-3);
  CHECK(*report.capture_time == doctest::Approx(theta));
  CHECK(report.budget_ok_u);
  CHECK(traj.count_events("mode_switch") == 1);
  CHECK(report.invariant_violations.empty());
  CHECK(traj.times.back() == doctest::Approx(theta).epsilon(1e-15));
}

TEST_CASE("damped-motion run: full-budget evader stays admissible") {
  EvaderSpec decay;
  decay.kind = EvaderKind::constant_decay;
  decay.decay = 0.8;
  decay.budget_fraction = 1.0;
  PontryaginParams params;
  params.rho = 2.0;
  params.sigma = 1.0;
  params.n = 1;
  const PontryaginState z0 = scalar_state(1.0);
  const double theta = guaranteed_time_theta(params, z0);
  const auto [traj, report] = run_pontryagin(params, z0, decay, theta / 5000.0);
  CHECK(report.captured);
  CHECK(report.final_miss < 1e-3 * 1.0);
  CHECK(report.budget_ok_u);
  CHECK(report.budget_ok_v);
  CHECK(traj.count_events("mode_switch") == 1);
  CHECK(report.invariant_violations.empty());
}

TEST_CASE("damped-motion run: sigma = 0 reduces to pure steering") {
  EvaderSpec zero;
  PontryaginParams params;
  params.rho = 2.0;
  params.sigma = 0.0;
  params.n = 1;
  const PontryaginState z0 = scalar_state(1.0, 0.2, 0.0);
  const auto [traj, report] = run_pontryagin(
      params, z0, zero, guaranteed_time_theta(params, z0) / 2000.0);
  CHECK(report.captured);
  CHECK(report.budget_ok_v);
  CHECK(traj.v_spent.back() == 0.0);
}

TEST_CASE("monitor: forged trajectory is flagged") {
  EvaderSpec zero;
  const SimpleMotionParams params = sm_params(2.0, 1.0, 0.0, 2);
  auto [traj, report] = run_simple_motion(params, vec2(3, 0), zero, 1e-3);
  REQUIRE(report.invariant_violations.empty());

  Trajectory forged = traj;
  for (auto& u : forged.u) u *= 2.0;
  const auto violations =
      monitor_invariants(forged, SimpleMotionRun{params, vec2(3, 0)});
  bool energy = false, budget = false;
  for (const auto& v : violations)
    energy = energy || v.find("energy identity") != std::string::npos;
  CHECK(energy);

  // doubled controls quadruple the spend: 4 * delta = 12 > rho^2 = 4
  Trajectory forged_budget = traj;
  for (auto& s : forged_budget.u_spent) s *= 4.0;
  const auto violations2 =
      monitor_invariants(forged_budget, SimpleMotionRun{params, vec2(3, 0)});
  for (const auto& v : violations2)
    budget = budget || v.find("exceeds rho^2") != std::string::npos;
  CHECK(budget);
}

TEST_CASE("determinism: identical runs are bitwise identical") {
  EvaderSpec spec;
  spec.kind = EvaderKind::seeded_random;
  spec.seed = 3;
  const SimpleMotionParams params = sm_params(2.0, 1.0, 0.5, 2);
  const auto [t1, r1] = run_simple_motion(params, vec2(3, 0), spec, 5e-4);
  const auto [t2, r2] = run_simple_motion(params, vec2(3, 0), spec, 5e-4);
  REQUIRE(t1.rows() == t2.rows());
  for (std::size_t k = 0; k < t1.rows(); ++k) {
    CHECK(t1.times[k] == t2.times[k]);
    CHECK((t1.z[k] - t2.z[k]).norm() == 0.0);
    CHECK((t1.u[k] - t2.u[k]).norm() == 0.0);
    CHECK(t1.lambda[k] == t2.lambda[k]);
    CHECK(t1.r[k] == t2.r[k]);
    CHECK(t1.u_spent[k] == t2.u_spent[k]);
  }
  CHECK(*r1.capture_time == *r2.capture_time);
}

}  // TEST_SUITE

#include "pursuit/pontryagin.hpp"

#include <cmath>

namespace pursuit {

double PontryaginParams::nu() const {
  return (c / b) * std::max(alpha / beta, 1.0);
}

double PontryaginParams::delta() const {
  const double g = nu();
  return rho * rho - sigma * sigma * g * g;
}

void PontryaginParams::validate() const {
  if (!(alpha > 0.0 && beta > 0.0 && b > 0.0 && c > 0.0))
    throw ValidationError("alpha, beta, b, c must be positive");
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be nonnegative");
  if (n < 1) throw ValidationError("geometric dimension n must be at least 1");
  if (!(rho > sigma * nu()))
    throw AssumptionViolated("need rho > sigma max{c alpha / (b beta), c / b}");
}

double alpha_fun(double alpha, double t) {
  if (alpha * t < 1e-8) return t * (1.0 - 0.5 * alpha * t);
  return -std::expm1(-alpha * t) / alpha;
}

double beta_fun(double beta, double t) { return alpha_fun(beta, t); }

double f_kernel(const PontryaginParams& params, double s) {
  const double ratio0 = params.c / params.b;
  if (s < 1e-12) return ratio0 * (1.0 + 0.5 * (params.alpha - params.beta) * s);
  const double num = -std::expm1(-params.beta * s);
  const double den = -std::expm1(-params.alpha * s);
  return ratio0 * (params.alpha / params.beta) * num / den;
}

double nu_closed(const PontryaginParams& params) { return params.nu(); }

VectorXd xi(const PontryaginParams& params, double t, const PontryaginState& z0) {
  return z0.z1 + alpha_fun(params.alpha, t) * z0.z2 -
         beta_fun(params.beta, t) * z0.z3;
}

double lambda_pontryagin(const PontryaginParams& params, double t, double tau,
                         const VectorXd& v, const PontryaginState& z0) {
  const VectorXd xi_t = xi(params, t, z0);
  const double xi_sq = xi_t.squaredNorm();
  if (xi_t.norm() < 1e-12)
    throw DegenerateXi("projected state xi(t, z0) vanishes");
  return switching_integrand(params, t, tau, v, xi_t) / xi_sq;
}

double I_alpha_sq(double alpha, double theta) {
  const double a = alpha;
  return (theta + 2.0 * std::expm1(-a * theta) / a -
          std::expm1(-2.0 * a * theta) / (2.0 * a)) /
         (a * a);
}

double guaranteed_time_theta(const PontryaginParams& params,
                             const PontryaginState& z0) {
  if (z0.z1.norm() == 0.0) throw DegenerateXi("z01 must be nonzero");
  const double delta = params.delta();
  if (!(delta > 0.0)) throw AssumptionViolated("delta must be positive");

  const double gain = (params.rho - params.sigma * params.nu()) * params.b;
  const auto residual = [&](double t) {
    return gain * std::sqrt(I_alpha_sq(params.alpha, t)) -
           xi(params, t, z0).norm();
  };

  // residual(0) = -|z01| < 0; scan forward for the first sign change.
  double lo = 0.0;
  double hi = 1e-3;
  while (residual(hi) < 0.0) {
    lo = hi;
    hi += std::max(1e-3, 0.01 * hi);
    if (hi > 1e6)
      throw NoRoot("no capture-time root within horizon 1e6; parameter pathology");
  }
  for (int i = 0; i < 200 && (hi - lo) > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double switching_integrand(const PontryaginParams& params, double T, double tau,
                           const VectorXd& v, const VectorXd& xi_T) {
  const double s = T - tau;
  const double aw = alpha_fun(params.alpha, s);
  const double bw = beta_fun(params.beta, s);
  return std::max(0.0, params.delta() * params.b * params.b * aw * aw +
                           2.0 * params.c * bw * v.dot(xi_T));
}

VectorXd approach_control(const PontryaginParams& params, double T, double tau,
                          const VectorXd& v, const VectorXd& xi_T,
                          double lambda11) {
  const double s = T - tau;
  const double ba = params.b * alpha_fun(params.alpha, s);
  return f_kernel(params, s) * v - (lambda11 / ba) * xi_T;
}

VectorXd neutralize_control(const PontryaginParams& params, double T,
                            double tau, const VectorXd& v) {
  return f_kernel(params, T - tau) * v;
}

ControlStep pursuer_control_pontryagin(const PontryaginParams& params, double T,
                                       double tau, const VectorXd& v,
                                       const PontryaginState& z0,
                                       double j_accum, double dt) {
  ControlStep step;
  if (tau >= T) {
    // alpha(0) = 0 would make the mode expressions singular; the simulator
    // never lands here, the guard returns the neutralize-mode limit.
    step.u = (params.c / params.b) * v;
    step.j_accum = j_accum;
    step.mode = PursuitMode::neutralize;
    return step;
  }
  const VectorXd xi_T = xi(params, T, z0);
  const double xi_sq = xi_T.squaredNorm();
  if (xi_T.norm() < 1e-12)
    throw DegenerateXi("projected state xi(T, z0) vanishes");

  const double g = switching_integrand(params, T, tau, v, xi_T);
  if (j_accum < xi_sq) {
    step.mode = PursuitMode::approach;
    step.u = approach_control(params, T, tau, v, xi_T, g / xi_sq);
  } else {
    step.mode = PursuitMode::neutralize;
    step.u = neutralize_control(params, T, tau, v);
  }
  step.j_accum = j_accum + g * dt;
  return step;
}

GameSpec make_pontryagin_game(const PontryaginParams& params) {
  params.validate();
  const Index n = params.n;
  const MatrixXd id = MatrixXd::Identity(n, n);
  const MatrixXd zero = MatrixXd::Zero(n, n);

  GameSpec game;
  game.A = MatrixXd::Zero(3 * n, 3 * n);
  game.A.block(0, n, n, n) = id;
  game.A.block(0, 2 * n, n, n) = -id;
  game.A.block(n, n, n, n) = -params.alpha * id;
  game.A.block(2 * n, 2 * n, n, n) = -params.beta * id;

  game.B = MatrixXd::Zero(3 * n, n);
  game.B.block(n, 0, n, n) = params.b * id;

  game.C = MatrixXd::Zero(3 * n, n);
  game.C.block(2 * n, 0, n, n) = -params.c * id;

  game.p = 2.0;
  game.rho = params.rho;
  game.sigma = params.sigma;

  game.terminal.l = 0.0;
  game.terminal.m0_basis = MatrixXd::Zero(3 * n, 2 * n);
  game.terminal.m0_basis.block(n, 0, 2 * n, 2 * n) =
      MatrixXd::Identity(2 * n, 2 * n);

  const double a = params.alpha, be = params.beta;
  game.fundamental_matrix = [n, a, be](double t) {
    MatrixXd e = MatrixXd::Identity(3 * n, 3 * n);
    const MatrixXd id_n = MatrixXd::Identity(n, n);
    e.block(0, n, n, n) = alpha_fun(a, t) * id_n;
    e.block(0, 2 * n, n, n) = -beta_fun(be, t) * id_n;
    e.block(n, n, n, n) = std::exp(-a * t) * id_n;
    e.block(2 * n, 2 * n, n, n) = std::exp(-be * t) * id_n;
    return e;
  };
  return game;
}

KernelF make_pontryagin_kernel(const PontryaginParams& params) {
  KernelF kernel;
  const Index n = params.n;
  kernel.provider = [params, n](double s) {
    return MatrixXd(f_kernel(params, s) * MatrixXd::Identity(n, n));
  };
  kernel.descriptor = "damped-motion scalar kernel";
  return kernel;
}

VectorXd stack_state(const PontryaginState& z0) {
  const Index n = z0.z1.size();
  VectorXd z(3 * n);
  z << z0.z1, z0.z2, z0.z3;
  return z;
}

ResolvingContext make_pontryagin_context(const PontryaginParams& params) {
  ResolvingContext ctx;
  ctx.game = make_pontryagin_game(params);
  ctx.pi = make_projector(3 * params.n, ctx.game.terminal.m0_basis);
  ctx.kernel = make_pontryagin_kernel(params);
  const double nu = params.nu();
  ctx.nu_p = nu * nu;
  return ctx;
}

}  // namespace pursuit

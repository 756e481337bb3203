#include "pursuit/simple_motion.hpp"

#include <cmath>

namespace pursuit {

void SimpleMotionParams::validate() const {
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be nonnegative");
  if (!(rho > sigma))
    throw ValidationError("rho must exceed sigma: " + std::to_string(rho) +
                          " <= " + std::to_string(sigma));
  if (!(l >= 0.0)) throw ValidationError("capture radius l must be nonnegative");
  if (n < 1) throw ValidationError("dimension n must be at least 1");
}

double lambda_l(const VectorXd& v, const VectorXd& z0, double delta, double l) {
  if (z0.norm() <= l) throw InsideTerminal("initial state inside terminal set");
  const double h = z0.squaredNorm() - l * l;
  const double p = delta + 2.0 * v.dot(z0);
  const double lam_star =
      (h * p + 2.0 * l * l * delta + 2.0 * l * (delta * z0 + h * v).norm()) /
      (h * h);
  return std::max(0.0, lam_star);
}

VectorXd pi_l_strategy_at(const VectorXd& v, const VectorXd& z0, double lambda,
                          double l) {
  if (z0.norm() <= l) throw InsideTerminal("initial state inside terminal set");
  if (lambda <= 0.0) return v;
  const VectorXd w = v - lambda * z0;
  const double wn = w.norm();
  if (wn < 1e-300) return v - lambda * z0;  // m = 0 selection; u = 0
  const VectorXd m = -(l / wn) * w;
  return v + lambda * (m - z0);
}

VectorXd pi_l_strategy(const VectorXd& v, const VectorXd& z0, double delta,
                       double l) {
  return pi_l_strategy_at(v, z0, lambda_l(v, z0, delta, l), l);
}

double lambda_I(const VectorXd& v, const VectorXd& z0, double delta) {
  if (z0.norm() == 0.0) throw InsideTerminal("initial state inside terminal set");
  return std::max(0.0, delta + 2.0 * v.dot(z0)) / z0.squaredNorm();
}

double capture_bound(const VectorXd& z0, double rho, double sigma, double l) {
  if (z0.norm() <= l) throw InsideTerminal("initial state inside terminal set");
  if (!(rho > sigma)) throw ValidationError("rho must exceed sigma");
  const double ratio = (z0.norm() - l) / (rho - sigma);
  return ratio * ratio;
}

Ball containment_ball(const VectorXd& x0, const VectorXd& y0, double rho,
                      double sigma) {
  const VectorXd z0 = x0 - y0;
  if (z0.norm() == 0.0) throw DegenerateStart("x0 and y0 coincide");
  const double delta = rho * rho - sigma * sigma;
  if (!(delta > 0.0)) throw ValidationError("rho must exceed sigma");
  Ball ball;
  ball.center = y0 - (sigma * sigma / delta) * z0;
  ball.radius = z0.norm() * rho * sigma / delta;
  return ball;
}

GameSpec make_simple_motion_game(const SimpleMotionParams& params) {
  params.validate();
  GameSpec game;
  game.A = MatrixXd::Zero(params.n, params.n);
  game.B = MatrixXd::Identity(params.n, params.n);
  game.C = MatrixXd::Identity(params.n, params.n);
  game.p = 2.0;
  game.rho = params.rho;
  game.sigma = params.sigma;
  game.terminal.l = params.l;
  game.terminal.m0_basis = MatrixXd(params.n, 0);
  game.fundamental_matrix = [n = params.n](double) {
    return MatrixXd(MatrixXd::Identity(n, n));
  };
  return game;
}

KernelF identity_kernel(Index n) {
  KernelF kernel;
  kernel.provider = [n](double) { return MatrixXd(MatrixXd::Identity(n, n)); };
  kernel.descriptor = "identity kernel";
  return kernel;
}

ResolvingContext make_simple_motion_context(const SimpleMotionParams& params) {
  ResolvingContext ctx;
  ctx.game = make_simple_motion_game(params);
  ctx.pi = make_projector(params.n, ctx.game.terminal.m0_basis);
  ctx.kernel = identity_kernel(params.n);
  ctx.nu_p = 1.0;
  return ctx;
}

}  // namespace pursuit

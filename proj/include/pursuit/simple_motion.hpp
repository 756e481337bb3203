#pragma once

#include <Eigen/Dense>

#include "pursuit/game_core.hpp"
#include "pursuit/resolving.hpp"

namespace pursuit {

/// Simple motions x' = u, y' = v with L2 energy radii rho > sigma and
/// l-capture termination |x - y| <= l.
struct SimpleMotionParams {
  double rho = 1.0;
  double sigma = 0.0;
  double l = 0.0;
  Index n = 2;

  double delta() const { return rho * rho - sigma * sigma; }
  void validate() const;
};

/// Closed-form resolving function for l-capture: with h = |z0|^2 - l^2,
///   lambda = max{0, (h (delta + 2<v,z0>) + 2 l^2 delta + 2 l |z0 delta + v h|) / h^2}.
/// Positive exactly when delta + 2<v,z0> + 2 l |v| > 0. Throws InsideTerminal
/// when |z0| <= l.
double lambda_l(const VectorXd& v, const VectorXd& z0, double delta, double l);

/// Parallel-approach counter-control
///   u = v + lambda (m - z0),  m = -l (v - lambda z0) / |v - lambda z0|,
/// which satisfies |u|^2 = |v|^2 + delta lambda. Returns u = v when lambda = 0.
VectorXd pi_l_strategy(const VectorXd& v, const VectorXd& z0, double delta,
                       double l);

/// Same construction evaluated at an explicitly supplied lambda value no
/// larger than lambda_l(v, z0); then |u|^2 <= |v|^2 + delta lambda. The
/// simulator uses this to spend exactly the remaining resource in the
/// capture step.
VectorXd pi_l_strategy_at(const VectorXd& v, const VectorXd& z0, double lambda,
                          double l);

/// Point-capture (l = 0) resolving function
///   lambda = max{0, delta + 2 <v, z0>} / |z0|^2.
double lambda_I(const VectorXd& v, const VectorXd& z0, double delta);

/// Guaranteed capture-time bound ((|z0| - l) / (rho - sigma))^2.
double capture_bound(const VectorXd& z0, double rho, double sigma, double l);

struct Ball {
  VectorXd center;
  double radius = 0.0;
};

/// Ball the evader cannot leave under the parallel-approach pursuit:
/// center y0 - sigma^2 z0 / delta, radius |z0| rho sigma / delta.
/// Throws DegenerateStart when x0 = y0.
Ball containment_ball(const VectorXd& x0, const VectorXd& y0, double rho,
                      double sigma);

/// The game z' = u - v (A = 0, B = C = I) with terminal ball of radius l.
GameSpec make_simple_motion_game(const SimpleMotionParams& params);

/// Constant identity kernel F(s) = I_n.
KernelF identity_kernel(Index n);

/// Game, projector, identity kernel and nu = 1 bundled for the numeric
/// resolving-function oracle.
ResolvingContext make_simple_motion_context(const SimpleMotionParams& params);

}  // namespace pursuit

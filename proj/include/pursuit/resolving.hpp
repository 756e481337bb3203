#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <string>

#include "pursuit/game_core.hpp"

namespace pursuit {

/// Kernel matrix F(s) from the solvability condition
/// pi e^{As} B F(s) = pi e^{As} C, supplied per game.
struct KernelF {
  std::function<MatrixXd(double)> provider;  ///< s >= 0 -> m x k matrix
  std::string descriptor;
};

/// One numeric evaluation of the resolving function.
struct ResolvingSample {
  double t = 0.0;
  double tau = 0.0;
  VectorXd v;
  VectorXd z0;
  double lambda = 0.0;            ///< resolved value, >= 0
  double margin_at_lambda = 0.0;  ///< feasibility margin at lambda
  int iterations = 0;             ///< bracket doublings + bisection steps
};

/// Estimate of nu^p = sup_s chi^p(s), the worst-case kernel gain.
struct NuEstimate {
  double nu_p = 0.0;    ///< estimated nu^p (operator-norm route)
  double horizon = 0.0;
  double argmax_s = 0.0;
};

/// Everything the support-function machinery needs: the game, the projector
/// onto L, the kernel F and the kernel gain nu^p that fixes the resource
/// margin delta = rho^p - sigma^p nu^p.
struct ResolvingContext {
  GameSpec game;
  Projector pi;
  KernelF kernel;
  double nu_p = 1.0;

  double delta() const {
    return std::pow(game.rho, game.p) - std::pow(game.sigma, game.p) * nu_p;
  }
};

/// Support function of U(t,tau,v,lambda) at a unit direction psi in L:
///   (|F(t-tau) v|^p + lambda delta)^{1/p} |B^T e^{A^T (t-tau)} pi^T psi|
///   - <pi e^{A (t-tau)} C v, psi>.
/// Requires |psi| = 1 within 1e-9, 0 <= tau <= t, lambda >= 0 and delta > 0
/// (AssumptionViolated otherwise).
double support_U(const ResolvingContext& ctx, double t, double tau,
                 const VectorXd& v, double lambda, const VectorXd& psi);

/// Minimum over unit psi in L of the support inequality
///   W_U(psi) + lambda (l |psi| + <psi, pi e^{tA} z0>);
/// nonnegative exactly when lambda is feasible. Throws UnsupportedDimension
/// when dim L > 3 and AlreadyCaptured when pi e^{tA} z0 already lies in the
/// terminal ball.
double feasibility_margin(const ResolvingContext& ctx, double t, double tau,
                          const VectorXd& v, const VectorXd& z0, double lambda);

/// Largest lambda >= 0 with nonnegative feasibility margin: geometric bracket
/// growth from 1 until infeasible, then bisection to absolute tolerance 1e-8.
/// Throws BracketNotFound after 60 doublings (unbounded feasible set signals
/// a mis-specified game).
ResolvingSample resolve_lambda_numeric(const ResolvingContext& ctx, double t,
                                       double tau, const VectorXd& v,
                                       const VectorXd& z0);

/// sup over s in [0, horizon] of the operator norm of F(s), raised to p,
/// from a dense grid refined by golden section around the best sample.
/// Requires horizon > 0 and n_samples >= 100; throws NonFinite when the
/// kernel evaluates to NaN or infinity on the grid.
NuEstimate estimate_nu(const KernelF& kernel, double p, double horizon,
                       int n_samples);

/// Minimizes a continuous function over the unit sphere of R^dim
/// (dim in {1, 2, 3}): sign check, angle scan plus golden section, or a
/// Fibonacci lattice refined by spherical coordinate descent.
double minimize_on_sphere(const std::function<double(const VectorXd&)>& f,
                          Index dim);

}  // namespace pursuit

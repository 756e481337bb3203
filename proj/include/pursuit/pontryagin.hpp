#pragma once

#include <Eigen/Dense>

#include "pursuit/game_core.hpp"
#include "pursuit/resolving.hpp"

namespace pursuit {

/// Second-order pursuer/evader dynamics with friction,
///   x'' + alpha x' = b u,   y'' + beta y' = c v,
/// reduced to the 3n-dimensional first-order game in z = (x - y, x', y').
struct PontryaginParams {
  double alpha = 1.0;
  double beta = 1.0;
  double b = 1.0;
  double c = 1.0;
  double rho = 1.0;
  double sigma = 0.0;
  Index n = 1;  ///< geometric dimension; state lives in R^{3n}

  double nu() const;                      ///< (c/b) max{alpha/beta, 1}
  double delta() const;                   ///< rho^2 - sigma^2 nu^2
  void validate() const;                  ///< positivity plus the rho > sigma nu gate
};

struct PontryaginState {
  VectorXd z1;  ///< x - y
  VectorXd z2;  ///< x'
  VectorXd z3;  ///< y'
};

/// (1 - e^{-alpha t}) / alpha, series-stable near t = 0.
double alpha_fun(double alpha, double t);
double beta_fun(double beta, double t);

/// Scalar kernel f(s) = c alpha (1 - e^{-beta s}) / (b beta (1 - e^{-alpha s})),
/// continued by its limit c/b at s = 0.
double f_kernel(const PontryaginParams& params, double s);

/// Closed-form kernel gain nu = (c/b) max{alpha/beta, 1}.
double nu_closed(const PontryaginParams& params);

/// Projected state xi(t, z0) = z01 + alpha(t) z02 - beta(t) z03.
VectorXd xi(const PontryaginParams& params, double t, const PontryaginState& z0);

/// Resolving function
///   max{0, delta b^2 alpha^2(t-tau) + 2 c beta(t-tau) <v, xi(t,z0)>} / |xi(t,z0)|^2.
/// Throws DegenerateXi when |xi(t,z0)| < 1e-12.
double lambda_pontryagin(const PontryaginParams& params, double t, double tau,
                         const VectorXd& v, const PontryaginState& z0);

/// int_0^theta alpha^2(s) ds in closed form.
double I_alpha_sq(double alpha, double theta);

/// First theta > 0 with |xi(theta, z0)| = (rho - sigma nu) b sqrt(I_alpha_sq(theta)),
/// located by a forward scan and bisection. Requires z01 != 0 and delta > 0.
double guaranteed_time_theta(const PontryaginParams& params,
                             const PontryaginState& z0);

enum class PursuitMode { approach, neutralize };

struct ControlStep {
  VectorXd u;
  double j_accum = 0.0;  ///< accumulated switching integral after this step
  PursuitMode mode = PursuitMode::approach;
};

/// Integrand of the switching equation,
///   max{0, delta b^2 alpha^2(T-tau) + 2 c beta(T-tau) <v, xi_T>}.
double switching_integrand(const PontryaginParams& params, double T, double tau,
                           const VectorXd& v, const VectorXd& xi_T);

/// Approach-mode control for a given resolving value lambda11 (the switching
/// integrand divided by |xi_T|^2):
///   u = f(T-tau) v - (lambda11 / (b alpha(T-tau))) xi_T.
VectorXd approach_control(const PontryaginParams& params, double T, double tau,
                          const VectorXd& v, const VectorXd& xi_T,
                          double lambda11);

/// Neutralize-mode control u = f(T-tau) v; at tau = T returns the limit (c/b) v.
VectorXd neutralize_control(const PontryaginParams& params, double T,
                            double tau, const VectorXd& v);

/// Two-mode pursuit control: approach while the accumulated switching
/// integral is below |xi(T,z0)|^2, neutralize afterwards. Adds the switching
/// integrand times dt to the accumulator.
ControlStep pursuer_control_pontryagin(const PontryaginParams& params, double T,
                                       double tau, const VectorXd& v,
                                       const PontryaginState& z0,
                                       double j_accum, double dt);

/// The 3n-dimensional game with the closed-form fundamental matrix attached.
GameSpec make_pontryagin_game(const PontryaginParams& params);

/// Kernel F(s) = f(s) I_n.
KernelF make_pontryagin_kernel(const PontryaginParams& params);

/// Stacks (z1, z2, z3) into one R^{3n} vector.
VectorXd stack_state(const PontryaginState& z0);

/// Game, projector, kernel and the closed-form nu^2 bundled for the numeric
/// resolving-function oracle.
ResolvingContext make_pontryagin_context(const PontryaginParams& params);

}  // namespace pursuit

#include "pursuit/resolving.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pursuit {

namespace {

constexpr double kMarginTol = 1e-10;
constexpr double kLambdaTol = 1e-8;

double golden_min(const std::function<double(double)>& h, double a, double b,
                  int iters = 140) {
  const double inv_phi = 0.6180339887498949;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = h(x1), f2 = h(x2);
  for (int i = 0; i < iters && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = h(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = h(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

VectorXd sphere_point_2d(double angle) {
  VectorXd p(2);
  p << std::cos(angle), std::sin(angle);
  return p;
}

VectorXd sphere_point_3d(double theta, double phi) {
  VectorXd p(3);
  p << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
      std::cos(theta);
  return p;
}

double operator_norm(const MatrixXd& m) {
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

double minimize_on_sphere(const std::function<double(const VectorXd&)>& f,
                          Index dim) {
  if (dim == 1) {
    VectorXd e(1);
    e << 1.0;
    return std::min(f(e), f(-e));
  }
  if (dim == 2) {
    const int n_scan = 720;
    double best_angle = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_scan; ++i) {
      const double a = 2.0 * M_PI * i / n_scan;
      const double val = f(sphere_point_2d(a));
      if (val < best) {
        best = val;
        best_angle = a;
      }
    }
    const double step = 2.0 * M_PI / n_scan;
    const double refined = golden_min(
        [&](double a) { return f(sphere_point_2d(a)); }, best_angle - step,
        best_angle + step);
    return std::min(best, f(sphere_point_2d(refined)));
  }
  if (dim == 3) {
    // Fibonacci lattice scan, then coordinate descent in (theta, phi).
    const int n_scan = 2000;
    const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
    double best = std::numeric_limits<double>::infinity();
    double best_theta = 0.0, best_phi = 0.0;
    for (int i = 0; i < n_scan; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / n_scan;
      const double theta = std::acos(std::clamp(z, -1.0, 1.0));
      const double phi = golden_angle * i;
      const double val = f(sphere_point_3d(theta, phi));
      if (val < best) {
        best = val;
        best_theta = theta;
        best_phi = phi;
      }
    }
    double theta = best_theta, phi = best_phi;
    double step = std::sqrt(4.0 * M_PI / n_scan);
    while (step > 1e-9) {
      bool improved = false;
      const double cand_theta[2] = {theta - step, theta + step};
      for (double th : cand_theta) {
        const double val = f(sphere_point_3d(th, phi));
        if (val < best) {
          best = val;
          theta = th;
          improved = true;
        }
      }
      const double cand_phi[2] = {phi - step, phi + step};
      for (double ph : cand_phi) {
        const double val = f(sphere_point_3d(theta, ph));
        if (val < best) {
          best = val;
          phi = ph;
          improved = true;
        }
      }
      if (!improved) step *= 0.5;
    }
    return best;
  }
  throw UnsupportedDimension("sphere search supports dim L in {1, 2, 3}");
}

double support_U(const ResolvingContext& ctx, double t, double tau,
                 const VectorXd& v, double lambda, const VectorXd& psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("support_U: psi must be a unit vector");
  if (!(tau >= 0.0 && tau <= t))
    throw std::invalid_argument("support_U: need 0 <= tau <= t");
  if (!(lambda >= 0.0))
    throw std::invalid_argument("support_U: lambda must be nonnegative");
  const double delta = ctx.delta();
  if (!(delta > 0.0))
    throw AssumptionViolated("resource margin delta = rho^p - sigma^p nu^p must be positive");

  const double s = t - tau;
  const auto [phi_b, phi_c] = projected_kernels(ctx.game, ctx.pi, s);
  const double fv = (ctx.kernel.provider(s) * v).norm();
  const double amp = std::pow(std::pow(fv, ctx.game.p) + lambda * delta, 1.0 / ctx.game.p);
  return amp * (phi_b.transpose() * psi).norm() - (phi_c * v).dot(psi);
}

double feasibility_margin(const ResolvingContext& ctx, double t, double tau,
                          const VectorXd& v, const VectorXd& z0,
                          double lambda) {
  const double delta = ctx.delta();
  if (!(delta > 0.0))
    throw AssumptionViolated("resource margin delta = rho^p - sigma^p nu^p must be positive");
  if (ctx.pi.dim_l > 3)
    throw UnsupportedDimension("sphere search supports dim L in {1, 2, 3}");

  const double l = ctx.game.terminal.l;
  const VectorXd g_full = ctx.pi.pi * fundamental(ctx.game, t) * z0;
  if (g_full.norm() <= l)
    throw AlreadyCaptured("pi e^{tA} z0 already lies in the terminal ball");

  const double s = t - tau;
  const auto [phi_b, phi_c] = projected_kernels(ctx.game, ctx.pi, s);
  // Work in orthonormal coordinates of L.
  const MatrixXd k_mat = phi_b.transpose() * ctx.pi.basis_l;  // m x dimL
  const VectorXd c_vec = ctx.pi.basis_l.transpose() * (phi_c * v);
  const VectorXd g = ctx.pi.basis_l.transpose() * g_full;
  const double fv = (ctx.kernel.provider(s) * v).norm();
  const double amp = std::pow(std::pow(fv, ctx.game.p) + lambda * delta, 1.0 / ctx.game.p);

  const auto margin = [&](const VectorXd& psi) {
    return amp * (k_mat * psi).norm() - c_vec.dot(psi) +
           lambda * (l + g.dot(psi));
  };
  return minimize_on_sphere(margin, ctx.pi.dim_l);
}

ResolvingSample resolve_lambda_numeric(const ResolvingContext& ctx, double t,
                                       double tau, const VectorXd& v,
                                       const VectorXd& z0) {
  ResolvingSample sample;
  sample.t = t;
  sample.tau = tau;
  sample.v = v;
  sample.z0 = z0;

  const auto margin = [&](double lambda) {
    return feasibility_margin(ctx, t, tau, v, z0, lambda);
  };

  int iterations = 0;
  double lo = 0.0;
  double lo_margin = margin(0.0);
  ++iterations;

  double hi = 1.0;
  double hi_margin = margin(hi);
  ++iterations;
  int doublings = 0;
  while (hi_margin >= -kMarginTol) {
    lo = hi;
    lo_margin = hi_margin;
    hi *= 2.0;
    if (++doublings > 60)
      throw BracketNotFound("feasible set unbounded after 60 doublings; game mis-specified");
    hi_margin = margin(hi);
    ++iterations;
  }

  while (hi - lo > kLambdaTol) {
    const double mid = 0.5 * (lo + hi);
    const double mid_margin = margin(mid);
    ++iterations;
    if (mid_margin >= -kMarginTol) {
      lo = mid;
      lo_margin = mid_margin;
    } else {
      hi = mid;
    }
  }

  sample.lambda = lo;
  sample.margin_at_lambda = lo_margin;
  sample.iterations = iterations;
  return sample;
}

NuEstimate estimate_nu(const KernelF& kernel, double p, double horizon,
                       int n_samples) {
  if (!(horizon > 0.0))
    throw std::invalid_argument("estimate_nu: horizon must be positive");
  if (n_samples < 100)
    throw std::invalid_argument("estimate_nu: need at least 100 samples");

  double best = -1.0;
  int best_idx = 0;
  for (int i = 0; i < n_samples; ++i) {
    const double s = horizon * i / (n_samples - 1);
    const MatrixXd f = kernel.provider(s);
    if (!f.allFinite())
      throw NonFinite("kernel evaluates to NaN or infinity at s = " + std::to_string(s));
    const double norm = operator_norm(f);
    if (norm > best) {
      best = norm;
      best_idx = i;
    }
  }
  const double ds = horizon / (n_samples - 1);
  const double a = std::max(0.0, horizon * best_idx / (n_samples - 1) - ds);
  const double b = std::min(horizon, horizon * best_idx / (n_samples - 1) + ds);
  const double refined = golden_min(
      [&](double s) { return -operator_norm(kernel.provider(s)); }, a, b);
  const double refined_norm = operator_norm(kernel.provider(refined));

  NuEstimate est;
  est.horizon = horizon;
  if (refined_norm > best) {
    est.argmax_s = refined;
    est.nu_p = std::pow(refined_norm, p);
  } else {
    est.argmax_s = horizon * best_idx / (n_samples - 1);
    est.nu_p = std::pow(best, p);
  }
  return est;
}

}  // namespace pursuit

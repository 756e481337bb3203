#include "pursuit/game_core.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace pursuit {

void GameSpec::validate() const {
  if (!(p > 1.0)) throw ValidationError("p must exceed 1");
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  if (!(sigma >= 0.0)) throw ValidationError("sigma must be nonnegative");
  if (A.rows() != A.cols()) throw ValidationError("A must be square");
  if (B.rows() != A.rows()) throw ValidationError("B row count must match A");
  if (C.rows() != A.rows()) throw ValidationError("C row count must match A");
  if (terminal.l < 0.0) throw ValidationError("terminal radius l must be nonnegative");
  if (terminal.m0_basis.size() > 0 && terminal.m0_basis.rows() != A.rows())
    throw ValidationError("terminal basis vectors must have length n");
}

Projector make_projector(Index n, const MatrixXd& m0_basis) {
  Projector proj;
  const Index r = m0_basis.size() == 0 ? 0 : m0_basis.cols();
  if (r == 0) {
    proj.pi = MatrixXd::Identity(n, n);
    proj.dim_l = n;
    proj.basis_l = MatrixXd::Identity(n, n);
    return proj;
  }
  if (m0_basis.rows() != n) throw DegenerateBasis("basis vectors must have length n");
  if (r > n) throw DegenerateBasis("more basis vectors than ambient dimension");

  Eigen::JacobiSVD<MatrixXd> svd(m0_basis, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double tol = 1e-10 * std::max(1.0, sv(0));
  if (sv(r - 1) < tol)
    throw DegenerateBasis("basis vectors linearly dependent beyond tolerance 1e-10");

  const MatrixXd u0 = svd.matrixU().leftCols(r);  // orthonormal span of M0
  proj.pi = MatrixXd::Identity(n, n) - u0 * u0.transpose();
  proj.dim_l = n - r;
  proj.basis_l = svd.matrixU().rightCols(n - r);
  return proj;
}

MatrixXd fundamental(const GameSpec& game, double t) {
  if (game.fundamental_matrix) return game.fundamental_matrix(t);
  return (game.A * t).exp();
}

std::pair<MatrixXd, MatrixXd> projected_kernels(const GameSpec& game,
                                                const Projector& pi, double s) {
  if (s < 0.0) throw std::invalid_argument("projected_kernels: s must be nonnegative");
  const MatrixXd e = fundamental(game, s);
  return {pi.pi * e * game.B, pi.pi * e * game.C};
}

BudgetLedger budget_spend(const BudgetLedger& ledger, double speed_p, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("budget_spend: dt must be positive");
  if (!(speed_p >= 0.0)) throw std::invalid_argument("budget_spend: speed_p must be nonnegative");
  BudgetLedger out = ledger;
  out.spent_p += speed_p * dt;
  return out;
}

}  // namespace pursuit

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <utility>

#include "pursuit/errors.hpp"

namespace pursuit {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Terminal set M = M0 + M1: a linear subspace M0 plus the origin-centered
/// closed ball of radius l inside the orthogonal complement L of M0.
struct TerminalSet {
  MatrixXd m0_basis;  ///< n x r, columns span M0 (r == 0 means M0 = {0})
  double l = 0.0;     ///< ball radius of M1 in L, l >= 0
};

/// Linear pursuit game  z' = A z + B u - C v  with energy constraints
/// int |u|^p <= rho^p and int |v|^p <= sigma^p.
struct GameSpec {
  MatrixXd A;  ///< n x n
  MatrixXd B;  ///< n x m
  MatrixXd C;  ///< n x k
  double p = 2.0;
  double rho = 1.0;
  double sigma = 0.0;
  TerminalSet terminal;

  /// Optional closed-form fundamental matrix t -> e^{tA}. When unset the
  /// generic scaling-and-squaring path is used.
  std::function<MatrixXd(double)> fundamental_matrix;

  Index n() const { return A.rows(); }
  Index m() const { return B.cols(); }
  Index k() const { return C.cols(); }

  /// Checks exponent, radii and matrix shape consistency.
  void validate() const;
};

/// Orthogonal projector onto L = (M0)^perp.
struct Projector {
  MatrixXd pi;       ///< n x n, satisfies pi^2 = pi and pi = pi^T
  Index dim_l = 0;   ///< dim L = n - rank(M0)
  MatrixXd basis_l;  ///< n x dim_l, orthonormal columns spanning L
};

/// Running integral of |w(t)|^p against a cap (rho^p or sigma^p).
struct BudgetLedger {
  double p = 2.0;
  double cap_p = 0.0;
  double spent_p = 0.0;

  /// Non-fatal overdraft signal; simulators record it as a violation.
  bool exceeded() const { return spent_p > cap_p * (1.0 + 1e-9); }
  /// Admissibility with the discretization tolerance.
  bool admissible(double rel_tol = 1e-6) const {
    return spent_p <= cap_p * (1.0 + rel_tol);
  }
};

/// Orthogonal projector onto the orthogonal complement of span(m0_basis).
/// m0_basis is n x r with r >= 0. Throws DegenerateBasis when the columns
/// are linearly dependent beyond tolerance 1e-10.
Projector make_projector(Index n, const MatrixXd& m0_basis);

/// e^{tA}: closed-form provider when the game registers one, otherwise
/// scaling-and-squaring.
MatrixXd fundamental(const GameSpec& game, double t);

/// Projected kernels (pi e^{As} B, pi e^{As} C) for s >= 0. Rows live in L.
std::pair<MatrixXd, MatrixXd> projected_kernels(const GameSpec& game,
                                                const Projector& pi, double s);

/// Left-endpoint spend: adds speed_p * dt to the ledger. Requires dt > 0 and
/// speed_p >= 0. Overdraft is reported through BudgetLedger::exceeded(), not
/// as an exception.
BudgetLedger budget_spend(const BudgetLedger& ledger, double speed_p,
                          double dt);

}  // namespace pursuit

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "corrca/regularization.hpp"

namespace corrca {

/// Solution of the symmetric-definite generalized eigenproblem
/// A V = B V Lambda, eigenvalues descending, columns scaled to v' B v = 1
/// (B the possibly-regularized matrix). Sign: the largest-magnitude entry
/// of B v (the forward-model column under this scaling) is positive.
struct GeneralizedEigenDecomposition {
  Eigen::MatrixXd vectors;     // D x J
  Eigen::VectorXd eigenvalues; // J, descending
  Eigen::Index rank_used = 0;  // effective dimension K <= D
  Regularization regularization;
  /// Components whose eigenvalue sits within relative gap < 1e-10 of a
  /// neighbour; such components span a joint subspace and can mix
  /// arbitrarily, so tests should compare subspaces, not vectors.
  std::vector<bool> degenerate;
  std::vector<std::string> warnings;
};

/// Cholesky-reduction solve: B = L L', M = L^-1 A L^-T, symmetric
/// eigendecomposition of M, V = L^-T U.
/// Requires B positive definite (min eigenvalue > 1e-12 * trace/D);
/// otherwise throws NumericalError telling the caller to regularize.
GeneralizedEigenDecomposition generalized_eig(const Eigen::MatrixXd& a,
                                              const Eigen::MatrixXd& b);

/// TSVD-regularized solve: B is replaced by its top-k eigenpair
/// reconstruction. The problem is solved inside the retained k-dimensional
/// basis and mapped back, so components have no projection onto the
/// discarded eigenvectors of B. k above the numerical rank of B is shrunk
/// to the rank with a warning.
GeneralizedEigenDecomposition generalized_eig_tsvd(const Eigen::MatrixXd& a,
                                                   const Eigen::MatrixXd& b, int k);

/// (1-gamma) * b + gamma * mean_eigenvalue * I, gamma in [0, 1]. Leaves the
/// generalized eigenvalue routine itself untouched.
Eigen::MatrixXd shrink_matrix(const Eigen::MatrixXd& b, double gamma);

/// Solves A v = lambda B v restricted to span(basis), where
/// basis' B basis = diag(b_diag) with strictly positive entries. Vectors are
/// mapped back to the original coordinates. This is the null-space handling
/// shared by TSVD and the per-block regularized MCCA solve.
GeneralizedEigenDecomposition generalized_eig_in_subspace(const Eigen::MatrixXd& a,
                                                          const Eigen::MatrixXd& basis,
                                                          const Eigen::VectorXd& b_diag);

/// Dispatch on a regularization descriptor: none -> generalized_eig,
/// tsvd(k) -> generalized_eig_tsvd, shrinkage(gamma) -> generalized_eig on
/// the shrunk matrix.
GeneralizedEigenDecomposition generalized_eig_regularized(const Eigen::MatrixXd& a,
                                                          const Eigen::MatrixXd& b,
                                                          const Regularization& reg);

}  // namespace corrca

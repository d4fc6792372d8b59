#include "corrca/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "corrca/errors.hpp"

namespace corrca {

namespace {

constexpr double kDegenerateGap = 1e-10;
constexpr double kRankTolerance = 1e-12;

void check_square_symmetric(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() != m.cols())
    throw DimensionError(std::string(name) + " must be square");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    throw ArgumentError(std::string(name) + " is not symmetric (max asymmetry " +
                        std::to_string(asym) + ")");
}

/// Solves M U = U Lambda for symmetric M and maps back through `back`
/// (V = back * U), producing the descending-sorted, sign-fixed
/// decomposition. `b_for_sign` supplies B v for the sign convention.
GeneralizedEigenDecomposition finish_solve(const Eigen::MatrixXd& m,
                                           const Eigen::MatrixXd& back,
                                           const Eigen::MatrixXd& b_for_sign) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success)
    throw NumericalError("symmetric eigendecomposition failed to converge");

  const Eigen::Index j = m.rows();
  GeneralizedEigenDecomposition out;
  out.vectors.resize(back.rows(), j);
  out.eigenvalues.resize(j);

  // Eigen returns ascending order; reverse to descending.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(j));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::reverse(order.begin(), order.end());

  for (Eigen::Index c = 0; c < j; ++c) {
    out.eigenvalues[c] = es.eigenvalues()[order[static_cast<std::size_t>(c)]];
    out.vectors.col(c) = back * es.eigenvectors().col(order[static_cast<std::size_t>(c)]);
  }

  // Sign convention: largest-magnitude entry of the forward-model column
  // B v must be positive.
  for (Eigen::Index c = 0; c < j; ++c) {
    const Eigen::VectorXd fwd = b_for_sign * out.vectors.col(c);
    Eigen::Index imax = 0;
    fwd.cwiseAbs().maxCoeff(&imax);
    if (fwd[imax] < 0.0) out.vectors.col(c) = -out.vectors.col(c);
  }

  // Deterministic order for exactly equal eigenvalues: compare sign-fixed
  // coordinates, first differing coordinate descending.
  for (Eigen::Index c = 0; c + 1 < j; ++c) {
    Eigen::Index e = c;
    while (e + 1 < j && out.eigenvalues[e + 1] == out.eigenvalues[c]) ++e;
    if (e == c) continue;
    std::vector<Eigen::Index> tied(static_cast<std::size_t>(e - c + 1));
    std::iota(tied.begin(), tied.end(), c);
    std::sort(tied.begin(), tied.end(), [&](Eigen::Index lhs, Eigen::Index rhs) {
      for (Eigen::Index r = 0; r < out.vectors.rows(); ++r) {
        if (out.vectors(r, lhs) != out.vectors(r, rhs))
          return out.vectors(r, lhs) > out.vectors(r, rhs);
      }
      return false;
    });
    Eigen::MatrixXd cols = out.vectors.middleCols(c, e - c + 1);
    for (std::size_t t = 0; t < tied.size(); ++t)
      out.vectors.col(c + static_cast<Eigen::Index>(t)) = cols.col(tied[t] - c);
    c = e;
  }

  out.degenerate.assign(static_cast<std::size_t>(j), false);
  const double lam_scale = std::max(out.eigenvalues.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index c = 0; c + 1 < j; ++c) {
    if (std::abs(out.eigenvalues[c] - out.eigenvalues[c + 1]) < kDegenerateGap * lam_scale) {
      out.degenerate[static_cast<std::size_t>(c)] = true;
      out.degenerate[static_cast<std::size_t>(c) + 1] = true;
    }
  }
  return out;
}

}  // namespace

GeneralizedEigenDecomposition generalized_eig(const Eigen::MatrixXd& a,
                                              const Eigen::MatrixXd& b) {
  check_square_symmetric(a, "a");
  check_square_symmetric(b, "b");
  if (a.rows() != b.rows()) throw DimensionError("a and b must have the same dimension");
  const Eigen::Index d = b.rows();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bes(0.5 * (b + b.transpose()),
                                                     Eigen::EigenvaluesOnly);
  const double min_eig = bes.eigenvalues().minCoeff();
  const double pd_floor = 1e-12 * b.trace() / static_cast<double>(d);
  if (!(min_eig > pd_floor))
    throw NumericalError(
        "matrix b is not positive definite (min eigenvalue " + std::to_string(min_eig) +
        "); regularize with tsvd:K or shrinkage:GAMMA");

  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (b + b.transpose()));
  if (llt.info() != Eigen::Success)
    throw NumericalError("Cholesky factorization of b failed; regularize with tsvd or shrinkage");

  const Eigen::MatrixXd l = llt.matrixL();
  // M = L^-1 A L^-T
  Eigen::MatrixXd m = l.triangularView<Eigen::Lower>().solve(a);
  m = l.triangularView<Eigen::Lower>().solve(m.transpose().eval());
  // back-map V = L^-T U
  Eigen::MatrixXd back =
      l.transpose().triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(d, d));

  auto out = finish_solve(m, back, b);
  out.rank_used = d;
  out.regularization = Regularization::none();
  return out;
}

GeneralizedEigenDecomposition generalized_eig_tsvd(const Eigen::MatrixXd& a,
                                                   const Eigen::MatrixXd& b, int k) {
  check_square_symmetric(a, "a");
  check_square_symmetric(b, "b");
  if (a.rows() != b.rows()) throw DimensionError("a and b must have the same dimension");
  const Eigen::Index d = b.rows();
  if (k < 1 || k > d)
    throw ArgumentError("tsvd rank k must lie in [1, D], got " + std::to_string(k));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> bes(0.5 * (b + b.transpose()));
  if (bes.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of b failed to converge");

  // Descending eigenpairs of b.
  Eigen::VectorXd lam(d);
  Eigen::MatrixXd u(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    lam[i] = bes.eigenvalues()[d - 1 - i];
    u.col(i) = bes.eigenvectors().col(d - 1 - i);
  }

  const double lam_max = std::max(lam[0], 0.0);
  Eigen::Index rank = 0;
  while (rank < d && lam[rank] > kRankTolerance * lam_max) ++rank;
  if (rank == 0) throw NumericalError("matrix b is numerically zero; nothing to retain");

  std::vector<std::string> warnings;
  Eigen::Index keff = std::min<Eigen::Index>(k, rank);
  if (keff < k)
    warnings.push_back("tsvd rank shrunk from " + std::to_string(k) + " to numerical rank " +
                       std::to_string(keff));

  auto out = generalized_eig_in_subspace(a, u.leftCols(keff), lam.head(keff));
  out.rank_used = keff;
  out.regularization = Regularization::tsvd(static_cast<int>(keff));
  out.warnings = std::move(warnings);
  return out;
}

GeneralizedEigenDecomposition generalized_eig_in_subspace(const Eigen::MatrixXd& a,
                                                          const Eigen::MatrixXd& basis,
                                                          const Eigen::VectorXd& b_diag) {
  if (basis.rows() != a.rows() || basis.cols() != b_diag.size())
    throw DimensionError("basis shape does not match a / b_diag");
  if (!(b_diag.minCoeff() > 0.0))
    throw NumericalError("retained subspace carries non-positive b eigenvalues");

  // Reduced problem: (basis' A basis) w = mu diag(b_diag) w.
  const Eigen::MatrixXd a_red = basis.transpose() * a * basis;
  const Eigen::VectorXd inv_sqrt = b_diag.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd m = inv_sqrt.asDiagonal() * a_red * inv_sqrt.asDiagonal();
  const Eigen::MatrixXd back = basis * inv_sqrt.asDiagonal();
  const Eigen::MatrixXd b_tilde = basis * b_diag.asDiagonal() * basis.transpose();

  auto out = finish_solve(m, back, b_tilde);
  out.rank_used = b_diag.size();
  return out;
}

Eigen::MatrixXd shrink_matrix(const Eigen::MatrixXd& b, double gamma) {
  check_square_symmetric(b, "b");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw ArgumentError("shrinkage gamma must lie in [0,1], got " + std::to_string(gamma));
  const double mean_eig = b.trace() / static_cast<double>(b.rows());
  return (1.0 - gamma) * b +
         gamma * mean_eig * Eigen::MatrixXd::Identity(b.rows(), b.cols());
}

GeneralizedEigenDecomposition generalized_eig_regularized(const Eigen::MatrixXd& a,
                                                          const Eigen::MatrixXd& b,
                                                          const Regularization& reg) {
  switch (reg.kind) {
    case Regularization::Kind::tsvd:
      return generalized_eig_tsvd(a, b, reg.tsvd_rank);
    case Regularization::Kind::shrinkage: {
      auto out = generalized_eig(a, shrink_matrix(b, reg.shrink_gamma));
      out.regularization = reg;
      return out;
    }
    case Regularization::Kind::none:
    default:
      return generalized_eig(a, b);
  }
}

}  // namespace corrca

#include "corrca/mcca.hpp"

#include <cmath>

#include "corrca/corrca.hpp"
#include "corrca/errors.hpp"

namespace corrca {

namespace {

constexpr double kRankTolerance = 1e-12;

struct BlockEig {
  Eigen::MatrixXd vectors;  // descending
  Eigen::VectorXd values;
};

BlockEig block_eig(const Eigen::MatrixXd& blk) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blk);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of a repetition covariance failed");
  const Eigen::Index d = blk.rows();
  BlockEig out;
  out.vectors.resize(d, d);
  out.values.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    out.values[i] = es.eigenvalues()[d - 1 - i];
    out.vectors.col(i) = es.eigenvectors().col(d - 1 - i);
  }
  return out;
}

}  // namespace

MCCAModel fit_mcca(const DataTensor& x, const Regularization& reg) {
  const DataTensor centered = center_per_repetition(x);
  const CrossCovarianceBlocks blocks = cross_covariance_blocks(centered);
  const Eigen::Index d = blocks.d_features;
  const Eigen::Index n = blocks.n_reps;

  GeneralizedEigenDecomposition ged;
  std::vector<std::string> warnings;

  switch (reg.kind) {
    case Regularization::Kind::none: {
      for (Eigen::Index l = 0; l < n; ++l) {
        const Eigen::MatrixXd blk = blocks.d_block.block(l * d, l * d, d, d);
        const auto eig = block_eig(blk);
        if (!(eig.values.minCoeff() > 1e-12 * blk.trace() / static_cast<double>(d)))
          throw NumericalError("covariance of repetition " + std::to_string(l) +
                               " is not positive definite; regularize with tsvd:K or "
                               "shrinkage:GAMMA");
      }
      ged = generalized_eig(blocks.r_full, blocks.d_block);
      break;
    }
    case Regularization::Kind::shrinkage: {
      Eigen::MatrixXd d_shrunk = Eigen::MatrixXd::Zero(n * d, n * d);
      for (Eigen::Index l = 0; l < n; ++l)
        d_shrunk.block(l * d, l * d, d, d) =
            shrink_matrix(blocks.d_block.block(l * d, l * d, d, d), reg.shrink_gamma);
      ged = generalized_eig(blocks.r_full, d_shrunk);
      ged.regularization = reg;
      break;
    }
    case Regularization::Kind::tsvd: {
      // Retained basis assembled block by block; each repetition keeps its
      // own top-k eigenspace of R^ll.
      if (reg.tsvd_rank < 1 || reg.tsvd_rank > d)
        throw ArgumentError("tsvd rank must lie in [1, D]");
      std::vector<BlockEig> eigs;
      Eigen::Index total = 0;
      std::vector<Eigen::Index> keffs;
      for (Eigen::Index l = 0; l < n; ++l) {
        auto eig = block_eig(blocks.d_block.block(l * d, l * d, d, d));
        Eigen::Index rank = 0;
        const double lam_max = std::max(eig.values[0], 0.0);
        while (rank < d && eig.values[rank] > kRankTolerance * lam_max) ++rank;
        if (rank == 0)
          throw NumericalError("covariance of repetition " + std::to_string(l) +
                               " is numerically zero");
        const Eigen::Index keff = std::min<Eigen::Index>(reg.tsvd_rank, rank);
        if (keff < reg.tsvd_rank)
          warnings.push_back("repetition " + std::to_string(l) + ": tsvd rank shrunk from " +
                             std::to_string(reg.tsvd_rank) + " to numerical rank " +
                             std::to_string(keff));
        keffs.push_back(keff);
        total += keff;
        eigs.push_back(std::move(eig));
      }
      Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n * d, total);
      Eigen::VectorXd b_diag(total);
      Eigen::Index col = 0;
      for (Eigen::Index l = 0; l < n; ++l) {
        const Eigen::Index keff = keffs[static_cast<std::size_t>(l)];
        basis.block(l * d, col, d, keff) =
            eigs[static_cast<std::size_t>(l)].vectors.leftCols(keff);
        b_diag.segment(col, keff) = eigs[static_cast<std::size_t>(l)].values.head(keff);
        col += keff;
      }
      ged = generalized_eig_in_subspace(blocks.r_full, basis, b_diag);
      ged.regularization = reg;
      break;
    }
  }

  MCCAModel model;
  const Eigen::Index j = ged.vectors.cols();
  model.backward_per_rep.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < n; ++l)
    model.backward_per_rep.push_back(ged.vectors.middleRows(l * d, d));
  model.eigenvalues = ged.eigenvalues;
  model.isc = (ged.eigenvalues.array() - 1.0) / static_cast<double>(n - 1);
  model.regularization = ged.regularization;
  model.j_components = j;
  model.t_samples = x.t_samples();
  model.d_features = d;
  model.n_reps = n;
  model.degenerate = std::move(ged.degenerate);
  for (auto& w : ged.warnings) warnings.push_back(std::move(w));
  model.warnings = std::move(warnings);
  return model;
}

ComponentTensor transform_mcca(const DataTensor& x, const MCCAModel& model) {
  if (x.d_features() != model.d_features)
    throw DimensionError("tensor has " + std::to_string(x.d_features()) +
                         " features, model expects " + std::to_string(model.d_features));
  if (x.n_reps() != model.n_reps)
    throw DimensionError("tensor has " + std::to_string(x.n_reps()) +
                         " repetitions, model has projections for " +
                         std::to_string(model.n_reps) +
                         " (MCCA defines no projection for unseen repetitions)");
  std::vector<Eigen::MatrixXd> reps;
  reps.reserve(static_cast<std::size_t>(x.n_reps()));
  for (Eigen::Index l = 0; l < x.n_reps(); ++l)
    reps.push_back(x.rep(l) * model.backward_per_rep[static_cast<std::size_t>(l)]);
  return ComponentTensor(std::move(reps));
}

std::vector<Eigen::MatrixXd> mcca_forward_models(const MCCAModel& model, const DataTensor& x,
                                                 Eigen::Index j_count) {
  if (j_count < 1 || j_count > std::min(model.j_components, model.d_features))
    throw ArgumentError("forward models are defined for 1..min(J, D) leading components");
  const DataTensor centered = center_per_repetition(x);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(model.n_reps));
  for (Eigen::Index l = 0; l < model.n_reps; ++l) {
    const Eigen::MatrixXd& c = centered.rep(l);
    const Eigen::MatrixXd r_ll = c.transpose() * c;
    const Eigen::MatrixXd v =
        model.backward_per_rep[static_cast<std::size_t>(l)].leftCols(j_count);
    out.push_back(forward_model(v, r_ll));
  }
  return out;
}

}  // namespace corrca

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "corrca/covariance.hpp"
#include "corrca/eigensolve.hpp"
#include "corrca/tensor.hpp"

namespace corrca {

/// Multi-set CCA fit: one projection matrix per repetition, obtained from
/// the block generalized eigenproblem R v = lambda D v over stacked
/// ND-dimensional vectors. isc = (lambda - 1) / (N - 1).
/// Only data from the training repetitions can be transformed; there is no
/// defined projection for an unseen repetition.
struct MCCAModel {
  std::vector<Eigen::MatrixXd> backward_per_rep;  // N matrices, D x J
  Eigen::VectorXd eigenvalues;                    // J, descending
  Eigen::VectorXd isc;                            // (lambda - 1) / (N - 1)
  Regularization regularization;
  Eigen::Index j_components = 0;
  Eigen::Index t_samples = 0;
  Eigen::Index d_features = 0;
  Eigen::Index n_reps = 0;
  std::vector<bool> degenerate;
  std::vector<std::string> warnings;
};

/// Fits MCCA. Regularization is applied to the block-diagonal matrix D one
/// block at a time (TSVD retains each repetition's top-k eigenspace;
/// shrinkage blends each block towards its own mean eigenvalue). Without
/// regularization every per-repetition covariance must be positive
/// definite; the error names the offending repetition.
MCCAModel fit_mcca(const DataTensor& x, const Regularization& reg = Regularization::none());

/// y^l = x^l V^l: each repetition is projected with its own matrix.
ComponentTensor transform_mcca(const DataTensor& x, const MCCAModel& model);

/// Per-repetition forward models A^l = R^ll V^l (V^l' R^ll V^l)^-1 for the
/// leading `j_count` components (at most D per repetition).
std::vector<Eigen::MatrixXd> mcca_forward_models(const MCCAModel& model, const DataTensor& x,
                                                 Eigen::Index j_count);

}  // namespace corrca

#pragma once

#include <Eigen/Dense>

#include "corrca/tensor.hpp"

namespace corrca {

/// Within / between / total covariance of a tensor. All matrices are
/// unnormalized sums of outer products (common scaling factors omitted);
/// the ISC is a ratio, so the convention cancels. r_t = r_b + r_w.
struct CovariancePair {
  Eigen::MatrixXd r_w;
  Eigen::MatrixXd r_b;
  Eigen::MatrixXd r_t;
  Eigen::Index t_samples = 0;
  Eigen::Index n_reps = 0;
};

/// LDA scatter matrices, with sample index i as the class and repetition l
/// as the exemplar. s_t = s_b + s_w; s_m is the covariance of the
/// per-repetition sample means (zero for per-repetition-centered data).
struct ScatterSet {
  Eigen::MatrixXd s_t;
  Eigen::MatrixXd s_b;
  Eigen::MatrixXd s_w;
  Eigen::MatrixXd s_m;
  Eigen::Index t_samples = 0;
  Eigen::Index n_reps = 0;
};

/// Full ND x ND cross-covariance block matrix and its block-diagonal part.
/// Block (l, k) is the D x D cross-covariance of repetitions l and k about
/// their own sample means.
struct CrossCovarianceBlocks {
  Eigen::MatrixXd r_full;   // ND x ND, blocks R^{lk}
  Eigen::MatrixXd d_block;  // ND x ND, diag blocks R^{ll}, zeros elsewhere
  Eigen::Index d_features = 0;
  Eigen::Index n_reps = 0;

  Eigen::Block<const Eigen::MatrixXd> block(Eigen::Index l, Eigen::Index k) const {
    return r_full.block(l * d_features, k * d_features, d_features, d_features);
  }
};

/// Sum over repetitions of squared deviations from the per-repetition mean.
Eigen::MatrixXd within_covariance(const DataTensor& x);

/// Sum over all ordered pairs (l, k), l != k, of deviation cross-products.
/// O(N^2) reference path; covariance_pair obtains the same matrix without
/// the pairwise loop.
Eigen::MatrixXd between_covariance_direct(const DataTensor& x);

/// N^2 * sum_i of outer products of the across-repetition mean about the
/// grand mean. O(T D^2 N): no pair of repetitions is ever correlated
/// explicitly.
Eigen::MatrixXd total_covariance_fast(const DataTensor& x);

/// r_w directly, r_t via the fast path, r_b = r_t - r_w.
CovariancePair covariance_pair(const DataTensor& x);

ScatterSet scatter_set(const DataTensor& x);

CrossCovarianceBlocks cross_covariance_blocks(const DataTensor& x);

}  // namespace corrca

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "corrca/tensor.hpp"

namespace corrca {

/// Kernel used to lift samples into the implicit feature space, applied to
/// each time point separately (the time axis is kept, T' = T).
struct KernelSpec {
  enum class Kind { gaussian, tanh_kernel };
  enum class Variant { mean, full };

  Kind kind = Kind::gaussian;
  /// gaussian: k(a,b) = exp(-||a-b||^2 / (2 bandwidth^2)).
  double bandwidth = 0.0;  // <= 0 requests the median heuristic at fit time
  /// tanh: k(a,b) = tanh(scale * a.b + offset).
  double tanh_scale = 1.0;
  double tanh_offset = 0.0;
  /// Expansion of the projection: in terms of the across-repetition mean
  /// samples (T coefficients) or of all samples (N*T coefficients).
  Variant variant = Variant::mean;
  /// Shrinkage applied to C_W; kernel covariances of size T x T are
  /// routinely near-singular.
  double shrink_gamma = 1e-6;
};

struct KernelCorrCAModel {
  Eigen::MatrixXd alpha;  // T x J (mean variant) or N*T x J (full variant)
  KernelSpec kernel;      // bandwidth resolved to its fitted value
  /// Training tensor, retained because out-of-sample transforms evaluate
  /// kernels against the training samples.
  DataTensor training_reference;
  Eigen::VectorXd isc;  // J, descending, measured on the training data
  Eigen::Index j_components = 0;
  std::vector<bool> degenerate;
  std::vector<std::string> warnings;
};

/// T x T kernel matrix: entry (i, j) = k(sample i of x_k, sample j of x_l).
/// Inputs are T x D with rows as samples.
Eigen::MatrixXd gram(const Eigen::MatrixXd& x_k, const Eigen::MatrixXd& x_l,
                     const KernelSpec& spec);

/// Median pairwise distance between the across-repetition mean samples.
double median_heuristic_bandwidth(const DataTensor& x);

/// Kernel CorrCA: builds the within / total covariance of the kernel mean
/// vectors, solves C_B alpha = C_W alpha Lambda (with the spec's shrinkage)
/// and measures per-component training ISC. Cost scales with T^3.
KernelCorrCAModel fit_kernel(const DataTensor& x, KernelSpec spec);

/// Projects new data through the stored training reference:
/// y^l = alpha' * mean_k K(X_train^k, X_new^l). The new tensor must match
/// the training feature dimension; T and N may differ.
ComponentTensor transform_kernel(const DataTensor& x_new, const KernelCorrCAModel& model);

}  // namespace corrca

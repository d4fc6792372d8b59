#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "corrca/errors.hpp"

namespace corrca {

/// T x D x N data volume: T samples x D features x N repetitions
/// (subjects, raters or trials). Stored as one T x D matrix per repetition.
/// Immutable after construction; all values are finite doubles.
class DataTensor {
 public:
  DataTensor(std::vector<Eigen::MatrixXd> repetitions,
             std::vector<std::string> feature_labels = {},
             std::vector<std::string> repetition_ids = {});

  Eigen::Index t_samples() const { return reps_[0].rows(); }
  Eigen::Index d_features() const { return reps_[0].cols(); }
  Eigen::Index n_reps() const { return static_cast<Eigen::Index>(reps_.size()); }

  const Eigen::MatrixXd& rep(Eigen::Index l) const { return reps_[static_cast<std::size_t>(l)]; }
  const std::vector<Eigen::MatrixXd>& reps() const { return reps_; }

  const std::vector<std::string>& feature_labels() const { return feature_labels_; }
  const std::vector<std::string>& repetition_ids() const { return repetition_ids_; }

  /// Sample mean across repetitions, a T x D matrix.
  Eigen::MatrixXd mean_across_reps() const;

  /// New tensor restricted to the given sample rows (same order as given).
  DataTensor select_samples(const std::vector<Eigen::Index>& rows) const;

 private:
  std::vector<Eigen::MatrixXd> reps_;
  std::vector<std::string> feature_labels_;
  std::vector<std::string> repetition_ids_;
};

/// T x J x N tensor of projected components, J <= D of the source tensor.
class ComponentTensor {
 public:
  explicit ComponentTensor(std::vector<Eigen::MatrixXd> repetitions);

  Eigen::Index t_samples() const { return reps_[0].rows(); }
  Eigen::Index j_components() const { return reps_[0].cols(); }
  Eigen::Index n_reps() const { return static_cast<Eigen::Index>(reps_.size()); }

  const Eigen::MatrixXd& rep(Eigen::Index l) const { return reps_[static_cast<std::size_t>(l)]; }
  const std::vector<Eigen::MatrixXd>& reps() const { return reps_; }

 private:
  std::vector<Eigen::MatrixXd> reps_;
};

/// Subtracts the per-repetition, per-feature sample mean.
DataTensor center_per_repetition(const DataTensor& x);

struct StandardizeResult {
  DataTensor tensor;
  /// (repetition, feature) pairs whose column had zero variance and was
  /// left at 0 after centering.
  std::vector<std::pair<Eigen::Index, Eigen::Index>> zero_variance_columns;
};

/// Centers and divides each (repetition, feature) column by its sample
/// standard deviation (ddof = 1). Zero-variance columns are left at 0 and
/// reported, not rejected: rating columns can legitimately be constant.
StandardizeResult standardize_per_repetition(const DataTensor& x);

}  // namespace corrca

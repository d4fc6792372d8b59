#include "corrca/tensor.hpp"

#include <cmath>

namespace corrca {

namespace {

void check_reps(const std::vector<Eigen::MatrixXd>& reps, Eigen::Index min_cols) {
  if (reps.size() < 2)
    throw DimensionError("tensor needs at least 2 repetitions, got " +
                         std::to_string(reps.size()));
  const Eigen::Index t = reps[0].rows();
  const Eigen::Index d = reps[0].cols();
  if (t < 2) throw DimensionError("tensor needs at least 2 samples, got " + std::to_string(t));
  if (d < min_cols)
    throw DimensionError("tensor needs at least " + std::to_string(min_cols) +
                         " feature(s), got " + std::to_string(d));
  for (std::size_t l = 0; l < reps.size(); ++l) {
    if (reps[l].rows() != t || reps[l].cols() != d)
      throw DimensionError("repetition " + std::to_string(l) + " has shape " +
                           std::to_string(reps[l].rows()) + "x" + std::to_string(reps[l].cols()) +
                           ", expected " + std::to_string(t) + "x" + std::to_string(d));
    if (!reps[l].allFinite())
      throw ValidationError("repetition " + std::to_string(l) + " contains NaN or Inf");
  }
}

}  // namespace

DataTensor::DataTensor(std::vector<Eigen::MatrixXd> repetitions,
                       std::vector<std::string> feature_labels,
                       std::vector<std::string> repetition_ids)
    : reps_(std::move(repetitions)),
      feature_labels_(std::move(feature_labels)),
      repetition_ids_(std::move(repetition_ids)) {
  check_reps(reps_, 1);
  if (!feature_labels_.empty() &&
      static_cast<Eigen::Index>(feature_labels_.size()) != d_features())
    throw DimensionError("feature_labels length does not match feature count");
  if (!repetition_ids_.empty() &&
      static_cast<Eigen::Index>(repetition_ids_.size()) != n_reps())
    throw DimensionError("repetition_ids length does not match repetition count");
}

Eigen::MatrixXd DataTensor::mean_across_reps() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(t_samples(), d_features());
  for (const auto& r : reps_) m += r;
  return m / static_cast<double>(n_reps());
}

DataTensor DataTensor::select_samples(const std::vector<Eigen::Index>& rows) const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(reps_.size());
  for (const auto& r : reps_) {
    Eigen::MatrixXd sub(static_cast<Eigen::Index>(rows.size()), d_features());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i] < 0 || rows[i] >= t_samples())
        throw DimensionError("sample index " + std::to_string(rows[i]) + " out of range");
      sub.row(static_cast<Eigen::Index>(i)) = r.row(rows[i]);
    }
    out.push_back(std::move(sub));
  }
  return DataTensor(std::move(out), feature_labels_, repetition_ids_);
}

ComponentTensor::ComponentTensor(std::vector<Eigen::MatrixXd> repetitions)
    : reps_(std::move(repetitions)) {
  check_reps(reps_, 1);
}

DataTensor center_per_repetition(const DataTensor& x) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(x.n_reps()));
  for (const auto& r : x.reps()) {
    out.push_back(r.rowwise() - r.colwise().mean());
  }
  return DataTensor(std::move(out), x.feature_labels(), x.repetition_ids());
}

StandardizeResult standardize_per_repetition(const DataTensor& x) {
  const double t = static_cast<double>(x.t_samples());
  std::vector<Eigen::MatrixXd> out;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> degenerate;
  out.reserve(static_cast<std::size_t>(x.n_reps()));
  for (Eigen::Index l = 0; l < x.n_reps(); ++l) {
    Eigen::MatrixXd c = x.rep(l).rowwise() - x.rep(l).colwise().mean();
    for (Eigen::Index d = 0; d < c.cols(); ++d) {
      const double var = c.col(d).squaredNorm() / (t - 1.0);
      if (var > 0.0) {
        c.col(d) /= std::sqrt(var);
      } else {
        c.col(d).setZero();
        degenerate.emplace_back(l, d);
      }
    }
    out.push_back(std::move(c));
  }
  return StandardizeResult{DataTensor(std::move(out), x.feature_labels(), x.repetition_ids()),
                           std::move(degenerate)};
}

}  // namespace corrca

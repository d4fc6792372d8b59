#include "corrca/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "corrca/corrca.hpp"
#include "corrca/eigensolve.hpp"
#include "corrca/errors.hpp"

namespace corrca {

namespace {

/// Columns of m are observations; returns sum_i of outer products of the
/// column deviations about the mean column.
Eigen::MatrixXd column_scatter(const Eigen::MatrixXd& m) {
  const Eigen::MatrixXd c = m.colwise() - m.rowwise().mean();
  return c * c.transpose();
}

/// Mean kernel matrix against repetition block `xl`: (1/N) sum_k K(X^k, xl).
/// For the full variant the per-k blocks are stacked instead of averaged.
Eigen::MatrixXd kernel_columns(const DataTensor& train, const Eigen::MatrixXd& xl,
                               const KernelSpec& spec) {
  const Eigen::Index t_train = train.t_samples();
  const Eigen::Index n = train.n_reps();
  if (spec.variant == KernelSpec::Variant::mean) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(t_train, xl.rows());
    for (Eigen::Index k = 0; k < n; ++k) m += gram(train.rep(k), xl, spec);
    return m / static_cast<double>(n);
  }
  Eigen::MatrixXd g(n * t_train, xl.rows());
  for (Eigen::Index k = 0; k < n; ++k)
    g.middleRows(k * t_train, t_train) = gram(train.rep(k), xl, spec);
  return g;
}

}  // namespace

Eigen::MatrixXd gram(const Eigen::MatrixXd& x_k, const Eigen::MatrixXd& x_l,
                     const KernelSpec& spec) {
  if (x_k.cols() != x_l.cols())
    throw DimensionError("gram: feature dimensions differ (" + std::to_string(x_k.cols()) +
                         " vs " + std::to_string(x_l.cols()) + ")");
  switch (spec.kind) {
    case KernelSpec::Kind::gaussian: {
      if (!(spec.bandwidth > 0.0) || !std::isfinite(spec.bandwidth))
        throw ArgumentError("gaussian kernel needs a finite positive bandwidth");
      const Eigen::VectorXd nk = x_k.rowwise().squaredNorm();
      const Eigen::VectorXd nl = x_l.rowwise().squaredNorm();
      Eigen::MatrixXd d2 = (-2.0 * (x_k * x_l.transpose())).eval();
      d2.colwise() += nk;
      d2.rowwise() += nl.transpose();
      return (-d2.cwiseMax(0.0) / (2.0 * spec.bandwidth * spec.bandwidth)).array().exp();
    }
    case KernelSpec::Kind::tanh_kernel:
      return ((spec.tanh_scale * (x_k * x_l.transpose())).array() + spec.tanh_offset).tanh();
  }
  throw ArgumentError("unknown kernel kind");
}

double median_heuristic_bandwidth(const DataTensor& x) {
  const Eigen::MatrixXd m = x.mean_across_reps();
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(m.rows() * (m.rows() - 1) / 2));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.rows(); ++j)
      dists.push_back((m.row(i) - m.row(j)).norm());
  std::sort(dists.begin(), dists.end());
  const std::size_t mid = dists.size() / 2;
  const double med = dists.size() % 2 ? dists[mid] : 0.5 * (dists[mid - 1] + dists[mid]);
  if (!(med > 0.0))
    throw NumericalError("median pairwise distance is zero; set the bandwidth explicitly");
  return med;
}

KernelCorrCAModel fit_kernel(const DataTensor& x, KernelSpec spec) {
  if (spec.kind == KernelSpec::Kind::gaussian && spec.bandwidth <= 0.0)
    spec.bandwidth = median_heuristic_bandwidth(x);

  const Eigen::Index n = x.n_reps();

  // Kernel mean columns per repetition and their across-repetition mean.
  std::vector<Eigen::MatrixXd> cols;
  cols.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < n; ++l) cols.push_back(kernel_columns(x, x.rep(l), spec));

  Eigen::MatrixXd c_w = Eigen::MatrixXd::Zero(cols[0].rows(), cols[0].rows());
  Eigen::MatrixXd mean_cols = Eigen::MatrixXd::Zero(cols[0].rows(), cols[0].cols());
  for (const auto& m : cols) {
    c_w += column_scatter(m);
    mean_cols += m;
  }
  mean_cols /= static_cast<double>(n);
  const Eigen::MatrixXd c_t = static_cast<double>(n * n) * column_scatter(mean_cols);
  const Eigen::MatrixXd c_b = c_t - c_w;

  GeneralizedEigenDecomposition ged;
  if (spec.shrink_gamma > 0.0) {
    ged = generalized_eig(0.5 * (c_b + c_b.transpose()),
                          shrink_matrix(0.5 * (c_w + c_w.transpose()), spec.shrink_gamma));
  } else {
    ged = generalized_eig(0.5 * (c_b + c_b.transpose()), 0.5 * (c_w + c_w.transpose()));
  }

  KernelCorrCAModel model{.alpha = Eigen::MatrixXd(),
                          .kernel = spec,
                          .training_reference = x,
                          .isc = Eigen::VectorXd(),
                          .j_components = 0,
                          .degenerate = {},
                          .warnings = std::move(ged.warnings)};

  // Measure training ISC per component, drop undefined, sort descending.
  std::vector<Eigen::MatrixXd> y_reps;
  y_reps.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < n; ++l)
    y_reps.push_back(cols[static_cast<std::size_t>(l)].transpose() * ged.vectors);
  const auto isc = isc_of_components(ComponentTensor(std::move(y_reps)));

  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < ged.vectors.cols(); ++j) {
    if (std::isnan(isc[static_cast<std::size_t>(j)])) {
      model.warnings.push_back("kernel component " + std::to_string(j) +
                               " has zero within-repetition variance; dropped");
    } else {
      keep.push_back(j);
    }
  }
  if (keep.empty()) throw NumericalError("no kernel component has a defined ISC");
  std::stable_sort(keep.begin(), keep.end(), [&](Eigen::Index a, Eigen::Index b) {
    return isc[static_cast<std::size_t>(a)] > isc[static_cast<std::size_t>(b)];
  });

  model.alpha.resize(ged.vectors.rows(), static_cast<Eigen::Index>(keep.size()));
  model.isc.resize(static_cast<Eigen::Index>(keep.size()));
  model.degenerate.resize(keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) {
    model.alpha.col(static_cast<Eigen::Index>(j)) = ged.vectors.col(keep[j]);
    model.isc[static_cast<Eigen::Index>(j)] = isc[static_cast<std::size_t>(keep[j])];
    model.degenerate[j] = ged.degenerate[static_cast<std::size_t>(keep[j])];
  }
  model.j_components = model.alpha.cols();
  return model;
}

ComponentTensor transform_kernel(const DataTensor& x_new, const KernelCorrCAModel& model) {
  if (x_new.d_features() != model.training_reference.d_features())
    throw DimensionError("new data has " + std::to_string(x_new.d_features()) +
                         " features, training had " +
                         std::to_string(model.training_reference.d_features()));
  std::vector<Eigen::MatrixXd> reps;
  reps.reserve(static_cast<std::size_t>(x_new.n_reps()));
  for (Eigen::Index l = 0; l < x_new.n_reps(); ++l) {
    const Eigen::MatrixXd cols =
        kernel_columns(model.training_reference, x_new.rep(l), model.kernel);
    reps.push_back(cols.transpose() * model.alpha);
  }
  return ComponentTensor(std::move(reps));
}

}  // namespace corrca

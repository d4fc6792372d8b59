#include "corrca/covariance.hpp"

#include <vector>

namespace corrca {

namespace {

// Roundoff can leave accumulated sums asymmetric; the eigensolver requires
// symmetric input.
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

std::vector<Eigen::MatrixXd> centered_reps(const DataTensor& x) {
  std::vector<Eigen::MatrixXd> c;
  c.reserve(static_cast<std::size_t>(x.n_reps()));
  for (const auto& r : x.reps()) c.push_back(r.rowwise() - r.colwise().mean());
  return c;
}

}  // namespace

Eigen::MatrixXd within_covariance(const DataTensor& x) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(x.d_features(), x.d_features());
  for (const auto& r : x.reps()) {
    const Eigen::MatrixXd c = r.rowwise() - r.colwise().mean();
    w.noalias() += c.transpose() * c;
  }
  return symmetrized(w);
}

Eigen::MatrixXd between_covariance_direct(const DataTensor& x) {
  const auto c = centered_reps(x);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(x.d_features(), x.d_features());
  for (Eigen::Index l = 0; l < x.n_reps(); ++l)
    for (Eigen::Index k = 0; k < x.n_reps(); ++k) {
      if (k == l) continue;
      b.noalias() += c[static_cast<std::size_t>(l)].transpose() * c[static_cast<std::size_t>(k)];
    }
  return symmetrized(b);
}

Eigen::MatrixXd total_covariance_fast(const DataTensor& x) {
  Eigen::MatrixXd m = x.mean_across_reps();
  m.rowwise() -= m.colwise().mean().eval();
  const double n2 = static_cast<double>(x.n_reps()) * static_cast<double>(x.n_reps());
  return symmetrized(n2 * (m.transpose() * m));
}

CovariancePair covariance_pair(const DataTensor& x) {
  CovariancePair p;
  p.r_w = within_covariance(x);
  p.r_t = total_covariance_fast(x);
  p.r_b = symmetrized(p.r_t - p.r_w);
  p.t_samples = x.t_samples();
  p.n_reps = x.n_reps();
  return p;
}

ScatterSet scatter_set(const DataTensor& x) {
  const Eigen::Index d = x.d_features();
  const double n = static_cast<double>(x.n_reps());

  Eigen::MatrixXd class_mean = x.mean_across_reps();          // T x D, mean over l
  const Eigen::RowVectorXd grand = class_mean.colwise().mean();

  ScatterSet s;
  s.t_samples = x.t_samples();
  s.n_reps = x.n_reps();

  Eigen::MatrixXd st = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd sm = Eigen::MatrixXd::Zero(d, d);
  for (const auto& r : x.reps()) {
    const Eigen::MatrixXd dev_grand = r.rowwise() - grand;
    st.noalias() += dev_grand.transpose() * dev_grand;
    const Eigen::MatrixXd dev_class = r - class_mean;
    sw.noalias() += dev_class.transpose() * dev_class;
    const Eigen::RowVectorXd rep_mean_dev = r.colwise().mean() - grand;
    sm.noalias() += rep_mean_dev.transpose() * rep_mean_dev;
  }
  Eigen::MatrixXd cm = class_mean.rowwise() - grand;
  Eigen::MatrixXd sb = n * (cm.transpose() * cm);

  s.s_t = symmetrized(st);
  s.s_b = symmetrized(sb);
  s.s_w = symmetrized(sw);
  s.s_m = symmetrized(sm);
  return s;
}

CrossCovarianceBlocks cross_covariance_blocks(const DataTensor& x) {
  const auto c = centered_reps(x);
  const Eigen::Index d = x.d_features();
  const Eigen::Index n = x.n_reps();

  CrossCovarianceBlocks out;
  out.d_features = d;
  out.n_reps = n;
  out.r_full = Eigen::MatrixXd::Zero(n * d, n * d);
  out.d_block = Eigen::MatrixXd::Zero(n * d, n * d);

  for (Eigen::Index l = 0; l < n; ++l) {
    for (Eigen::Index k = l; k < n; ++k) {
      Eigen::MatrixXd blk =
          c[static_cast<std::size_t>(l)].transpose() * c[static_cast<std::size_t>(k)];
      if (k == l) blk = 0.5 * (blk + blk.transpose());
      out.r_full.block(l * d, k * d, d, d) = blk;
      out.r_full.block(k * d, l * d, d, d) = blk.transpose();
      if (k == l) out.d_block.block(l * d, l * d, d, d) = blk;
    }
  }
  return out;
}

}  // namespace corrca

#include "corrca/corrca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "corrca/errors.hpp"

namespace corrca {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<Eigen::MatrixXd> project(const DataTensor& x, const Eigen::MatrixXd& v) {
  if (x.d_features() != v.rows())
    throw DimensionError("tensor has " + std::to_string(x.d_features()) +
                         " features but projection expects " + std::to_string(v.rows()));
  std::vector<Eigen::MatrixXd> reps;
  reps.reserve(static_cast<std::size_t>(x.n_reps()));
  for (const auto& r : x.reps()) reps.push_back(r * v);
  return reps;
}

/// Measures training ISC, drops undefined components, sorts descending.
CorrCAModel assemble_model(const DataTensor& centered, const Eigen::MatrixXd& vectors,
                           const std::vector<bool>& degenerate,
                           const Eigen::MatrixXd& r_w, const Regularization& reg,
                           std::vector<std::string> warnings) {
  const ComponentTensor y(project(centered, vectors));
  const std::vector<double> isc = isc_of_components(y);

  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    if (std::isnan(isc[static_cast<std::size_t>(j)])) {
      warnings.push_back("component " + std::to_string(j) +
                         " has zero within-repetition variance; dropped (undefined ISC)");
    } else {
      keep.push_back(j);
    }
  }
  std::stable_sort(keep.begin(), keep.end(), [&](Eigen::Index a, Eigen::Index b) {
    return isc[static_cast<std::size_t>(a)] > isc[static_cast<std::size_t>(b)];
  });
  if (keep.empty()) throw NumericalError("no component has a defined ISC");

  CorrCAModel model;
  model.backward.resize(vectors.rows(), static_cast<Eigen::Index>(keep.size()));
  model.isc.resize(static_cast<Eigen::Index>(keep.size()));
  model.degenerate.resize(keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) {
    model.backward.col(static_cast<Eigen::Index>(j)) = vectors.col(keep[j]);
    model.isc[static_cast<Eigen::Index>(j)] = isc[static_cast<std::size_t>(keep[j])];
    model.degenerate[j] = degenerate.empty() ? false : degenerate[static_cast<std::size_t>(keep[j])];
  }
  model.forward = forward_model(model.backward, r_w);
  model.regularization = reg;
  model.j_components = model.backward.cols();
  model.t_samples = centered.t_samples();
  model.d_features = centered.d_features();
  model.n_reps = centered.n_reps();
  model.warnings = std::move(warnings);
  return model;
}

}  // namespace

CorrCAModel fit(const DataTensor& x, const Regularization& reg) {
  const DataTensor centered = center_per_repetition(x);
  const CovariancePair cov = covariance_pair(centered);
  GeneralizedEigenDecomposition ged = generalized_eig_regularized(cov.r_b, cov.r_w, reg);
  return assemble_model(centered, ged.vectors, ged.degenerate, cov.r_w, ged.regularization,
                        std::move(ged.warnings));
}

ComponentTensor transform(const DataTensor& x, const Eigen::MatrixXd& backward) {
  return ComponentTensor(project(x, backward));
}

ComponentTensor transform(const DataTensor& x, const CorrCAModel& model) {
  return transform(x, model.backward);
}

Eigen::MatrixXd forward_model(const Eigen::MatrixXd& v, const Eigen::MatrixXd& r_w) {
  if (v.rows() != r_w.rows())
    throw DimensionError("projection dimension does not match covariance dimension");
  const Eigen::MatrixXd rv = r_w * v;
  const Eigen::MatrixXd inner = v.transpose() * rv;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(inner);
  if (!lu.isInvertible())
    throw NumericalError("V' R_W V is singular; cannot form the forward model");
  return rv * lu.inverse();
}

std::vector<double> isc_of_components(const ComponentTensor& y) {
  const Eigen::Index j = y.j_components();
  const Eigen::Index n = y.n_reps();
  Eigen::VectorXd r_w = Eigen::VectorXd::Zero(j);
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(y.t_samples(), j);
  for (Eigen::Index l = 0; l < n; ++l) {
    const Eigen::MatrixXd c = y.rep(l).rowwise() - y.rep(l).colwise().mean();
    r_w += c.colwise().squaredNorm();
    mean += c;
  }
  mean /= static_cast<double>(n);
  // Per-repetition centering already removed the grand mean of each column.
  const Eigen::VectorXd r_t =
      static_cast<double>(n * n) * mean.colwise().squaredNorm();

  std::vector<double> rho(static_cast<std::size_t>(j));
  for (Eigen::Index c = 0; c < j; ++c) {
    if (r_w[c] <= 0.0) {
      rho[static_cast<std::size_t>(c)] = kNaN;
    } else {
      rho[static_cast<std::size_t>(c)] =
          (r_t[c] - r_w[c]) / (static_cast<double>(n - 1) * r_w[c]);
    }
  }
  return rho;
}

std::vector<double> isc_per_subject(const ComponentTensor& y, Eigen::Index subject) {
  const Eigen::Index n = y.n_reps();
  const Eigen::Index j = y.j_components();
  if (subject < 0 || subject >= n)
    throw DimensionError("subject index " + std::to_string(subject) + " out of range");

  std::vector<Eigen::MatrixXd> c;
  c.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < n; ++l)
    c.push_back(y.rep(l).rowwise() - y.rep(l).colwise().mean());

  std::vector<double> rho(static_cast<std::size_t>(j));
  for (Eigen::Index comp = 0; comp < j; ++comp) {
    double num = 0.0, den = 0.0;
    const auto& ck = c[static_cast<std::size_t>(subject)].col(comp);
    const double r_kk = ck.squaredNorm();
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l == subject) continue;
      const auto& cl = c[static_cast<std::size_t>(l)].col(comp);
      num += 2.0 * ck.dot(cl);          // r_kl + r_lk
      den += cl.squaredNorm() + r_kk;   // r_ll + r_kk
    }
    rho[static_cast<std::size_t>(comp)] = den > 0.0 ? num / den : kNaN;
  }
  return rho;
}

double isc_to_snr(double rho, Eigen::Index n, bool* overflow) {
  if (overflow) *overflow = false;
  if (rho >= 1.0) {
    if (overflow) *overflow = true;
    return kInf;
  }
  return (rho + 1.0 / static_cast<double>(n - 1)) / (1.0 - rho);
}

FStatResult f_statistic(double rho, Eigen::Index t, Eigen::Index n) {
  FStatResult r;
  r.dof1 = static_cast<double>(t) * static_cast<double>(n - 1);
  r.dof2 = static_cast<double>(t - 1);
  if (rho >= 1.0) {
    r.overflow = true;
    r.f = kInf;
    return r;
  }
  const double td = static_cast<double>(t);
  const double nd = static_cast<double>(n);
  r.f = (td * (nd - 1.0) * rho + td) / ((td - 1.0) * (1.0 - rho));
  return r;
}

IscStatistics isc_statistics(const std::vector<double>& isc, Eigen::Index t, Eigen::Index n) {
  IscStatistics s;
  s.isc = isc;
  s.dof1 = static_cast<double>(t) * static_cast<double>(n - 1);
  s.dof2 = static_cast<double>(t - 1);
  for (double rho : isc) {
    bool over = false;
    s.snr.push_back(isc_to_snr(rho, n, &over));
    s.f_value.push_back(f_statistic(rho, t, n).f);
    s.overflow.push_back(over);
  }
  return s;
}

CorrCAModel fit_lda_view(const DataTensor& x) {
  const ScatterSet s = scatter_set(x);
  const double st_scale = s.s_t.cwiseAbs().maxCoeff();
  if (s.s_m.cwiseAbs().maxCoeff() > 1e-10 * st_scale)
    throw ValidationError(
        "per-repetition means are not equalized (S_M not negligible); center each "
        "repetition before fit_lda_view");

  GeneralizedEigenDecomposition ged = generalized_eig(s.s_b, s.s_w);
  // Map class separation back to ISC: S = (rho + 1/(N-1)) / (1 - rho).
  const double ninv = 1.0 / static_cast<double>(x.n_reps() - 1);
  const Eigen::MatrixXd r_w = within_covariance(x);

  CorrCAModel model;
  model.backward = ged.vectors;
  model.isc.resize(ged.eigenvalues.size());
  for (Eigen::Index i = 0; i < ged.eigenvalues.size(); ++i) {
    const double sep = ged.eigenvalues[i];
    model.isc[i] = (sep - ninv) / (sep + 1.0);
  }
  model.forward = forward_model(model.backward, r_w);
  model.regularization = Regularization::none();
  model.j_components = model.backward.cols();
  model.t_samples = x.t_samples();
  model.d_features = x.d_features();
  model.n_reps = x.n_reps();
  model.degenerate = ged.degenerate;
  model.warnings = std::move(ged.warnings);
  return model;
}

CorrCAModel fit_pca_mean_baseline(const DataTensor& x) {
  const DataTensor centered = center_per_repetition(x);
  Eigen::MatrixXd m = centered.mean_across_reps();
  m.rowwise() -= m.colwise().mean().eval();
  const Eigen::MatrixXd cov = m.transpose() * m;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov + cov.transpose()));
  if (es.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the mean covariance failed");

  const Eigen::Index d = cov.rows();
  Eigen::MatrixXd v(d, d);
  for (Eigen::Index i = 0; i < d; ++i) v.col(i) = es.eigenvectors().col(d - 1 - i);
  // Deterministic sign: largest-magnitude coordinate positive.
  for (Eigen::Index c = 0; c < d; ++c) {
    Eigen::Index imax = 0;
    v.col(c).cwiseAbs().maxCoeff(&imax);
    if (v(imax, c) < 0.0) v.col(c) = -v.col(c);
  }

  CorrCAModel model;
  model.backward = v;
  const ComponentTensor y(project(centered, v));
  const auto isc = isc_of_components(y);
  model.isc.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) model.isc[i] = isc[static_cast<std::size_t>(i)];
  const Eigen::MatrixXd r_w = within_covariance(centered);
  model.forward = forward_model(v, r_w);
  model.regularization = Regularization::none();
  model.j_components = d;
  model.t_samples = x.t_samples();
  model.d_features = x.d_features();
  model.n_reps = x.n_reps();
  model.degenerate.assign(static_cast<std::size_t>(d), false);
  return model;
}

}  // namespace corrca

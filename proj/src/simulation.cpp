#include "corrca/simulation.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>

#include "corrca/errors.hpp"
#include "corrca/significance.hpp"
#include "fftw_lock.hpp"

namespace corrca {

namespace {

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

/// Random D x K matrix with orthonormal columns times a diagonal of
/// exp(N(0,1)) entries normalized to a maximum of 1; gives covariance
/// spectra with the exponential decay typical of real recordings.
Eigen::MatrixXd random_mixing(Eigen::Index d, Eigen::Index k, Rng& rng) {
  const Eigen::MatrixXd g = gaussian_matrix(d, k, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = Eigen::MatrixXd(qr.householderQ()).leftCols(k);
  Eigen::VectorXd diag(k);
  for (Eigen::Index i = 0; i < k; ++i) diag[i] = std::exp(rng.normal());
  diag /= diag.maxCoeff();
  return q * diag.asDiagonal();
}

/// One source series of length t per the spec's process / distribution.
Eigen::VectorXd source_series(const SimulationSpec& spec, Eigen::Index t, Rng& rng) {
  Eigen::VectorXd s;
  if (spec.sample_process == SimulationSpec::Process::pink) {
    s = pink_noise(t, rng);
  } else {
    s.resize(t);
    for (Eigen::Index i = 0; i < t; ++i) s[i] = rng.normal();
  }
  if (spec.distribution == SimulationSpec::Distribution::chi_squared) {
    // Squared Gaussian, standardized back to zero mean / unit variance.
    s = s.array().square();
    s.array() -= s.mean();
    const double sd = std::sqrt(s.squaredNorm() / static_cast<double>(t - 1));
    if (sd > 0.0) s /= sd;
  }
  return s;
}

void validate_spec(const SimulationSpec& spec) {
  if (spec.t_samples < 2 || spec.d_features < 1 || spec.n_reps < 2)
    throw ArgumentError("simulation spec needs T >= 2, D >= 1, N >= 2");
  if (spec.k_shared < 1 || spec.k_shared > spec.d_features)
    throw ArgumentError("k_shared must lie in [1, D]");
  if (!spec.component_isc.empty()) {
    if (static_cast<Eigen::Index>(spec.component_isc.size()) != spec.k_shared)
      throw ArgumentError("component_isc needs one entry per shared component");
    for (double r : spec.component_isc)
      if (!(r >= 0.0 && r <= 1.0)) throw ArgumentError("component_isc entries must lie in [0,1]");
  }
}

SimulationDataset generate_with_mixing(const SimulationSpec& spec,
                                       std::vector<Eigen::MatrixXd> a_signal,
                                       std::vector<Eigen::MatrixXd> a_noise, Rng& rng) {
  const Eigen::Index t = spec.t_samples;
  const Eigen::Index d = spec.d_features;
  const Eigen::Index n = spec.n_reps;
  const Eigen::Index k = spec.k_shared;
  const double xi = snr_blend_factor(spec.snr_db);

  // Shared sources, then per-repetition copies (optionally diluted towards
  // a target ISC below 1).
  Eigen::MatrixXd shared(t, k);
  for (Eigen::Index c = 0; c < k; ++c) shared.col(c) = source_series(spec, t, rng);

  std::vector<Eigen::MatrixXd> sources(static_cast<std::size_t>(n));
  for (auto& s : sources) s = shared;
  if (!spec.component_isc.empty()) {
    for (Eigen::Index c = 0; c < k; ++c) {
      const double target = spec.component_isc[static_cast<std::size_t>(c)];
      if (target >= 1.0) continue;
      const double w_shared = std::sqrt(target);
      const double w_own = std::sqrt(1.0 - target);
      for (Eigen::Index l = 0; l < n; ++l)
        sources[static_cast<std::size_t>(l)].col(c) =
            w_shared * shared.col(c) + w_own * source_series(spec, t, rng);
    }
  }

  std::vector<Eigen::MatrixXd> reps;
  reps.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index l = 0; l < n; ++l) {
    const Eigen::MatrixXd& as =
        a_signal[a_signal.size() == 1 ? 0 : static_cast<std::size_t>(l)];
    const Eigen::MatrixXd& an =
        a_noise[a_noise.size() == 1 ? 0 : static_cast<std::size_t>(l)];

    Eigen::MatrixXd noise(t, d);
    for (Eigen::Index c = 0; c < d; ++c) noise.col(c) = source_series(spec, t, rng);

    Eigen::MatrixXd xs = sources[static_cast<std::size_t>(l)] * as.transpose();
    Eigen::MatrixXd xn = noise * an.transpose();
    const double fs = xs.norm();
    const double fn = xn.norm();
    if (fs > 0.0) xs /= fs;
    if (fn > 0.0) xn /= fn;
    Eigen::MatrixXd x = xi * xs + (1.0 - xi) * xn;
    if (spec.distribution == SimulationSpec::Distribution::dichotomized)
      x = x.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
    reps.push_back(std::move(x));
  }

  SimulationDataset out{DataTensor(std::move(reps)), std::move(sources), std::move(a_signal),
                        std::move(a_noise), spec};
  return out;
}

}  // namespace

double snr_blend_factor(double snr_db) {
  const double a = std::pow(10.0, snr_db / 20.0);
  return a / (1.0 + a);
}

Eigen::VectorXd pink_noise(Eigen::Index t, Rng& rng) {
  if (t < 2) throw ArgumentError("pink_noise needs t >= 2");
  const Eigen::Index n_bins = t / 2 + 1;

  // White Gaussian spectrum shaped by 1/sqrt(f), zero DC, real Nyquist.
  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(n_bins));
  spectrum[0] = 0.0;
  for (Eigen::Index f = 1; f < n_bins; ++f) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(f));
    const bool nyquist = (t % 2 == 0) && f == n_bins - 1;
    const double re = rng.normal();
    const double im = nyquist ? 0.0 : rng.normal();
    spectrum[static_cast<std::size_t>(f)] = std::complex<double>(re, im) * scale;
  }

  Eigen::VectorXd series(t);
  {
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      plan = fftw_plan_dft_c2r_1d(static_cast<int>(t),
                                  reinterpret_cast<fftw_complex*>(spectrum.data()),
                                  series.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }

  series.array() -= series.mean();
  const double sd = std::sqrt(series.squaredNorm() / static_cast<double>(t - 1));
  if (sd > 0.0) series /= sd;
  return series;
}

SimulationDataset generate(const SimulationSpec& spec) {
  validate_spec(spec);
  Rng rng(spec.seed);

  const std::size_t n_signal_mix =
      spec.shared_mixing == SimulationSpec::Mixing::common ? 1u
                                                           : static_cast<std::size_t>(spec.n_reps);
  const std::size_t n_noise_mix =
      spec.noise_mixing == SimulationSpec::Mixing::common ? 1u
                                                          : static_cast<std::size_t>(spec.n_reps);
  std::vector<Eigen::MatrixXd> a_signal, a_noise;
  for (std::size_t i = 0; i < n_signal_mix; ++i)
    a_signal.push_back(random_mixing(spec.d_features, spec.k_shared, rng));
  for (std::size_t i = 0; i < n_noise_mix; ++i)
    a_noise.push_back(random_mixing(spec.d_features, spec.d_features, rng));

  return generate_with_mixing(spec, std::move(a_signal), std::move(a_noise), rng);
}

SimulationDataset regenerate(const SimulationDataset& base, std::uint64_t seed) {
  SimulationSpec spec = base.spec;
  spec.seed = seed;
  Rng rng(seed);
  return generate_with_mixing(spec, base.true_mixing, base.noise_mixing, rng);
}

double normalized_subspace_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows()) throw DimensionError("subspace angle: row dimensions differ");
  const auto orth = [](const Eigen::MatrixXd& m) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
    const Eigen::Index r = qr.rank();
    return Eigen::MatrixXd(Eigen::MatrixXd(qr.householderQ()).leftCols(std::max<Eigen::Index>(r, 1)));
  };
  const Eigen::MatrixXd qa = orth(a);
  const Eigen::MatrixXd qb = orth(b);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(qa.transpose() * qb);
  const double c = std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
  return std::acos(c) / (M_PI / 2.0);
}

namespace {

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd ca = a.array() - a.mean();
  const Eigen::VectorXd cb = b.array() - b.mean();
  const double den = ca.norm() * cb.norm();
  return den > 0.0 ? ca.dot(cb) / den : 0.0;
}

/// Per-repetition-centered series of the first k columns, concatenated
/// across repetitions into one (T*N) x k matrix.
Eigen::MatrixXd concat_centered(const std::vector<Eigen::MatrixXd>& reps, Eigen::Index k) {
  const Eigen::Index t = reps[0].rows();
  Eigen::MatrixXd out(t * static_cast<Eigen::Index>(reps.size()), k);
  for (std::size_t l = 0; l < reps.size(); ++l) {
    const Eigen::MatrixXd c = reps[l].leftCols(k).rowwise() - reps[l].leftCols(k).colwise().mean();
    out.middleRows(static_cast<Eigen::Index>(l) * t, t) = c;
  }
  return out;
}

}  // namespace

RecoveryMetrics evaluate_recovery(const SimulationDataset& dataset, const CorrCAModel& model,
                                  const SimulationDataset& heldout) {
  const Eigen::Index k_true = dataset.spec.k_shared;
  RecoveryMetrics m;
  const Eigen::Index k_used = std::min<Eigen::Index>(k_true, model.j_components);
  m.truncated = k_used < k_true;

  m.mean_isc_train = model.isc.head(k_used).mean();
  const auto test_isc = isc_of_components(transform(heldout.tensor, model));
  double acc = 0.0;
  int counted = 0;
  for (Eigen::Index j = 0; j < k_used; ++j) {
    const double v = test_isc[static_cast<std::size_t>(j)];
    if (!std::isnan(v)) {
      acc += v;
      ++counted;
    }
  }
  m.mean_isc_test = counted ? acc / counted : 0.0;

  // Forward-model subspace against the true signal mixing (stacked when
  // mixing differs per repetition).
  Eigen::MatrixXd truth_mixing(dataset.tensor.d_features(),
                               static_cast<Eigen::Index>(dataset.true_mixing.size()) * k_true);
  for (std::size_t i = 0; i < dataset.true_mixing.size(); ++i)
    truth_mixing.middleCols(static_cast<Eigen::Index>(i) * k_true, k_true) =
        dataset.true_mixing[i];
  m.subspace_angle_forward =
      normalized_subspace_angle(model.forward.leftCols(k_used), truth_mixing);

  // Component time-series subspace.
  const ComponentTensor y = transform(dataset.tensor, model);
  const Eigen::MatrixXd yc = concat_centered(y.reps(), k_used);
  const Eigen::MatrixXd sc = concat_centered(dataset.true_components, k_true);
  m.subspace_angle_components = normalized_subspace_angle(yc, sc);

  // Greedy |corr| matching, truth order.
  Eigen::MatrixXd corr(k_true, k_used);
  for (Eigen::Index a = 0; a < k_true; ++a)
    for (Eigen::Index b = 0; b < k_used; ++b)
      corr(a, b) = std::abs(pearson(sc.col(a), yc.col(b)));
  m.per_component_corr.assign(static_cast<std::size_t>(k_true), 0.0);
  std::vector<bool> row_used(static_cast<std::size_t>(k_true), false);
  std::vector<bool> col_used(static_cast<std::size_t>(k_used), false);
  for (Eigen::Index step = 0; step < std::min(k_true, k_used); ++step) {
    double best = -1.0;
    Eigen::Index bi = -1, bj = -1;
    for (Eigen::Index a = 0; a < k_true; ++a) {
      if (row_used[static_cast<std::size_t>(a)]) continue;
      for (Eigen::Index b = 0; b < k_used; ++b) {
        if (col_used[static_cast<std::size_t>(b)]) continue;
        if (corr(a, b) > best) {
          best = corr(a, b);
          bi = a;
          bj = b;
        }
      }
    }
    row_used[static_cast<std::size_t>(bi)] = true;
    col_used[static_cast<std::size_t>(bj)] = true;
    m.per_component_corr[static_cast<std::size_t>(bi)] = best;
  }
  return m;
}

StudyResults run_study(const std::vector<SimulationSpec>& grid, const StudyOptions& options) {
  if (grid.empty()) throw ArgumentError("run_study: empty grid");
  StudyResults results;
  for (std::size_t cell = 0; cell < grid.size(); ++cell) {
    for (int r = 0; r < options.repetitions_per_cell; ++r) {
      const std::uint64_t cell_seed =
          substream_seed(options.seed, cell * 1000003ULL + static_cast<std::uint64_t>(r));
      SimulationSpec spec = grid[cell];
      spec.seed = cell_seed;

      StudyCellResult row;
      row.spec = spec;
      row.repetition = r;
      row.seed = cell_seed;

      const SimulationDataset train = generate(spec);
      const SimulationDataset heldout = regenerate(train, substream_seed(cell_seed, 1));

      const CorrCAModel model = fit(train.tensor, options.reg);
      row.corrca = evaluate_recovery(train, model, heldout);
      const CorrCAModel baseline = fit_pca_mean_baseline(train.tensor);
      row.pca_baseline = evaluate_recovery(train, baseline, heldout);

      for (const auto& method : options.k_methods) {
        if (method == "parametric_f") {
          const auto split = parametric_split_test(train.tensor, options.parametric_splits,
                                                   options.alpha, substream_seed(cell_seed, 2),
                                                   options.reg);
          row.corrca.k_estimated[method] = split.k_median;
        } else if (method == "circular_shift" || method == "phase_scramble") {
          const auto sm = method == "circular_shift" ? SurrogateMethod::circular_shift
                                                     : SurrogateMethod::phase_scramble;
          const auto rep = surrogate_test(train.tensor, sm, options.n_surrogates, options.alpha,
                                          substream_seed(cell_seed, 3), options.reg);
          row.corrca.k_estimated[method] = rep.k_significant;
        } else {
          throw ArgumentError("unknown K-estimation method '" + method + "'");
        }
      }
      results.rows.push_back(std::move(row));
    }
  }
  return results;
}

}  // namespace corrca

#include "corrca/significance.hpp"

#include <fftw3.h>

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <complex>
#include <mutex>
#include <numeric>

#include "corrca/corrca.hpp"
#include "corrca/errors.hpp"
#include "fftw_lock.hpp"

namespace corrca {

namespace {

struct FftPlans {
  Eigen::Index t;
  std::vector<std::complex<double>> spectrum;
  std::vector<double> series;
  fftw_plan forward;
  fftw_plan inverse;

  explicit FftPlans(Eigen::Index t_samples) : t(t_samples) {
    spectrum.resize(static_cast<std::size_t>(t / 2 + 1));
    series.resize(static_cast<std::size_t>(t));
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(t), series.data(),
                                   reinterpret_cast<fftw_complex*>(spectrum.data()),
                                   FFTW_ESTIMATE);
    inverse = fftw_plan_dft_c2r_1d(static_cast<int>(t),
                                   reinterpret_cast<fftw_complex*>(spectrum.data()),
                                   series.data(), FFTW_ESTIMATE);
  }
  ~FftPlans() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(inverse);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
};

}  // namespace

std::string to_string(SurrogateMethod m) {
  return m == SurrogateMethod::circular_shift ? "circular_shift" : "phase_scramble";
}

SignificanceReport parametric_f_test(const std::vector<double>& isc_test, Eigen::Index t,
                                     Eigen::Index n, double alpha) {
  if (isc_test.empty()) throw ArgumentError("parametric_f_test: no components given");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0,1)");

  SignificanceReport rep;
  rep.method = "parametric_f";
  rep.isc = isc_test;
  rep.alpha = alpha;
  const double threshold = alpha / static_cast<double>(isc_test.size());
  const boost::math::fisher_f dist(static_cast<double>(t) * static_cast<double>(n - 1),
                                   static_cast<double>(t - 1));
  for (double rho : isc_test) {
    double p;
    bool over = false;
    if (std::isnan(rho)) {
      p = 1.0;
    } else if (rho >= 1.0) {
      p = 0.0;
      over = true;
    } else {
      const double f = f_statistic(rho, t, n).f;
      p = f <= 0.0 ? 1.0 : boost::math::cdf(boost::math::complement(dist, f));
    }
    rep.p_values.push_back(p);
    rep.overflow.push_back(over);
    rep.significant.push_back(p < threshold);
    if (p < threshold) ++rep.k_significant;
  }
  return rep;
}

DataTensor circular_shift_surrogate(const DataTensor& x, Rng& rng) {
  const Eigen::Index t = x.t_samples();
  std::vector<Eigen::MatrixXd> reps;
  reps.reserve(static_cast<std::size_t>(x.n_reps()));
  for (Eigen::Index l = 0; l < x.n_reps(); ++l) {
    const Eigen::Index o =
        static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::uint64_t>(t)));
    Eigen::MatrixXd shifted(t, x.d_features());
    for (Eigen::Index i = 0; i < t; ++i) shifted.row((i + o) % t) = x.rep(l).row(i);
    reps.push_back(std::move(shifted));
  }
  return DataTensor(std::move(reps), x.feature_labels(), x.repetition_ids());
}

/// Interior bins 1 .. ceil(T/2)-1: DC is excluded and, for even T, so is
/// the Nyquist bin (it must stay real).
static std::size_t interior_bin_count(Eigen::Index t) {
  return static_cast<std::size_t>((t - 1) / 2);
}

DataTensor phase_scramble_surrogate(const DataTensor& x,
                                    const std::vector<std::vector<double>>& phases) {
  const Eigen::Index t = x.t_samples();
  if (t < 3) throw DimensionError("phase scrambling needs T >= 3 samples");
  const std::size_t interior = interior_bin_count(t);
  if (phases.size() != static_cast<std::size_t>(x.n_reps()))
    throw DimensionError("need one phase vector per repetition");

  FftPlans plans(t);
  const std::size_t n_bins = plans.spectrum.size();

  std::vector<Eigen::MatrixXd> reps;
  reps.reserve(static_cast<std::size_t>(x.n_reps()));
  for (Eigen::Index l = 0; l < x.n_reps(); ++l) {
    const auto& phi = phases[static_cast<std::size_t>(l)];
    if (phi.size() != interior)
      throw DimensionError("phase vector for repetition " + std::to_string(l) + " needs " +
                           std::to_string(interior) + " entries");
    // Same rotation for all features of this repetition, preserving the
    // spatial covariance structure.
    std::vector<std::complex<double>> rot(n_bins, {1.0, 0.0});
    for (std::size_t f = 0; f < interior; ++f)
      rot[f + 1] = {std::cos(phi[f]), std::sin(phi[f])};
    Eigen::MatrixXd out(t, x.d_features());
    for (Eigen::Index d = 0; d < x.d_features(); ++d) {
      for (Eigen::Index i = 0; i < t; ++i)
        plans.series[static_cast<std::size_t>(i)] = x.rep(l)(i, d);
      fftw_execute(plans.forward);
      for (std::size_t f = 0; f < n_bins; ++f) plans.spectrum[f] *= rot[f];
      fftw_execute(plans.inverse);
      for (Eigen::Index i = 0; i < t; ++i)
        out(i, d) = plans.series[static_cast<std::size_t>(i)] / static_cast<double>(t);
    }
    reps.push_back(std::move(out));
  }
  return DataTensor(std::move(reps), x.feature_labels(), x.repetition_ids());
}

DataTensor phase_scramble_surrogate(const DataTensor& x, Rng& rng) {
  const std::size_t interior = interior_bin_count(x.t_samples());
  std::vector<std::vector<double>> phases(static_cast<std::size_t>(x.n_reps()));
  for (auto& phi : phases) {
    phi.resize(interior);
    for (auto& p : phi) p = 2.0 * M_PI * rng.uniform();
  }
  return phase_scramble_surrogate(x, phases);
}

DataTensor make_surrogate(const DataTensor& x, SurrogateMethod method, Rng& rng) {
  return method == SurrogateMethod::circular_shift ? circular_shift_surrogate(x, rng)
                                                   : phase_scramble_surrogate(x, rng);
}

SignificanceReport surrogate_test(const DataTensor& x, SurrogateMethod method,
                                  int n_surrogates, double alpha, std::uint64_t seed,
                                  const Regularization& reg) {
  if (n_surrogates < 1) throw ArgumentError("n_surrogates must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0,1)");
  if (method == SurrogateMethod::phase_scramble && x.t_samples() < 3)
    throw DimensionError("phase scrambling needs T >= 3 samples");

  SignificanceReport rep;
  rep.method = to_string(method);
  rep.alpha = alpha;
  rep.n_surrogates = n_surrogates;
  rep.seed = seed;
  if (static_cast<double>(n_surrogates) < 1.0 / alpha)
    rep.warnings.push_back("n_surrogates below 1/alpha; p-values cannot resolve alpha");

  const CorrCAModel model = fit(x, reg);
  rep.isc.assign(model.isc.data(), model.isc.data() + model.isc.size());

  // Null distribution of the maximum component ISC. Independent seeded
  // streams per surrogate keep the result order-independent.
  std::vector<double> maxima(static_cast<std::size_t>(n_surrogates));
  for (int s = 0; s < n_surrogates; ++s) {
    Rng stream(substream_seed(seed, static_cast<std::uint64_t>(s)));
    const DataTensor xs = make_surrogate(x, method, stream);
    const CorrCAModel ms = fit(xs, reg);
    maxima[static_cast<std::size_t>(s)] = ms.isc.size() ? ms.isc.maxCoeff() : 0.0;
  }

  for (double rho : rep.isc) {
    int exceed = 0;
    for (double m : maxima)
      if (m >= rho) ++exceed;
    const double p = (1.0 + exceed) / (static_cast<double>(n_surrogates) + 1.0);
    rep.p_values.push_back(p);
    rep.overflow.push_back(false);
    rep.significant.push_back(p < alpha);
    if (p < alpha) ++rep.k_significant;
  }
  return rep;
}

ParametricSplitResult parametric_split_test(const DataTensor& x, int n_splits, double alpha,
                                            std::uint64_t seed, const Regularization& reg) {
  if (n_splits < 1) throw ArgumentError("n_splits must be >= 1");
  const Eigen::Index t = x.t_samples();
  if (t < 4) throw DimensionError("split testing needs T >= 4 samples");

  ParametricSplitResult result;
  std::vector<SignificanceReport> reports;
  reports.reserve(static_cast<std::size_t>(n_splits));
  for (int s = 0; s < n_splits; ++s) {
    Rng stream(substream_seed(seed, static_cast<std::uint64_t>(s)));
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(t));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    for (std::size_t i = idx.size() - 1; i > 0; --i)
      std::swap(idx[i], idx[stream.uniform_int(i + 1)]);
    const Eigen::Index half = t / 2;
    const std::vector<Eigen::Index> train_rows(idx.begin(), idx.begin() + half);
    const std::vector<Eigen::Index> test_rows(idx.begin() + half, idx.end());

    const CorrCAModel model = fit(x.select_samples(train_rows), reg);
    const DataTensor test = x.select_samples(test_rows);
    const auto isc = isc_of_components(transform(test, model));
    auto rep = parametric_f_test(isc, test.t_samples(), test.n_reps(), alpha);
    rep.seed = seed;
    result.k_per_split.push_back(rep.k_significant);
    reports.push_back(std::move(rep));
  }

  std::vector<int> sorted = result.k_per_split;
  std::sort(sorted.begin(), sorted.end());
  result.k_median = sorted[sorted.size() / 2];
  for (std::size_t s = 0; s < reports.size(); ++s) {
    if (result.k_per_split[s] == result.k_median) {
      result.representative = reports[s];
      break;
    }
  }
  return result;
}

}  // namespace corrca

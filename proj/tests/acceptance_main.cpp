// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Each check pins its tolerance in code; measured values are printed so a
// failing line is diagnosable from the log alone.

#include <boost/math/distributions/binomial.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "corrca/corrca.hpp"
#include "corrca/covariance.hpp"
#include "corrca/dataset_io.hpp"
#include "corrca/kernel.hpp"
#include "corrca/mcca.hpp"
#include "corrca/significance.hpp"
#include "corrca/simulation.hpp"

using namespace corrca;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail, double seconds) {
  std::printf("%s criterion %2d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double elapsed(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

DataTensor random_tensor(Eigen::Index t, Eigen::Index d, Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Eigen::MatrixXd> reps;
  for (Eigen::Index l = 0; l < n; ++l) reps.push_back(gaussian_matrix(t, d, rng));
  return DataTensor(std::move(reps));
}

// ---------------------------------------------------------------------------

void criterion_1_fast_path() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng shape_rng(101);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Eigen::Index t = 3 + static_cast<Eigen::Index>(shape_rng.uniform_int(48));
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(shape_rng.uniform_int(8));
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(shape_rng.uniform_int(5));
    const auto x = random_tensor(t, d, n, 5000 + static_cast<std::uint64_t>(i));
    const auto pair = covariance_pair(x);
    const Eigen::MatrixXd direct = between_covariance_direct(x);
    const double scale = std::max({pair.r_b.cwiseAbs().maxCoeff(),
                                   direct.cwiseAbs().maxCoeff(), 1e-300});
    worst = std::max(worst, (pair.r_b - direct).cwiseAbs().maxCoeff() / scale);
  }
  const double secs = elapsed(t0);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "fast-path R_B vs direct pairwise sum: max rel err %.2e (tol 1e-9) on 200 "
                "tensors, runtime < 10 s",
                worst);
  report(1, worst < 1e-9 && secs < 10.0, buf, secs);
}

void criterion_2_lda_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_isc = 0.0, worst_angle = 0.0;
  Rng shape_rng(202);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index t = 12 + static_cast<Eigen::Index>(shape_rng.uniform_int(29));
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(shape_rng.uniform_int(5));
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(shape_rng.uniform_int(4));
    const auto x = center_per_repetition(random_tensor(t, d, n, 6000 + static_cast<std::uint64_t>(i)));
    const auto direct = fit(x);
    const auto lda = fit_lda_view(x);
    for (Eigen::Index j = 0; j < direct.j_components; ++j) {
      worst_isc = std::max(worst_isc, std::abs(direct.isc[j] - lda.isc[j]));
      if (direct.degenerate[static_cast<std::size_t>(j)]) continue;
      const double cosang = std::abs(direct.backward.col(j).normalized().dot(
          lda.backward.col(j).normalized()));
      worst_angle = std::max(worst_angle, std::acos(std::min(cosang, 1.0)));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "CorrCA vs LDA route on 50 centered tensors: max ISC gap %.2e (tol 1e-6), max "
                "component angle %.2e rad (tol 1e-6)",
                worst_isc, worst_angle);
  report(2, worst_isc < 1e-6 && worst_angle < 1e-6, buf, elapsed(t0));
}

void criterion_3_normalization() {
  const auto t0 = std::chrono::steady_clock::now();
  double max_rho = -1e300;
  int tensors = 0;
  Rng shape_rng(303);

  // 400 random shapes
  for (int i = 0; i < 400; ++i) {
    const Eigen::Index t = 6 + static_cast<Eigen::Index>(shape_rng.uniform_int(30));
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(shape_rng.uniform_int(6));
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(shape_rng.uniform_int(4));
    const auto model = fit(random_tensor(t, d, n, 7000 + static_cast<std::uint64_t>(i)));
    max_rho = std::max(max_rho, model.isc.maxCoeff());
    ++tensors;
  }

  // 100 adversarial tensors
  double min_identical_rho = 1e300;
  for (int i = 0; i < 100; ++i) {
    Rng rng(8000 + static_cast<std::uint64_t>(i));
    const int flavor = i % 5;
    if (flavor == 0) {
      // identical repetitions: must attain 1
      const Eigen::MatrixXd base = gaussian_matrix(20, 3, rng);
      const auto model = fit(DataTensor({base, base, base}));
      max_rho = std::max(max_rho, model.isc.maxCoeff());
      min_identical_rho = std::min(min_identical_rho, model.isc.maxCoeff());
    } else if (flavor == 1) {
      // extreme scales
      const double scale = std::pow(10.0, (rng.uniform() - 0.5) * 16.0);
      std::vector<Eigen::MatrixXd> reps;
      for (int l = 0; l < 3; ++l) reps.push_back(scale * gaussian_matrix(15, 4, rng));
      const auto model = fit(DataTensor(std::move(reps)));
      max_rho = std::max(max_rho, model.isc.maxCoeff());
    } else if (flavor == 2) {
      // rank-deficient features, solved with tsvd
      const Eigen::MatrixXd basis = gaussian_matrix(5, 2, rng);
      std::vector<Eigen::MatrixXd> reps;
      for (int l = 0; l < 3; ++l)
        reps.push_back(gaussian_matrix(18, 2, rng) * basis.transpose());
      const auto model = fit(DataTensor(std::move(reps)), Regularization::tsvd(2));
      max_rho = std::max(max_rho, model.isc.maxCoeff());
    } else if (flavor == 3) {
      // near-identical repetitions (tiny independent noise)
      const Eigen::MatrixXd base = gaussian_matrix(25, 3, rng);
      std::vector<Eigen::MatrixXd> reps;
      for (int l = 0; l < 2; ++l) reps.push_back(base + 1e-7 * gaussian_matrix(25, 3, rng));
      const auto model = fit(DataTensor(std::move(reps)));
      max_rho = std::max(max_rho, model.isc.maxCoeff());
    } else {
      // constant feature mixed in, shrinkage keeps it solvable
      std::vector<Eigen::MatrixXd> reps;
      for (int l = 0; l < 3; ++l) {
        Eigen::MatrixXd m = gaussian_matrix(16, 3, rng);
        m.col(2).setConstant(4.2);
        reps.push_back(std::move(m));
      }
      const auto model = fit(DataTensor(std::move(reps)), Regularization::shrinkage(1e-8));
      max_rho = std::max(max_rho, model.isc.maxCoeff());
    }
    ++tensors;
  }

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "normalization over %d tensors: max rho %.12f (<= 1+1e-9), identical-signal "
                "min rho %.12f (>= 1-1e-9)",
                tensors, max_rho, min_identical_rho);
  report(3, tensors == 500 && max_rho <= 1.0 + 1e-9 && min_identical_rho >= 1.0 - 1e-9, buf,
         elapsed(t0));
}

void criterion_4_snr_trend() {
  const auto t0 = std::chrono::steady_clock::now();
  SimulationSpec base;  // defaults T=200, D=30, N=5, K=10
  const int reps = 20;

  const auto cell = [&](double snr) {
    double train = 0.0, test = 0.0, pca_test = 0.0;
    for (int r = 0; r < reps; ++r) {
      SimulationSpec spec = base;
      spec.snr_db = snr;
      spec.seed = substream_seed(404, static_cast<std::uint64_t>(snr * 100.0) * 131 +
                                          static_cast<std::uint64_t>(r));
      const auto data = generate(spec);
      const auto heldout = regenerate(data, substream_seed(spec.seed, 1));
      const auto model = fit(data.tensor);
      const auto m = evaluate_recovery(data, model, heldout);
      train += m.mean_isc_train;
      test += m.mean_isc_test;
      const auto pca = fit_pca_mean_baseline(data.tensor);
      pca_test += evaluate_recovery(data, pca, heldout).mean_isc_test;
    }
    return std::array<double, 3>{train / reps, test / reps, pca_test / reps};
  };

  const auto high = cell(40.0);
  const auto low = cell(-40.0);
  const auto mid = cell(0.0);

  const bool pass_high = high[1] >= 0.95;
  const bool pass_low = (low[0] - low[1]) >= 0.05;
  const bool pass_mid = (mid[1] - mid[2]) >= 0.05;
  const double secs = elapsed(t0);

  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "SNR trend (20 reps/cell): test ISC @40dB %.3f (>=0.95); train-test gap @-40dB "
                "%.3f (>=0.05); CorrCA-PCA @0dB %.3f (>=0.05); runtime <= 300 s",
                high[1], low[0] - low[1], mid[1] - mid[2]);
  report(4, pass_high && pass_low && pass_mid && secs <= 300.0, buf, secs);
}

int median_of(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

void criterion_5_k_estimation() {
  const auto t0 = std::chrono::steady_clock::now();
  const int reps = 20;
  const int n_surrogates = 200;

  const auto run_cell = [&](SimulationSpec::Process process) {
    std::vector<int> k_param, k_circ, k_phase;
    for (int r = 0; r < reps; ++r) {
      SimulationSpec spec;  // T=200, D=30, N=5, K=10
      spec.snr_db = 40.0;
      spec.sample_process = process;
      spec.seed = substream_seed(505, static_cast<std::uint64_t>(r) +
                                          (process == SimulationSpec::Process::pink ? 1000 : 0));
      const auto data = generate(spec);
      k_param.push_back(
          parametric_split_test(data.tensor, 100, 0.05, substream_seed(spec.seed, 2)).k_median);
      k_circ.push_back(surrogate_test(data.tensor, SurrogateMethod::circular_shift, n_surrogates,
                                      0.05, substream_seed(spec.seed, 3))
                           .k_significant);
      k_phase.push_back(surrogate_test(data.tensor, SurrogateMethod::phase_scramble, n_surrogates,
                                       0.05, substream_seed(spec.seed, 4))
                            .k_significant);
    }
    return std::array<int, 3>{median_of(k_param), median_of(k_circ), median_of(k_phase)};
  };

  const auto iid = run_cell(SimulationSpec::Process::iid);
  const auto pink = run_cell(SimulationSpec::Process::pink);

  const bool pass_iid = iid[0] == 10 && iid[1] == 10 && iid[2] == 10;
  const bool pass_pink = pink[0] > 10 && std::abs(pink[1] - 10) <= 1 && std::abs(pink[2] - 10) <= 1;
  const double secs = elapsed(t0);

  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "K estimation @40dB: IID medians f/circ/phase = %d/%d/%d (all 10); pink = "
                "%d/%d/%d (f > 10, surrogates 10+-1); runtime <= 600 s",
                iid[0], iid[1], iid[2], pink[0], pink[1], pink[2]);
  report(5, pass_iid && pass_pink && secs <= 600.0, buf, secs);
}

void criterion_6_f_calibration() {
  const auto t0 = std::chrono::steady_clock::now();
  const int runs = 500;
  const double alpha = 0.05;
  int rejections = 0;
  for (int r = 0; r < runs; ++r) {
    const auto train = random_tensor(200, 10, 4, 90000 + static_cast<std::uint64_t>(r) * 2);
    const auto test = random_tensor(200, 10, 4, 90001 + static_cast<std::uint64_t>(r) * 2);
    const auto model = fit(train);
    const auto isc = isc_of_components(transform(test, model));
    const auto rep = parametric_f_test(isc, test.t_samples(), test.n_reps(), alpha);
    if (rep.k_significant > 0) ++rejections;
  }

  // exact central 95% binomial interval for the count at p = alpha
  const boost::math::binomial dist(runs, alpha);
  int lo = 0;
  while (boost::math::cdf(dist, lo) <= 0.025) ++lo;
  int hi = lo;
  while (boost::math::cdf(dist, hi) < 0.975) ++hi;

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "F-test family-wise null rejections: %d/%d, 95%% binomial CI of alpha=0.05 is "
                "[%d, %d]",
                rejections, runs, lo, hi);
  report(6, rejections >= lo && rejections <= hi, buf, elapsed(t0));
}

void criterion_7_mcca_cca() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_gap = 0.0, worst_dominance = 0.0;
  Rng shape_rng(707);
  for (int i = 0; i < 30; ++i) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(shape_rng.uniform_int(3));
    const Eigen::Index t = 30 + static_cast<Eigen::Index>(shape_rng.uniform_int(40));
    const auto x = random_tensor(t, d, 2, 9500 + static_cast<std::uint64_t>(i));
    const auto mcca = fit_mcca(x);

    // whitening + SVD CCA oracle
    const Eigen::MatrixXd c1 = x.rep(0).rowwise() - x.rep(0).colwise().mean();
    const Eigen::MatrixXd c2 = x.rep(1).rowwise() - x.rep(1).colwise().mean();
    const auto inv_sqrt = [](const Eigen::MatrixXd& s) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
      return Eigen::MatrixXd(es.eigenvectors() *
                             es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                             es.eigenvectors().transpose());
    };
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(inv_sqrt(c1.transpose() * c1) *
                                          (c1.transpose() * c2) *
                                          inv_sqrt(c2.transpose() * c2));
    worst_gap = std::max(worst_gap, std::abs(mcca.isc[0] - svd.singularValues()[0]));

    const auto corrca_model = fit(x);
    for (Eigen::Index j = 0; j < corrca_model.j_components; ++j)
      worst_dominance = std::max(worst_dominance, corrca_model.isc[j] - mcca.isc[j]);
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "MCCA vs CCA oracle on 30 N=2 instances: max top-rho gap %.2e (tol 1e-6); max "
                "CorrCA-over-MCCA excess %.2e (tol 1e-9)",
                worst_gap, worst_dominance);
  report(7, worst_gap < 1e-6 && worst_dominance < 1e-9, buf, elapsed(t0));
}

void criterion_8_kernel() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(808);
  const Eigen::Index t = 40;
  Eigen::VectorXd radius(t);
  for (Eigen::Index i = 0; i < t; ++i) radius[i] = 0.5 + 1.5 * rng.uniform();
  std::vector<Eigen::MatrixXd> reps;
  for (int l = 0; l < 2; ++l) {
    Eigen::MatrixXd x(t, 2);
    for (Eigen::Index i = 0; i < t; ++i) {
      const double phase = 2.0 * M_PI * rng.uniform();
      x(i, 0) = radius[i] * std::cos(phase);
      x(i, 1) = radius[i] * std::sin(phase);
    }
    reps.push_back(std::move(x));
  }
  const DataTensor x(std::move(reps));
  KernelSpec spec;  // gaussian, median heuristic
  const auto model = fit_kernel(x, spec);

  const auto y = transform_kernel(x, model);
  Eigen::VectorXd y1(2 * t), rr(2 * t);
  for (Eigen::Index l = 0; l < 2; ++l) {
    y1.segment(l * t, t) = y.rep(l).col(0);
    rr.segment(l * t, t) = radius;
  }
  // Spearman rank correlation
  const auto ranks = [](const Eigen::VectorXd& v) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(v.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index b) { return v[a] < v[b]; });
    Eigen::VectorXd r(v.size());
    for (std::size_t i = 0; i < order.size(); ++i) r[order[i]] = static_cast<double>(i);
    return r;
  };
  const Eigen::VectorXd ra = ranks(y1).array() - ranks(y1).mean();
  const Eigen::VectorXd rb = ranks(rr).array() - ranks(rr).mean();
  const double spearman = ra.dot(rb) / (ra.norm() * rb.norm());

  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "kernel CorrCA on shared-amplitude data: train ISC_1 %.4f (>=0.99), Spearman "
                "|r| %.3f (>0.95)",
                model.isc[0], std::abs(spearman));
  report(8, model.isc[0] >= 0.99 && std::abs(spearman) > 0.95, buf, elapsed(t0));
}

void criterion_9_regularization_curve() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> gammas{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const int reps = 16;
  std::vector<double> mean_sum(gammas.size(), 0.0);

  for (int r = 0; r < reps; ++r) {
    SimulationSpec spec;
    spec.t_samples = 100;
    spec.d_features = 30;
    spec.n_reps = 5;
    spec.k_shared = 5;
    spec.snr_db = 0.0;
    // Weak shared components (target ISC 0.3): the regime in which the
    // within-covariance inverse chases spurious low-power directions and
    // intermediate shrinkage pays off. With perfectly correlated components
    // the unregularized top-3 is already optimal and the curve is monotone.
    spec.component_isc.assign(5, 0.3);
    spec.seed = substream_seed(909, static_cast<std::uint64_t>(r));
    const auto data = generate(spec);
    const auto heldout = regenerate(data, substream_seed(spec.seed, 1));
    for (std::size_t g = 0; g < gammas.size(); ++g) {
      const auto model = fit(data.tensor, Regularization::shrinkage(gammas[g]));
      const auto isc = isc_of_components(transform(heldout.tensor, model));
      double sum = 0.0;
      for (std::size_t j = 0; j < std::min<std::size_t>(3, isc.size()); ++j)
        if (!std::isnan(isc[j])) sum += isc[j];
      mean_sum[g] += sum / reps;
    }
  }

  std::size_t argmax = 0;
  for (std::size_t g = 1; g < gammas.size(); ++g)
    if (mean_sum[g] > mean_sum[argmax]) argmax = g;
  const bool interior = argmax != 0 && argmax != gammas.size() - 1;

  std::string curve;
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    char v[32];
    std::snprintf(v, sizeof(v), "%.3f%s", mean_sum[g], g + 1 < gammas.size() ? " " : "");
    curve += v;
  }
  char buf[240];
  std::snprintf(buf, sizeof(buf),
                "test-set summed top-3 ISC over gamma {0,0.2,...,1}: [%s], max at gamma=%.1f "
                "(interior required)",
                curve.c_str(), gammas[argmax]);
  report(9, interior, buf, elapsed(t0));
}

void criterion_10_cli_determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string cli = CORRCA_CLI_PATH;
  const fs::path dir = fs::temp_directory_path() / "corrca_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>/dev/null";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };

  bool ok = true;
  const std::string sim = " --t 50 --d 5 --n 3 --k 2 --snr-db 10 --process pink --seed 42";
  ok &= run("simulate -o " + (dir / "a").string() + sim) == 0;
  ok &= run("simulate -o " + (dir / "b").string() + sim) == 0;
  for (const char* f : {"rep_000.csv", "rep_001.csv", "rep_002.csv", "manifest.json",
                        "sim_truth.json"})
    ok &= slurp(dir / "a" / f) == slurp(dir / "b" / f) && !slurp(dir / "a" / f).empty();

  ok &= run("fit " + (dir / "a").string() + " -o " + (dir / "f1").string() +
            " --reg shrinkage:0.2 --seed 7") == 0;
  ok &= run("fit " + (dir / "a").string() + " -o " + (dir / "f2").string() +
            " --reg shrinkage:0.2 --seed 7") == 0;
  ok &= slurp(dir / "f1" / "model.json") == slurp(dir / "f2" / "model.json");
  ok &= slurp(dir / "f1" / "report.json") == slurp(dir / "f2" / "report.json");

  ok &= run("test " + (dir / "a").string() + " -o " + (dir / "t1.json").string() +
            " --method circular --n-surrogates 60 --seed 9") == 0;
  ok &= run("test " + (dir / "a").string() + " -o " + (dir / "t2.json").string() +
            " --method circular --n-surrogates 60 --seed 9") == 0;
  ok &= slurp(dir / "t1.json") == slurp(dir / "t2.json");

  ok &= run("study -o " + (dir / "s1").string() +
            " --snr-db 0 --t 40 --d 4 --n 3 --k 1 --reps 2 --seed 3") == 0;
  ok &= run("study -o " + (dir / "s2").string() +
            " --snr-db 0 --t 40 --d 4 --n 3 --k 1 --reps 2 --seed 3") == 0;
  ok &= slurp(dir / "s1" / "results.csv") == slurp(dir / "s2" / "results.csv");
  ok &= slurp(dir / "s1" / "summary.json") == slurp(dir / "s2" / "summary.json");

  report(10, ok, "seeded CLI reruns byte-identical across simulate/fit/test/study outputs",
         elapsed(t0));
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  criterion_1_fast_path();
  criterion_2_lda_equivalence();
  criterion_3_normalization();
  criterion_4_snr_trend();
  criterion_5_k_estimation();
  criterion_6_f_calibration();
  criterion_7_mcca_cca();
  criterion_8_kernel();
  criterion_9_regularization_curve();
  criterion_10_cli_determinism();
  if (g_failures) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}

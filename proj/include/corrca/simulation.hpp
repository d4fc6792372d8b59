#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corrca/corrca.hpp"
#include "corrca/regularization.hpp"
#include "corrca/rng.hpp"
#include "corrca/tensor.hpp"

namespace corrca {

/// Synthetic-tensor recipe: K shared source series are mixed into D
/// channels, independent noise sources are mixed on top, both parts are
/// Frobenius-normalized per repetition and blended by
/// xi = 10^(SNR/20) / (1 + 10^(SNR/20)).
struct SimulationSpec {
  Eigen::Index t_samples = 200;
  Eigen::Index d_features = 30;
  Eigen::Index n_reps = 5;
  Eigen::Index k_shared = 10;
  double snr_db = 0.0;

  enum class Process { iid, pink };
  enum class Distribution { gaussian, chi_squared, dichotomized };
  enum class Mixing { common, per_rep };

  Process sample_process = Process::iid;
  Distribution distribution = Distribution::gaussian;
  Mixing shared_mixing = Mixing::common;
  Mixing noise_mixing = Mixing::common;

  /// Per-component target ISC in [0, 1]; empty means 1 for every shared
  /// component (the source series are copied verbatim into each
  /// repetition). A target below 1 blends the shared series with
  /// per-repetition noise: sqrt(rho) shared + sqrt(1-rho) individual.
  std::vector<double> component_isc;

  std::uint64_t seed = 0;
};

double snr_blend_factor(double snr_db);  // xi

struct SimulationDataset {
  DataTensor tensor;
  /// Source series actually placed in each repetition, T x K per rep.
  std::vector<Eigen::MatrixXd> true_components;
  /// Signal mixing matrices (D x K); one entry when shared_mixing=common.
  std::vector<Eigen::MatrixXd> true_mixing;
  std::vector<Eigen::MatrixXd> noise_mixing;  // D x D, same convention
  SimulationSpec spec;
};

/// Zero-mean, unit-variance series whose spectral density falls off as 1/f
/// (frequency-domain 1/sqrt(f) amplitude shaping of white Gaussian noise).
Eigen::VectorXd pink_noise(Eigen::Index t, Rng& rng);

SimulationDataset generate(const SimulationSpec& spec);

/// Fresh signal and noise draws through the same spec and the same mixing
/// matrices as `base`; used for held-out evaluation data.
SimulationDataset regenerate(const SimulationDataset& base, std::uint64_t seed);

/// Recovery scores of a fitted model against the generating truth.
/// Angles are principal subspace angles normalized to [0, 1].
struct RecoveryMetrics {
  double mean_isc_train = 0.0;
  double mean_isc_test = 0.0;
  double subspace_angle_forward = 1.0;
  double subspace_angle_components = 1.0;
  std::vector<double> per_component_corr;  // greedy |Pearson| match, truth order
  std::map<std::string, int> k_estimated;  // filled by run_study
  bool truncated = false;  // model had fewer than K components
};

RecoveryMetrics evaluate_recovery(const SimulationDataset& dataset, const CorrCAModel& model,
                                  const SimulationDataset& heldout);

/// Largest principal angle between the column spans, normalized to [0, 1].
double normalized_subspace_angle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct StudyCellResult {
  SimulationSpec spec;
  int repetition = 0;
  std::uint64_t seed = 0;
  RecoveryMetrics corrca;
  RecoveryMetrics pca_baseline;
};

struct StudyOptions {
  int repetitions_per_cell = 20;
  /// Significance methods to run per repetition:
  /// "parametric_f", "circular_shift", "phase_scramble".
  std::vector<std::string> k_methods;
  int n_surrogates = 200;
  int parametric_splits = 100;
  double alpha = 0.05;
  Regularization reg;
  std::uint64_t seed = 0;
};

struct StudyResults {
  std::vector<StudyCellResult> rows;  // one per (cell, repetition)
};

/// Runs every spec in the grid `options.repetitions_per_cell` times with
/// derived per-(cell, repetition) seeds; each repetition fits CorrCA and
/// the PCA-of-mean baseline on fresh train data, scores against fresh
/// held-out data and optionally estimates K with the requested tests.
StudyResults run_study(const std::vector<SimulationSpec>& grid, const StudyOptions& options);

}  // namespace corrca

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corrca/regularization.hpp"
#include "corrca/rng.hpp"
#include "corrca/tensor.hpp"

namespace corrca {

enum class SurrogateMethod { circular_shift, phase_scramble };

std::string to_string(SurrogateMethod m);

/// Per-component significance decisions. For surrogate methods the p-values
/// come from the null distribution of the maximum component ISC (no further
/// multiple-comparison correction); for the parametric F test each
/// component is Bonferroni-corrected.
struct SignificanceReport {
  std::string method;  // "parametric_f" | "circular_shift" | "phase_scramble"
  std::vector<double> isc;       // observed per-component
  std::vector<double> p_values;
  std::vector<bool> significant;
  double alpha = 0.05;
  int k_significant = 0;
  int n_surrogates = 0;          // 0 for the parametric test
  std::uint64_t seed = 0;
  std::vector<bool> overflow;    // rho >= 1 encountered (p forced to 0)
  std::vector<std::string> warnings;
};

/// Exact F test on ISC values measured on unseen test data (the statistic
/// is not valid on training data). p is the upper tail of F(d1, d2) with
/// d1 = T(N-1), d2 = T-1; a component is significant when p < alpha / J
/// with J the number of tested components.
SignificanceReport parametric_f_test(const std::vector<double>& isc_test, Eigen::Index t,
                                     Eigen::Index n, double alpha);

/// One uniform offset per repetition, applied to all features: sample i
/// moves to (i + o) mod T. Per-repetition covariance is exactly unchanged.
DataTensor circular_shift_surrogate(const DataTensor& x, Rng& rng);

/// One random phase vector per repetition added to the Fourier phases of
/// all features (identical across features, conjugate-symmetric, DC and
/// Nyquist untouched). Preserves each feature's amplitude spectrum.
DataTensor phase_scramble_surrogate(const DataTensor& x, Rng& rng);

/// Deterministic variant with caller-supplied phases: one vector per
/// repetition covering the interior frequency bins 1 .. ceil(T/2)-1.
/// All-zero phases reproduce the input.
DataTensor phase_scramble_surrogate(const DataTensor& x,
                                    const std::vector<std::vector<double>>& phases);

DataTensor make_surrogate(const DataTensor& x, SurrogateMethod method, Rng& rng);

/// Max-statistic surrogate test: refits CorrCA (same regularization) on
/// n_surrogates surrogate tensors and compares each observed training ISC
/// against the null distribution of the maximum ISC. p uses the add-one
/// rule (1 + exceedances) / (n_surrogates + 1). Deterministic given the
/// seed: surrogate s draws from substream_seed(seed, s).
SignificanceReport surrogate_test(const DataTensor& x, SurrogateMethod method,
                                  int n_surrogates, double alpha, std::uint64_t seed,
                                  const Regularization& reg = Regularization::none());

/// Random train/test split protocol for the parametric test: fits on half
/// the samples, tests on the other half, repeats n_splits times and
/// reports the median component count. The returned report is the split
/// whose count equals the median (first such split).
struct ParametricSplitResult {
  int k_median = 0;
  std::vector<int> k_per_split;
  SignificanceReport representative;
};

ParametricSplitResult parametric_split_test(const DataTensor& x, int n_splits, double alpha,
                                            std::uint64_t seed,
                                            const Regularization& reg = Regularization::none());

}  // namespace corrca

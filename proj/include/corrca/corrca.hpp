#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "corrca/covariance.hpp"
#include "corrca/eigensolve.hpp"
#include "corrca/tensor.hpp"

namespace corrca {

/// Fitted CorrCA decomposition. backward (V) maps observations to
/// components, forward (A) maps components back to feature space, isc holds
/// the per-component inter-repetition correlation measured on the training
/// data, descending.
struct CorrCAModel {
  Eigen::MatrixXd backward;  // D x J
  Eigen::MatrixXd forward;   // D x J
  Eigen::VectorXd isc;       // J, descending (NaN = undefined never stored by fit)
  Regularization regularization;
  Eigen::Index j_components = 0;
  Eigen::Index t_samples = 0;
  Eigen::Index d_features = 0;
  Eigen::Index n_reps = 0;
  std::vector<bool> degenerate;  // identifiability caveat per component
  std::vector<std::string> warnings;
};

/// Per-component ISC with the derived separation / F statistics.
struct IscStatistics {
  std::vector<double> isc;
  std::vector<double> snr;      // S = (rho + 1/(N-1)) / (1 - rho)
  std::vector<double> f_value;  // F = (T(N-1) rho + T) / ((T-1)(1 - rho))
  double dof1 = 0;              // T(N-1)
  double dof2 = 0;              // T-1
  std::vector<bool> overflow;   // rho >= 1: S and F reported as +Inf
};

struct FStatResult {
  double f = 0;
  double dof1 = 0;
  double dof2 = 0;
  bool overflow = false;  // rho >= 1
};

/// Fits CorrCA: centers per repetition, forms the covariance pair and
/// solves R_B V = R_W V Lambda with the requested regularization of R_W.
/// Components are scaled to v' R~_W v = 1, ordered by training ISC
/// descending; components with undefined ISC (zero within-variance) are
/// dropped with a warning.
CorrCAModel fit(const DataTensor& x, const Regularization& reg = Regularization::none());

/// y[i][j][l] = sum_d V[d][j] x[i][d][l]. No centering is applied; the
/// caller controls preprocessing.
ComponentTensor transform(const DataTensor& x, const CorrCAModel& model);
ComponentTensor transform(const DataTensor& x, const Eigen::MatrixXd& backward);

/// Least-squares forward model A = R_W V (V' R_W V)^-1.
Eigen::MatrixXd forward_model(const Eigen::MatrixXd& v, const Eigen::MatrixXd& r_w);

/// Per-component ISC rho_j = r_B / ((N-1) r_W) with scalar r_B obtained via
/// the fast identity r_B = r_T - r_W. A component with zero within-variance
/// yields NaN ("undefined"), never +-Inf.
std::vector<double> isc_of_components(const ComponentTensor& y);

/// Single-repetition ISC against the rest of the group:
/// rho_k = sum_{l != k} (r_kl + r_lk) / sum_{l != k} (r_ll + r_kk).
std::vector<double> isc_per_subject(const ComponentTensor& y, Eigen::Index subject);

/// S = (rho + 1/(N-1)) / (1 - rho); +Inf for rho >= 1.
double isc_to_snr(double rho, Eigen::Index n, bool* overflow = nullptr);

FStatResult f_statistic(double rho, Eigen::Index t, Eigen::Index n);

IscStatistics isc_statistics(const std::vector<double>& isc, Eigen::Index t, Eigen::Index n);

/// Fits via the LDA route: solves S_B V = S_W V Lambda_S on the scatter
/// matrices and maps class separation back to ISC. Requires equalized
/// per-repetition means (||S_M|| < 1e-10 ||S_T||), i.e. the caller centers
/// first. Component scaling differs from fit() by a per-column factor.
CorrCAModel fit_lda_view(const DataTensor& x);

/// Baseline: principal axes of the covariance of the across-repetition
/// mean, ordered by variance; the isc field is filled by evaluating the
/// projected full tensor (and is therefore not necessarily descending).
CorrCAModel fit_pca_mean_baseline(const DataTensor& x);

}  // namespace corrca

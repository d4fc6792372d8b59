#include "corrca/serialization.hpp"

#include <cmath>
#include <fstream>

#include "corrca/errors.hpp"
#include "corrca/version.hpp"

namespace corrca {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ValidationError("expected a nested array for a matrix");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) != cols)
      throw ValidationError("ragged matrix rows in JSON");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(i, c) = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json tensor_to_json(const DataTensor& x) {
  json reps = json::array();
  for (const auto& r : x.reps()) reps.push_back(matrix_to_json(r));
  json out;
  out["repetitions"] = std::move(reps);
  if (!x.feature_labels().empty()) out["feature_labels"] = x.feature_labels();
  if (!x.repetition_ids().empty()) out["repetition_ids"] = x.repetition_ids();
  return out;
}

DataTensor tensor_from_json(const json& j) {
  std::vector<Eigen::MatrixXd> reps;
  for (const auto& r : j.at("repetitions")) reps.push_back(matrix_from_json(r));
  std::vector<std::string> labels, ids;
  if (j.contains("feature_labels")) labels = j["feature_labels"].get<std::vector<std::string>>();
  if (j.contains("repetition_ids")) ids = j["repetition_ids"].get<std::vector<std::string>>();
  return DataTensor(std::move(reps), std::move(labels), std::move(ids));
}

}  // namespace

json to_json(const CorrCAModel& model) {
  json j;
  j["version"] = kVersion;
  j["kind"] = "corrca";
  j["backward"] = matrix_to_json(model.backward);
  j["forward"] = matrix_to_json(model.forward);
  j["isc"] = vector_to_json(model.isc);
  j["regularization"] = model.regularization.to_string();
  j["j_components"] = model.j_components;
  j["dims"] = {{"t", model.t_samples}, {"d", model.d_features}, {"n", model.n_reps}};
  j["degenerate"] = model.degenerate;
  j["warnings"] = model.warnings;
  return j;
}

CorrCAModel corrca_model_from_json(const json& j) {
  if (model_kind(j) != "corrca") throw ValidationError("model kind is not 'corrca'");
  CorrCAModel m;
  m.backward = matrix_from_json(j.at("backward"));
  m.forward = matrix_from_json(j.at("forward"));
  m.isc = vector_from_json(j.at("isc"));
  m.regularization = Regularization::parse(j.at("regularization").get<std::string>());
  m.j_components = j.at("j_components").get<Eigen::Index>();
  m.t_samples = j.at("dims").at("t").get<Eigen::Index>();
  m.d_features = j.at("dims").at("d").get<Eigen::Index>();
  m.n_reps = j.at("dims").at("n").get<Eigen::Index>();
  m.degenerate = j.value("degenerate", std::vector<bool>{});
  m.warnings = j.value("warnings", std::vector<std::string>{});
  return m;
}

json to_json(const MCCAModel& model) {
  json j;
  j["version"] = kVersion;
  j["kind"] = "mcca";
  json per_rep = json::array();
  for (const auto& v : model.backward_per_rep) per_rep.push_back(matrix_to_json(v));
  j["backward_per_rep"] = std::move(per_rep);
  j["eigenvalues"] = vector_to_json(model.eigenvalues);
  j["isc"] = vector_to_json(model.isc);
  j["regularization"] = model.regularization.to_string();
  j["j_components"] = model.j_components;
  j["dims"] = {{"t", model.t_samples}, {"d", model.d_features}, {"n", model.n_reps}};
  j["degenerate"] = model.degenerate;
  j["warnings"] = model.warnings;
  return j;
}

MCCAModel mcca_model_from_json(const json& j) {
  if (model_kind(j) != "mcca") throw ValidationError("model kind is not 'mcca'");
  MCCAModel m;
  for (const auto& v : j.at("backward_per_rep")) m.backward_per_rep.push_back(matrix_from_json(v));
  m.eigenvalues = vector_from_json(j.at("eigenvalues"));
  m.isc = vector_from_json(j.at("isc"));
  m.regularization = Regularization::parse(j.at("regularization").get<std::string>());
  m.j_components = j.at("j_components").get<Eigen::Index>();
  m.t_samples = j.at("dims").at("t").get<Eigen::Index>();
  m.d_features = j.at("dims").at("d").get<Eigen::Index>();
  m.n_reps = j.at("dims").at("n").get<Eigen::Index>();
  m.degenerate = j.value("degenerate", std::vector<bool>{});
  m.warnings = j.value("warnings", std::vector<std::string>{});
  return m;
}

json to_json(const KernelCorrCAModel& model) {
  json j;
  j["version"] = kVersion;
  j["kind"] = "kernel";
  j["alpha"] = matrix_to_json(model.alpha);
  json k;
  k["kind"] = model.kernel.kind == KernelSpec::Kind::gaussian ? "gaussian" : "tanh";
  k["bandwidth"] = model.kernel.bandwidth;
  k["tanh_scale"] = model.kernel.tanh_scale;
  k["tanh_offset"] = model.kernel.tanh_offset;
  k["variant"] = model.kernel.variant == KernelSpec::Variant::mean ? "mean" : "full";
  k["shrink_gamma"] = model.kernel.shrink_gamma;
  j["kernel"] = std::move(k);
  // Out-of-sample transforms evaluate kernels against the training samples,
  // so the training tensor travels with the model.
  j["training_reference"] = tensor_to_json(model.training_reference);
  j["isc"] = vector_to_json(model.isc);
  j["j_components"] = model.j_components;
  j["degenerate"] = model.degenerate;
  j["warnings"] = model.warnings;
  return j;
}

KernelCorrCAModel kernel_model_from_json(const json& j) {
  if (model_kind(j) != "kernel") throw ValidationError("model kind is not 'kernel'");
  KernelSpec spec;
  const auto& k = j.at("kernel");
  spec.kind = k.at("kind").get<std::string>() == "tanh" ? KernelSpec::Kind::tanh_kernel
                                                        : KernelSpec::Kind::gaussian;
  spec.bandwidth = k.at("bandwidth").get<double>();
  spec.tanh_scale = k.value("tanh_scale", 1.0);
  spec.tanh_offset = k.value("tanh_offset", 0.0);
  spec.variant = k.at("variant").get<std::string>() == "full" ? KernelSpec::Variant::full
                                                              : KernelSpec::Variant::mean;
  spec.shrink_gamma = k.value("shrink_gamma", 1e-6);

  KernelCorrCAModel m{.alpha = matrix_from_json(j.at("alpha")),
                      .kernel = spec,
                      .training_reference = tensor_from_json(j.at("training_reference")),
                      .isc = vector_from_json(j.at("isc")),
                      .j_components = j.at("j_components").get<Eigen::Index>(),
                      .degenerate = j.value("degenerate", std::vector<bool>{}),
                      .warnings = j.value("warnings", std::vector<std::string>{})};
  return m;
}

json to_json(const SignificanceReport& report) {
  json j;
  j["version"] = kVersion;
  j["method"] = report.method;
  j["alpha"] = report.alpha;
  j["n_surrogates"] = report.n_surrogates;
  j["seed"] = report.seed;
  j["k_significant"] = report.k_significant;
  json comps = json::array();
  for (std::size_t i = 0; i < report.isc.size(); ++i) {
    json c;
    // NaN is not representable in JSON; store undefined ISC as null.
    if (std::isnan(report.isc[i]))
      c["isc"] = nullptr;
    else
      c["isc"] = report.isc[i];
    c["p"] = report.p_values[i];
    c["significant"] = static_cast<bool>(report.significant[i]);
    c["overflow"] = static_cast<bool>(report.overflow[i]);
    comps.push_back(std::move(c));
  }
  j["components"] = std::move(comps);
  j["warnings"] = report.warnings;
  return j;
}

std::string model_kind(const json& j) {
  if (!j.contains("kind")) throw ValidationError("model JSON lacks a 'kind' field");
  return j.at("kind").get<std::string>();
}

void write_json(const json& j, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + file.string());
}

json read_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ValidationError(file.string() + ": invalid JSON: " + e.what());
  }
}

}  // namespace corrca

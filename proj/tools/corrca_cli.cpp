// Command-line front end: fit / transform / test / simulate / study over
// file-based datasets. All outputs are deterministic for a fixed seed;
// progress and timing notes go to stderr only.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "corrca/corrca.hpp"
#include "corrca/dataset_io.hpp"
#include "corrca/errors.hpp"
#include "corrca/kernel.hpp"
#include "corrca/mcca.hpp"
#include "corrca/serialization.hpp"
#include "corrca/significance.hpp"
#include "corrca/simulation.hpp"
#include "corrca/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace corrca;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct FitOptions {
  std::string dataset;
  std::string out_dir;
  std::string method = "corrca";
  std::string reg = "none";
  bool standardize = false;
  std::string kernel_kind = "gaussian";
  double bandwidth = 0.0;
  double tanh_scale = 1.0;
  double tanh_offset = 0.0;
  std::string kernel_variant = "mean";
  std::uint64_t seed = 0;
};

struct TransformOptions {
  std::string dataset;
  std::string model_file;
  std::string out_dir;
};

struct TestOptions {
  std::string dataset;
  std::string out_file;
  std::string method = "circular";
  std::string reg = "none";
  double alpha = 0.05;
  int n_surrogates = 1000;
  int splits = 100;
  std::uint64_t seed = 0;
};

struct SimulateOptions {
  std::string out_dir;
  SimulationSpec spec;
  std::string process = "iid";
  std::string distribution = "gaussian";
  std::string shared_mixing = "common";
  std::string noise_mixing = "common";
};

struct StudyOptionsCli {
  std::string out_dir;
  std::vector<double> snr_db{0.0};
  std::vector<Eigen::Index> k_list;
  Eigen::Index t = 200, d = 30, n = 5, k = 10;
  std::string process = "iid";
  std::string distribution = "gaussian";
  int reps = 20;
  std::vector<std::string> methods;
  int n_surrogates = 200;
  int splits = 100;
  double alpha = 0.05;
  std::string reg = "none";
  std::uint64_t seed = 0;
};

json config_echo(const std::string& command, const json& fields, std::uint64_t seed) {
  json c;
  c["tool"] = "corrca";
  c["version"] = kVersion;
  c["command"] = command;
  c["seed"] = seed;
  c["options"] = fields;
  return c;
}

SimulationSpec::Process parse_process(const std::string& s) {
  if (s == "iid") return SimulationSpec::Process::iid;
  if (s == "pink") return SimulationSpec::Process::pink;
  throw ArgumentError("unknown sample process '" + s + "' (iid|pink)");
}

SimulationSpec::Distribution parse_distribution(const std::string& s) {
  if (s == "gaussian") return SimulationSpec::Distribution::gaussian;
  if (s == "chi_squared") return SimulationSpec::Distribution::chi_squared;
  if (s == "dichotomized") return SimulationSpec::Distribution::dichotomized;
  throw ArgumentError("unknown distribution '" + s + "' (gaussian|chi_squared|dichotomized)");
}

SimulationSpec::Mixing parse_mixing(const std::string& s) {
  if (s == "common") return SimulationSpec::Mixing::common;
  if (s == "per_rep") return SimulationSpec::Mixing::per_rep;
  throw ArgumentError("unknown mixing '" + s + "' (common|per_rep)");
}

json isc_table(const std::vector<double>& isc, Eigen::Index t, Eigen::Index n,
               const std::vector<bool>& degenerate) {
  const auto stats = isc_statistics(isc, t, n);
  json comps = json::array();
  for (std::size_t j = 0; j < isc.size(); ++j) {
    json c;
    c["index"] = j;
    c["isc"] = isc[j];
    c["snr"] = stats.overflow[j] ? json() : json(stats.snr[j]);
    c["f"] = stats.overflow[j] ? json() : json(stats.f_value[j]);
    c["overflow"] = static_cast<bool>(stats.overflow[j]);
    c["degenerate"] = j < degenerate.size() ? static_cast<bool>(degenerate[j]) : false;
    comps.push_back(std::move(c));
  }
  json out;
  out["components"] = std::move(comps);
  out["dof"] = {{"d1", stats.dof1}, {"d2", stats.dof2}};
  return out;
}

int cmd_fit(const FitOptions& opt) {
  DataTensor x = load_dataset(opt.dataset);
  std::vector<std::string> warnings;
  if (opt.standardize) {
    auto std_result = standardize_per_repetition(x);
    for (const auto& [l, d] : std_result.zero_variance_columns)
      warnings.push_back("zero-variance column left at 0: repetition " + std::to_string(l) +
                         ", feature " + std::to_string(d));
    x = std_result.tensor;
  }

  const Regularization reg = Regularization::parse(opt.reg);
  fs::create_directories(opt.out_dir);

  json cfg_fields{{"dataset", opt.dataset},   {"method", opt.method},
                  {"regularization", opt.reg}, {"standardize", opt.standardize}};
  json model_json, report;
  std::vector<double> isc;
  std::vector<bool> degenerate;

  if (opt.method == "corrca") {
    const CorrCAModel model = fit(x, reg);
    model_json = to_json(model);
    isc.assign(model.isc.data(), model.isc.data() + model.isc.size());
    degenerate = model.degenerate;
    report["backward"] = matrix_to_json(model.backward);
    report["forward"] = matrix_to_json(model.forward);
    for (const auto& w : model.warnings) warnings.push_back(w);
  } else if (opt.method == "mcca") {
    const MCCAModel model = fit_mcca(x, reg);
    model_json = to_json(model);
    isc.assign(model.isc.data(), model.isc.data() + model.isc.size());
    degenerate = model.degenerate;
    json per_rep = json::array();
    for (const auto& v : model.backward_per_rep) per_rep.push_back(matrix_to_json(v));
    report["backward_per_rep"] = std::move(per_rep);
    const Eigen::Index n_fwd = std::min(model.d_features, model.j_components);
    json fwd = json::array();
    for (const auto& a : mcca_forward_models(model, x, n_fwd)) fwd.push_back(matrix_to_json(a));
    report["forward_per_rep"] = std::move(fwd);
    for (const auto& w : model.warnings) warnings.push_back(w);
  } else if (opt.method == "kernel") {
    KernelSpec spec;
    spec.kind = opt.kernel_kind == "tanh" ? KernelSpec::Kind::tanh_kernel
                                          : KernelSpec::Kind::gaussian;
    if (opt.kernel_kind != "tanh" && opt.kernel_kind != "gaussian")
      throw ArgumentError("unknown kernel '" + opt.kernel_kind + "' (gaussian|tanh)");
    spec.bandwidth = opt.bandwidth;
    spec.tanh_scale = opt.tanh_scale;
    spec.tanh_offset = opt.tanh_offset;
    spec.variant = opt.kernel_variant == "full" ? KernelSpec::Variant::full
                                                : KernelSpec::Variant::mean;
    if (reg.kind == Regularization::Kind::shrinkage) spec.shrink_gamma = reg.shrink_gamma;
    else if (reg.kind == Regularization::Kind::tsvd)
      throw ArgumentError("kernel method supports shrinkage regularization only");
    const KernelCorrCAModel model = fit_kernel(x, spec);
    model_json = to_json(model);
    isc.assign(model.isc.data(), model.isc.data() + model.isc.size());
    degenerate = model.degenerate;
    report["alpha"] = matrix_to_json(model.alpha);
    report["bandwidth"] = model.kernel.bandwidth;
    for (const auto& w : model.warnings) warnings.push_back(w);
    cfg_fields["kernel"] = {{"kind", opt.kernel_kind},
                            {"bandwidth", opt.bandwidth},
                            {"variant", opt.kernel_variant}};
  } else {
    throw ArgumentError("unknown method '" + opt.method + "' (corrca|mcca|kernel)");
  }

  const json cfg = config_echo("fit", cfg_fields, opt.seed);
  model_json["config"] = cfg;
  report.update(isc_table(isc, x.t_samples(), x.n_reps(), degenerate));
  report["config"] = cfg;
  report["version"] = kVersion;
  report["warnings"] = warnings;
  write_json(model_json, fs::path(opt.out_dir) / "model.json");
  write_json(report, fs::path(opt.out_dir) / "report.json");
  return kExitOk;
}

int cmd_transform(const TransformOptions& opt) {
  const DataTensor x = load_dataset(opt.dataset);
  const json mj = read_json(opt.model_file);
  const std::string kind = model_kind(mj);
  fs::create_directories(opt.out_dir);

  ComponentTensor y = [&] {
    if (kind == "corrca") return transform(x, corrca_model_from_json(mj));
    if (kind == "mcca") return transform_mcca(x, mcca_model_from_json(mj));
    if (kind == "kernel") return transform_kernel(x, kernel_model_from_json(mj));
    throw ValidationError("unknown model kind '" + kind + "'");
  }();

  for (Eigen::Index l = 0; l < y.n_reps(); ++l) {
    char name[40];
    std::snprintf(name, sizeof(name), "components_%03d.csv", static_cast<int>(l));
    save_matrix_csv(y.rep(l), fs::path(opt.out_dir) / name);
  }
  return kExitOk;
}

int cmd_test(const TestOptions& opt) {
  const DataTensor x = load_dataset(opt.dataset);
  const Regularization reg = Regularization::parse(opt.reg);

  SignificanceReport report;
  json extra = json::object();
  if (opt.method == "f") {
    const auto split = parametric_split_test(x, opt.splits, opt.alpha, opt.seed, reg);
    report = split.representative;
    report.seed = opt.seed;
    extra["k_median"] = split.k_median;
    extra["k_per_split"] = split.k_per_split;
  } else if (opt.method == "circular" || opt.method == "phase") {
    const auto method = opt.method == "circular" ? SurrogateMethod::circular_shift
                                                 : SurrogateMethod::phase_scramble;
    report = surrogate_test(x, method, opt.n_surrogates, opt.alpha, opt.seed, reg);
  } else {
    throw ArgumentError("unknown test method '" + opt.method + "' (f|circular|phase)");
  }

  json out = to_json(report);
  out.update(extra);
  out["config"] = config_echo("test",
                              json{{"dataset", opt.dataset},
                                   {"method", opt.method},
                                   {"alpha", opt.alpha},
                                   {"n_surrogates", opt.n_surrogates},
                                   {"splits", opt.splits},
                                   {"regularization", opt.reg}},
                              opt.seed);
  write_json(out, opt.out_file);
  return kExitOk;
}

int cmd_simulate(SimulateOptions& opt) {
  opt.spec.sample_process = parse_process(opt.process);
  opt.spec.distribution = parse_distribution(opt.distribution);
  opt.spec.shared_mixing = parse_mixing(opt.shared_mixing);
  opt.spec.noise_mixing = parse_mixing(opt.noise_mixing);
  const SimulationDataset data = generate(opt.spec);
  save_dataset(data.tensor, opt.out_dir);

  json truth;
  truth["config"] = config_echo("simulate",
                                json{{"t", opt.spec.t_samples},
                                     {"d", opt.spec.d_features},
                                     {"n", opt.spec.n_reps},
                                     {"k", opt.spec.k_shared},
                                     {"snr_db", opt.spec.snr_db},
                                     {"process", opt.process},
                                     {"distribution", opt.distribution},
                                     {"shared_mixing", opt.shared_mixing},
                                     {"noise_mixing", opt.noise_mixing}},
                                opt.spec.seed);
  truth["version"] = kVersion;
  json mixing = json::array();
  for (const auto& a : data.true_mixing) mixing.push_back(matrix_to_json(a));
  truth["true_mixing"] = std::move(mixing);
  json comps = json::array();
  for (const auto& s : data.true_components) comps.push_back(matrix_to_json(s));
  truth["true_components"] = std::move(comps);
  write_json(truth, fs::path(opt.out_dir) / "sim_truth.json");
  return kExitOk;
}

int cmd_study(const StudyOptionsCli& opt) {
  std::vector<SimulationSpec> grid;
  const std::vector<Eigen::Index> ks = opt.k_list.empty() ? std::vector<Eigen::Index>{opt.k}
                                                          : opt.k_list;
  for (double snr : opt.snr_db) {
    for (Eigen::Index k : ks) {
      SimulationSpec spec;
      spec.t_samples = opt.t;
      spec.d_features = opt.d;
      spec.n_reps = opt.n;
      spec.k_shared = k;
      spec.snr_db = snr;
      spec.sample_process = parse_process(opt.process);
      spec.distribution = parse_distribution(opt.distribution);
      grid.push_back(spec);
    }
  }

  StudyOptions study;
  study.repetitions_per_cell = opt.reps;
  study.k_methods = opt.methods;
  study.n_surrogates = opt.n_surrogates;
  study.parametric_splits = opt.splits;
  study.alpha = opt.alpha;
  study.reg = Regularization::parse(opt.reg);
  study.seed = opt.seed;

  const StudyResults results = run_study(grid, study);
  fs::create_directories(opt.out_dir);

  // one CSV row per (cell, repetition)
  std::ofstream csv(fs::path(opt.out_dir) / "results.csv");
  if (!csv) throw IoError("cannot write results.csv");
  csv << "snr_db,k_shared,t,d,n,process,distribution,repetition,seed,"
         "corrca_train_isc,corrca_test_isc,pca_test_isc,angle_forward,angle_components";
  for (const auto& m : opt.methods) csv << ",k_" << m;
  csv << "\n";
  for (const auto& row : results.rows) {
    csv << format_double(row.spec.snr_db) << ',' << row.spec.k_shared << ',' << row.spec.t_samples
        << ',' << row.spec.d_features << ',' << row.spec.n_reps << ','
        << (row.spec.sample_process == SimulationSpec::Process::pink ? "pink" : "iid") << ','
        << opt.distribution << ',' << row.repetition << ',' << row.seed << ','
        << format_double(row.corrca.mean_isc_train) << ','
        << format_double(row.corrca.mean_isc_test) << ','
        << format_double(row.pca_baseline.mean_isc_test) << ','
        << format_double(row.corrca.subspace_angle_forward) << ','
        << format_double(row.corrca.subspace_angle_components);
    for (const auto& m : opt.methods) csv << ',' << row.corrca.k_estimated.at(m);
    csv << "\n";
  }
  csv.close();

  // per-cell aggregates
  json cells = json::array();
  std::size_t row_idx = 0;
  for (const auto& spec : grid) {
    std::vector<const StudyCellResult*> cell_rows;
    for (int r = 0; r < opt.reps; ++r) cell_rows.push_back(&results.rows[row_idx++]);
    const auto agg = [&](auto getter) {
      double mean = 0.0, sq = 0.0;
      for (const auto* r : cell_rows) mean += getter(*r);
      mean /= static_cast<double>(cell_rows.size());
      for (const auto* r : cell_rows) sq += (getter(*r) - mean) * (getter(*r) - mean);
      const double sd = cell_rows.size() > 1
                            ? std::sqrt(sq / static_cast<double>(cell_rows.size() - 1))
                            : 0.0;
      return json{{"mean", mean}, {"std", sd}};
    };
    json cell;
    cell["snr_db"] = spec.snr_db;
    cell["k_shared"] = spec.k_shared;
    cell["corrca_train_isc"] = agg([](const auto& r) { return r.corrca.mean_isc_train; });
    cell["corrca_test_isc"] = agg([](const auto& r) { return r.corrca.mean_isc_test; });
    cell["pca_test_isc"] = agg([](const auto& r) { return r.pca_baseline.mean_isc_test; });
    cell["angle_forward"] = agg([](const auto& r) { return r.corrca.subspace_angle_forward; });
    cell["angle_components"] =
        agg([](const auto& r) { return r.corrca.subspace_angle_components; });
    for (const auto& m : opt.methods) {
      std::vector<int> ks_est;
      for (const auto* r : cell_rows) ks_est.push_back(r->corrca.k_estimated.at(m));
      std::sort(ks_est.begin(), ks_est.end());
      cell["k_median_" + m] = ks_est[ks_est.size() / 2];
    }
    cells.push_back(std::move(cell));
  }
  json summary;
  summary["version"] = kVersion;
  summary["cells"] = std::move(cells);
  summary["config"] = config_echo("study",
                                  json{{"snr_db", opt.snr_db},
                                       {"t", opt.t},
                                       {"d", opt.d},
                                       {"n", opt.n},
                                       {"k", opt.k},
                                       {"reps", opt.reps},
                                       {"process", opt.process},
                                       {"distribution", opt.distribution},
                                       {"methods", opt.methods},
                                       {"n_surrogates", opt.n_surrogates},
                                       {"splits", opt.splits},
                                       {"alpha", opt.alpha},
                                       {"regularization", opt.reg}},
                                  opt.seed);
  write_json(summary, fs::path(opt.out_dir) / "summary.json");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correlated components analysis toolkit"};
  app.require_subcommand(1);

  FitOptions fit_opt;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a model and write model + report JSON");
  fit_cmd->add_option("dataset", fit_opt.dataset, "Dataset directory or manifest")->required();
  fit_cmd->add_option("-o,--out", fit_opt.out_dir, "Output directory")->required();
  fit_cmd->add_option("--method", fit_opt.method, "corrca|mcca|kernel");
  fit_cmd->add_option("--reg", fit_opt.reg, "none | tsvd:K | shrinkage:GAMMA");
  fit_cmd->add_flag("--standardize", fit_opt.standardize,
                    "Divide each repetition/feature by its standard deviation first");
  fit_cmd->add_option("--kernel", fit_opt.kernel_kind, "gaussian|tanh");
  fit_cmd->add_option("--bandwidth", fit_opt.bandwidth,
                      "Gaussian bandwidth (<= 0: median heuristic)");
  fit_cmd->add_option("--tanh-scale", fit_opt.tanh_scale, "tanh kernel scale");
  fit_cmd->add_option("--tanh-offset", fit_opt.tanh_offset, "tanh kernel offset");
  fit_cmd->add_option("--variant", fit_opt.kernel_variant, "mean|full expansion");
  fit_cmd->add_option("--seed", fit_opt.seed, "Recorded in outputs");

  TransformOptions tr_opt;
  auto* tr_cmd = app.add_subcommand("transform", "Project a dataset through a model");
  tr_cmd->add_option("dataset", tr_opt.dataset, "Dataset directory or manifest")->required();
  tr_cmd->add_option("--model", tr_opt.model_file, "model.json")->required();
  tr_cmd->add_option("-o,--out", tr_opt.out_dir, "Output directory")->required();

  TestOptions test_opt;
  auto* test_cmd = app.add_subcommand("test", "Significance test, writes a report JSON");
  test_cmd->add_option("dataset", test_opt.dataset, "Dataset directory or manifest")->required();
  test_cmd->add_option("-o,--out", test_opt.out_file, "Report file")->required();
  test_cmd->add_option("--method", test_opt.method, "f|circular|phase");
  test_cmd->add_option("--alpha", test_opt.alpha, "Significance level");
  test_cmd->add_option("--n-surrogates", test_opt.n_surrogates, "Surrogate count");
  test_cmd->add_option("--splits", test_opt.splits, "Train/test splits for --method f");
  test_cmd->add_option("--reg", test_opt.reg, "Regularization for refits");
  test_cmd->add_option("--seed", test_opt.seed, "RNG seed");

  SimulateOptions sim_opt;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic dataset directory");
  sim_cmd->add_option("-o,--out", sim_opt.out_dir, "Output dataset directory")->required();
  sim_cmd->add_option("--t", sim_opt.spec.t_samples, "Samples per repetition");
  sim_cmd->add_option("--d", sim_opt.spec.d_features, "Feature count");
  sim_cmd->add_option("--n", sim_opt.spec.n_reps, "Repetition count");
  sim_cmd->add_option("--k", sim_opt.spec.k_shared, "Shared component count");
  sim_cmd->add_option("--snr-db", sim_opt.spec.snr_db, "Signal-to-noise ratio in dB");
  sim_cmd->add_option("--process", sim_opt.process, "iid|pink");
  sim_cmd->add_option("--distribution", sim_opt.distribution,
                      "gaussian|chi_squared|dichotomized");
  sim_cmd->add_option("--shared-mixing", sim_opt.shared_mixing, "common|per_rep");
  sim_cmd->add_option("--noise-mixing", sim_opt.noise_mixing, "common|per_rep");
  sim_cmd->add_option("--seed", sim_opt.spec.seed, "RNG seed");

  StudyOptionsCli study_opt;
  auto* study_cmd = app.add_subcommand("study", "Parameter sweep with recovery metrics");
  study_cmd->add_option("-o,--out", study_opt.out_dir, "Output directory")->required();
  study_cmd->add_option("--snr-db", study_opt.snr_db, "SNR grid values");
  study_cmd->add_option("--k-list", study_opt.k_list, "Shared-component grid values");
  study_cmd->add_option("--t", study_opt.t, "Samples per repetition");
  study_cmd->add_option("--d", study_opt.d, "Feature count");
  study_cmd->add_option("--n", study_opt.n, "Repetition count");
  study_cmd->add_option("--k", study_opt.k, "Shared components (when --k-list absent)");
  study_cmd->add_option("--process", study_opt.process, "iid|pink");
  study_cmd->add_option("--distribution", study_opt.distribution,
                        "gaussian|chi_squared|dichotomized");
  study_cmd->add_option("--reps", study_opt.reps, "Repetitions per cell");
  study_cmd->add_option("--methods", study_opt.methods,
                        "K-estimation methods: parametric_f circular_shift phase_scramble");
  study_cmd->add_option("--n-surrogates", study_opt.n_surrogates, "Surrogates per test");
  study_cmd->add_option("--splits", study_opt.splits, "Splits for the parametric test");
  study_cmd->add_option("--alpha", study_opt.alpha, "Significance level");
  study_cmd->add_option("--reg", study_opt.reg, "Regularization descriptor");
  study_cmd->add_option("--seed", study_opt.seed, "Master seed");

  try {
    app.parse(argc, argv);
    if (fit_cmd->parsed()) return cmd_fit(fit_opt);
    if (tr_cmd->parsed()) return cmd_transform(tr_opt);
    if (test_cmd->parsed()) return cmd_test(test_opt);
    if (sim_cmd->parsed()) return cmd_simulate(sim_opt);
    if (study_cmd->parsed()) return cmd_study(study_opt);
    return kExitValidation;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

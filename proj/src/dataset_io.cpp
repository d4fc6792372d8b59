#include "corrca/dataset_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <vector>

namespace corrca {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delim)) cells.push_back(cell);
  if (!line.empty() && line.back() == delim) cells.emplace_back();
  return cells;
}

bool parse_cell(const std::string& raw, double& out) {
  const char* begin = raw.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  return *end == '\0';
}

Eigen::MatrixXd load_csv(const fs::path& file, char delim,
                         std::vector<std::string>* header_out) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool first_content_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line, delim);
    std::vector<double> values(cells.size());
    bool numeric = true;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::string trimmed = cells[c];
      const auto b = trimmed.find_first_not_of(" \t");
      trimmed = (b == std::string::npos) ? "" : trimmed.substr(b);
      if (!parse_cell(trimmed, values[c])) {
        numeric = false;
        if (!first_content_row)
          throw ValidationError(file.string() + ":" + std::to_string(line_no) +
                                ": non-numeric cell '" + cells[c] + "'");
        break;
      }
      if (!std::isfinite(values[c]))
        throw ValidationError(file.string() + ":" + std::to_string(line_no) +
                              ": non-finite value '" + cells[c] + "'");
    }
    if (!numeric) {
      // header row
      if (header_out) *header_out = cells;
      first_content_row = false;
      continue;
    }
    if (!rows.empty() && values.size() != rows.front().size())
      throw DimensionError(file.string() + ":" + std::to_string(line_no) + ": row has " +
                           std::to_string(values.size()) + " cells, expected " +
                           std::to_string(rows.front().size()));
    rows.push_back(std::move(values));
    first_content_row = false;
  }
  if (rows.empty()) throw ValidationError(file.string() + ": no data rows");

  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows.front().size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

}  // namespace

DataTensor load_dataset(const fs::path& manifest_path) {
  fs::path manifest = manifest_path;
  if (fs::is_directory(manifest)) manifest /= "manifest.json";
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest " + manifest.string());

  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError(manifest.string() + ": invalid JSON: " + e.what());
  }
  if (!doc.contains("repetitions") || !doc["repetitions"].is_array() ||
      doc["repetitions"].empty())
    throw ValidationError(manifest.string() + ": manifest needs a non-empty 'repetitions' array");

  char delim = ',';
  if (doc.contains("delimiter")) {
    const auto d = doc["delimiter"].get<std::string>();
    if (d.size() != 1) throw ValidationError(manifest.string() + ": delimiter must be one character");
    delim = d[0];
  }

  std::vector<std::string> labels;
  if (doc.contains("feature_labels"))
    labels = doc["feature_labels"].get<std::vector<std::string>>();

  const fs::path base = manifest.parent_path();
  std::vector<Eigen::MatrixXd> reps;
  std::vector<std::string> ids;
  std::vector<std::string> header;
  for (const auto& entry : doc["repetitions"]) {
    const fs::path file = base / entry.get<std::string>();
    std::vector<std::string> this_header;
    Eigen::MatrixXd m = load_csv(file, delim, &this_header);
    if (!reps.empty() && (m.rows() != reps.front().rows() || m.cols() != reps.front().cols()))
      throw DimensionError(file.string() + ": shape " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + " disagrees with first repetition (" +
                           std::to_string(reps.front().rows()) + "x" +
                           std::to_string(reps.front().cols()) + ")");
    if (header.empty()) header = this_header;
    reps.push_back(std::move(m));
    ids.push_back(entry.get<std::string>());
  }
  if (labels.empty()) labels = header;
  return DataTensor(std::move(reps), std::move(labels), std::move(ids));
}

void save_matrix_csv(const Eigen::MatrixXd& m, const fs::path& file) {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + file.string());
}

void save_dataset(const DataTensor& x, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  json manifest;
  std::vector<std::string> files;
  for (Eigen::Index l = 0; l < x.n_reps(); ++l) {
    char name[32];
    std::snprintf(name, sizeof(name), "rep_%03d.csv", static_cast<int>(l));
    save_matrix_csv(x.rep(l), dir / name);
    files.emplace_back(name);
  }
  manifest["repetitions"] = files;
  if (!x.feature_labels().empty()) manifest["feature_labels"] = x.feature_labels();
  manifest["delimiter"] = ",";
  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

}  // namespace corrca

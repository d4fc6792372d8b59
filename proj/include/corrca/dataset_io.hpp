#pragma once

#include <filesystem>
#include <string>

#include "corrca/tensor.hpp"

namespace corrca {

/// Loads a dataset directory or manifest file. The manifest is JSON:
///   { "repetitions": ["rep_000.csv", ...],
///     "feature_labels": [...],            // optional
///     "delimiter": "," }                  // optional, default ","
/// CSV paths are resolved relative to the manifest. Files need no header
/// row; a header is auto-detected when the first row is non-numeric.
/// All repetition files must agree on T and D; every cell must parse as a
/// finite double.
DataTensor load_dataset(const std::filesystem::path& manifest_path);

/// Writes tensor + manifest into `dir` (one CSV per repetition). Values are
/// printed with 17 significant digits so load(save(x)) is bit-identical.
void save_dataset(const DataTensor& x, const std::filesystem::path& dir);

/// Writes a T x J matrix as CSV (same numeric format as save_dataset).
void save_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& file);

/// Shortest text form of a double that parses back bit-identically.
std::string format_double(double v);

}  // namespace corrca

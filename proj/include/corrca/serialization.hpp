#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "corrca/corrca.hpp"
#include "corrca/kernel.hpp"
#include "corrca/mcca.hpp"
#include "corrca/significance.hpp"

namespace corrca {

/// Model / report JSON. Matrices are row-major nested arrays; every
/// document carries a "version" tag. Keys are emitted in sorted order and
/// doubles in shortest round-trip form, so serialization is byte-stable.

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CorrCAModel& model);
CorrCAModel corrca_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MCCAModel& model);
MCCAModel mcca_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const KernelCorrCAModel& model);
KernelCorrCAModel kernel_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SignificanceReport& report);

/// "corrca" | "mcca" | "kernel" from a model document's "kind" field.
std::string model_kind(const nlohmann::json& j);

void write_json(const nlohmann::json& j, const std::filesystem::path& file);
nlohmann::json read_json(const std::filesystem::path& file);

}  // namespace corrca

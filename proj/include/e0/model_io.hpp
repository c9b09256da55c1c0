#pragma once

// JSON model and report files. Complex scalars are [re, im], matrices are
// row-major nested arrays. Objects keep sorted keys.

#include <filesystem>

#include <json.hpp>

#include "e0/workbench.hpp"

namespace e0 {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);
/// Accepts [re, im] pairs or plain real numbers. Throws InvalidModel.
Matrix matrix_from_json(const Json& j, const std::string& what);

/// Throws InvalidModel on malformed documents.
ModelSpec parse_model(const Json& j);
Json model_to_json(const ModelSpec& spec);

/// Either {"kraus": [...]} or a bare array of matrices.
std::vector<Matrix> parse_kraus(const Json& j);

Json projection_to_json(const Projection& p);
Json report_to_json(const MinimalityReport& report, const Model& model);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace e0

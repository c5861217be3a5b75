#pragma once

#include <filesystem>
#include <json.hpp>

#include "uec/corrector.hpp"

namespace uec::corrector {

/// Checkpoint document: hyperparameters, layer shapes and flat row-major
/// parameter arrays, plus free-form metadata (config hash, selected betas).
nlohmann::json model_to_json(const UecStdModel& model);
/// Throws SchemaError if the document is malformed or shapes disagree.
UecStdModel model_from_json(const nlohmann::json& doc);

nlohmann::json shape_to_json(const ModelShape& shape);
ModelShape shape_from_json(const nlohmann::json& doc);

void save_checkpoint(const std::filesystem::path& path, const UecStdModel& model, const nlohmann::json& metadata);

struct LoadedCheckpoint {
    UecStdModel model;
    nlohmann::json metadata;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

} // namespace uec::corrector

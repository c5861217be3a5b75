#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "uec/backbone.hpp"
#include "uec/calibration.hpp"
#include "uec/core_data.hpp"
#include "uec/corrector.hpp"
#include "uec/pipeline.hpp"
#include "uec/synthetic.hpp"

namespace uec {

/// Everything a protocol run depends on. Sections mirror the JSON layout:
/// data, split, window, horizons, backbone, rollout, corrector, train,
/// calibration, seeds.
struct RunConfig {
    // data
    std::string source = "synthetic"; // "synthetic" | "csv"
    std::filesystem::path csv_path;
    std::optional<std::string> timestamp_column;
    data::SyntheticSpec synthetic;
    std::string series_id = "series0";

    data::SplitSpec split = data::SplitSpec::staggered();

    // window
    std::size_t history = 96;
    std::size_t output_width = 96;
    std::size_t stride = 1;

    std::vector<std::size_t> horizons = {192, 384};

    // backbone
    std::string backbone = "toy"; // "toy" | "replay"
    backbone::ToySpec toy;
    std::filesystem::path replay_path;

    // rollout
    backbone::OverlapPolicy overlap = backbone::OverlapPolicy::overwrite;
    std::size_t train_horizon = 0; // 0 means 2L

    // corrector
    std::size_t hidden = 32;
    double dropout = 0.5;
    decomp::DecompConfig decomp;
    corrector::Ablation ablation;

    pipeline::TrainConfig train;

    // calibration
    calibration::BetaGrid beta_grid;
    std::size_t selection_horizon = 0; // 0 means max(horizons)
    double unseen_fraction = 0.3;      // tail of the validation windows kept unseen

    // seeds
    std::uint64_t init_seed = 1;
    std::uint64_t train_seed = 2;
    std::uint64_t calibration_seed = 3;

    corrector::ModelShape model_shape(std::size_t channels) const;
    std::size_t eval_selection_horizon() const;
    void validate() const;
};

/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

/// FNV-1a 64 of the canonical (sorted-key, compact) JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);
std::string fnv1a_hex(const std::string& bytes);

} // namespace uec

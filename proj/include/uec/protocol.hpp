#pragma once

#include <cstddef>
#include <json.hpp>
#include <memory>
#include <string>
#include <vector>

#include "uec/backbone.hpp"
#include "uec/calibration.hpp"
#include "uec/core_data.hpp"
#include "uec/corrector.hpp"
#include "uec/evaluation.hpp"
#include "uec/pipeline.hpp"
#include "uec/run_config.hpp"

namespace uec::protocol {

/// The normalized series and its segment layout. Frames in `segments` are
/// views copied out of `normalized`.
struct PreparedData {
    data::SeriesFrame raw;
    data::SeriesFrame normalized;
    data::Normalizer normalizer;
    std::vector<data::SegmentBounds> bounds;

    const data::SegmentBounds& bound(const std::string& name) const;
    data::SeriesFrame segment(const std::string& name) const;
    /// Names of the segments the normalizer and the backbone are fit on.
    std::vector<std::string> training_segments() const;
};

data::SeriesFrame load_frame(const RunConfig& cfg);
PreparedData prepare(const RunConfig& cfg);
PreparedData prepare(const RunConfig& cfg, data::SeriesFrame raw);

std::unique_ptr<backbone::Forecaster> make_backbone(const RunConfig& cfg, const PreparedData& data);

pipeline::SampleSet make_samples(const RunConfig& cfg, const PreparedData& data, const backbone::Forecaster& f,
                                 Exec exec = Exec::parallel);

pipeline::TrainResult train(const RunConfig& cfg, const PreparedData& data, const pipeline::SampleSet& samples,
                            Exec exec = Exec::parallel);

/// Unseen tail of the validation windows plus random training windows, at the
/// selection horizon.
calibration::BalancedSet balanced_set(const RunConfig& cfg, const PreparedData& data);

calibration::BetaSelection calibrate(const RunConfig& cfg, const PreparedData& data, const backbone::Forecaster& f,
                                     const corrector::Corrector& c, Exec exec = Exec::parallel);

struct HorizonResult {
    std::size_t horizon = 0;
    std::size_t windows = 0;
    double baseline_mse = 0.0;
    double baseline_mae = 0.0;
    double baseline_mape = 0.0;
    double corrected_mse = 0.0; // at beta_mse
    double corrected_mae = 0.0; // at beta_mae
    double corrected_mape = 0.0; // at beta_mae
    double mse_reduction_pct = 0.0;
    double mae_reduction_pct = 0.0;
    std::size_t mape_excluded = 0;
};

struct TrainSummary {
    std::size_t train_samples = 0;
    std::size_t holdout_samples = 0;
    std::size_t steps_run = 0;
    std::size_t best_step = 0;
    double best_holdout = 0.0;
    double initial_holdout = 0.0;
    bool early_stopped = false;
};

struct EvalReport {
    std::string config_hash;
    std::size_t channels = 0;
    TrainSummary train;
    calibration::BetaSelection selection;
    std::vector<HorizonResult> horizons;

    nlohmann::json to_json() const;
    std::string to_csv() const;
};

std::vector<HorizonResult> evaluate_test(const RunConfig& cfg, const PreparedData& data,
                                         const backbone::Forecaster& f, const corrector::Corrector& c,
                                         double beta_mse, double beta_mae, Exec exec = Exec::parallel);

TrainSummary summarize(const pipeline::TrainResult& result, const pipeline::SampleSet& samples);

/// Split, normalize, backbone, samples, training, beta selection, test scoring.
EvalReport run_protocol(const RunConfig& cfg, Exec exec = Exec::parallel);

} // namespace uec::protocol

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "uec/backbone.hpp"
#include "uec/core_data.hpp"
#include "uec/corrector.hpp"
#include "uec/micronet.hpp"
#include "uec/parallel.hpp"

namespace uec::pipeline {

struct TrainConfig {
    std::size_t steps = 100;
    std::size_t batch = 64;
    nn::LossKind loss = nn::LossKind::huber(1.0);
    double lr = 1e-3;
    /// Fraction of the validation-derived samples used for fitting; the rest is
    /// the early-stopping holdout.
    double train_fraction = 0.7;
    std::size_t eval_every = 10;
    std::size_t patience = 3; // holdout evaluations without improvement
    std::uint64_t seed = 0;
    corrector::StdLossWeights weights;

    void validate() const;
};

struct SampleSet {
    std::vector<corrector::CorrectionSample> train;
    std::vector<corrector::CorrectionSample> holdout;

    std::size_t size() const noexcept { return train.size() + holdout.size(); }
};

struct SampleOptions {
    std::size_t train_horizon = 0; // T'; 0 means 2L
    std::size_t stride = 1;
    double train_fraction = 0.7;
    backbone::OverlapPolicy overlap = backbone::OverlapPolicy::overwrite;
    std::string series_id;
    /// Absolute index of the frame's first row in the full series.
    std::ptrdiff_t absolute_offset = 0;
};

/// Rolls the forecaster out to T' from every window of `val_frame` and emits one
/// sample per chunk. Samples are ordered by (window, chunk) and split
/// chronologically into train and holdout.
SampleSet build_samples(const backbone::Forecaster& f, const data::SeriesFrame& val_frame, const SampleOptions& opts,
                        Exec exec = Exec::parallel);

/// Samples of one rollout; chunk inputs and forecasts are exactly what the
/// forecaster saw and returned.
std::vector<corrector::CorrectionSample> samples_from_rollout(const backbone::RolloutTrace& trace,
                                                              const Matrix& truth, std::size_t window_start);

struct HoldoutEval {
    std::size_t step = 0;
    double loss = 0.0;
};

struct TrainResult {
    corrector::UecStdModel model; // best holdout checkpoint
    std::vector<double> train_loss; // one per optimisation step
    std::vector<HoldoutEval> holdout;
    std::size_t best_step = 0;
    double best_holdout = 0.0;
    bool early_stopped = false;
};

corrector::StdLossSpec loss_spec(const corrector::UecStdModel& model, const TrainConfig& cfg);

/// Minibatch Adam on the corrector loss. The holdout loss is measured before
/// the first step and every eval_every steps; the best checkpoint is returned.
TrainResult train_uec(corrector::UecStdModel model, const SampleSet& samples, const TrainConfig& cfg,
                      Exec exec = Exec::parallel);

/// Uncorrected rollout plus the per-row correction Δ of the chunk that produced
/// each row. corrected(beta) = uncorrected + beta * Δ.
struct CorrectedRollout {
    Matrix uncorrected;
    Matrix correction;

    Matrix corrected(double beta) const;
};

/// Runs the full uncorrected rollout first, then corrects every chunk from its
/// own input window and forecast. Corrections never feed back into inputs.
CorrectedRollout correction_trace(const backbone::Forecaster& f, const corrector::Corrector& c, const Matrix& history,
                                  std::size_t horizon, const backbone::RolloutOptions& opts = {});

Matrix corrected_rollout(const backbone::Forecaster& f, const corrector::Corrector& c, const Matrix& history,
                         std::size_t horizon, double beta, const backbone::RolloutOptions& opts = {});

} // namespace uec::pipeline

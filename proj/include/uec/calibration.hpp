#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "uec/backbone.hpp"
#include "uec/core_data.hpp"
#include "uec/corrector.hpp"
#include "uec/micronet.hpp"
#include "uec/parallel.hpp"

namespace uec::calibration {

/// Candidate correction strengths, ascending, within [0, 1], always including 0.
struct BetaGrid {
    std::vector<double> values = {0.0, 0.1, 0.3, 0.5, 0.7, 1.0};

    void validate() const;
};

/// A rollout origin together with the truth it is scored against.
struct EvalWindow {
    enum class Source { validation, training };

    Matrix history;           // W x D
    Matrix truth;             // horizon x D
    std::ptrdiff_t origin = 0; // absolute index of the last history row
    Source source = Source::validation;
};

/// Unseen validation windows plus randomly drawn training windows with
/// |validation| + |training| equal to the target size.
struct BalancedSet {
    std::vector<EvalWindow> windows;
    std::size_t from_validation = 0;
    std::size_t from_training = 0;
};

/// Every window of `frame` at the given horizon, in chronological order.
std::vector<EvalWindow> frame_windows(const data::SeriesFrame& frame, std::size_t history, std::size_t horizon,
                                      std::size_t stride, std::ptrdiff_t absolute_offset, EvalWindow::Source source);

/// Adds target_size - |u_val| training windows drawn without replacement.
BalancedSet build_balanced_set(std::vector<EvalWindow> u_val, const data::SeriesFrame& train_frame,
                               std::size_t target_size, std::size_t history, std::size_t horizon, nn::Rng& rng,
                               std::ptrdiff_t train_offset = 0);

enum class SelectMetric { mse, mae };

struct BetaScore {
    double beta = 0.0;
    double mse = 0.0;
    double mae = 0.0;
};

struct BetaSelection {
    double beta_mse = 0.0;
    double beta_mae = 0.0;
    std::vector<BetaScore> scores; // one per grid value
};

struct SelectOptions {
    std::size_t horizon = 0;
    std::string series_id;
    backbone::OverlapPolicy overlap = backbone::OverlapPolicy::overwrite;
};

/// Scores every grid value on one shared set of rollouts and returns the
/// argmin for each metric, ties going to the smaller beta.
BetaSelection select_betas(const backbone::Forecaster& f, const corrector::Corrector& c, const BalancedSet& set,
                           const BetaGrid& grid, const SelectOptions& opts, Exec exec = Exec::parallel);

double select_beta(const backbone::Forecaster& f, const corrector::Corrector& c, const BalancedSet& set,
                   const BetaGrid& grid, SelectMetric metric, const SelectOptions& opts, Exec exec = Exec::parallel);

} // namespace uec::calibration

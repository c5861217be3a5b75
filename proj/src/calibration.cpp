#include "uec/calibration.hpp"

#include <algorithm>
#include <iterator>

#include "uec/error.hpp"
#include "uec/metrics.hpp"
#include "uec/pipeline.hpp"

namespace uec::calibration {

void BetaGrid::validate() const {
    if (values.empty()) throw ConfigError("beta grid is empty");
    if (!std::is_sorted(values.begin(), values.end())) throw ConfigError("beta grid must be sorted ascending");
    if (values.front() < 0.0 || values.back() > 1.0) throw ConfigError("beta grid values must lie in [0, 1]");
    if (values.front() != 0.0) throw ConfigError("beta grid must contain 0");
}

std::vector<EvalWindow> frame_windows(const data::SeriesFrame& frame, std::size_t history, std::size_t horizon,
                                      std::size_t stride, std::ptrdiff_t absolute_offset, EvalWindow::Source source) {
    std::vector<EvalWindow> out;
    for (std::size_t t : data::window_starts(frame.length(), history, horizon, stride)) {
        out.push_back(EvalWindow{frame.values.slice_rows(t + 1 - history, history),
                                 frame.values.slice_rows(t + 1, horizon),
                                 absolute_offset + static_cast<std::ptrdiff_t>(t), source});
    }
    return out;
}

BalancedSet build_balanced_set(std::vector<EvalWindow> u_val, const data::SeriesFrame& train_frame,
                               std::size_t target_size, std::size_t history, std::size_t horizon, nn::Rng& rng,
                               std::ptrdiff_t train_offset) {
    if (target_size < u_val.size()) throw ConfigError("balanced set target is smaller than the validation part");
    const std::size_t needed = target_size - u_val.size();

    BalancedSet set;
    set.from_validation = u_val.size();
    set.windows = std::move(u_val);
    if (needed == 0) return set;

    if (train_frame.length() < history + horizon) {
        throw InsufficientTrainWindows("training segment cannot host a window of W+T=" + std::to_string(history + horizon));
    }
    const auto starts = data::window_starts(train_frame.length(), history, horizon, 1);
    if (starts.size() < needed) {
        throw InsufficientTrainWindows("need " + std::to_string(needed) + " training windows, only " +
                                       std::to_string(starts.size()) + " exist");
    }
    std::vector<std::size_t> chosen;
    std::sample(starts.begin(), starts.end(), std::back_inserter(chosen), needed, rng.engine());
    for (std::size_t t : chosen) {
        set.windows.push_back(EvalWindow{train_frame.values.slice_rows(t + 1 - history, history),
                                         train_frame.values.slice_rows(t + 1, horizon),
                                         train_offset + static_cast<std::ptrdiff_t>(t), EvalWindow::Source::training});
    }
    set.from_training = chosen.size();
    return set;
}

BetaSelection select_betas(const backbone::Forecaster& f, const corrector::Corrector& c, const BalancedSet& set,
                           const BetaGrid& grid, const SelectOptions& opts, Exec exec) {
    grid.validate();
    if (set.windows.empty()) throw EmptySet("no windows to select beta on");
    const std::size_t horizon = opts.horizon == 0 ? set.windows.front().truth.rows() : opts.horizon;

    std::vector<pipeline::CorrectedRollout> rollouts(set.windows.size());
    std::vector<Matrix> truths(set.windows.size());
    for_each_index(exec, set.windows.size(), [&](std::size_t i) {
        const auto& w = set.windows[i];
        if (w.truth.rows() < horizon) throw ShapeMismatch("evaluation window shorter than the selection horizon");
        backbone::RolloutOptions ro;
        ro.overlap = opts.overlap;
        ro.series_id = opts.series_id;
        ro.origin = w.origin;
        rollouts[i] = pipeline::correction_trace(f, c, w.history, horizon, ro);
        truths[i] = w.truth.rows() == horizon ? w.truth : w.truth.slice_rows(0, horizon);
    });

    BetaSelection sel;
    std::vector<Matrix> preds(rollouts.size());
    for (double beta : grid.values) {
        for_each_index(exec, rollouts.size(), [&](std::size_t i) { preds[i] = rollouts[i].corrected(beta); });
        const auto sums = eval::metric_sums(preds, truths, exec);
        sel.scores.push_back({beta, sums.mse(), sums.mae()});
    }
    auto best = [&](auto key) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < sel.scores.size(); ++i)
            if (key(sel.scores[i]) < key(sel.scores[arg])) arg = i;
        return sel.scores[arg].beta;
    };
    sel.beta_mse = best([](const BetaScore& s) { return s.mse; });
    sel.beta_mae = best([](const BetaScore& s) { return s.mae; });
    return sel;
}

double select_beta(const backbone::Forecaster& f, const corrector::Corrector& c, const BalancedSet& set,
                   const BetaGrid& grid, SelectMetric metric, const SelectOptions& opts, Exec exec) {
    const auto sel = select_betas(f, c, set, grid, opts, exec);
    return metric == SelectMetric::mse ? sel.beta_mse : sel.beta_mae;
}

} // namespace uec::calibration

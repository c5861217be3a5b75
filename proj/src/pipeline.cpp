#include "uec/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uec/error.hpp"
#include "uec/kernels.hpp"

namespace uec::pipeline {

void TrainConfig::validate() const {
    if (steps == 0 || batch == 0) throw ConfigError("training steps and batch size must be positive");
    if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train fraction must be in (0, 1)");
    if (eval_every == 0 || patience == 0) throw ConfigError("eval_every and patience must be positive");
    loss.validate();
    weights.validate();
}

std::vector<corrector::CorrectionSample> samples_from_rollout(const backbone::RolloutTrace& trace,
                                                              const Matrix& truth, std::size_t window_start) {
    std::vector<corrector::CorrectionSample> out;
    out.reserve(trace.chunks.size());
    for (std::size_t k = 0; k < trace.chunks.size(); ++k) {
        const auto& c = trace.chunks[k];
        const std::size_t l = c.forecast.rows();
        if (c.offset + l > truth.rows()) throw TooShort("truth does not cover chunk " + std::to_string(k));
        out.push_back(corrector::CorrectionSample::make(c.input, c.forecast, truth.slice_rows(c.offset, l), k,
                                                        window_start));
    }
    return out;
}

SampleSet build_samples(const backbone::Forecaster& f, const data::SeriesFrame& val_frame, const SampleOptions& opts,
                        Exec exec) {
    const std::size_t w = f.input_width(), l = f.output_width();
    const std::size_t horizon = opts.train_horizon == 0 ? 2 * l : opts.train_horizon;
    if (horizon < l) throw ConfigError("training horizon T' must be at least L");
    if (!(opts.train_fraction > 0.0 && opts.train_fraction < 1.0)) throw ConfigError("train fraction must be in (0, 1)");

    const auto starts = data::window_starts(val_frame.length(), w, horizon, opts.stride);
    std::vector<std::vector<corrector::CorrectionSample>> per_window(starts.size());
    for_each_index(exec, starts.size(), [&](std::size_t i) {
        const std::size_t t = starts[i];
        const Matrix history = val_frame.values.slice_rows(t + 1 - w, w);
        const Matrix truth = val_frame.values.slice_rows(t + 1, horizon);
        backbone::RolloutOptions ro;
        ro.overlap = opts.overlap;
        ro.series_id = opts.series_id;
        ro.origin = opts.absolute_offset + static_cast<std::ptrdiff_t>(t);
        per_window[i] = samples_from_rollout(backbone::ar_rollout_traced(f, history, horizon, ro), truth, t);
    });

    std::vector<corrector::CorrectionSample> all;
    for (auto& v : per_window)
        for (auto& s : v) all.push_back(std::move(s));
    if (all.size() < 2) throw TooShort("need at least two correction samples to split train/holdout");

    const auto n = all.size();
    auto n_train = static_cast<std::size_t>(std::floor(opts.train_fraction * static_cast<double>(n) + 1e-9));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    SampleSet set;
    set.train.assign(std::make_move_iterator(all.begin()), std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(n_train)));
    set.holdout.assign(std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(n_train)), std::make_move_iterator(all.end()));
    return set;
}

corrector::StdLossSpec loss_spec(const corrector::UecStdModel& model, const TrainConfig& cfg) {
    return corrector::StdLossSpec{cfg.loss, cfg.weights, model.shape().decomp};
}

namespace {

double holdout_loss(const corrector::UecStdModel& model, const std::vector<const corrector::CorrectionSample*>& samples,
                    const corrector::StdLossSpec& spec, Exec exec) {
    return exec == Exec::parallel ? kernels::omp::batch_loss(model, samples, spec)
                                  : kernels::serial::batch_loss(model, samples, spec);
}

} // namespace

TrainResult train_uec(corrector::UecStdModel model, const SampleSet& samples, const TrainConfig& cfg, Exec exec) {
    cfg.validate();
    if (samples.train.empty() || samples.holdout.empty()) throw EmptySampleSet("train and holdout sets must be non-empty");

    const auto spec = loss_spec(model, cfg);
    std::vector<const corrector::CorrectionSample*> holdout;
    for (const auto& s : samples.holdout) holdout.push_back(&s);

    nn::Rng rng(cfg.seed);
    nn::AdamState adam(nn::AdamConfig{cfg.lr}, model.param_sizes());

    TrainResult result;
    result.best_holdout = holdout_loss(model, holdout, spec, exec);
    result.holdout.push_back({0, result.best_holdout});
    result.model = model;

    const std::size_t n = samples.train.size();
    const std::size_t batch = std::min(cfg.batch, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::size_t cursor = n; // forces a shuffle before the first batch
    std::size_t stale_evals = 0;

    std::vector<const corrector::CorrectionSample*> picked(batch);
    std::vector<corrector::DropoutMasks> masks(batch);
    corrector::Gradients grads;
    for (std::size_t step = 1; step <= cfg.steps; ++step) {
        for (std::size_t b = 0; b < batch; ++b) {
            if (cursor == n) {
                for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
                cursor = 0;
            }
            picked[b] = &samples.train[order[cursor++]];
        }
        for (std::size_t b = 0; b < batch; ++b) masks[b] = model.draw_masks(rng);

        const double loss = exec == Exec::parallel
                                ? kernels::omp::batch_gradient(model, picked, spec, masks, grads)
                                : kernels::serial::batch_gradient(model, picked, spec, masks, grads);
        if (!std::isfinite(loss)) throw NumericError("training loss became non-finite at step " + std::to_string(step));
        result.train_loss.push_back(loss);
        nn::adam_step(model.params(), grads.refs(), adam);

        if (step % cfg.eval_every == 0 || step == cfg.steps) {
            const double h = holdout_loss(model, holdout, spec, exec);
            result.holdout.push_back({step, h});
            if (h < result.best_holdout) {
                result.best_holdout = h;
                result.best_step = step;
                result.model = model;
                stale_evals = 0;
            } else if (++stale_evals >= cfg.patience) {
                result.early_stopped = step < cfg.steps;
                break;
            }
        }
    }
    return result;
}

Matrix CorrectedRollout::corrected(double beta) const {
    Matrix out = uncorrected;
    auto o = out.flat();
    auto c = correction.flat();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += beta * c[i];
    return out;
}

CorrectedRollout correction_trace(const backbone::Forecaster& f, const corrector::Corrector& c, const Matrix& history,
                                  std::size_t horizon, const backbone::RolloutOptions& opts) {
    auto trace = backbone::ar_rollout_traced(f, history, horizon, opts);
    Matrix delta(horizon, history.cols());
    for (const auto& chunk : trace.chunks) {
        const backbone::ForecastContext ctx{opts.series_id, opts.origin,
                                            opts.origin + static_cast<std::ptrdiff_t>(chunk.offset)};
        const corrector::Correction corr = c.correct(chunk.input, chunk.forecast, ctx);
        const Matrix total = corr.total();
        require_same_shape(total, chunk.forecast, "corrector output");
        const std::size_t last = std::min(chunk.forecast.rows(), horizon - chunk.offset);
        for (std::size_t j = chunk.written_from; j < last; ++j) {
            const auto src = total.row(j);
            std::copy(src.begin(), src.end(), delta.row(chunk.offset + j).begin());
        }
    }
    return CorrectedRollout{std::move(trace.output), std::move(delta)};
}

Matrix corrected_rollout(const backbone::Forecaster& f, const corrector::Corrector& c, const Matrix& history,
                         std::size_t horizon, double beta, const backbone::RolloutOptions& opts) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("correction strength must be in [0, 1]");
    return correction_trace(f, c, history, horizon, opts).corrected(beta);
}

} // namespace uec::pipeline

#include "uec/backbone.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "uec/error.hpp"

namespace uec::backbone {
namespace {

void check_history(const Matrix& history, std::size_t w) {
    if (history.rows() != w) {
        throw ShapeMismatch("forecaster expects " + std::to_string(w) + " history rows, got " +
                            std::to_string(history.rows()));
    }
}

} // namespace

void ToySpec::validate() const {
    if (kind == ToyKind::seasonal_naive && period < 1) throw ConfigError("seasonal_naive period must be >= 1");
    if (kind == ToyKind::ridge_linear && !(ridge_lambda >= 0.0)) throw ConfigError("ridge lambda must be >= 0");
    if (kind == ToyKind::damped && !(rho > 0.0 && rho <= 1.0)) throw ConfigError("damped rho must be in (0, 1]");
}

ToyKind toy_kind_from_string(const std::string& name) {
    if (name == "persistence") return ToyKind::persistence;
    if (name == "seasonal_naive") return ToyKind::seasonal_naive;
    if (name == "ridge_linear") return ToyKind::ridge_linear;
    if (name == "damped") return ToyKind::damped;
    throw ConfigError("unknown toy backbone '" + name + "'");
}

const char* to_string(ToyKind kind) {
    switch (kind) {
    case ToyKind::persistence: return "persistence";
    case ToyKind::seasonal_naive: return "seasonal_naive";
    case ToyKind::ridge_linear: return "ridge_linear";
    case ToyKind::damped: return "damped";
    }
    return "?";
}

std::unique_ptr<Forecaster> make_toy(const ToySpec& spec, const std::vector<const data::SeriesFrame*>& train_frames,
                                     std::size_t w, std::size_t l) {
    spec.validate();
    if (w == 0 || l == 0) throw ConfigError("forecaster widths must be positive");
    switch (spec.kind) {
    case ToyKind::persistence: return std::make_unique<PersistenceForecaster>(w, l);
    case ToyKind::seasonal_naive: return std::make_unique<SeasonalNaiveForecaster>(w, l, spec.period);
    case ToyKind::damped: return std::make_unique<DampedForecaster>(w, l, spec.rho);
    case ToyKind::ridge_linear: return std::make_unique<RidgeForecaster>(train_frames, w, l, spec.ridge_lambda);
    }
    throw ConfigError("unknown toy backbone");
}

Matrix PersistenceForecaster::forecast(const Matrix& history, const ForecastContext&) const {
    check_history(history, w_);
    Matrix out(l_, history.cols());
    for (std::size_t j = 0; j < l_; ++j) out.set_rows(j, history.slice_rows(w_ - 1, 1));
    return out;
}

SeasonalNaiveForecaster::SeasonalNaiveForecaster(std::size_t w, std::size_t l, std::size_t period)
    : w_(w), l_(l), period_(period) {
    if (period_ < 1 || period_ > w_) throw ConfigError("seasonal_naive period must be in [1, W]");
}

Matrix SeasonalNaiveForecaster::forecast(const Matrix& history, const ForecastContext&) const {
    check_history(history, w_);
    Matrix out(l_, history.cols());
    for (std::size_t j = 0; j < l_; ++j) out.set_rows(j, history.slice_rows(w_ - period_ + j % period_, 1));
    return out;
}

DampedForecaster::DampedForecaster(std::size_t w, std::size_t l, double rho) : w_(w), l_(l), rho_(rho) {
    if (!(rho_ > 0.0 && rho_ <= 1.0)) throw ConfigError("damped rho must be in (0, 1]");
}

Matrix DampedForecaster::forecast(const Matrix& history, const ForecastContext&) const {
    check_history(history, w_);
    Matrix out(l_, history.cols());
    double factor = 1.0;
    for (std::size_t j = 0; j < l_; ++j) {
        factor *= rho_;
        for (std::size_t d = 0; d < history.cols(); ++d) out(j, d) = history(w_ - 1, d) * factor;
    }
    return out;
}

RidgeForecaster::RidgeForecaster(const std::vector<const data::SeriesFrame*>& train_frames, std::size_t w,
                                 std::size_t l, double lambda)
    : w_(w), l_(l) {
    if (train_frames.empty()) throw InsufficientData("ridge backbone needs training data");
    const std::size_t d = train_frames.front()->channels();
    std::size_t n = 0;
    for (const auto* f : train_frames) {
        if (f->channels() != d) throw ShapeMismatch("ridge training frames disagree on channel count");
        if (f->length() >= w + l) n += f->length() - w - l + 1;
    }
    const std::size_t min_windows = lambda > 0.0 ? 1 : w + 1;
    if (n < min_windows) {
        throw InsufficientData("ridge backbone has " + std::to_string(n) + " training windows, needs " +
                               std::to_string(min_windows));
    }

    const auto cols = static_cast<Eigen::Index>(w + 1);
    const Eigen::Index reg_rows = lambda > 0.0 ? static_cast<Eigen::Index>(w) : 0;
    double sse = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) + reg_rows, cols);
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) + reg_rows, static_cast<Eigen::Index>(l));
        Eigen::Index row = 0;
        for (const auto* f : train_frames) {
            if (f->length() < w + l) continue;
            for (std::size_t s = 0; s + w + l <= f->length(); ++s, ++row) {
                for (std::size_t i = 0; i < w; ++i) x(row, static_cast<Eigen::Index>(i)) = f->values(s + i, c);
                x(row, cols - 1) = 1.0;
                for (std::size_t j = 0; j < l; ++j) y(row, static_cast<Eigen::Index>(j)) = f->values(s + w + j, c);
            }
        }
        // Ridge as augmented least squares; the intercept is not penalised.
        for (Eigen::Index i = 0; i < reg_rows; ++i) x(static_cast<Eigen::Index>(n) + i, i) = std::sqrt(lambda);
        const Eigen::MatrixXd beta = x.completeOrthogonalDecomposition().solve(y);
        const Eigen::MatrixXd resid = x.topRows(static_cast<Eigen::Index>(n)) * beta - y.topRows(static_cast<Eigen::Index>(n));
        sse += resid.squaredNorm();

        Matrix coef(w + 1, l);
        for (std::size_t i = 0; i <= w; ++i)
            for (std::size_t j = 0; j < l; ++j) coef(i, j) = beta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        coef_.push_back(std::move(coef));
    }
    train_mse_ = sse / static_cast<double>(n * l * d);
}

Matrix RidgeForecaster::forecast(const Matrix& history, const ForecastContext&) const {
    check_history(history, w_);
    if (history.cols() != coef_.size()) throw ShapeMismatch("ridge backbone channel count");
    Matrix out(l_, history.cols());
    for (std::size_t c = 0; c < coef_.size(); ++c) {
        const Matrix& b = coef_[c];
        for (std::size_t j = 0; j < l_; ++j) {
            double s = b(w_, j);
            for (std::size_t i = 0; i < w_; ++i) s += history(i, c) * b(i, j);
            out(j, c) = s;
        }
    }
    return out;
}

ReplayForecaster::ReplayForecaster(std::size_t w, std::size_t l, std::size_t d, std::map<Key, Matrix> records)
    : w_(w), l_(l), d_(d), records_(std::move(records)) {
    for (const auto& [key, m] : records_) {
        if (m.rows() != l_ || m.cols() != d_) throw SchemaError("replay record at t=" + std::to_string(key.t) + " has wrong shape");
    }
}

Matrix ReplayForecaster::forecast(const Matrix& history, const ForecastContext& ctx) const {
    check_history(history, w_);
    const auto it = records_.find(Key{ctx.series_id, ctx.origin, ctx.t});
    if (it == records_.end()) {
        throw MissingForecast("no stored forecast for series '" + ctx.series_id + "' origin " +
                              std::to_string(ctx.origin) + " t " + std::to_string(ctx.t));
    }
    return it->second;
}

Matrix RecordingForecaster::forecast(const Matrix& history, const ForecastContext& ctx) const {
    Matrix out = inner_.forecast(history, ctx);
    std::lock_guard lock(mutex_);
    records_.insert_or_assign(ReplayForecaster::Key{ctx.series_id, ctx.origin, ctx.t}, out);
    return out;
}

std::map<ReplayForecaster::Key, Matrix> RecordingForecaster::records() const {
    std::lock_guard lock(mutex_);
    return records_;
}

OverlapPolicy overlap_from_string(const std::string& name) {
    if (name == "overwrite") return OverlapPolicy::overwrite;
    if (name == "keep_first") return OverlapPolicy::keep_first;
    throw ConfigError("unknown overlap policy '" + name + "'");
}

const char* to_string(OverlapPolicy policy) { return policy == OverlapPolicy::overwrite ? "overwrite" : "keep_first"; }

std::size_t chunk_count(std::size_t horizon, std::size_t output_width) {
    if (horizon == 0 || output_width == 0) throw ConfigError("horizon and output width must be positive");
    return (horizon + output_width - 1) / output_width;
}

std::size_t chunk_offset(std::size_t k, std::size_t horizon, std::size_t output_width) {
    const std::size_t m = chunk_count(horizon, output_width);
    if (k + 1 == m && m > 1 && m * output_width > horizon) return horizon - output_width;
    return k * output_width;
}

RolloutTrace ar_rollout_traced(const Forecaster& f, const Matrix& history, std::size_t horizon,
                               const RolloutOptions& opts) {
    const std::size_t w = f.input_width(), l = f.output_width(), d = history.cols();
    check_history(history, w);
    if (horizon == 0) throw ConfigError("rollout horizon must be positive");
    if (opts.teacher_forced) {
        if (opts.truth == nullptr) throw MissingTruth("teacher-forced rollout needs the true future");
        if (opts.truth->rows() < horizon || opts.truth->cols() != d) throw ShapeMismatch("truth stream too short");
    }

    RolloutTrace trace{Matrix(horizon, d), {}};
    const std::size_t m = chunk_count(horizon, l);
    std::size_t produced = 0; // rows [0, produced) already hold forecasts
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t offset = chunk_offset(k, horizon, l);

        // Input rows [offset - W, offset); negative rows come from true history.
        const Matrix& future = opts.teacher_forced ? *opts.truth : trace.output;
        Matrix input(w, d);
        for (std::size_t i = 0; i < w; ++i) {
            const auto rel = static_cast<std::ptrdiff_t>(offset + i) - static_cast<std::ptrdiff_t>(w);
            const auto src = rel < 0 ? history.row(static_cast<std::size_t>(rel + static_cast<std::ptrdiff_t>(w)))
                                     : future.row(static_cast<std::size_t>(rel));
            std::copy(src.begin(), src.end(), input.row(i).begin());
        }

        // A teacher-forced input is all true history, so its origin is the chunk boundary itself.
        const auto t = opts.origin + static_cast<std::ptrdiff_t>(offset);
        ForecastContext ctx{opts.series_id, opts.teacher_forced ? t : opts.origin, t};
        Matrix out = f.forecast(input, ctx);
        if (out.rows() != l || out.cols() != d) throw ShapeMismatch("forecaster returned the wrong shape");

        std::size_t first = 0;
        if (opts.overlap == OverlapPolicy::keep_first && produced > offset) first = produced - offset;
        const std::size_t last = std::min(l, horizon - offset);
        for (std::size_t j = first; j < last; ++j) {
            const auto src = out.row(j);
            std::copy(src.begin(), src.end(), trace.output.row(offset + j).begin());
        }
        produced = std::max(produced, offset + last);
        trace.chunks.push_back(ChunkCall{offset, std::move(input), std::move(out), first});
    }
    return trace;
}

Matrix ar_rollout(const Forecaster& f, const Matrix& history, std::size_t horizon, const RolloutOptions& opts) {
    return ar_rollout_traced(f, history, horizon, opts).output;
}

} // namespace uec::backbone

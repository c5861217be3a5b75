#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "uec/core_data.hpp"
#include "uec/matrix.hpp"

namespace uec::backbone {

/// Where a forecast call sits in absolute series coordinates. `t` is the index
/// of the last input row (the chunk boundary); `origin` is the last row of true
/// history the rollout started from. For the first chunk t == origin; teacher-
/// forced calls always have origin == t.
struct ForecastContext {
    std::string series_id;
    std::ptrdiff_t origin = 0;
    std::ptrdiff_t t = 0;
};

/// Fixed black-box forecaster mapping a W x D history to an L x D forecast.
/// Implementations must be deterministic and safe to call concurrently.
class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::size_t input_width() const = 0;
    virtual std::size_t output_width() const = 0;
    virtual Matrix forecast(const Matrix& history, const ForecastContext& ctx) const = 0;
};

enum class ToyKind { persistence, seasonal_naive, ridge_linear, damped };

struct ToySpec {
    ToyKind kind = ToyKind::persistence;
    std::size_t period = 24;  // seasonal_naive
    double ridge_lambda = 0.0; // ridge_linear
    double rho = 0.9;         // damped

    void validate() const;
};

ToyKind toy_kind_from_string(const std::string& name);
const char* to_string(ToyKind kind);

/// Builds a toy forecaster. Only ridge_linear reads `train_frames`, fitting on
/// every W+L window inside each frame.
std::unique_ptr<Forecaster> make_toy(const ToySpec& spec, const std::vector<const data::SeriesFrame*>& train_frames,
                                     std::size_t input_width, std::size_t output_width);

class PersistenceForecaster final : public Forecaster {
public:
    PersistenceForecaster(std::size_t w, std::size_t l) : w_(w), l_(l) {}
    std::size_t input_width() const override { return w_; }
    std::size_t output_width() const override { return l_; }
    Matrix forecast(const Matrix& history, const ForecastContext& ctx) const override;

private:
    std::size_t w_, l_;
};

class SeasonalNaiveForecaster final : public Forecaster {
public:
    SeasonalNaiveForecaster(std::size_t w, std::size_t l, std::size_t period);
    std::size_t input_width() const override { return w_; }
    std::size_t output_width() const override { return l_; }
    Matrix forecast(const Matrix& history, const ForecastContext& ctx) const override;

private:
    std::size_t w_, l_, period_;
};

/// x_t * rho^j for j = 1..L.
class DampedForecaster final : public Forecaster {
public:
    DampedForecaster(std::size_t w, std::size_t l, double rho);
    std::size_t input_width() const override { return w_; }
    std::size_t output_width() const override { return l_; }
    Matrix forecast(const Matrix& history, const ForecastContext& ctx) const override;

private:
    std::size_t w_, l_;
    double rho_;
};

/// Per-channel linear map from the W history values (plus intercept) to each
/// of the L targets, fit by ridge-regularised least squares.
class RidgeForecaster final : public Forecaster {
public:
    RidgeForecaster(const std::vector<const data::SeriesFrame*>& train_frames, std::size_t w, std::size_t l,
                    double lambda);
    std::size_t input_width() const override { return w_; }
    std::size_t output_width() const override { return l_; }
    Matrix forecast(const Matrix& history, const ForecastContext& ctx) const override;

    /// One (W+1) x L coefficient matrix per channel; row W is the intercept.
    const std::vector<Matrix>& coefficients() const noexcept { return coef_; }
    /// Mean squared error over the training windows it was fit on.
    double training_mse() const noexcept { return train_mse_; }

private:
    std::size_t w_, l_;
    std::vector<Matrix> coef_;
    double train_mse_ = 0.0;
};

/// Serves forecasts previously stored in a forecast-exchange file.
class ReplayForecaster final : public Forecaster {
public:
    struct Key {
        std::string series_id;
        std::ptrdiff_t origin;
        std::ptrdiff_t t;
        auto operator<=>(const Key&) const = default;
    };

    ReplayForecaster(std::size_t w, std::size_t l, std::size_t d, std::map<Key, Matrix> records);
    std::size_t input_width() const override { return w_; }
    std::size_t output_width() const override { return l_; }
    std::size_t channels() const noexcept { return d_; }
    std::size_t record_count() const noexcept { return records_.size(); }
    /// Throws MissingForecast for keys that are not in the file.
    Matrix forecast(const Matrix& history, const ForecastContext& ctx) const override;

private:
    std::size_t w_, l_, d_;
    std::map<Key, Matrix> records_;
};

/// Wraps a forecaster and keeps every call it serves, for export.
class RecordingForecaster final : public Forecaster {
public:
    explicit RecordingForecaster(const Forecaster& inner) : inner_(inner) {}
    std::size_t input_width() const override { return inner_.input_width(); }
    std::size_t output_width() const override { return inner_.output_width(); }
    Matrix forecast(const Matrix& history, const ForecastContext& ctx) const override;

    std::map<ReplayForecaster::Key, Matrix> records() const;

private:
    const Forecaster& inner_;
    mutable std::mutex mutex_;
    mutable std::map<ReplayForecaster::Key, Matrix> records_;
};

enum class OverlapPolicy { overwrite, keep_first };

OverlapPolicy overlap_from_string(const std::string& name);
const char* to_string(OverlapPolicy policy);

struct RolloutOptions {
    bool teacher_forced = false;
    /// Ground truth X_{t+1..t+T}; required for teacher forcing.
    const Matrix* truth = nullptr;
    OverlapPolicy overlap = OverlapPolicy::overwrite;
    std::string series_id;
    std::ptrdiff_t origin = 0; // absolute index of the last history row
};

/// One forecaster call inside a rollout. Rows are relative to the rollout:
/// the call's output covers rows [offset, offset + L) of the T x D result.
struct ChunkCall {
    std::size_t offset = 0;
    Matrix input;    // W x D
    Matrix forecast; // L x D, as returned by the forecaster
    /// First row of `forecast` that was written into the result.
    std::size_t written_from = 0;
};

struct RolloutTrace {
    Matrix output; // T x D
    std::vector<ChunkCall> chunks;
};

/// Number of forecaster calls needed for horizon T: ceil(T / L).
std::size_t chunk_count(std::size_t horizon, std::size_t output_width);
/// Row offset of chunk k. The last chunk is realigned to end exactly at T when
/// L does not divide T.
std::size_t chunk_offset(std::size_t k, std::size_t horizon, std::size_t output_width);

/// Chunk-based autoregressive rollout to horizon T from a W x D history.
RolloutTrace ar_rollout_traced(const Forecaster& f, const Matrix& history, std::size_t horizon,
                               const RolloutOptions& opts = {});
Matrix ar_rollout(const Forecaster& f, const Matrix& history, std::size_t horizon, const RolloutOptions& opts = {});

} // namespace uec::backbone

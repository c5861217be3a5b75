#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "uec/backbone.hpp"
#include "uec/decomp.hpp"
#include "uec/matrix.hpp"
#include "uec/micronet.hpp"

namespace uec::corrector {

/// Which corrections the network emits. `undecomposed` is the plain UEC-MLP
/// head with a single L x D output.
enum class OutputMode { both, trend_only, seasonal_only, undecomposed };

OutputMode output_mode_from_string(const std::string& name);
const char* to_string(OutputMode mode);

struct Ablation {
    /// Feed [history | trend | seasonal] (true) or [history | forecast] (false).
    bool use_decomposed_input = true;
    OutputMode output_mode = OutputMode::both;
};

struct ModelShape {
    std::size_t history = 96; // W
    std::size_t horizon = 96; // L
    std::size_t channels = 1; // D
    std::size_t hidden = 32;
    double dropout = 0.5;
    decomp::DecompConfig decomp;
    Ablation ablation;

    /// Temporal length entering the first subnetwork: W + 2L or W + L.
    std::size_t time_in() const noexcept {
        return history + (ablation.use_decomposed_input ? 2 * horizon : horizon);
    }
    /// Temporal length leaving the first subnetwork: 2L or L.
    std::size_t time_out() const noexcept {
        return ablation.output_mode == OutputMode::undecomposed ? horizon : 2 * horizon;
    }
    void validate() const;
};

/// Additive correction for one chunk. Decomposed heads fill trend and seasonal;
/// the undecomposed head fills `single`.
struct Correction {
    Matrix trend;
    Matrix seasonal;
    Matrix single;

    bool decomposed() const noexcept { return single.empty(); }
    Matrix total() const;
};

/// forecast + beta * (trend + seasonal).
Matrix apply_correction(const Matrix& forecast, const Matrix& trend, const Matrix& seasonal, double beta);
Matrix apply_correction(const Matrix& forecast, const Correction& correction, double beta);

/// Anything mapping (chunk input window, chunk forecast) to a correction.
class Corrector {
public:
    virtual ~Corrector() = default;
    virtual Correction correct(const Matrix& history, const Matrix& forecast,
                               const backbone::ForecastContext& ctx) const = 0;
};

/// Dropout masks for one training sample: D x time_out after the temporal
/// subnetwork and time_out x D after the channel subnetwork.
struct DropoutMasks {
    Matrix temporal;
    Matrix channel;
};

/// Intermediate activations kept for the backward pass.
struct ForwardCache {
    Matrix x;  // D x time_in
    Matrix z1; // D x H
    Matrix a1;
    Matrix z2; // D x time_out
    Matrix h;  // time_out x D, after dropout
    Matrix z3; // time_out x H
    Matrix a3;
    Matrix y;  // time_out x D, after dropout
};

/// Parameter-shaped gradient accumulator.
struct Gradients {
    std::array<nn::Dense, 4> layers;

    void zero();
    void add(const Gradients& other);
    void scale(double s);
    nn::GradRefs refs() const;
};

/// Two-stage MLP corrector. The temporal subnetwork maps each channel's
/// time_in-vector through H to time_out; the channel subnetwork maps each time
/// step's D-vector through H back to D. Dropout follows each subnetwork.
class UecStdModel final : public Corrector {
public:
    enum Layer { temporal_in = 0, temporal_out = 1, channel_in = 2, channel_out = 3 };

    UecStdModel() = default;
    /// Seeded uniform fan-in initialisation.
    UecStdModel(const ModelShape& shape, nn::Rng& rng);
    static UecStdModel zeros(const ModelShape& shape);

    const ModelShape& shape() const noexcept { return shape_; }
    nn::Dense& layer(Layer which) noexcept { return layers_[which]; }
    const nn::Dense& layer(Layer which) const noexcept { return layers_[which]; }

    nn::ParamRefs params();
    std::vector<std::size_t> param_sizes() const;
    Gradients zero_gradients() const;

    /// Stacked time_in x D network input.
    Matrix build_input(const Matrix& history, const Matrix& forecast) const;

    /// Forward pass. `masks == nullptr` means inference (dropout is identity).
    ForwardCache forward(const Matrix& history, const Matrix& forecast, const DropoutMasks* masks) const;
    Correction split_output(const Matrix& y) const;
    /// Accumulates parameter gradients for upstream gradient dy (time_out x D).
    void backward(const ForwardCache& cache, const Matrix& dy, const DropoutMasks* masks, Gradients& grads) const;

    DropoutMasks draw_masks(nn::Rng& rng) const;

    Correction forward_correction(const Matrix& history, const Matrix& forecast, nn::Rng& rng, bool training) const;
    Correction correct(const Matrix& history, const Matrix& forecast,
                       const backbone::ForecastContext& ctx = {}) const override;

    bool operator==(const UecStdModel& other) const;

private:
    explicit UecStdModel(const ModelShape& shape);

    ModelShape shape_;
    std::array<nn::Dense, 4> layers_;
};

/// ((input history, chunk forecast), truth - forecast) training tuple.
struct CorrectionSample {
    Matrix input_history; // W x D
    Matrix forecast;      // L x D
    Matrix target_error;  // L x D
    std::size_t chunk_index = 0;
    std::size_t window_start = 0;

    static CorrectionSample make(Matrix input_history, Matrix forecast, const Matrix& truth, std::size_t chunk_index,
                                 std::size_t window_start);
};

struct StdLossWeights {
    double trend = 0.5;
    double seasonal = 0.5;

    void validate() const;
};

struct StdLossSpec {
    nn::LossKind kind = nn::LossKind::huber(1.0);
    StdLossWeights weights;
    decomp::DecompConfig decomp;
};

struct StdLossResult {
    double value = 0.0;
    Correction grad; // gradient with respect to each populated output
};

/// Decomposed heads: weights.trend * l(trend, MA(err)) + weights.seasonal *
/// l(seasonal, err - MA(err)). Undecomposed head: l(single, err), which equals
/// the loss of the corrected forecast against the truth.
StdLossResult std_loss(const Correction& output, const Matrix& target_error, const StdLossSpec& spec);

/// Loss of one sample; when `grads` is non-null the parameter gradients are
/// accumulated into it.
double sample_loss(const UecStdModel& model, const CorrectionSample& sample, const StdLossSpec& spec,
                   const DropoutMasks* masks, Gradients* grads);

} // namespace uec::corrector

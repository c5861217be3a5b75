#include "uec/corrector.hpp"

#include "uec/error.hpp"

namespace uec::corrector {
namespace {

void hadamard_inplace(Matrix& a, const Matrix& mask) {
    require_same_shape(a, mask, "dropout mask");
    auto x = a.flat();
    auto m = mask.flat();
    for (std::size_t i = 0; i < x.size(); ++i) x[i] *= m[i];
}

} // namespace

OutputMode output_mode_from_string(const std::string& name) {
    if (name == "both") return OutputMode::both;
    if (name == "trend_only") return OutputMode::trend_only;
    if (name == "seasonal_only") return OutputMode::seasonal_only;
    if (name == "undecomposed") return OutputMode::undecomposed;
    throw ConfigError("unknown output mode '" + name + "'");
}

const char* to_string(OutputMode mode) {
    switch (mode) {
    case OutputMode::both: return "both";
    case OutputMode::trend_only: return "trend_only";
    case OutputMode::seasonal_only: return "seasonal_only";
    case OutputMode::undecomposed: return "undecomposed";
    }
    return "?";
}

void ModelShape::validate() const {
    if (history == 0 || horizon == 0 || channels == 0 || hidden == 0) {
        throw ConfigError("corrector dimensions must be positive");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("corrector dropout must be in [0, 1)");
    decomp.validate();
}

Matrix Correction::total() const { return decomposed() ? trend + seasonal : single; }

Matrix apply_correction(const Matrix& forecast, const Matrix& trend, const Matrix& seasonal, double beta) {
    require_same_shape(forecast, trend, "apply_correction");
    require_same_shape(forecast, seasonal, "apply_correction");
    Matrix out = forecast;
    auto o = out.flat();
    auto t = trend.flat();
    auto s = seasonal.flat();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += beta * (t[i] + s[i]);
    return out;
}

Matrix apply_correction(const Matrix& forecast, const Correction& correction, double beta) {
    if (correction.decomposed()) return apply_correction(forecast, correction.trend, correction.seasonal, beta);
    require_same_shape(forecast, correction.single, "apply_correction");
    Matrix out = forecast;
    auto o = out.flat();
    auto c = correction.single.flat();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += beta * c[i];
    return out;
}

void Gradients::zero() {
    for (auto& l : layers) {
        for (double& v : l.weight.flat()) v = 0.0;
        for (double& v : l.bias) v = 0.0;
    }
}

void Gradients::add(const Gradients& other) {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        auto w = layers[i].weight.flat();
        auto ow = other.layers[i].weight.flat();
        for (std::size_t j = 0; j < w.size(); ++j) w[j] += ow[j];
        auto& b = layers[i].bias;
        const auto& ob = other.layers[i].bias;
        for (std::size_t j = 0; j < b.size(); ++j) b[j] += ob[j];
    }
}

void Gradients::scale(double s) {
    for (auto& l : layers) {
        for (double& v : l.weight.flat()) v *= s;
        for (double& v : l.bias) v *= s;
    }
}

nn::GradRefs Gradients::refs() const {
    nn::GradRefs out;
    for (const auto& l : layers) {
        out.emplace_back(l.weight.flat());
        out.emplace_back(l.bias);
    }
    return out;
}

UecStdModel::UecStdModel(const ModelShape& shape) : shape_(shape) {
    shape_.validate();
    layers_[temporal_in] = nn::Dense(shape_.time_in(), shape_.hidden);
    layers_[temporal_out] = nn::Dense(shape_.hidden, shape_.time_out());
    layers_[channel_in] = nn::Dense(shape_.channels, shape_.hidden);
    layers_[channel_out] = nn::Dense(shape_.hidden, shape_.channels);
}

UecStdModel::UecStdModel(const ModelShape& shape, nn::Rng& rng) : UecStdModel(shape) {
    layers_[temporal_in] = nn::Dense::init(shape_.time_in(), shape_.hidden, rng);
    layers_[temporal_out] = nn::Dense::init(shape_.hidden, shape_.time_out(), rng);
    layers_[channel_in] = nn::Dense::init(shape_.channels, shape_.hidden, rng);
    layers_[channel_out] = nn::Dense::init(shape_.hidden, shape_.channels, rng);
}

UecStdModel UecStdModel::zeros(const ModelShape& shape) { return UecStdModel(shape); }

nn::ParamRefs UecStdModel::params() {
    nn::ParamRefs out;
    for (auto& l : layers_) {
        out.emplace_back(l.weight.flat());
        out.emplace_back(l.bias);
    }
    return out;
}

std::vector<std::size_t> UecStdModel::param_sizes() const {
    std::vector<std::size_t> out;
    for (const auto& l : layers_) {
        out.push_back(l.weight.size());
        out.push_back(l.bias.size());
    }
    return out;
}

Gradients UecStdModel::zero_gradients() const {
    Gradients g;
    for (std::size_t i = 0; i < layers_.size(); ++i) g.layers[i] = nn::Dense(layers_[i].in(), layers_[i].out());
    return g;
}

Matrix UecStdModel::build_input(const Matrix& history, const Matrix& forecast) const {
    if (history.rows() != shape_.history || history.cols() != shape_.channels) {
        throw ShapeMismatch("corrector history must be " + std::to_string(shape_.history) + "x" +
                            std::to_string(shape_.channels));
    }
    if (forecast.rows() != shape_.horizon || forecast.cols() != shape_.channels) {
        throw ShapeMismatch("corrector forecast must be " + std::to_string(shape_.horizon) + "x" +
                            std::to_string(shape_.channels));
    }
    if (!shape_.ablation.use_decomposed_input) return vstack({&history, &forecast});
    const auto parts = decomp::decompose(forecast, shape_.decomp);
    return vstack({&history, &parts.trend, &parts.seasonal});
}

ForwardCache UecStdModel::forward(const Matrix& history, const Matrix& forecast, const DropoutMasks* masks) const {
    ForwardCache c;
    c.x = build_input(history, forecast).transposed();
    c.z1 = layers_[temporal_in].forward(c.x);
    c.a1 = nn::relu(c.z1);
    c.z2 = layers_[temporal_out].forward(c.a1);
    Matrix h = c.z2;
    if (masks) hadamard_inplace(h, masks->temporal);
    c.h = h.transposed();
    c.z3 = layers_[channel_in].forward(c.h);
    c.a3 = nn::relu(c.z3);
    c.y = layers_[channel_out].forward(c.a3);
    if (masks) hadamard_inplace(c.y, masks->channel);
    return c;
}

Correction UecStdModel::split_output(const Matrix& y) const {
    const std::size_t l = shape_.horizon;
    Correction out;
    switch (shape_.ablation.output_mode) {
    case OutputMode::undecomposed: out.single = y; break;
    case OutputMode::both:
        out.trend = y.slice_rows(0, l);
        out.seasonal = y.slice_rows(l, l);
        break;
    case OutputMode::trend_only:
        out.trend = y.slice_rows(0, l);
        out.seasonal = Matrix(l, y.cols());
        break;
    case OutputMode::seasonal_only:
        out.trend = Matrix(l, y.cols());
        out.seasonal = y.slice_rows(l, l);
        break;
    }
    return out;
}

void UecStdModel::backward(const ForwardCache& c, const Matrix& dy, const DropoutMasks* masks, Gradients& g) const {
    Matrix dz4 = dy;
    if (masks) hadamard_inplace(dz4, masks->channel);
    Matrix da3, dh;
    nn::dense_backward_accumulate(layers_[channel_out], c.a3, dz4, &da3, g.layers[channel_out].weight,
                                  g.layers[channel_out].bias);
    const Matrix dz3 = nn::relu_backward(c.z3, da3);
    nn::dense_backward_accumulate(layers_[channel_in], c.h, dz3, &dh, g.layers[channel_in].weight,
                                  g.layers[channel_in].bias);
    Matrix dz2 = dh.transposed();
    if (masks) hadamard_inplace(dz2, masks->temporal);
    Matrix da1;
    nn::dense_backward_accumulate(layers_[temporal_out], c.a1, dz2, &da1, g.layers[temporal_out].weight,
                                  g.layers[temporal_out].bias);
    const Matrix dz1 = nn::relu_backward(c.z1, da1);
    nn::dense_backward_accumulate(layers_[temporal_in], c.x, dz1, nullptr, g.layers[temporal_in].weight,
                                  g.layers[temporal_in].bias);
}

DropoutMasks UecStdModel::draw_masks(nn::Rng& rng) const {
    DropoutMasks m;
    m.temporal = nn::dropout_mask(shape_.channels, shape_.time_out(), shape_.dropout, rng);
    m.channel = nn::dropout_mask(shape_.time_out(), shape_.channels, shape_.dropout, rng);
    return m;
}

Correction UecStdModel::forward_correction(const Matrix& history, const Matrix& forecast, nn::Rng& rng,
                                           bool training) const {
    if (!training) return split_output(forward(history, forecast, nullptr).y);
    const DropoutMasks masks = draw_masks(rng);
    return split_output(forward(history, forecast, &masks).y);
}

Correction UecStdModel::correct(const Matrix& history, const Matrix& forecast, const backbone::ForecastContext&) const {
    return split_output(forward(history, forecast, nullptr).y);
}

bool UecStdModel::operator==(const UecStdModel& other) const {
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        if (!(layers_[i].weight == other.layers_[i].weight) || layers_[i].bias != other.layers_[i].bias) return false;
    }
    const auto& a = shape_;
    const auto& b = other.shape_;
    return a.history == b.history && a.horizon == b.horizon && a.channels == b.channels && a.hidden == b.hidden &&
           a.dropout == b.dropout && a.decomp.kernel_size == b.decomp.kernel_size &&
           a.decomp.pad_mode == b.decomp.pad_mode &&
           a.ablation.use_decomposed_input == b.ablation.use_decomposed_input &&
           a.ablation.output_mode == b.ablation.output_mode;
}

CorrectionSample CorrectionSample::make(Matrix input_history, Matrix forecast, const Matrix& truth,
                                        std::size_t chunk_index, std::size_t window_start) {
    Matrix error = truth - forecast;
    return CorrectionSample{std::move(input_history), std::move(forecast), std::move(error), chunk_index, window_start};
}

void StdLossWeights::validate() const {
    if (!(trend >= 0.0 && seasonal >= 0.0) || !(trend + seasonal > 0.0)) {
        throw ConfigError("trend/seasonal loss weights must be non-negative with a positive sum");
    }
}

StdLossResult std_loss(const Correction& output, const Matrix& target_error, const StdLossSpec& spec) {
    StdLossResult r;
    if (!output.decomposed()) {
        auto lv = nn::loss(spec.kind, output.single, target_error);
        r.value = lv.value;
        r.grad.single = std::move(lv.grad);
        return r;
    }
    spec.weights.validate();
    const auto target = decomp::decompose(target_error, spec.decomp);
    auto lt = nn::loss(spec.kind, output.trend, target.trend);
    auto ls = nn::loss(spec.kind, output.seasonal, target.seasonal);
    r.value = spec.weights.trend * lt.value + spec.weights.seasonal * ls.value;
    r.grad.trend = spec.weights.trend * lt.grad;
    r.grad.seasonal = spec.weights.seasonal * ls.grad;
    return r;
}

double sample_loss(const UecStdModel& model, const CorrectionSample& sample, const StdLossSpec& spec,
                   const DropoutMasks* masks, Gradients* grads) {
    const ForwardCache cache = model.forward(sample.input_history, sample.forecast, masks);
    const Correction out = model.split_output(cache.y);
    const StdLossResult lr = std_loss(out, sample.target_error, spec);
    if (grads == nullptr) return lr.value;

    const auto& shape = model.shape();
    const std::size_t l = shape.horizon;
    Matrix dy(shape.time_out(), shape.channels);
    switch (shape.ablation.output_mode) {
    case OutputMode::undecomposed: dy = lr.grad.single; break;
    case OutputMode::both:
        dy.set_rows(0, lr.grad.trend);
        dy.set_rows(l, lr.grad.seasonal);
        break;
    case OutputMode::trend_only: dy.set_rows(0, lr.grad.trend); break;
    case OutputMode::seasonal_only: dy.set_rows(l, lr.grad.seasonal); break;
    }
    model.backward(cache, dy, masks, *grads);
    return lr.value;
}

} // namespace uec::corrector

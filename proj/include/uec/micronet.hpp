#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "uec/matrix.hpp"

namespace uec::nn {

/// Seeded generator; every random decision in the library draws from one of these.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    /// Uniform in [0, 1) built from the top 53 bits, independent of the
    /// standard library's distribution implementations.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// y = x * weight + bias for x of shape batch x in.
struct Dense {
    Matrix weight; // in x out
    std::vector<double> bias;

    Dense() = default;
    Dense(std::size_t in, std::size_t out) : weight(in, out), bias(out, 0.0) {}

    /// Uniform(-1/sqrt(in), 1/sqrt(in)) for weights and bias.
    static Dense init(std::size_t in, std::size_t out, Rng& rng);

    std::size_t in() const noexcept { return weight.rows(); }
    std::size_t out() const noexcept { return weight.cols(); }

    Matrix forward(const Matrix& x) const;
};

struct DenseGrad {
    Matrix dx;
    Matrix dweight;
    std::vector<double> dbias;
};

DenseGrad dense_backward(const Dense& layer, const Matrix& x, const Matrix& dy);

/// Accumulating form used by the training kernels: adds into dweight/dbias and,
/// when dx is non-null, overwrites *dx with the input gradient.
void dense_backward_accumulate(const Dense& layer, const Matrix& x, const Matrix& dy, Matrix* dx, Matrix& dweight,
                               std::vector<double>& dbias);

Matrix relu(const Matrix& x);
/// Gradient through ReLU given the pre-activation.
Matrix relu_backward(const Matrix& pre, const Matrix& dy);

/// Inverted dropout: each entry of `mask` is 0 or 1/(1-p).
struct DropoutResult {
    Matrix y;
    Matrix mask;
};

/// Training mode zeroes entries with probability p and rescales survivors;
/// inference mode returns x unchanged with an all-ones mask.
DropoutResult dropout(const Matrix& x, double p, Rng& rng, bool training);
Matrix dropout_mask(std::size_t rows, std::size_t cols, double p, Rng& rng);

enum class LossType { huber, l1, mse };

struct LossKind {
    LossType type = LossType::huber;
    double delta = 1.0;

    static LossKind huber(double delta = 1.0) { return {LossType::huber, delta}; }
    static LossKind l1() { return {LossType::l1, 1.0}; }
    static LossKind mse() { return {LossType::mse, 1.0}; }

    void validate() const;
    std::string name() const;
    static LossKind from_string(const std::string& name, double delta = 1.0);
};

struct LossValue {
    double value = 0.0;
    Matrix grad; // d value / d pred
};

/// Mean-reduced elementwise loss over all entries.
LossValue loss(const LossKind& kind, const Matrix& pred, const Matrix& target);

/// Elementwise loss and derivative for a residual r = pred - target.
double loss_point(const LossKind& kind, double r);
double loss_point_grad(const LossKind& kind, double r);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig config;
    std::int64_t step = 0;
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;

    AdamState() = default;
    AdamState(AdamConfig cfg, const std::vector<std::size_t>& param_sizes);
};

using ParamRefs = std::vector<std::span<double>>;
using GradRefs = std::vector<std::span<const double>>;

/// One bias-corrected Adam update.
void adam_step(const ParamRefs& params, const GradRefs& grads, AdamState& state);

struct LossWithGrad {
    double loss = 0.0;
    std::vector<std::vector<double>> grads; // one per parameter block, same order as the ParamRefs
};

/// Compares analytic gradients against central differences with step h.
/// Returns max |analytic - numeric| / max(1, |numeric|) over all parameters.
/// `eval` must be deterministic (freeze dropout masks before calling).
double grad_check(const std::function<LossWithGrad()>& eval, const ParamRefs& params, double h);

} // namespace uec::nn

#include "uec/micronet.hpp"

#include <algorithm>
#include <cmath>

#include "uec/error.hpp"

namespace uec::nn {

Dense Dense::init(std::size_t in, std::size_t out, Rng& rng) {
    Dense layer(in, out);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& w : layer.weight.flat()) w = rng.uniform(-bound, bound);
    for (double& b : layer.bias) b = rng.uniform(-bound, bound);
    return layer;
}

Matrix Dense::forward(const Matrix& x) const {
    if (x.cols() != in()) {
        throw ShapeMismatch("dense forward: input has " + std::to_string(x.cols()) + " features, layer expects " +
                            std::to_string(in()));
    }
    const std::size_t n_out = out();
    Matrix y(x.rows(), n_out);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto yr = y.row(i);
        std::copy(bias.begin(), bias.end(), yr.begin());
        for (std::size_t k = 0; k < in(); ++k) {
            const double xv = x(i, k);
            if (xv == 0.0) continue;
            const auto wr = weight.row(k);
            for (std::size_t j = 0; j < n_out; ++j) yr[j] += xv * wr[j];
        }
    }
    return y;
}

void dense_backward_accumulate(const Dense& layer, const Matrix& x, const Matrix& dy, Matrix* dx, Matrix& dweight,
                               std::vector<double>& dbias) {
    if (x.cols() != layer.in() || dy.cols() != layer.out() || x.rows() != dy.rows()) {
        throw ShapeMismatch("dense backward: shapes disagree with layer");
    }
    const std::size_t n_in = layer.in(), n_out = layer.out();
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto g = dy.row(i);
        for (std::size_t j = 0; j < n_out; ++j) dbias[j] += g[j];
        for (std::size_t k = 0; k < n_in; ++k) {
            const double xv = x(i, k);
            if (xv == 0.0) continue;
            auto dw = dweight.row(k);
            for (std::size_t j = 0; j < n_out; ++j) dw[j] += xv * g[j];
        }
    }
    if (dx != nullptr) {
        *dx = Matrix(x.rows(), n_in);
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const auto g = dy.row(i);
            for (std::size_t k = 0; k < n_in; ++k) {
                const auto wr = layer.weight.row(k);
                double s = 0.0;
                for (std::size_t j = 0; j < n_out; ++j) s += wr[j] * g[j];
                (*dx)(i, k) = s;
            }
        }
    }
}

DenseGrad dense_backward(const Dense& layer, const Matrix& x, const Matrix& dy) {
    DenseGrad g{Matrix(), Matrix(layer.in(), layer.out()), std::vector<double>(layer.out(), 0.0)};
    dense_backward_accumulate(layer, x, dy, &g.dx, g.dweight, g.dbias);
    return g;
}

Matrix relu(const Matrix& x) {
    Matrix y = x;
    for (double& v : y.flat()) v = v > 0.0 ? v : 0.0;
    return y;
}

Matrix relu_backward(const Matrix& pre, const Matrix& dy) {
    require_same_shape(pre, dy, "relu_backward");
    Matrix dx = dy;
    auto p = pre.flat();
    auto d = dx.flat();
    for (std::size_t i = 0; i < d.size(); ++i)
        if (!(p[i] > 0.0)) d[i] = 0.0;
    return dx;
}

Matrix dropout_mask(std::size_t rows, std::size_t cols, double p, Rng& rng) {
    if (!(p >= 0.0 && p < 1.0)) throw ConfigError("dropout probability must be in [0, 1)");
    Matrix mask(rows, cols, 1.0);
    if (p == 0.0) return mask;
    const double keep_scale = 1.0 / (1.0 - p);
    for (double& m : mask.flat()) m = rng.uniform() < p ? 0.0 : keep_scale;
    return mask;
}

DropoutResult dropout(const Matrix& x, double p, Rng& rng, bool training) {
    if (!(p >= 0.0 && p < 1.0)) throw ConfigError("dropout probability must be in [0, 1)");
    if (!training || p == 0.0) return {x, Matrix(x.rows(), x.cols(), 1.0)};
    Matrix mask = dropout_mask(x.rows(), x.cols(), p, rng);
    Matrix y = x;
    auto yv = y.flat();
    auto mv = mask.flat();
    for (std::size_t i = 0; i < yv.size(); ++i) yv[i] *= mv[i];
    return {std::move(y), std::move(mask)};
}

void LossKind::validate() const {
    if (type == LossType::huber && !(delta > 0.0)) throw ConfigError("huber delta must be positive");
}

std::string LossKind::name() const {
    switch (type) {
    case LossType::huber: return "huber";
    case LossType::l1: return "l1";
    case LossType::mse: return "mse";
    }
    return "?";
}

LossKind LossKind::from_string(const std::string& name, double delta) {
    if (name == "huber") return huber(delta);
    if (name == "l1") return l1();
    if (name == "mse") return mse();
    throw ConfigError("unknown loss '" + name + "'");
}

double loss_point(const LossKind& kind, double r) {
    switch (kind.type) {
    case LossType::huber: {
        const double a = std::abs(r);
        return a <= kind.delta ? 0.5 * r * r : kind.delta * (a - 0.5 * kind.delta);
    }
    case LossType::l1: return std::abs(r);
    case LossType::mse: return r * r;
    }
    return 0.0;
}

double loss_point_grad(const LossKind& kind, double r) {
    switch (kind.type) {
    case LossType::huber:
        if (std::abs(r) <= kind.delta) return r;
        return r > 0.0 ? kind.delta : -kind.delta;
    case LossType::l1: return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
    case LossType::mse: return 2.0 * r;
    }
    return 0.0;
}

LossValue loss(const LossKind& kind, const Matrix& pred, const Matrix& target) {
    require_same_shape(pred, target, "loss");
    kind.validate();
    LossValue out{0.0, Matrix(pred.rows(), pred.cols())};
    const double n = static_cast<double>(pred.size());
    auto p = pred.flat();
    auto t = target.flat();
    auto g = out.grad.flat();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double r = p[i] - t[i];
        out.value += loss_point(kind, r);
        g[i] = loss_point_grad(kind, r) / n;
    }
    out.value /= n;
    return out;
}

AdamState::AdamState(AdamConfig cfg, const std::vector<std::size_t>& param_sizes) : config(cfg) {
    for (std::size_t s : param_sizes) {
        m.emplace_back(s, 0.0);
        v.emplace_back(s, 0.0);
    }
}

void adam_step(const ParamRefs& params, const GradRefs& grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size()) throw ShapeMismatch("adam: block count");
    const auto& c = state.config;
    ++state.step;
    const double bias1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
    for (std::size_t b = 0; b < params.size(); ++b) {
        auto p = params[b];
        auto g = grads[b];
        auto& m = state.m[b];
        auto& v = state.v[b];
        if (p.size() != g.size() || p.size() != m.size()) throw ShapeMismatch("adam: block " + std::to_string(b));
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
            v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bias1;
            const double v_hat = v[i] / bias2;
            p[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
        }
    }
}

double grad_check(const std::function<LossWithGrad()>& eval, const ParamRefs& params, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("grad_check: step h must be positive");
    const LossWithGrad analytic = eval();
    if (analytic.grads.size() != params.size()) throw ShapeMismatch("grad_check: gradient block count");
    double worst = 0.0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        auto p = params[b];
        if (analytic.grads[b].size() != p.size()) throw ShapeMismatch("grad_check: block " + std::to_string(b));
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double saved = p[i];
            p[i] = saved + h;
            const double up = eval().loss;
            p[i] = saved - h;
            const double down = eval().loss;
            p[i] = saved;
            const double numeric = (up - down) / (2.0 * h);
            const double err = std::abs(analytic.grads[b][i] - numeric) / std::max(1.0, std::abs(numeric));
            worst = std::max(worst, err);
        }
    }
    return worst;
}

} // namespace uec::nn

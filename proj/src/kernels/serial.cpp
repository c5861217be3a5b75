#include <algorithm>

#include "uec/corrector.hpp"
#include "uec/decomp.hpp"
#include "uec/error.hpp"
#include "uec/kernels.hpp"
#include "uec/metrics.hpp"

namespace uec::kernels::serial {

// out(t) = x(t) + sum_j (x(t+j) - x(t)) / ks. Anchoring on the centre keeps
// constant input exactly constant, which a plain windowed mean does not.
Matrix moving_average(const Matrix& x, const decomp::DecompConfig& cfg) {
    const auto rows = static_cast<std::ptrdiff_t>(x.rows());
    const std::ptrdiff_t pad = cfg.pad();
    const double inv_ks = 1.0 / static_cast<double>(cfg.kernel_size);
    const bool replicate = cfg.pad_mode == decomp::PadMode::replicate;
    Matrix out(x.rows(), x.cols());
    for (std::size_t d = 0; d < x.cols(); ++d) {
        for (std::ptrdiff_t t = 0; t < rows; ++t) {
            const double centre = x(static_cast<std::size_t>(t), d);
            double acc = 0.0;
            for (std::ptrdiff_t j = t - pad; j <= t + pad; ++j) {
                double v = 0.0;
                if (j >= 0 && j < rows) {
                    v = x(static_cast<std::size_t>(j), d);
                } else if (replicate) {
                    v = x(static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(j, 0, rows - 1)), d);
                }
                acc += v - centre;
            }
            out(static_cast<std::size_t>(t), d) = centre + acc * inv_ks;
        }
    }
    return out;
}

double batch_gradient(const corrector::UecStdModel& model, std::span<const corrector::CorrectionSample* const> batch,
                      const corrector::StdLossSpec& loss, std::span<const corrector::DropoutMasks> masks,
                      corrector::Gradients& grads) {
    if (batch.empty()) throw EmptySampleSet("empty batch");
    if (!masks.empty() && masks.size() != batch.size()) throw ShapeMismatch("one dropout mask set per sample");
    grads = model.zero_gradients();
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        corrector::Gradients g = model.zero_gradients();
        total += corrector::sample_loss(model, *batch[i], loss, masks.empty() ? nullptr : &masks[i], &g);
        grads.add(g);
    }
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    grads.scale(inv_n);
    return total * inv_n;
}

double batch_loss(const corrector::UecStdModel& model, std::span<const corrector::CorrectionSample* const> samples,
                  const corrector::StdLossSpec& loss) {
    if (samples.empty()) throw EmptySampleSet("empty sample list");
    double total = 0.0;
    for (const auto* s : samples) total += corrector::sample_loss(model, *s, loss, nullptr, nullptr);
    return total / static_cast<double>(samples.size());
}

eval::MetricSums metric_sums(std::span<const Matrix> pred, std::span<const Matrix> truth, double mape_eps) {
    if (pred.size() != truth.size()) throw ShapeMismatch("metric: prediction/truth window counts differ");
    std::vector<eval::MetricSums> parts(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) parts[i] = eval::block_sums(pred[i], truth[i], mape_eps);
    return eval::pairwise_combine(parts);
}

} // namespace uec::kernels::serial

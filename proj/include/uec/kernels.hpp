#pragma once

// Hot numeric kernels. Each exists as a plain serial reference and an OpenMP
// version; the two must agree bit for bit so the serial path can serve as the
// oracle in tests and the baseline in the benchmark.

#include <cstddef>
#include <span>
#include <vector>

#include "uec/matrix.hpp"

namespace uec::decomp {
struct DecompConfig;
}
namespace uec::corrector {
class UecStdModel;
struct CorrectionSample;
struct StdLossSpec;
struct Gradients;
struct Correction;
struct DropoutMasks;
} // namespace uec::corrector

namespace uec::eval {
struct MetricSums;
}

namespace uec::kernels {

struct BatchLoss {
    double loss = 0.0; // mean over the batch
};

namespace serial {

Matrix moving_average(const Matrix& x, const decomp::DecompConfig& cfg);

/// Mean loss and summed-then-averaged parameter gradients over `batch`.
/// `masks` holds one dropout mask set per batch entry; empty means inference mode.
double batch_gradient(const corrector::UecStdModel& model, std::span<const corrector::CorrectionSample* const> batch,
                      const corrector::StdLossSpec& loss, std::span<const corrector::DropoutMasks> masks,
                      corrector::Gradients& grads);

/// Mean inference-mode loss over `samples`.
double batch_loss(const corrector::UecStdModel& model, std::span<const corrector::CorrectionSample* const> samples,
                  const corrector::StdLossSpec& loss);

/// Error sums over paired prediction/truth blocks, combined by pairwise summation.
eval::MetricSums metric_sums(std::span<const Matrix> pred, std::span<const Matrix> truth, double mape_eps);

} // namespace serial

namespace omp {

Matrix moving_average(const Matrix& x, const decomp::DecompConfig& cfg);
double batch_gradient(const corrector::UecStdModel& model, std::span<const corrector::CorrectionSample* const> batch,
                      const corrector::StdLossSpec& loss, std::span<const corrector::DropoutMasks> masks,
                      corrector::Gradients& grads);
double batch_loss(const corrector::UecStdModel& model, std::span<const corrector::CorrectionSample* const> samples,
                  const corrector::StdLossSpec& loss);
eval::MetricSums metric_sums(std::span<const Matrix> pred, std::span<const Matrix> truth, double mape_eps);

} // namespace omp

} // namespace uec::kernels

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uec/matrix.hpp"
#include "uec/parallel.hpp"

namespace uec::eval {

/// |truth| at or below this value is left out of MAPE.
inline constexpr double kMapeEpsilon = 1e-8;

/// Raw error sums; metrics are ratios of these so partial results combine
/// exactly across windows.
struct MetricSums {
    double squared = 0.0;
    double absolute = 0.0;
    double percentage = 0.0; // sum of |err / truth| over counted cells
    std::size_t cells = 0;
    std::size_t mape_cells = 0;
    std::size_t mape_excluded = 0;

    MetricSums& operator+=(const MetricSums& o);

    double mse() const;
    double mae() const;
    /// In percent. Throws AllCellsExcluded when no cell qualified.
    double mape() const;
};

MetricSums block_sums(const Matrix& pred, const Matrix& truth, double mape_eps = kMapeEpsilon);
/// Combines per-window sums in a fixed pairwise order.
MetricSums pairwise_combine(std::span<const MetricSums> parts);

MetricSums metric_sums(std::span<const Matrix> pred, std::span<const Matrix> truth, Exec exec = Exec::serial,
                       double mape_eps = kMapeEpsilon);

/// Mean over all N x H x D cells of the stacked windows.
double mse(std::span<const Matrix> pred, std::span<const Matrix> truth);
double mae(std::span<const Matrix> pred, std::span<const Matrix> truth);
double mape(std::span<const Matrix> pred, std::span<const Matrix> truth);

double mse(const Matrix& pred, const Matrix& truth);
double mae(const Matrix& pred, const Matrix& truth);
double mape(const Matrix& pred, const Matrix& truth);

/// 100 * (corrected - baseline) / baseline; negative is an improvement.
double error_reduction(double corrected, double baseline);

} // namespace uec::eval

#include "uec/evaluation.hpp"

#include <cmath>

#include "uec/error.hpp"
#include "uec/kernels.hpp"

namespace uec::eval {

MetricSums& MetricSums::operator+=(const MetricSums& o) {
    squared += o.squared;
    absolute += o.absolute;
    percentage += o.percentage;
    cells += o.cells;
    mape_cells += o.mape_cells;
    mape_excluded += o.mape_excluded;
    return *this;
}

double MetricSums::mse() const {
    if (cells == 0) throw EmptySet("no cells to score");
    return squared / static_cast<double>(cells);
}

double MetricSums::mae() const {
    if (cells == 0) throw EmptySet("no cells to score");
    return absolute / static_cast<double>(cells);
}

double MetricSums::mape() const {
    if (mape_cells == 0) throw AllCellsExcluded();
    return 100.0 * percentage / static_cast<double>(mape_cells);
}

MetricSums block_sums(const Matrix& pred, const Matrix& truth, double mape_eps) {
    require_same_shape(pred, truth, "metric");
    MetricSums s;
    const auto p = pred.flat();
    const auto t = truth.flat();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double e = p[i] - t[i];
        s.squared += e * e;
        s.absolute += std::abs(e);
        if (std::abs(t[i]) > mape_eps) {
            s.percentage += std::abs(e / t[i]);
            ++s.mape_cells;
        } else {
            ++s.mape_excluded;
        }
    }
    s.cells = p.size();
    return s;
}

MetricSums pairwise_combine(std::span<const MetricSums> parts) {
    if (parts.empty()) return {};
    if (parts.size() == 1) return parts.front();
    const std::size_t mid = parts.size() / 2;
    MetricSums left = pairwise_combine(parts.first(mid));
    left += pairwise_combine(parts.subspan(mid));
    return left;
}

MetricSums metric_sums(std::span<const Matrix> pred, std::span<const Matrix> truth, Exec exec, double mape_eps) {
    return exec == Exec::parallel ? kernels::omp::metric_sums(pred, truth, mape_eps)
                                  : kernels::serial::metric_sums(pred, truth, mape_eps);
}

double mse(std::span<const Matrix> pred, std::span<const Matrix> truth) { return metric_sums(pred, truth).mse(); }
double mae(std::span<const Matrix> pred, std::span<const Matrix> truth) { return metric_sums(pred, truth).mae(); }
double mape(std::span<const Matrix> pred, std::span<const Matrix> truth) { return metric_sums(pred, truth).mape(); }

double mse(const Matrix& pred, const Matrix& truth) { return block_sums(pred, truth).mse(); }
double mae(const Matrix& pred, const Matrix& truth) { return block_sums(pred, truth).mae(); }
double mape(const Matrix& pred, const Matrix& truth) { return block_sums(pred, truth).mape(); }

double error_reduction(double corrected, double baseline) {
    if (!(baseline > 0.0)) throw ZeroBaseline();
    return 100.0 * (corrected - baseline) / baseline;
}

std::vector<calibration::EvalWindow> segment_windows(const data::SeriesFrame& frame, std::size_t begin,
                                                     std::size_t end, std::size_t history, std::size_t horizon,
                                                     std::size_t stride) {
    if (stride == 0) throw ConfigError("stride must be positive");
    if (end > frame.length() || begin > end) throw ShapeMismatch("segment outside frame");
    // origin t: t + 1 - history >= 0, t + 1 >= begin, t + horizon < end
    const std::size_t first = std::max(begin == 0 ? 0 : begin - 1, history - 1);
    std::vector<calibration::EvalWindow> out;
    for (std::size_t t = first; t + horizon < end; t += stride) {
        out.push_back({frame.values.slice_rows(t + 1 - history, history), frame.values.slice_rows(t + 1, horizon),
                       static_cast<std::ptrdiff_t>(t), calibration::EvalWindow::Source::validation});
    }
    if (out.empty()) {
        throw TooShort("segment [" + std::to_string(begin) + ", " + std::to_string(end) +
                       ") holds no window of horizon " + std::to_string(horizon));
    }
    return out;
}

std::vector<AccumulationPoint> accumulation_diagnostic(const backbone::Forecaster& f, const data::SeriesFrame& frame,
                                                       std::size_t begin, std::size_t end,
                                                       const std::vector<std::size_t>& horizons, std::size_t stride,
                                                       const std::string& series_id, Exec exec) {
    std::vector<AccumulationPoint> out;
    for (std::size_t h : horizons) {
        const auto windows = segment_windows(frame, begin, end, f.input_width(), h, stride);
        std::vector<Matrix> ar(windows.size()), tf(windows.size()), truth(windows.size());
        for_each_index(exec, windows.size(), [&](std::size_t i) {
            backbone::RolloutOptions o;
            o.series_id = series_id;
            o.origin = windows[i].origin;
            ar[i] = backbone::ar_rollout(f, windows[i].history, h, o);
            o.teacher_forced = true;
            o.truth = &windows[i].truth;
            tf[i] = backbone::ar_rollout(f, windows[i].history, h, o);
            truth[i] = windows[i].truth;
        });
        AccumulationPoint p;
        p.horizon = h;
        p.windows = windows.size();
        p.ar_mse = metric_sums(ar, truth, exec).mse();
        p.tf_mse = metric_sums(tf, truth, exec).mse();
        p.increase_pct = p.ar_mse == p.tf_mse ? 0.0 : error_reduction(p.ar_mse, p.tf_mse);
        out.push_back(p);
    }
    return out;
}

} // namespace uec::eval

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "uec/backbone.hpp"
#include "uec/calibration.hpp"
#include "uec/core_data.hpp"
#include "uec/metrics.hpp"
#include "uec/parallel.hpp"

namespace uec::eval {

/// Windows whose targets lie entirely inside [begin, end) of `frame`. The
/// look-back may reach into earlier rows.
std::vector<calibration::EvalWindow> segment_windows(const data::SeriesFrame& frame, std::size_t begin,
                                                     std::size_t end, std::size_t history, std::size_t horizon,
                                                     std::size_t stride);

struct AccumulationPoint {
    std::size_t horizon = 0;
    std::size_t windows = 0;
    double ar_mse = 0.0;
    double tf_mse = 0.0;
    double increase_pct = 0.0; // 100 * (ar - tf) / tf, exactly 0 when they agree
};

/// Autoregressive versus teacher-forced MSE of the backbone on the same windows.
std::vector<AccumulationPoint> accumulation_diagnostic(const backbone::Forecaster& f, const data::SeriesFrame& frame,
                                                       std::size_t begin, std::size_t end,
                                                       const std::vector<std::size_t>& horizons, std::size_t stride,
                                                       const std::string& series_id = {}, Exec exec = Exec::parallel);

} // namespace uec::eval

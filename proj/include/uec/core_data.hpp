#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uec/matrix.hpp"

namespace uec::data {

enum class Origin { raw, normalized };

/// T x D multivariate series, rows in chronological order.
struct SeriesFrame {
    Matrix values;
    std::vector<std::string> channel_names;
    Origin origin = Origin::raw;

    std::size_t length() const noexcept { return values.rows(); }
    std::size_t channels() const noexcept { return values.cols(); }

    /// Rows [begin, end) as a new frame with the same channel names and origin.
    SeriesFrame segment(std::size_t begin, std::size_t end) const;
};

/// Loads a headered CSV. A column named `timestamp_column` is dropped; when no
/// name is given, a first column whose first data cell is not numeric is
/// treated as a timestamp and dropped.
SeriesFrame load_csv(const std::filesystem::path& path, const std::optional<std::string>& timestamp_column = {});
void write_csv(const std::filesystem::path& path, const SeriesFrame& frame);

enum class SplitMode { standard, staggered };

struct SplitSpec {
    SplitMode mode = SplitMode::standard;
    /// (train, val, test) for standard, (train1, val, train2, test) for staggered.
    std::vector<double> ratios = {0.7, 0.1, 0.2};

    static SplitSpec standard(double train = 0.7, double val = 0.1, double test = 0.2);
    static SplitSpec staggered(double train1 = 0.4, double val = 0.1, double train2 = 0.3, double test = 0.2);

    std::vector<std::string> segment_names() const;
    /// Throws ConfigError unless ratios are positive, sized for the mode and sum to 1 within 1e-9.
    void validate() const;
};

struct SegmentBounds {
    std::string name;
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t length() const noexcept { return end - begin; }
};

/// Contiguous segment boundaries; every boundary is floor(cumulative_ratio * T)
/// and the last segment takes the remainder.
std::vector<SegmentBounds> split_bounds(std::size_t length, const SplitSpec& spec);
std::vector<std::pair<std::string, SeriesFrame>> split(const SeriesFrame& frame, const SplitSpec& spec);

/// Per-channel z-score statistics.
class Normalizer {
public:
    static constexpr double kStdFloor = 1e-8;

    Normalizer() = default;
    Normalizer(std::vector<double> mean, std::vector<double> stdev);

    /// Population statistics of one or more raw frames taken together.
    static Normalizer fit(const SeriesFrame& frame);
    static Normalizer fit(const std::vector<const SeriesFrame*>& frames);

    SeriesFrame apply(const SeriesFrame& frame) const;
    SeriesFrame invert(const SeriesFrame& frame) const;

    const std::vector<double>& mean() const noexcept { return mean_; }
    const std::vector<double>& stdev() const noexcept { return std_; }

private:
    std::vector<double> mean_;
    std::vector<double> std_;
};

struct Window {
    Matrix history;          // W x D, rows t-W+1 .. t
    Matrix target;           // H x D, rows t+1 .. t+H
    std::size_t start_index; // t, the last history row
};

/// Count of windows produced by make_windows.
std::size_t window_count(std::size_t length, std::size_t history, std::size_t horizon, std::size_t stride);
/// Start indices t = W-1, W-1+stride, ... for windows that fit inside `length` rows.
std::vector<std::size_t> window_starts(std::size_t length, std::size_t history, std::size_t horizon,
                                       std::size_t stride);
std::vector<Window> make_windows(const SeriesFrame& frame, std::size_t history, std::size_t horizon,
                                 std::size_t stride);

} // namespace uec::data

#include "uec/core_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "uec/error.hpp"

namespace uec::data {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::optional<double> parse_number(std::string_view cell) {
    double v = 0.0;
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
    return v;
}

} // namespace

SeriesFrame SeriesFrame::segment(std::size_t begin, std::size_t end) const {
    return SeriesFrame{values.slice_rows(begin, end - begin), channel_names, origin};
}

SeriesFrame load_csv(const std::filesystem::path& path, const std::optional<std::string>& timestamp_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    std::string header_line;
    while (std::getline(in, header_line) && trim(header_line).empty()) {}
    if (trim(header_line).empty()) throw EmptyFile(path.string() + " has no header row");

    const auto header = split_fields(header_line);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!trim(line).empty()) lines.push_back(std::move(line));
    }
    if (lines.empty()) throw EmptyFile(path.string() + " has no data rows");

    std::optional<std::size_t> skip;
    if (timestamp_column) {
        const auto it = std::find(header.begin(), header.end(), std::string_view(*timestamp_column));
        if (it == header.end()) throw ConfigError("timestamp column '" + *timestamp_column + "' not in header");
        skip = static_cast<std::size_t>(it - header.begin());
    } else if (!parse_number(split_fields(lines.front()).front())) {
        skip = 0;
    }

    std::vector<std::string> names;
    for (std::size_t c = 0; c < header.size(); ++c)
        if (c != skip) names.emplace_back(header[c]);
    if (names.empty()) throw EmptyFile(path.string() + " has no value columns");

    Matrix values(lines.size(), names.size());
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const auto fields = split_fields(lines[r]);
        if (fields.size() != header.size()) {
            throw ParseError(r + 1, std::min(fields.size(), header.size()) + 1,
                             "expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()));
        }
        std::size_t out_c = 0;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (c == skip) continue;
            const auto v = parse_number(fields[c]);
            if (!v) throw ParseError(r + 1, c + 1, "not a number: '" + std::string(fields[c]) + "'");
            if (!std::isfinite(*v)) throw ParseError(r + 1, c + 1, "non-finite value");
            values(r, out_c++) = *v;
        }
    }
    return SeriesFrame{std::move(values), std::move(names), Origin::raw};
}

void write_csv(const std::filesystem::path& path, const SeriesFrame& frame) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    for (std::size_t c = 0; c < frame.channels(); ++c) out << (c ? "," : "") << frame.channel_names[c];
    out << '\n' << std::setprecision(17);
    for (std::size_t r = 0; r < frame.length(); ++r) {
        for (std::size_t c = 0; c < frame.channels(); ++c) out << (c ? "," : "") << frame.values(r, c);
        out << '\n';
    }
}

SplitSpec SplitSpec::standard(double train, double val, double test) {
    return SplitSpec{SplitMode::standard, {train, val, test}};
}

SplitSpec SplitSpec::staggered(double train1, double val, double train2, double test) {
    return SplitSpec{SplitMode::staggered, {train1, val, train2, test}};
}

std::vector<std::string> SplitSpec::segment_names() const {
    if (mode == SplitMode::standard) return {"train", "val", "test"};
    return {"train1", "val", "train2", "test"};
}

void SplitSpec::validate() const {
    const std::size_t expected = mode == SplitMode::standard ? 3 : 4;
    if (ratios.size() != expected) {
        throw ConfigError("split needs " + std::to_string(expected) + " ratios, got " + std::to_string(ratios.size()));
    }
    for (double r : ratios)
        if (!(r > 0.0)) throw ConfigError("split ratios must be positive");
    const double sum = std::accumulate(ratios.begin(), ratios.end(), 0.0);
    if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
}

std::vector<SegmentBounds> split_bounds(std::size_t length, const SplitSpec& spec) {
    spec.validate();
    const auto names = spec.segment_names();
    std::vector<SegmentBounds> out;
    double cumulative = 0.0;
    std::size_t begin = 0;
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::size_t end = length;
        if (i + 1 < names.size()) {
            cumulative += spec.ratios[i];
            // The slack absorbs representation error, e.g. (0.7 + 0.1) * 10 = 7.999...
            end = static_cast<std::size_t>(std::floor(cumulative * static_cast<double>(length) + 1e-9));
            end = std::min(end, length);
        }
        if (end <= begin) throw DegenerateSplit("segment '" + names[i] + "' would be empty for T=" + std::to_string(length));
        out.push_back({names[i], begin, end});
        begin = end;
    }
    return out;
}

std::vector<std::pair<std::string, SeriesFrame>> split(const SeriesFrame& frame, const SplitSpec& spec) {
    std::vector<std::pair<std::string, SeriesFrame>> out;
    for (const auto& b : split_bounds(frame.length(), spec)) out.emplace_back(b.name, frame.segment(b.begin, b.end));
    return out;
}

Normalizer::Normalizer(std::vector<double> mean, std::vector<double> stdev) : mean_(std::move(mean)), std_(std::move(stdev)) {
    if (mean_.size() != std_.size()) throw ShapeMismatch("normalizer mean/std size mismatch");
    for (double& s : std_) s = std::max(s, kStdFloor);
}

Normalizer Normalizer::fit(const SeriesFrame& frame) { return fit(std::vector<const SeriesFrame*>{&frame}); }

Normalizer Normalizer::fit(const std::vector<const SeriesFrame*>& frames) {
    if (frames.empty()) throw InsufficientData("no frames to fit a normalizer");
    const std::size_t d = frames.front()->channels();
    std::vector<double> mean(d, 0.0), var(d, 0.0);
    std::size_t n = 0;
    for (const SeriesFrame* f : frames) {
        if (f->origin != Origin::raw) throw ConfigError("normalizer must be fit on raw data");
        if (f->channels() != d) throw ShapeMismatch("normalizer frames disagree on channel count");
        n += f->length();
        for (std::size_t r = 0; r < f->length(); ++r)
            for (std::size_t c = 0; c < d; ++c) mean[c] += f->values(r, c);
    }
    if (n == 0) throw InsufficientData("empty frame");
    for (double& m : mean) m /= static_cast<double>(n);
    for (const SeriesFrame* f : frames)
        for (std::size_t r = 0; r < f->length(); ++r)
            for (std::size_t c = 0; c < d; ++c) {
                const double dev = f->values(r, c) - mean[c];
                var[c] += dev * dev;
            }
    for (double& v : var) v = std::sqrt(v / static_cast<double>(n));
    return Normalizer(std::move(mean), std::move(var));
}

SeriesFrame Normalizer::apply(const SeriesFrame& frame) const {
    if (frame.channels() != mean_.size()) throw ShapeMismatch("normalizer channel count");
    SeriesFrame out = frame;
    for (std::size_t r = 0; r < out.length(); ++r)
        for (std::size_t c = 0; c < out.channels(); ++c) out.values(r, c) = (frame.values(r, c) - mean_[c]) / std_[c];
    out.origin = Origin::normalized;
    return out;
}

SeriesFrame Normalizer::invert(const SeriesFrame& frame) const {
    if (frame.channels() != mean_.size()) throw ShapeMismatch("normalizer channel count");
    SeriesFrame out = frame;
    for (std::size_t r = 0; r < out.length(); ++r)
        for (std::size_t c = 0; c < out.channels(); ++c) out.values(r, c) = frame.values(r, c) * std_[c] + mean_[c];
    out.origin = Origin::raw;
    return out;
}

std::size_t window_count(std::size_t length, std::size_t history, std::size_t horizon, std::size_t stride) {
    if (history == 0 || horizon == 0) throw ConfigError("window history and horizon must be positive");
    if (stride == 0) throw ConfigError("window stride must be positive");
    if (history + horizon > length) {
        throw TooShort("W+H=" + std::to_string(history + horizon) + " exceeds series length " + std::to_string(length));
    }
    return (length - history - horizon) / stride + 1;
}

std::vector<std::size_t> window_starts(std::size_t length, std::size_t history, std::size_t horizon,
                                       std::size_t stride) {
    const std::size_t n = window_count(length, history, horizon, stride);
    std::vector<std::size_t> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = history - 1 + i * stride;
    return out;
}

std::vector<Window> make_windows(const SeriesFrame& frame, std::size_t history, std::size_t horizon,
                                 std::size_t stride) {
    std::vector<Window> out;
    for (std::size_t t : window_starts(frame.length(), history, horizon, stride)) {
        out.push_back(Window{frame.values.slice_rows(t + 1 - history, history), frame.values.slice_rows(t + 1, horizon), t});
    }
    return out;
}

} // namespace uec::data

#include "uec/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "uec/error.hpp"

namespace uec::data {

SeriesFrame make_synthetic(const SyntheticSpec& spec) {
    if (spec.length == 0 || spec.channels == 0) throw ConfigError("synthetic series needs positive length and channels");
    if (spec.periods.size() != spec.amplitudes.size()) throw ConfigError("synthetic periods/amplitudes size mismatch");

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> gain(0.5, 1.5);
    std::normal_distribution<double> noise(0.0, 1.0);

    struct Channel {
        double slope;
        std::vector<double> amp, phase;
    };
    std::vector<Channel> ch(spec.channels);
    for (auto& c : ch) {
        c.slope = spec.trend_per_1000 * gain(rng) / 1000.0;
        for (std::size_t k = 0; k < spec.periods.size(); ++k) {
            c.amp.push_back(spec.amplitudes[k] * gain(rng));
            c.phase.push_back(phase(rng));
        }
    }

    SeriesFrame frame;
    frame.values = Matrix(spec.length, spec.channels);
    for (std::size_t t = 0; t < spec.length; ++t) {
        for (std::size_t d = 0; d < spec.channels; ++d) {
            double v = ch[d].slope * static_cast<double>(t);
            for (std::size_t k = 0; k < spec.periods.size(); ++k)
                v += ch[d].amp[k] * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / spec.periods[k] + ch[d].phase[k]);
            frame.values(t, d) = v + spec.noise_std * noise(rng);
        }
    }
    for (std::size_t d = 0; d < spec.channels; ++d) frame.channel_names.push_back("ch" + std::to_string(d));
    return frame;
}

SeriesFrame make_random_walk(std::size_t length, std::size_t channels, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> step(0.0, 1.0);
    SeriesFrame frame;
    frame.values = Matrix(length, channels);
    for (std::size_t t = 0; t < length; ++t)
        for (std::size_t d = 0; d < channels; ++d)
            frame.values(t, d) = (t ? frame.values(t - 1, d) : 0.0) + step(rng);
    for (std::size_t d = 0; d < channels; ++d) frame.channel_names.push_back("rw" + std::to_string(d));
    return frame;
}

} // namespace uec::data

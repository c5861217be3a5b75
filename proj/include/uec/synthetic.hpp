#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "uec/core_data.hpp"

namespace uec::data {

/// Linear trend plus two sinusoids plus Gaussian noise, one independent draw
/// of phases and amplitudes per channel.
struct SyntheticSpec {
    std::size_t length = 6000;
    std::size_t channels = 3;
    double noise_std = 0.1;
    double trend_per_1000 = 0.2;
    std::vector<double> periods = {24.0, 60.0};
    std::vector<double> amplitudes = {1.0, 0.5};
    std::uint64_t seed = 0;
};

SeriesFrame make_synthetic(const SyntheticSpec& spec);

/// Independent Gaussian random walks with unit step variance.
SeriesFrame make_random_walk(std::size_t length, std::size_t channels, std::uint64_t seed);

} // namespace uec::data

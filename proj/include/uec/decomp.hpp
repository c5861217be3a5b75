#pragma once

#include <string>

#include "uec/matrix.hpp"
#include "uec/parallel.hpp"

namespace uec::decomp {

enum class PadMode { replicate, zero };

/// Centred moving average of odd length; pad = (kernel_size - 1) / 2 on each side.
struct DecompConfig {
    int kernel_size = 25;
    PadMode pad_mode = PadMode::replicate;

    int pad() const noexcept { return (kernel_size - 1) / 2; }
    /// Throws EvenKernel for even or non-positive kernel sizes.
    void validate() const;
};

struct Decomposition {
    Matrix trend;
    Matrix seasonal;
};

/// Column-wise moving average of an H x D matrix; out-of-range rows are filled
/// per the pad mode. Same shape as the input.
Matrix moving_average(const Matrix& x, const DecompConfig& cfg, Exec exec = Exec::serial);

/// trend = moving_average(x), seasonal = x - trend.
Decomposition decompose(const Matrix& x, const DecompConfig& cfg, Exec exec = Exec::serial);

const char* to_string(PadMode mode);
PadMode pad_mode_from_string(const std::string& name);

} // namespace uec::decomp

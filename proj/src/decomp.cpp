#include "uec/decomp.hpp"

#include "uec/error.hpp"
#include "uec/kernels.hpp"

namespace uec::decomp {

void DecompConfig::validate() const {
    if (kernel_size < 1 || kernel_size % 2 == 0) throw EvenKernel(kernel_size);
}

Matrix moving_average(const Matrix& x, const DecompConfig& cfg, Exec exec) {
    cfg.validate();
    if (x.rows() == 0) throw ShapeMismatch("moving_average needs at least one row");
    return exec == Exec::parallel ? kernels::omp::moving_average(x, cfg) : kernels::serial::moving_average(x, cfg);
}

Decomposition decompose(const Matrix& x, const DecompConfig& cfg, Exec exec) {
    Matrix trend = moving_average(x, cfg, exec);
    Matrix seasonal = x - trend;
    return {std::move(trend), std::move(seasonal)};
}

const char* to_string(PadMode mode) { return mode == PadMode::replicate ? "replicate" : "zero"; }

PadMode pad_mode_from_string(const std::string& name) {
    if (name == "replicate") return PadMode::replicate;
    if (name == "zero") return PadMode::zero;
    throw ConfigError("unknown pad mode '" + name + "'");
}

} // namespace uec::decomp

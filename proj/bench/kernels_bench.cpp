// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <random>

#include "uec/corrector.hpp"
#include "uec/decomp.hpp"
#include "uec/kernels.hpp"
#include "uec/metrics.hpp"

namespace {

using namespace uec;

Matrix gaussian(std::size_t r, std::size_t c, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::normal_distribution<double> n;
    Matrix m(r, c);
    for (auto& v : m.flat()) v = n(eng);
    return m;
}

struct TrainBatch {
    corrector::UecStdModel model;
    std::vector<corrector::CorrectionSample> samples;
    std::vector<const corrector::CorrectionSample*> ptrs;
    std::vector<corrector::DropoutMasks> masks;
    corrector::StdLossSpec spec;

    explicit TrainBatch(std::size_t n) {
        corrector::ModelShape s;
        s.channels = 7;
        nn::Rng rng(1);
        model = corrector::UecStdModel(s, rng);
        for (std::size_t i = 0; i < n; ++i) {
            samples.push_back(corrector::CorrectionSample::make(gaussian(96, 7, i), gaussian(96, 7, 1000 + i),
                                                                gaussian(96, 7, 2000 + i), 0, i));
            masks.push_back(model.draw_masks(rng));
        }
        for (const auto& x : samples) ptrs.push_back(&x);
        spec.decomp = s.decomp;
    }
};

template <bool Parallel>
void BM_MovingAverage(benchmark::State& state) {
    const auto x = gaussian(static_cast<std::size_t>(state.range(0)), 7, 3);
    const decomp::DecompConfig cfg{25, decomp::PadMode::replicate};
    for (auto _ : state) {
        auto y = Parallel ? kernels::omp::moving_average(x, cfg) : kernels::serial::moving_average(x, cfg);
        benchmark::DoNotOptimize(y);
    }
}

template <bool Parallel>
void BM_BatchGradient(benchmark::State& state) {
    TrainBatch b(static_cast<std::size_t>(state.range(0)));
    corrector::Gradients g;
    for (auto _ : state) {
        const double l = Parallel ? kernels::omp::batch_gradient(b.model, b.ptrs, b.spec, b.masks, g)
                                  : kernels::serial::batch_gradient(b.model, b.ptrs, b.spec, b.masks, g);
        benchmark::DoNotOptimize(l);
    }
}

template <bool Parallel>
void BM_BatchLoss(benchmark::State& state) {
    TrainBatch b(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        const double l = Parallel ? kernels::omp::batch_loss(b.model, b.ptrs, b.spec)
                                  : kernels::serial::batch_loss(b.model, b.ptrs, b.spec);
        benchmark::DoNotOptimize(l);
    }
}

template <bool Parallel>
void BM_MetricSums(benchmark::State& state) {
    std::vector<Matrix> p, t;
    for (std::int64_t i = 0; i < state.range(0); ++i) {
        p.push_back(gaussian(384, 7, static_cast<std::uint64_t>(i)));
        t.push_back(gaussian(384, 7, static_cast<std::uint64_t>(i + 10000)));
    }
    for (auto _ : state) {
        auto s = Parallel ? kernels::omp::metric_sums(p, t, eval::kMapeEpsilon)
                          : kernels::serial::metric_sums(p, t, eval::kMapeEpsilon);
        benchmark::DoNotOptimize(s);
    }
}

} // namespace

BENCHMARK(BM_MovingAverage<false>)->Name("moving_average/serial")->Arg(96)->Arg(6000);
BENCHMARK(BM_MovingAverage<true>)->Name("moving_average/omp")->Arg(96)->Arg(6000);
BENCHMARK(BM_BatchGradient<false>)->Name("batch_gradient/serial")->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchGradient<true>)->Name("batch_gradient/omp")->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchLoss<false>)->Name("batch_loss/serial")->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchLoss<true>)->Name("batch_loss/omp")->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MetricSums<false>)->Name("metric_sums/serial")->Arg(800);
BENCHMARK(BM_MetricSums<true>)->Name("metric_sums/omp")->Arg(800);

BENCHMARK_MAIN();

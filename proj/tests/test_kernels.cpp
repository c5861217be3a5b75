#include <gtest/gtest.h>

#include "test_util.hpp"
#include "uec/corrector.hpp"
#include "uec/kernels.hpp"
#include "uec/metrics.hpp"

using namespace uec;

namespace {

struct Batch {
    corrector::UecStdModel model;
    std::vector<corrector::CorrectionSample> samples;
    std::vector<const corrector::CorrectionSample*> ptrs;
    std::vector<corrector::DropoutMasks> masks;
};

Batch make_batch(std::size_t n, corrector::OutputMode mode) {
    corrector::ModelShape s;
    s.history = 24;
    s.horizon = 12;
    s.channels = 4;
    s.hidden = 9;
    s.decomp.kernel_size = 7;
    s.ablation.output_mode = mode;
    nn::Rng rng(17);
    Batch b{corrector::UecStdModel(s, rng), {}, {}, {}};
    for (std::size_t i = 0; i < n; ++i) {
        b.samples.push_back(corrector::CorrectionSample::make(test::random_matrix(24, 4, i), test::random_matrix(12, 4, 100 + i),
                                                              test::random_matrix(12, 4, 200 + i), 0, i));
        b.masks.push_back(b.model.draw_masks(rng));
    }
    for (const auto& x : b.samples) b.ptrs.push_back(&x);
    return b;
}

} // namespace

class KernelParity : public ::testing::Test {
protected:
    void SetUp() override { set_thread_cap(4); }
};

TEST_F(KernelParity, MovingAverage) {
    for (auto mode : {decomp::PadMode::replicate, decomp::PadMode::zero}) {
        const auto x = test::random_matrix(333, 7, 3);
        const decomp::DecompConfig cfg{25, mode};
        EXPECT_EQ(kernels::serial::moving_average(x, cfg), kernels::omp::moving_average(x, cfg));
    }
}

TEST_F(KernelParity, BatchGradientAndLoss) {
    for (auto mode : {corrector::OutputMode::both, corrector::OutputMode::undecomposed}) {
        auto b = make_batch(23, mode);
        const corrector::StdLossSpec spec{nn::LossKind::huber(), {}, b.model.shape().decomp};
        corrector::Gradients gs, gp;
        const double ls = kernels::serial::batch_gradient(b.model, b.ptrs, spec, b.masks, gs);
        const double lp = kernels::omp::batch_gradient(b.model, b.ptrs, spec, b.masks, gp);
        EXPECT_EQ(ls, lp);
        for (std::size_t i = 0; i < 4; ++i) {
            EXPECT_EQ(gs.layers[i].weight, gp.layers[i].weight);
            EXPECT_EQ(gs.layers[i].bias, gp.layers[i].bias);
        }
        EXPECT_EQ(kernels::serial::batch_loss(b.model, b.ptrs, spec), kernels::omp::batch_loss(b.model, b.ptrs, spec));
    }
}

TEST_F(KernelParity, BatchGradientIsMeanOfSampleGradients) {
    auto b = make_batch(5, corrector::OutputMode::both);
    const corrector::StdLossSpec spec{nn::LossKind::mse(), {}, b.model.shape().decomp};
    corrector::Gradients g;
    const double loss = kernels::serial::batch_gradient(b.model, b.ptrs, spec, b.masks, g);
    double total = 0;
    auto sum = b.model.zero_gradients();
    for (std::size_t i = 0; i < 5; ++i) total += corrector::sample_loss(b.model, b.samples[i], spec, &b.masks[i], &sum);
    EXPECT_NEAR(loss, total / 5, 1e-14);
    for (std::size_t k = 0; k < sum.layers[0].weight.size(); ++k)
        EXPECT_NEAR(g.layers[0].weight.flat()[k], sum.layers[0].weight.flat()[k] / 5, 1e-14);
}

TEST_F(KernelParity, MetricSums) {
    std::vector<Matrix> p, t;
    for (std::uint64_t i = 0; i < 57; ++i) {
        p.push_back(test::random_matrix(20, 3, i));
        t.push_back(test::random_matrix(20, 3, 500 + i));
    }
    const auto s = kernels::serial::metric_sums(p, t, eval::kMapeEpsilon);
    const auto o = kernels::omp::metric_sums(p, t, eval::kMapeEpsilon);
    EXPECT_EQ(s.squared, o.squared);
    EXPECT_EQ(s.absolute, o.absolute);
    EXPECT_EQ(s.percentage, o.percentage);
    EXPECT_EQ(s.cells, o.cells);
}

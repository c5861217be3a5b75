#include <gtest/gtest.h>

#include "test_util.hpp"
#include "uec/decomp.hpp"
#include "uec/error.hpp"

using namespace uec;
using namespace uec::decomp;

TEST(MovingAverage, HandComputedReplicate) {
    const Matrix x{{0}, {1}, {2}, {3}, {4}};
    const auto y = moving_average(x, {3, PadMode::replicate});
    const double want[] = {1.0 / 3, 1, 2, 3, 11.0 / 3};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(y(i, 0), want[i], 1e-15);
}

TEST(MovingAverage, HandComputedZero) {
    const Matrix x{{0}, {1}, {2}, {3}, {4}};
    const auto y = moving_average(x, {3, PadMode::zero});
    const double want[] = {1.0 / 3, 1, 2, 3, 7.0 / 3};
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(y(i, 0), want[i], 1e-15);
}

TEST(MovingAverage, MatchesPaddedWindowSum) {
    for (int k : {1, 3, 5, 25, 51}) {
        for (auto mode : {PadMode::replicate, PadMode::zero}) {
            const auto x = test::random_matrix(96, 7, static_cast<std::uint64_t>(k));
            EXPECT_LE(max_abs_diff(moving_average(x, {k, mode}), test::padded_average(x, k, mode)), 1e-12)
                << "k=" << k << " mode=" << to_string(mode);
        }
    }
}

TEST(MovingAverage, KernelLongerThanSeries) {
    const auto x = test::random_matrix(4, 2, 3);
    EXPECT_LE(max_abs_diff(moving_average(x, {25, PadMode::replicate}), test::padded_average(x, 25, PadMode::replicate)),
              1e-12);
}

TEST(MovingAverage, ConstantInputIsExactlyConstant) {
    const Matrix x(96, 3, 0.7);
    EXPECT_EQ(moving_average(x, {25, PadMode::replicate}), x);
}

TEST(MovingAverage, KernelOneIsIdentity) {
    const auto x = test::random_matrix(30, 2, 9);
    EXPECT_EQ(moving_average(x, {1, PadMode::replicate}), x);
}

TEST(MovingAverage, Linearity) {
    const auto a = test::random_matrix(50, 3, 1), b = test::random_matrix(50, 3, 2);
    const DecompConfig cfg{25, PadMode::zero};
    const auto lhs = moving_average(2.0 * a + b, cfg);
    const auto rhs = 2.0 * moving_average(a, cfg) + moving_average(b, cfg);
    EXPECT_LE(max_abs_diff(lhs, rhs), 1e-12);
}

TEST(Decompose, IdentityHolds) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto x = test::random_matrix(96, 7, s, 3.0);
        const auto d = decompose(x, {});
        EXPECT_LE(max_abs_diff(d.trend + d.seasonal, x), 1e-12);
    }
}

TEST(Decompose, EvenKernelRejected) {
    EXPECT_THROW(decompose(Matrix(10, 1), {24, PadMode::replicate}), EvenKernel);
    EXPECT_THROW(DecompConfig({0, PadMode::replicate}).validate(), EvenKernel);
}

TEST(Decompose, PadModeNames) {
    EXPECT_EQ(pad_mode_from_string("zero"), PadMode::zero);
    EXPECT_EQ(pad_mode_from_string(to_string(PadMode::replicate)), PadMode::replicate);
    EXPECT_THROW(pad_mode_from_string("mirror"), ConfigError);
}

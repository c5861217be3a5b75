#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"
#include "uec/error.hpp"
#include "uec/micronet.hpp"

using namespace uec;
using namespace uec::nn;

TEST(Dense, ForwardMatchesLoop) {
    Rng rng(1);
    const auto layer = Dense::init(5, 3, rng);
    const auto x = test::random_matrix(4, 5, 2);
    const auto y = layer.forward(x);
    for (std::size_t b = 0; b < 4; ++b)
        for (std::size_t o = 0; o < 3; ++o) {
            double s = layer.bias[o];
            for (std::size_t i = 0; i < 5; ++i) s += x(b, i) * layer.weight(i, o);
            EXPECT_NEAR(y(b, o), s, 1e-14);
        }
}

TEST(Dense, InitWithinFanInBound) {
    Rng rng(3);
    const auto layer = Dense::init(16, 8, rng);
    const double bound = 1.0 / std::sqrt(16.0);
    for (double w : layer.weight.flat()) EXPECT_LE(std::abs(w), bound);
    for (double b : layer.bias) EXPECT_LE(std::abs(b), bound);
    Rng again(3);
    EXPECT_EQ(Dense::init(16, 8, again).weight, layer.weight);
}

TEST(Dense, BackwardMatchesCentralDifferences) {
    Rng rng(4);
    auto layer = Dense::init(6, 4, rng);
    auto x = test::random_matrix(3, 6, 5);
    const auto dy = test::random_matrix(3, 4, 6);
    // scalar objective f = sum(dy .* forward(x))
    auto f = [&] {
        const auto y = layer.forward(x);
        double s = 0;
        for (std::size_t i = 0; i < y.size(); ++i) s += y.flat()[i] * dy.flat()[i];
        return s;
    };
    const auto g = dense_backward(layer, x, dy);
    const double h = 1e-6;
    for (std::size_t i = 0; i < layer.weight.size(); ++i) {
        double& w = layer.weight.flat()[i];
        const double keep = w;
        w = keep + h;
        const double up = f();
        w = keep - h;
        const double down = f();
        w = keep;
        EXPECT_NEAR(g.dweight.flat()[i], (up - down) / (2 * h), 1e-7);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        double& v = x.flat()[i];
        const double keep = v;
        v = keep + h;
        const double up = f();
        v = keep - h;
        const double down = f();
        v = keep;
        EXPECT_NEAR(g.dx.flat()[i], (up - down) / (2 * h), 1e-7);
    }
    for (std::size_t o = 0; o < 4; ++o) {
        double s = 0;
        for (std::size_t b = 0; b < 3; ++b) s += dy(b, o);
        EXPECT_NEAR(g.dbias[o], s, 1e-14);
    }
}

TEST(Relu, ForwardBackward) {
    const Matrix x{{-1, 0, 2}};
    EXPECT_EQ(relu(x), (Matrix{{0, 0, 2}}));
    EXPECT_EQ(relu_backward(x, Matrix{{5, 5, 5}}), (Matrix{{0, 0, 5}}));
}

TEST(Dropout, InferenceIsIdentity) {
    Rng rng(1);
    const auto x = test::random_matrix(10, 10, 1);
    EXPECT_EQ(dropout(x, 0.5, rng, false).y, x);
}

TEST(Dropout, TrainingMaskIsInvertedAndUnbiased) {
    Rng rng(8);
    const auto m = dropout_mask(200, 200, 0.5, rng);
    double sum = 0;
    for (double v : m.flat()) {
        EXPECT_TRUE(v == 0.0 || v == 2.0);
        sum += v;
    }
    EXPECT_NEAR(sum / static_cast<double>(m.size()), 1.0, 0.02);
    EXPECT_THROW(dropout_mask(2, 2, 1.0, rng), ConfigError);
}

TEST(Loss, HuberPiecewise) {
    const auto k = LossKind::huber(1.0);
    EXPECT_DOUBLE_EQ(loss_point(k, 0.5), 0.125);
    EXPECT_DOUBLE_EQ(loss_point(k, -3.0), 2.5);
    EXPECT_DOUBLE_EQ(loss_point_grad(k, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(loss_point_grad(k, -3.0), -1.0);
    // continuity at the knee
    EXPECT_NEAR(loss_point(k, 1.0 - 1e-12), loss_point(k, 1.0 + 1e-12), 1e-11);
}

TEST(Loss, MeanReductionAndGradient) {
    const Matrix p{{1, 2}, {3, 4}}, t{{0, 2}, {3, 0}};
    const auto mse = loss(LossKind::mse(), p, t);
    EXPECT_DOUBLE_EQ(mse.value, (1.0 + 16.0) / 4);
    EXPECT_DOUBLE_EQ(mse.grad(1, 1), 2.0 * 4 / 4);
    const auto l1 = loss(LossKind::l1(), p, t);
    EXPECT_DOUBLE_EQ(l1.value, 5.0 / 4);
    const auto hub = loss(LossKind::huber(), p, t);
    EXPECT_DOUBLE_EQ(hub.value, (0.5 + 3.5) / 4);
}

TEST(Loss, Names) {
    EXPECT_EQ(LossKind::from_string("huber", 2.0).delta, 2.0);
    EXPECT_EQ(LossKind::from_string("mse").type, LossType::mse);
    EXPECT_THROW(LossKind::from_string("hinge"), ConfigError);
    EXPECT_THROW(LossKind::huber(0.0).validate(), ConfigError);
}

TEST(Adam, FirstStepMovesByLearningRate) {
    std::vector<double> p = {1.0, -2.0, 0.5};
    const std::vector<double> g = {0.3, -4.0, 1e-3};
    AdamState st(AdamConfig{}, {3});
    adam_step({std::span<double>(p)}, {std::span<const double>(g)}, st);
    EXPECT_NEAR(p[0], 1.0 - 1e-3 * 0.3 / (0.3 + 1e-8), 1e-15);
    EXPECT_NEAR(p[1], -2.0 + 1e-3 * 4.0 / (4.0 + 1e-8), 1e-15);
    EXPECT_NEAR(p[2], 0.5 - 1e-3 * 1e-3 / (1e-3 + 1e-8), 1e-15);
}

TEST(Adam, SecondStepMatchesRecurrence) {
    std::vector<double> p = {0.0};
    AdamState st(AdamConfig{}, {1});
    const double g1 = 1.0, g2 = -0.5;
    adam_step({std::span<double>(p)}, {std::span<const double>(&g1, 1)}, st);
    adam_step({std::span<double>(p)}, {std::span<const double>(&g2, 1)}, st);
    double m = 0.1 * g1, v = 0.001 * g1 * g1;
    const double p1 = 0.0 - 1e-3 * (m / 0.1) / (std::sqrt(v / 0.001) + 1e-8);
    m = 0.9 * m + 0.1 * g2;
    v = 0.999 * v + 0.001 * g2 * g2;
    const double p2 = p1 - 1e-3 * (m / (1 - 0.81)) / (std::sqrt(v / (1 - 0.999 * 0.999)) + 1e-8);
    EXPECT_NEAR(p[0], p2, 1e-15);
}

TEST(GradCheck, AcceptsExactGradientRejectsWrongOne) {
    std::vector<double> w = {0.3, -1.2};
    const ParamRefs refs = {std::span<double>(w)};
    auto good = [&] {
        return LossWithGrad{w[0] * w[0] + std::sin(w[1]), {{2 * w[0], std::cos(w[1])}}};
    };
    auto bad = [&] { return LossWithGrad{w[0] * w[0], {{w[0], 0.0}}}; };
    EXPECT_LT(grad_check(good, refs, 1e-5), 1e-8);
    EXPECT_GT(grad_check(bad, refs, 1e-5), 0.1);
    EXPECT_THROW(grad_check(good, refs, 0.0), std::invalid_argument);
    EXPECT_EQ(w[0], 0.3);
}

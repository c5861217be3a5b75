#include <gtest/gtest.h>

#include "uec/error.hpp"
#include "uec/run_config.hpp"

using namespace uec;
using nlohmann::json;

TEST(RunConfig, DefaultsFromEmptyDocument) {
    const auto c = run_config_from_json(json::object());
    EXPECT_EQ(c.history, 96u);
    EXPECT_EQ(c.output_width, 96u);
    EXPECT_EQ(c.train.steps, 100u);
    EXPECT_EQ(c.train.batch, 64u);
    EXPECT_EQ(c.train.lr, 1e-3);
    EXPECT_EQ(c.decomp.kernel_size, 25);
    EXPECT_EQ(c.beta_grid.values, (std::vector<double>{0, 0.1, 0.3, 0.5, 0.7, 1.0}));
    EXPECT_EQ(c.split.mode, data::SplitMode::staggered);
    EXPECT_EQ(c.eval_selection_horizon(), 384u);
}

TEST(RunConfig, ReadsSections) {
    const auto c = run_config_from_json(json::parse(R"({
        "window": {"history": 48, "output_width": 24},
        "horizons": [48, 96],
        "backbone": {"kind": "toy", "toy": "damped", "rho": 0.8},
        "corrector": {"kernel_size": 13, "pad_mode": "zero", "output_mode": "trend_only"},
        "train": {"loss": "mse", "steps": 7},
        "split": {"mode": "standard"}
    })"));
    EXPECT_EQ(c.history, 48u);
    EXPECT_EQ(c.toy.kind, backbone::ToyKind::damped);
    EXPECT_EQ(c.toy.rho, 0.8);
    EXPECT_EQ(c.decomp.pad_mode, decomp::PadMode::zero);
    EXPECT_EQ(c.ablation.output_mode, corrector::OutputMode::trend_only);
    EXPECT_EQ(c.train.loss.type, nn::LossType::mse);
    EXPECT_EQ(c.split.ratios.size(), 3u);
}

TEST(RunConfig, RejectsBadInput) {
    EXPECT_THROW(run_config_from_json(json::parse(R"({"windw": {}})")), ConfigError);
    EXPECT_THROW(run_config_from_json(json::parse(R"({"window": {"histroy": 3}})")), ConfigError);
    EXPECT_THROW(run_config_from_json(json::parse(R"({"window": {"history": "x"}})")), ConfigError);
    EXPECT_THROW(run_config_from_json(json::parse(R"({"corrector": {"kernel_size": 24}})")), EvenKernel);
    EXPECT_THROW(run_config_from_json(json::parse(R"({"data": {"source": "csv"}})")), ConfigError);
    EXPECT_THROW(run_config_from_json(json::parse(R"({"calibration": {"beta_grid": [0.2, 1.0]}})")), ConfigError);
}

TEST(RunConfig, HashIsStableAndSensitive) {
    const auto a = run_config_from_json(json::object());
    const auto again = run_config_from_json(to_json(a));
    EXPECT_EQ(config_hash(a), config_hash(again));
    EXPECT_EQ(config_hash(a).size(), 16u);
    auto b = a;
    b.train.lr = 2e-3;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

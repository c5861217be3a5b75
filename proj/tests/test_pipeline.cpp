#include <gtest/gtest.h>

#include "test_util.hpp"
#include "uec/error.hpp"
#include "uec/pipeline.hpp"
#include "uec/synthetic.hpp"

using namespace uec;
using namespace uec::pipeline;

namespace {

data::SeriesFrame synthetic_frame(std::size_t length, std::size_t channels, std::uint64_t seed) {
    data::SyntheticSpec s;
    s.length = length;
    s.channels = channels;
    s.seed = seed;
    auto f = data::make_synthetic(s);
    f.origin = data::Origin::normalized;
    return f;
}

corrector::ModelShape shape(std::size_t w, std::size_t l, std::size_t d) {
    corrector::ModelShape s;
    s.history = w;
    s.horizon = l;
    s.channels = d;
    s.hidden = 8;
    s.decomp.kernel_size = 5;
    return s;
}

} // namespace

TEST(Samples, CountsForValidationSegment) {
    // 400 rows, W = L = 96, T' = 192: 113 windows of two chunks each.
    const auto val = synthetic_frame(400, 2, 1);
    backbone::PersistenceForecaster f(96, 96);
    const auto set = build_samples(f, val, {});
    EXPECT_EQ(set.size(), 226u);
    EXPECT_EQ(set.train.size(), 158u);
    EXPECT_EQ(set.holdout.size(), 68u);
    // chronological: every holdout sample comes from a window at or after the last training window
    EXPECT_GE(set.holdout.front().window_start, set.train.back().window_start);
}

TEST(Samples, MatchWhatTheForecasterSaw) {
    const auto val = synthetic_frame(60, 1, 2);
    backbone::PersistenceForecaster inner(8, 4);
    backbone::RecordingForecaster rec(inner);
    SampleOptions o;
    o.series_id = "v";
    o.absolute_offset = 1000;
    const auto set = build_samples(rec, val, o, Exec::serial);
    const auto records = rec.records();
    for (const auto* part : {&set.train, &set.holdout}) {
        for (const auto& s : *part) {
            const auto origin = 1000 + static_cast<std::ptrdiff_t>(s.window_start);
            const auto t = origin + static_cast<std::ptrdiff_t>(4 * s.chunk_index);
            const auto it = records.find({"v", origin, t});
            ASSERT_NE(it, records.end());
            EXPECT_EQ(it->second, s.forecast);
            const auto truth = val.values.slice_rows(s.window_start + 1 + 4 * s.chunk_index, 4);
            EXPECT_EQ(s.target_error, truth - s.forecast);
            EXPECT_EQ(s.input_history.rows(), 8u);
        }
    }
}

TEST(Samples, RejectsTinySegments) {
    backbone::PersistenceForecaster f(8, 4);
    EXPECT_THROW(build_samples(f, synthetic_frame(15, 1, 1), {}), TooShort);
    SampleOptions o;
    o.train_horizon = 2;
    EXPECT_THROW(build_samples(f, synthetic_frame(100, 1, 1), o), ConfigError);
}

TEST(Training, HoldoutNeverWorseThanStartAndDeterministic) {
    const auto val = synthetic_frame(200, 2, 3);
    backbone::PersistenceForecaster f(16, 8);
    const auto set = build_samples(f, val, {});
    TrainConfig cfg;
    cfg.steps = 40;
    cfg.batch = 16;
    cfg.eval_every = 5;
    cfg.seed = 9;
    nn::Rng r1(1), r2(1);
    const auto a = train_uec(corrector::UecStdModel(shape(16, 8, 2), r1), set, cfg);
    const auto b = train_uec(corrector::UecStdModel(shape(16, 8, 2), r2), set, cfg);
    ASSERT_FALSE(a.holdout.empty());
    EXPECT_EQ(a.holdout.front().step, 0u);
    EXPECT_LE(a.best_holdout, a.holdout.front().loss);
    EXPECT_TRUE(a.model == b.model);
    EXPECT_EQ(a.train_loss, b.train_loss);
    for (double v : a.train_loss) EXPECT_TRUE(std::isfinite(v));
}

TEST(Training, SerialAndParallelAgreeBitwise) {
    set_thread_cap(4);
    const auto val = synthetic_frame(150, 3, 4);
    backbone::PersistenceForecaster f(12, 6);
    const auto set = build_samples(f, val, {});
    TrainConfig cfg;
    cfg.steps = 12;
    cfg.batch = 10;
    cfg.eval_every = 4;
    nn::Rng r1(5), r2(5);
    const auto s = train_uec(corrector::UecStdModel(shape(12, 6, 3), r1), set, cfg, Exec::serial);
    const auto p = train_uec(corrector::UecStdModel(shape(12, 6, 3), r2), set, cfg, Exec::parallel);
    EXPECT_TRUE(s.model == p.model);
    EXPECT_EQ(s.train_loss, p.train_loss);
}

TEST(Training, NonFiniteLossIsReported) {
    const auto val = synthetic_frame(100, 1, 5);
    backbone::PersistenceForecaster f(8, 4);
    auto set = build_samples(f, val, {});
    for (auto& s : set.train) s.target_error(0, 0) = std::numeric_limits<double>::quiet_NaN();
    TrainConfig cfg;
    cfg.steps = 3;
    nn::Rng rng(1);
    EXPECT_THROW(train_uec(corrector::UecStdModel(shape(8, 4, 1), rng), set, cfg), NumericError);
    EXPECT_THROW(train_uec(corrector::UecStdModel(shape(8, 4, 1), rng), SampleSet{}, cfg), EmptySampleSet);
}

TEST(CorrectedRollout, CorrectionsDoNotFeedBack) {
    nn::Rng rng(3);
    const corrector::UecStdModel m(shape(16, 8, 2), rng);
    backbone::DampedForecaster f(16, 8, 0.95);
    const auto hist = test::random_matrix(16, 2, 8);
    const auto trace = correction_trace(f, m, hist, 30);
    EXPECT_EQ(trace.uncorrected, backbone::ar_rollout(f, hist, 30));
    EXPECT_EQ(trace.corrected(0.0), trace.uncorrected);
    // each chunk's correction is what the corrector returns for that chunk's own input
    const auto chunks = backbone::ar_rollout_traced(f, hist, 30).chunks;
    const auto c0 = m.correct(chunks[0].input, chunks[0].forecast).total();
    EXPECT_EQ(trace.correction.slice_rows(0, 8), c0);
    EXPECT_THROW(corrected_rollout(f, m, hist, 30, 1.5), ConfigError);
}

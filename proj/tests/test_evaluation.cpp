#include <gtest/gtest.h>

#include "test_util.hpp"
#include "uec/error.hpp"
#include "uec/evaluation.hpp"
#include "uec/synthetic.hpp"

using namespace uec;
using namespace uec::eval;

TEST(Metrics, HandComputed) {
    const Matrix p{{1, 2}, {3, 4}}, t{{2, 2}, {1, 8}};
    EXPECT_DOUBLE_EQ(mse(p, t), (1.0 + 0 + 4 + 16) / 4);
    EXPECT_DOUBLE_EQ(mae(p, t), (1.0 + 0 + 2 + 4) / 4);
    EXPECT_DOUBLE_EQ(mape(p, t), 100.0 * (0.5 + 0 + 2 + 0.5) / 4);
}

TEST(Metrics, StackedWindowsAreCellMeans) {
    std::vector<Matrix> p, t;
    double sq = 0;
    std::size_t n = 0;
    for (std::uint64_t i = 0; i < 7; ++i) {
        p.push_back(test::random_matrix(5, 3, i));
        t.push_back(test::random_matrix(5, 3, 100 + i));
        for (std::size_t k = 0; k < p.back().size(); ++k) {
            const double e = p.back().flat()[k] - t.back().flat()[k];
            sq += e * e;
            ++n;
        }
    }
    EXPECT_NEAR(mse(p, t), sq / static_cast<double>(n), 1e-13);
}

TEST(Metrics, MapeExcludesNearZeroTruth) {
    const Matrix p{{1, 5}, {2, 2}}, t{{0, 4}, {1e-9, 1}};
    const auto s = block_sums(p, t);
    EXPECT_EQ(s.mape_excluded, 2u);
    EXPECT_EQ(s.mape_cells, 2u);
    EXPECT_DOUBLE_EQ(s.mape(), 100.0 * (0.25 + 1.0) / 2);
    EXPECT_THROW(block_sums(p, Matrix(2, 2)).mape(), AllCellsExcluded);
}

TEST(Metrics, ShapeMismatchRejected) {
    EXPECT_THROW(mse(Matrix(2, 2), Matrix(2, 3)), ShapeMismatch);
    std::vector<Matrix> one(1, Matrix(2, 2)), two(2, Matrix(2, 2));
    EXPECT_THROW(mse(one, two), ShapeMismatch);
}

TEST(Metrics, PairwiseCombineMatchesSequential) {
    std::vector<MetricSums> parts(13);
    MetricSums seq;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        parts[i] = block_sums(test::random_matrix(4, 2, i), test::random_matrix(4, 2, 50 + i));
        seq += parts[i];
    }
    const auto pw = pairwise_combine(parts);
    EXPECT_EQ(pw.cells, seq.cells);
    EXPECT_NEAR(pw.squared, seq.squared, 1e-12);
}

TEST(ErrorReduction, Formula) {
    EXPECT_NEAR(error_reduction(0.424, 0.435), -2.5287356, 1e-6);
    EXPECT_DOUBLE_EQ(error_reduction(2.0, 1.0), 100.0);
    EXPECT_THROW(error_reduction(1.0, 0.0), ZeroBaseline);
}

TEST(SegmentWindows, TargetsStayInsideSegment) {
    data::SeriesFrame f{test::random_matrix(100, 1, 1), {"x"}, data::Origin::normalized};
    const auto w = segment_windows(f, 60, 100, 20, 10, 1);
    ASSERT_FALSE(w.empty());
    EXPECT_EQ(w.front().origin, 59);
    EXPECT_EQ(w.back().origin + 10, 99);
    EXPECT_EQ(w.size(), 31u);
    EXPECT_EQ(w.front().history, f.values.slice_rows(40, 20));
    EXPECT_THROW(segment_windows(f, 95, 100, 20, 10, 1), TooShort);
}

TEST(Diagnostic, ZeroAtOneChunkAndConsistent) {
    const auto rw = data::make_random_walk(1200, 2, 3);
    backbone::DampedForecaster f(48, 48, 0.9);
    const auto pts = accumulation_diagnostic(f, rw, 600, 1200, {48, 96, 144}, 4);
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_EQ(pts[0].increase_pct, 0.0);
    EXPECT_EQ(pts[0].ar_mse, pts[0].tf_mse);
    for (const auto& p : pts) {
        if (p.ar_mse != p.tf_mse)
            EXPECT_NEAR(p.increase_pct, 100.0 * (p.ar_mse - p.tf_mse) / p.tf_mse, 1e-9);
    }
    EXPECT_GT(pts[2].increase_pct, 0.0);
}

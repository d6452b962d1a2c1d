#include <gtest/gtest.h>

#include <numeric>

#include "panokit/denoise.hpp"
#include "panokit/pano_metrics.hpp"
#include "support/fixtures.hpp"

using namespace panokit;

TEST(VideoFrames, ClampsOnIngest) {
    const VideoFrames v(Tensor({1, 1, 1, 3}, std::vector<double>{-0.5, 0.3, 1.7}));
    auto vals = v.tensor().values();
    EXPECT_EQ(std::vector<double>(vals.begin(), vals.end()), (std::vector<double>{0.0, 0.3, 1.0}));
}

TEST(EndContinuity, ConstantVideoIsZero) {
    const auto r = end_continuity(VideoFrames(Tensor({3, 4, 8, 16}, 0.4)));
    EXPECT_EQ(r.mean, 0.0);
    for (double v : r.per_frame) EXPECT_EQ(v, 0.0);
    for (double v : r.row_profile) EXPECT_EQ(v, 0.0);
}

TEST(EndContinuity, OppositeBoundaryColumnsScoreOne) {
    Tensor t({3, 2, 8, 16}, 0.5);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t f = 0; f < 2; ++f)
            for (std::size_t y = 0; y < 8; ++y) {
                t(c, f, y, 0) = 0.0;
                t(c, f, y, 15) = 1.0;
            }
    const auto r = end_continuity(VideoFrames(t));
    EXPECT_EQ(r.mean, 1.0);
    EXPECT_EQ(r.per_frame, (std::vector<double>{1.0, 1.0}));
}

TEST(EndContinuity, AveragesJointlyOverAxes) {
    const auto t = fixtures::random_tensor({2, 3, 4, 8}, 1, 0.0, 1.0);
    double sum = 0.0;
    for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t f = 0; f < 3; ++f)
            for (std::size_t y = 0; y < 4; ++y) sum += std::abs(t(c, f, y, 0) - t(c, f, y, 7));
    EXPECT_NEAR(end_continuity(VideoFrames(t)).mean, sum / 24.0, 1e-15);
}

TEST(EndContinuity, InvariantUnderVerticalFlip) {
    const auto t = fixtures::random_tensor({1, 2, 6, 12}, 2, 0.0, 1.0);
    Tensor flipped(t.shape());
    for (std::size_t f = 0; f < 2; ++f)
        for (std::size_t y = 0; y < 6; ++y)
            for (std::size_t x = 0; x < 12; ++x) flipped(0, f, y, x) = t(0, f, 5 - y, x);
    EXPECT_NEAR(end_continuity(VideoFrames(t)).mean, end_continuity(VideoFrames(flipped)).mean, 1e-15);
}

TEST(EndContinuity, SeamlessVideoStaysSeamlessUnderHalfRoll) {
    // Horizontally smooth periodic content: score stays small after a 180 degree roll.
    const Tensor t = fixtures::erp_from_direction(32, fixtures::smooth_field);
    const double before = end_continuity(VideoFrames(t)).mean;
    const double after = end_continuity(VideoFrames(circular_shift(t, 32))).mean;
    EXPECT_LT(before, 0.02);
    EXPECT_LT(after, 0.02);
}

TEST(EndContinuity, RejectsNarrowVideo) {
    EXPECT_THROW((void)end_continuity(VideoFrames(Tensor({1, 1, 2, 1}))), InvalidArgument);
}

TEST(SeamProfile, ImpulseAndConsistency) {
    Tensor t({2, 1, 5, 10}, 0.5);
    EXPECT_EQ(seam_profile(t, 0), std::vector<double>(5, 0.0));
    t(0, 0, 3, 0) = 0.9;
    t(1, 0, 3, 0) = 0.9;
    const auto p = seam_profile(t, 0);
    for (std::size_t y = 0; y < 5; ++y) EXPECT_NEAR(p[y], y == 3 ? 0.4 : 0.0, 1e-15);
    const auto r = fixtures::random_tensor({3, 1, 7, 14}, 3, 0.0, 1.0);
    const auto prof = seam_profile(r, 0);
    EXPECT_NEAR(std::accumulate(prof.begin(), prof.end(), 0.0) / 7.0, end_continuity(VideoFrames(r)).mean, 1e-15);
}

TEST(SeamExcess, ZeroAgainstItselfPositiveOtherwise) {
    const auto a = fixtures::random_tensor({1, 2, 4, 8}, 4, 0.0, 1.0);
    const auto b = fixtures::random_tensor({1, 2, 4, 8}, 5, 0.0, 1.0);
    EXPECT_EQ(seam_excess(VideoFrames(a), VideoFrames(a)), 0.0);
    EXPECT_GT(seam_excess(VideoFrames(a), VideoFrames(b)), 0.0);
}

TEST(FaceWeights, DefaultsAndValidation) {
    const FaceWeightTable w;
    EXPECT_NO_THROW(w.validate());
    EXPECT_DOUBLE_EQ(w[CubeFace::top], 1.0 / 3);
    EXPECT_DOUBLE_EQ(w[CubeFace::bottom], 1.0 / 3);
    for (CubeFace f : {CubeFace::front, CubeFace::right, CubeFace::back, CubeFace::left})
        EXPECT_DOUBLE_EQ(w[f], 1.0 / 12);
    FaceWeightTable bad;
    bad.weights[0] = 0.5;
    EXPECT_THROW(bad.validate(), InvalidArgument);
    FaceWeightTable negative{{-0.1, 0.1, 0.25, 0.25, 0.25, 0.25}};
    EXPECT_THROW(negative.validate(), InvalidArgument);
}

TEST(CubemapScore, ConstantMetricReturnsConstant) {
    const VideoFrames v(fixtures::random_tensor({1, 2, 16, 32}, 6, 0.0, 1.0));
    const auto s = cubemap_weighted_score(v, [](const Tensor&) { return 0.625; }, FaceWeightTable{}, 8);
    EXPECT_EQ(s.score, 0.625);
}

TEST(CubemapScore, MeanOfConstantVideo) {
    const VideoFrames v(Tensor({3, 2, 16, 32}, 0.3));
    const auto s = cubemap_weighted_score(v, face_mean, FaceWeightTable{}, 8);
    EXPECT_NEAR(s.score, 0.3, 1e-12);
    for (double p : s.per_face) EXPECT_NEAR(p, 0.3, 1e-12);
}

TEST(CubemapScore, FaceFailureCarriesIdentity) {
    const VideoFrames v(Tensor({1, 1, 16, 32}, 0.3));
    int calls = 0;
    const FaceMetric flaky = [&](const Tensor&) -> double {
        if (++calls == 3) throw std::runtime_error("boom");
        return 0.0;
    };
    try {
        (void)cubemap_weighted_score(v, flaky, FaceWeightTable{}, 4);
        FAIL() << "expected FaceMetricError";
    } catch (const FaceMetricError& e) {
        EXPECT_EQ(e.face(), CubeFace::back);
        EXPECT_NE(std::string(e.what()).find("back"), std::string::npos);
    }
}

TEST(CubemapScore, DoesNotMutateInput) {
    const Tensor t = fixtures::random_tensor({1, 1, 16, 32}, 7, 0.0, 1.0);
    const VideoFrames v(t);
    (void)cubemap_weighted_score(v, face_total_variation, FaceWeightTable{}, 8);
    EXPECT_EQ(v.tensor(), t);
}

TEST(FaceMetrics, TotalVariation) {
    EXPECT_EQ(face_total_variation(Tensor({1, 1, 4, 4}, 0.2)), 0.0);
    Tensor stripes({1, 1, 2, 2}, std::vector<double>{0, 1, 0, 1});
    // two horizontal pairs differ by 1, two vertical pairs by 0
    EXPECT_DOUBLE_EQ(face_total_variation(stripes), 0.5);
    EXPECT_EQ(builtin_face_metrics().size(), 2u);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "panokit/curator/optical_flow.hpp"
#include "panokit/curator/pipeline.hpp"
#include "panokit/curator/segmentation.hpp"
#include "panokit/denoise.hpp"
#include "panokit/noise_field.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace panokit;
using namespace panokit::curator;

namespace {

ClipRecord passing(const std::string& id, const std::string& caption = "a quiet lake at dawn") {
    ClipRecord r;
    r.clip_id = id;
    r.source_video = "v";
    r.caption = caption;
    r.poi_categories = {"lake"};
    r.is_panorama = true;
    r.view_count = 5000;
    r.motion_score = 0.8;
    r.aesthetic_score = 4.0;
    return r;
}

/// Smooth random texture, periodic horizontally.
Tensor texture(std::size_t h, std::size_t w, std::uint64_t seed) {
    const Tensor noise = gaussian_tensor({1, 1, h, w}, seed);
    Tensor out({1, 1, h, w});
    for (std::size_t y = 0; y < h; ++y)
        for (std::size_t x = 0; x < w; ++x) {
            double s = 0.0;
            for (int dy = -2; dy <= 2; ++dy)
                for (int dx = -2; dx <= 2; ++dx) {
                    const std::size_t yy = std::clamp<long>(long(y) + dy, 0, long(h) - 1);
                    s += noise(0, 0, yy, (x + w + dx) % w);
                }
            out(0, 0, y, x) = 0.5 + 0.1 * s / 5.0;
        }
    return out;
}

Tensor stack_frames(const std::vector<Tensor>& frames) {
    Tensor out({frames[0].channels(), frames.size(), frames[0].height(), frames[0].width()});
    for (std::size_t f = 0; f < frames.size(); ++f)
        for (std::size_t c = 0; c < out.channels(); ++c)
            for (std::size_t y = 0; y < out.height(); ++y) {
                auto src = frames[f].row(c, 0, y);
                std::ranges::copy(src, out.row(c, f, y).begin());
            }
    return out;
}

double median(std::vector<double> v) {
    std::ranges::sort(v);
    return v[v.size() / 2];
}

}  // namespace

// ---------------------------------------------------------------------------
// Segmentation
// ---------------------------------------------------------------------------

TEST(SceneCuts, ConstantVideoHasNone) {
    EXPECT_TRUE(detect_scene_cuts(VideoFrames(Tensor({3, 30, 8, 16}, 0.4))).empty());
}

TEST(SceneCuts, HardConcatenationHasOneCutAtJunction) {
    std::vector<Tensor> frames;
    for (int f = 0; f < 25; ++f) frames.push_back(Tensor({3, 1, 8, 16}, f < 12 ? 0.2 : 0.7));
    EXPECT_EQ(detect_scene_cuts(VideoFrames(stack_frames(frames))), (std::vector<std::size_t>{12}));
}

TEST(SceneCuts, TexturedConcatenation) {
    std::vector<Tensor> frames;
    const Tensor a = texture(16, 32, 1);
    Tensor b = texture(16, 32, 2);
    for (double& v : b.values()) v = 1.0 - v * 0.8;
    for (int f = 0; f < 40; ++f) frames.push_back(circular_shift(f < 20 ? a : b, f));
    EXPECT_EQ(detect_scene_cuts(VideoFrames(stack_frames(frames))), (std::vector<std::size_t>{20}));
}

TEST(SceneCuts, SlowFadeCalibrationSweep) {
    // Linear fades between two levels over a range of durations; recorded
    // per-step distances stay below the default floor.
    for (std::size_t duration : {20u, 30u, 60u, 120u, 240u}) {
        std::vector<Tensor> frames;
        const Tensor tex = texture(16, 32, 3);
        for (std::size_t f = 0; f < duration; ++f) {
            Tensor fr = tex;
            const double level = 0.6 * double(f) / double(duration - 1);
            for (double& v : fr.values()) v = std::clamp(v - 0.3 + level, 0.0, 1.0);
            frames.push_back(fr);
        }
        const VideoFrames video(stack_frames(frames));
        EXPECT_TRUE(detect_scene_cuts(video).empty()) << "duration " << duration;
        const double step = histogram_distance(luma_histogram(video.tensor(), 0), luma_histogram(video.tensor(), 1));
        RecordProperty("fade_step_distance_" + std::to_string(duration), std::to_string(step));
        EXPECT_LT(step, SceneCutOptions{}.min_distance);
    }
}

TEST(SceneCuts, HistogramDistanceOfGlobalShift) {
    const Tensor a({1, 1, 4, 8}, 0.2), b({1, 1, 4, 8}, 0.5);
    EXPECT_NEAR(histogram_distance(luma_histogram(a, 0), luma_histogram(b, 0)), 0.3, 1.0 / kHistogramBins);
}

TEST(SegmentClips, Examples) {
    const auto none = segment_clips(100, {}, 10);
    ASSERT_EQ(none.size(), 10u);
    for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(none[k], std::make_pair(10 * k, 10 * k + 10));
    const auto cut = segment_clips(100, {15}, 10);
    EXPECT_EQ(cut.front(), std::make_pair(std::size_t{0}, std::size_t{10}));
    EXPECT_EQ(cut[1], std::make_pair(std::size_t{20}, std::size_t{30}));
    EXPECT_EQ(cut.size(), 9u);
    EXPECT_TRUE(segment_clips(5, {}, 10).empty());
    EXPECT_THROW((void)segment_clips(5, {}, 0), InvalidArgument);
}

TEST(SegmentClips, EnumerationOracle) {
    for (std::size_t len = 1; len <= 12; ++len)
        for (std::size_t cut : {3u, 10u, 11u, 24u}) {
            const auto clips = segment_clips(40, {cut}, len);
            std::vector<std::pair<std::size_t, std::size_t>> expect;
            for (std::size_t s = 0; s + len <= 40; s += len)
                if (!(s < cut && cut < s + len)) expect.emplace_back(s, s + len);
            EXPECT_EQ(clips, expect);
            for (const auto& [s, e] : clips) EXPECT_FALSE(s < cut && cut < e);
        }
}

// ---------------------------------------------------------------------------
// Flow and motion
// ---------------------------------------------------------------------------

TEST(DenseFlow, IdenticalFramesGiveZeroField) {
    const Tensor a = texture(32, 64, 4);
    const auto flow = dense_flow(a, a);
    EXPECT_EQ(flow.mean_magnitude(), 0.0);
    EXPECT_EQ(flow.dx.size(), 32u * 64u);
}

TEST(DenseFlow, GlobalShiftRecovered) {
    const Tensor a = texture(32, 64, 5);
    for (int dx : {-12, -5, -1, 1, 3, 8, 12}) {
        const Tensor b = circular_shift(a, dx);
        const auto flow = dense_flow(a, b);
        EXPECT_EQ(median(flow.dx), double(dx)) << dx;
        EXPECT_EQ(median(flow.dy), 0.0) << dx;
    }
}

TEST(DenseFlow, NoisePairIsFiniteAndReported) {
    const Tensor a = gaussian_tensor({1, 1, 32, 64}, 6), b = gaussian_tensor({1, 1, 32, 64}, 7);
    const auto flow = dense_flow(a, b);
    const double m = flow.mean_magnitude();
    RecordProperty("noise_pair_mean_magnitude", std::to_string(m));
    EXPECT_TRUE(std::isfinite(m));
    for (std::size_t i = 0; i < flow.dx.size(); ++i) ASSERT_TRUE(std::isfinite(flow.dx[i]) && std::isfinite(flow.dy[i]));
}

TEST(DenseFlow, ShapeMismatchIsError) {
    EXPECT_THROW((void)dense_flow(Tensor({1, 1, 8, 8}), Tensor({1, 1, 8, 9})), ShapeMismatch);
}

TEST(MotionScore, StaticClipIsZero) {
    const Tensor tex = texture(16, 32, 8);
    EXPECT_EQ(motion_score(VideoFrames(stack_frames({tex, tex, tex, tex}))), 0.0);
}

TEST(MotionScore, NormalisationAndClamp) {
    EXPECT_DOUBLE_EQ(normalized_motion(std::hypot(16.0, 32.0), 16, 32), 1.0);
    EXPECT_DOUBLE_EQ(normalized_motion(1e6, 16, 32), 1.0);
    EXPECT_DOUBLE_EQ(normalized_motion(0.0, 16, 32), 0.0);
}

TEST(MotionScore, ShiftingClipScoresMotion) {
    const Tensor tex = texture(32, 64, 9);
    std::vector<Tensor> frames;
    for (int f = 0; f < 4; ++f) frames.push_back(circular_shift(tex, 4 * f));
    const double s = motion_score(VideoFrames(stack_frames(frames)));
    EXPECT_NEAR(s, 4.0 / std::hypot(32.0, 64.0), 1e-12);
}

// ---------------------------------------------------------------------------
// Dedup and balance
// ---------------------------------------------------------------------------

TEST(Dedup, IdenticalCaptionsOneSurvivor) {
    const std::vector<ClipRecord> rs = {passing("a"), passing("b"), passing("c")};
    std::vector<Rejected> rej;
    const auto kept = dedup_by_caption(rs, 0.9, &rej);
    ASSERT_EQ(kept.size(), 1u);
    EXPECT_EQ(kept[0].clip_id, "a");
    ASSERT_EQ(rej.size(), 2u);
    EXPECT_EQ(rej[0].reason, "duplicate_caption");
}

TEST(Dedup, DisjointVocabularyAllRetained) {
    const std::vector<ClipRecord> rs = {passing("a", "red fox jumps high"), passing("b", "blue whale swims deep"),
                                        passing("c", "old city market stalls")};
    EXPECT_EQ(dedup_by_caption(rs, 0.1).size(), 3u);
}

TEST(Dedup, ThresholdOneRemovesOnlyExactDuplicates) {
    const auto fixture = oracle::synthetic_records(50, 3);
    const auto kept = dedup_by_caption(fixture, 1.0);
    std::vector<std::string> expect;
    std::vector<std::string> seen;
    for (const auto& r : fixture) {
        const bool dup = std::ranges::any_of(seen, [&](const std::string& s) { return oracle::similarity(s, r.caption) == 1.0; });
        if (!dup) {
            expect.push_back(r.clip_id);
            seen.push_back(r.caption);
        }
    }
    std::vector<std::string> got;
    for (const auto& r : kept) got.push_back(r.clip_id);
    EXPECT_EQ(got, expect);
    EXPECT_LT(kept.size(), fixture.size());
}

TEST(Dedup, SimilarityMatchesOracle) {
    const auto fixture = oracle::synthetic_records(50, 4);
    for (std::size_t i = 0; i < fixture.size(); ++i)
        for (std::size_t j = 0; j < fixture.size(); ++j)
            EXPECT_DOUBLE_EQ(caption_similarity(fixture[i].caption, fixture[j].caption),
                             oracle::similarity(fixture[i].caption, fixture[j].caption));
}

TEST(Dedup, ThresholdMonotone) {
    const auto fixture = oracle::synthetic_records(300, 5);
    std::size_t prev = 0;
    for (int k = 0; k <= 20; ++k) {
        const std::size_t n = dedup_by_caption(fixture, k / 20.0).size();
        EXPECT_GE(n, prev) << "threshold " << k / 20.0;
        prev = n;
    }
}

TEST(Balance, CapsLargeCategory) {
    std::vector<ClipRecord> rs;
    for (int i = 0; i < 500; ++i) {
        auto r = passing("big_" + std::to_string(1000 + i));
        r.aesthetic_score = 1.0 + (i * 37 % 401) / 100.0;
        rs.push_back(r);
    }
    for (int i = 0; i < 50; ++i) {
        auto r = passing("small_" + std::to_string(i));
        r.poi_categories = {"castle", "lake"};
        rs.push_back(r);
    }
    std::vector<Rejected> rej;
    const auto kept = balance_categories(rs, 200, &rej);
    std::vector<double> big_scores;
    for (const auto& r : rs)
        if (r.primary_category() == "lake") big_scores.push_back(*r.aesthetic_score);
    std::ranges::sort(big_scores, std::greater<>());
    const double cutoff = big_scores[199];
    std::size_t big = 0, small = 0;
    for (const auto& r : kept) {
        if (r.primary_category() == "lake") {
            ++big;
            EXPECT_GE(*r.aesthetic_score, cutoff);
        } else {
            ++small;
        }
    }
    EXPECT_EQ(big, 200u);
    EXPECT_EQ(small, 50u);
    EXPECT_EQ(rej.size(), 300u);
    for (const auto& r : rej) EXPECT_EQ(r.reason, "category_cap");
}

TEST(Balance, TiesBrokenByClipId) {
    std::vector<ClipRecord> rs = {passing("d"), passing("b"), passing("c"), passing("a")};
    const auto kept = balance_categories(rs, 2);
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0].clip_id, "b");
    EXPECT_EQ(kept[1].clip_id, "a");
}

TEST(Balance, EmptyAndMissingScores) {
    EXPECT_TRUE(balance_categories({}, 200).empty());
    auto r = passing("x");
    r.aesthetic_score.reset();
    EXPECT_THROW((void)balance_categories({r}, 200), InvalidArgument);
}

TEST(Balance, NeverExceedsCapNorDropsUnderCap) {
    const auto fixture = oracle::synthetic_records(600, 6);
    std::vector<ClipRecord> scored;
    for (const auto& r : fixture)
        if (r.aesthetic_score) scored.push_back(r);
    for (std::size_t cap : {1u, 10u, 50u, 1000u}) {
        std::map<std::string, std::size_t> in, out;
        for (const auto& r : scored) ++in[r.primary_category()];
        for (const auto& r : balance_categories(scored, cap)) ++out[r.primary_category()];
        for (const auto& [cat, n] : in) EXPECT_EQ(out[cat], std::min(n, cap)) << cat << " cap " << cap;
    }
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

TEST(Pipeline, ViewsBelowThresholdDroppedAtStageOne) {
    auto r = passing("low");
    r.view_count = 999;
    const auto res = filter_pipeline({r, passing("ok", "a completely different caption here")});
    ASSERT_EQ(res.rejected.size(), 1u);
    EXPECT_EQ(res.rejected[0].stage, "views");
    EXPECT_EQ(res.rejected[0].reason, "views_below_min");
    ASSERT_EQ(res.kept.size(), 1u);
    EXPECT_EQ(res.kept[0].clip_id, "ok");
}

TEST(Pipeline, BoundaryValues) {
    auto exact_views = passing("v", "one two three four");
    exact_views.view_count = 1000;
    auto motion_edge = passing("m", "five six seven eight");
    motion_edge.motion_score = 0.4;
    auto aesthetic_edge = passing("a", "nine ten eleven twelve");
    aesthetic_edge.aesthetic_score = 3.0;
    const auto res = filter_pipeline({exact_views, motion_edge, aesthetic_edge});
    std::set<std::string> kept;
    for (const auto& r : res.kept) kept.insert(r.clip_id);
    EXPECT_EQ(kept, (std::set<std::string>{"v", "a"}));
    ASSERT_EQ(res.rejected.size(), 1u);
    EXPECT_EQ(res.rejected[0].reason, "motion_below_threshold");
}

TEST(Pipeline, MissingScoresAreRoutedNotDropped) {
    auto no_motion = passing("m", "alpha beta gamma");
    no_motion.motion_score.reset();
    auto no_aesthetic = passing("a", "delta epsilon zeta");
    no_aesthetic.aesthetic_score.reset();
    auto res = filter_pipeline({no_motion, no_aesthetic});
    ASSERT_EQ(res.rejected.size(), 2u);
    EXPECT_EQ(res.rejected[0].reason, "missing_motion_score");
    EXPECT_EQ(res.rejected[1].reason, "missing_aesthetic_score");

    FilterConfig cfg;
    cfg.aesthetic_stage = false;
    res = filter_pipeline({no_aesthetic}, cfg);
    ASSERT_EQ(res.rejected.size(), 1u);
    EXPECT_EQ(res.rejected[0].stage, "balance");
    EXPECT_EQ(res.rejected[0].reason, "missing_aesthetic_score");
}

TEST(Pipeline, MatchesReferenceFilterStageByStage) {
    const auto fixture = oracle::synthetic_records(1000, 7);
    const auto res = filter_pipeline(fixture);
    const auto ref = oracle::reference_filter(fixture, 0.9, 200);
    ASSERT_EQ(res.audit.size(), 6u);
    for (std::size_t s = 0; s < 6; ++s) EXPECT_EQ(res.audit[s].output, ref.after[s]) << res.audit[s].stage;
    std::vector<std::string> ids;
    for (const auto& r : res.kept) ids.push_back(r.clip_id);
    EXPECT_EQ(ids, ref.kept_ids);
}

TEST(Pipeline, ConservesRecordsAndIsIdempotent) {
    for (std::uint32_t seed : {1u, 2u, 3u}) {
        const auto fixture = oracle::synthetic_records(800, seed);
        const auto res = filter_pipeline(fixture);
        EXPECT_EQ(res.kept.size() + res.rejected.size(), fixture.size());
        std::multiset<std::string> ids;
        for (const auto& r : res.kept) ids.insert(r.clip_id);
        for (const auto& r : res.rejected) {
            ids.insert(r.record.clip_id);
            EXPECT_FALSE(r.reason.empty());
        }
        std::set<std::string> expect;
        for (const auto& r : fixture) expect.insert(r.clip_id);
        EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()), expect);
        EXPECT_EQ(ids.size(), expect.size());
        std::size_t dropped = 0;
        for (const auto& a : res.audit) {
            EXPECT_EQ(a.input, a.dropped + a.output);
            dropped += a.dropped;
        }
        EXPECT_EQ(dropped, res.rejected.size());

        const auto again = filter_pipeline(res.kept);
        EXPECT_EQ(again.kept, res.kept);
        EXPECT_TRUE(again.rejected.empty());
    }
}

TEST(Pipeline, ConfigValidation) {
    FilterConfig cfg;
    cfg.min_motion = 1.5;
    EXPECT_THROW((void)filter_pipeline({}, cfg), InvalidArgument);
    cfg = {};
    cfg.category_cap = 0;
    EXPECT_THROW((void)filter_pipeline({}, cfg), InvalidArgument);
    cfg = {};
    cfg.dedup_threshold = -0.1;
    EXPECT_THROW((void)filter_pipeline({}, cfg), InvalidArgument);
}

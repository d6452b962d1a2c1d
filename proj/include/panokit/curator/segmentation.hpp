#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "panokit/error.hpp"
#include "panokit/pano_metrics.hpp"
#include "panokit/tensor.hpp"

namespace panokit::curator {

/// Luma of pixel (f, y, x): Rec.601 weights for 3-channel video, channel mean otherwise.
inline double luma(const Tensor& t, std::size_t f, std::size_t y, std::size_t x) noexcept {
    if (t.channels() == 3)
        return 0.299 * t(0, f, y, x) + 0.587 * t(1, f, y, x) + 0.114 * t(2, f, y, x);
    double s = 0.0;
    for (std::size_t c = 0; c < t.channels(); ++c) s += t(c, f, y, x);
    return s / static_cast<double>(t.channels());
}

/// Single-channel luma plane of frame f, shaped (1, 1, H, W).
inline Tensor luma_plane(const Tensor& t, std::size_t f) {
    Tensor out({1, 1, t.height(), t.width()});
    for (std::size_t y = 0; y < t.height(); ++y)
        for (std::size_t x = 0; x < t.width(); ++x) out(0, 0, y, x) = luma(t, f, y, x);
    return out;
}

inline constexpr std::size_t kHistogramBins = 64;

inline std::array<double, kHistogramBins> luma_histogram(const Tensor& t, std::size_t f) {
    std::array<double, kHistogramBins> h{};
    for (std::size_t y = 0; y < t.height(); ++y)
        for (std::size_t x = 0; x < t.width(); ++x) {
            const double v = std::clamp(luma(t, f, y, x), 0.0, 1.0);
            const auto bin = std::min(kHistogramBins - 1,
                                      static_cast<std::size_t>(v * static_cast<double>(kHistogramBins)));
            h[bin] += 1.0;
        }
    const double n = static_cast<double>(t.height() * t.width());
    for (double& v : h) v /= n;
    return h;
}

/// Earth mover's distance between two normalised 1-D histograms, in units of
/// the full luma range: a global brightness change of d scores ~d.
inline double histogram_distance(const std::array<double, kHistogramBins>& a,
                                 const std::array<double, kHistogramBins>& b) noexcept {
    double cdf = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < kHistogramBins; ++i) {
        cdf += a[i] - b[i];
        sum += std::abs(cdf);
    }
    return sum / static_cast<double>(kHistogramBins);
}

struct SceneCutOptions {
    double sensitivity = 3.0;    // multiple of the rolling median distance
    double min_distance = 0.1;   // absolute floor on the cut threshold
    std::size_t window = 15;     // frames of history in the rolling median
};

/// Frame indices that start a new scene: the histogram distance to the
/// previous frame exceeds max(min_distance, sensitivity * rolling median).
inline std::vector<std::size_t> detect_scene_cuts(const VideoFrames& video,
                                                  const SceneCutOptions& opt = {}) {
    const Tensor& t = video.tensor();
    std::vector<std::size_t> cuts;
    if (t.frames() < 2) return cuts;
    std::vector<double> history;
    auto prev = luma_histogram(t, 0);
    for (std::size_t f = 1; f < t.frames(); ++f) {
        const auto cur = luma_histogram(t, f);
        const double d = histogram_distance(prev, cur);
        double median = 0.0;
        if (!history.empty()) {
            const std::size_t n = std::min(history.size(), opt.window);
            std::vector<double> recent(history.end() - static_cast<std::ptrdiff_t>(n), history.end());
            std::ranges::nth_element(recent, recent.begin() + static_cast<std::ptrdiff_t>(n / 2));
            median = recent[n / 2];
        }
        if (d > std::max(opt.min_distance, opt.sensitivity * median)) cuts.push_back(f);
        history.push_back(d);
        prev = cur;
    }
    return cuts;
}

/// Fixed-length windows [k*len, (k+1)*len) that contain no cut strictly
/// inside them; a trailing remainder shorter than len is dropped.
inline std::vector<std::pair<std::size_t, std::size_t>> segment_clips(
    std::size_t video_length, const std::vector<std::size_t>& cuts, std::size_t clip_len) {
    detail::require(clip_len >= 1, "segment_clips: clip length must be >= 1");
    std::vector<std::pair<std::size_t, std::size_t>> clips;
    for (std::size_t start = 0; start + clip_len <= video_length; start += clip_len) {
        const std::size_t end = start + clip_len;
        const bool straddles =
            std::ranges::any_of(cuts, [&](std::size_t c) { return c > start && c < end; });
        if (!straddles) clips.emplace_back(start, end);
    }
    return clips;
}

}  // namespace panokit::curator

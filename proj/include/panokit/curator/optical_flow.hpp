#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "panokit/curator/segmentation.hpp"
#include "panokit/error.hpp"
#include "panokit/pano_metrics.hpp"
#include "panokit/tensor.hpp"

namespace panokit::curator {

/// Per-pixel displacement (dx, dy) such that a(y, x) ~ b(y + dy, x + dx).
struct FlowField {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> dx;
    std::vector<double> dy;

    [[nodiscard]] double magnitude(std::size_t i) const noexcept { return std::hypot(dx[i], dy[i]); }
    [[nodiscard]] double mean_magnitude() const noexcept {
        double s = 0.0;
        for (std::size_t i = 0; i < dx.size(); ++i) s += magnitude(i);
        return dx.empty() ? 0.0 : s / static_cast<double>(dx.size());
    }
};

struct FlowOptions {
    std::size_t levels = 3;
    std::size_t block = 8;
    int search_radius = 4;  // full search at the coarsest level
    int refine_radius = 2;  // search around the upsampled estimate at finer levels
};

namespace flow_impl {

struct Plane {
    std::size_t h = 0, w = 0;
    std::vector<double> v;
    [[nodiscard]] double at(std::ptrdiff_t y, std::ptrdiff_t x) const noexcept {
        const auto H = static_cast<std::ptrdiff_t>(h), W = static_cast<std::ptrdiff_t>(w);
        y = std::clamp<std::ptrdiff_t>(y, 0, H - 1);
        x = ((x % W) + W) % W;
        return v[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x)];
    }
};

inline Plane downsample(const Plane& p) {
    Plane out{std::max<std::size_t>(1, p.h / 2), std::max<std::size_t>(1, p.w / 2), {}};
    out.v.resize(out.h * out.w);
    for (std::size_t y = 0; y < out.h; ++y)
        for (std::size_t x = 0; x < out.w; ++x) {
            const auto yy = static_cast<std::ptrdiff_t>(2 * y), xx = static_cast<std::ptrdiff_t>(2 * x);
            out.v[y * out.w + x] =
                0.25 * (p.at(yy, xx) + p.at(yy, xx + 1) + p.at(yy + 1, xx) + p.at(yy + 1, xx + 1));
        }
    return out;
}

struct BlockVector {
    int dx = 0, dy = 0;
};

/// Block matching at one pyramid level; `guess` holds per-block predictions.
inline std::vector<BlockVector> match_level(const Plane& a, const Plane& b, std::size_t block,
                                            const std::vector<BlockVector>& guess, int radius) {
    const std::size_t bw = (a.w + block - 1) / block, bh = (a.h + block - 1) / block;
    std::vector<BlockVector> out(bw * bh);
    for (std::size_t by = 0; by < bh; ++by)
        for (std::size_t bx = 0; bx < bw; ++bx) {
            const BlockVector g = guess[by * bw + bx];
            double best = std::numeric_limits<double>::infinity();
            long best_mag = std::numeric_limits<long>::max();
            BlockVector best_v = g;
            for (int sy = -radius; sy <= radius; ++sy)
                for (int sx = -radius; sx <= radius; ++sx) {
                    const int cx = g.dx + sx, cy = g.dy + sy;
                    double sad = 0.0;
                    for (std::size_t y = by * block; y < std::min(a.h, (by + 1) * block); ++y)
                        for (std::size_t x = bx * block; x < std::min(a.w, (bx + 1) * block); ++x)
                            sad += std::abs(a.v[y * a.w + x] -
                                            b.at(static_cast<std::ptrdiff_t>(y) + cy,
                                                 static_cast<std::ptrdiff_t>(x) + cx));
                    const long mag = long{cx} * cx + long{cy} * cy;
                    if (sad < best || (sad == best && mag < best_mag)) {
                        best = sad;
                        best_mag = mag;
                        best_v = {cx, cy};
                    }
                }
            out[by * bw + bx] = best_v;
        }
    return out;
}

}  // namespace flow_impl

/// Coarse-to-fine pyramidal block-matching flow between two single-plane
/// frames shaped (1, 1, H, W). Horizontal displacements wrap around.
inline FlowField dense_flow(const Tensor& frame_a, const Tensor& frame_b, const FlowOptions& opt = {}) {
    require_same_shape(frame_a, frame_b, "dense_flow");
    detail::require(opt.levels >= 1 && opt.block >= 1, "dense_flow: levels and block must be >= 1");
    const std::size_t H = frame_a.height(), W = frame_a.width();

    std::vector<flow_impl::Plane> pa{{H, W, std::vector<double>(frame_a.values().begin(), frame_a.values().end())}};
    std::vector<flow_impl::Plane> pb{{H, W, std::vector<double>(frame_b.values().begin(), frame_b.values().end())}};
    while (pa.size() < opt.levels && pa.back().h >= 2 * opt.block && pa.back().w >= 2 * opt.block) {
        pa.push_back(flow_impl::downsample(pa.back()));
        pb.push_back(flow_impl::downsample(pb.back()));
    }

    std::vector<flow_impl::BlockVector> vectors;
    std::size_t prev_bw = 0;
    for (std::size_t lvl = pa.size(); lvl-- > 0;) {
        const auto& a = pa[lvl];
        const std::size_t bw = (a.w + opt.block - 1) / opt.block, bh = (a.h + opt.block - 1) / opt.block;
        std::vector<flow_impl::BlockVector> guess(bw * bh);
        const bool coarsest = lvl + 1 == pa.size();
        if (!coarsest) {
            const std::size_t prev_bh = vectors.size() / prev_bw;
            for (std::size_t by = 0; by < bh; ++by)
                for (std::size_t bx = 0; bx < bw; ++bx) {
                    const std::size_t px = std::min(prev_bw - 1, bx / 2), py = std::min(prev_bh - 1, by / 2);
                    const auto v = vectors[py * prev_bw + px];
                    guess[by * bw + bx] = {2 * v.dx, 2 * v.dy};
                }
        }
        vectors = flow_impl::match_level(a, pb[lvl], opt.block, guess,
                                      coarsest ? opt.search_radius : opt.refine_radius);
        prev_bw = bw;
    }

    FlowField flow{H, W, std::vector<double>(H * W), std::vector<double>(H * W)};
    for (std::size_t y = 0; y < H; ++y)
        for (std::size_t x = 0; x < W; ++x) {
            const auto v = vectors[(y / opt.block) * prev_bw + x / opt.block];
            flow.dx[y * W + x] = v.dx;
            flow.dy[y * W + x] = v.dy;
        }
    return flow;
}

/// Mean flow magnitude divided by the frame diagonal, clamped to [0, 1].
[[nodiscard]] inline double normalized_motion(double mean_magnitude, std::size_t height,
                                              std::size_t width) noexcept {
    const double diag = std::hypot(static_cast<double>(height), static_cast<double>(width));
    return std::clamp(mean_magnitude / diag, 0.0, 1.0);
}

/// Normalised motion over frame pairs (f, f + stride).
inline double motion_score(const VideoFrames& clip, std::size_t stride = 1, const FlowOptions& opt = {}) {
    const Tensor& t = clip.tensor();
    detail::require(stride >= 1, "motion_score: stride must be >= 1");
    if (t.frames() <= stride) return 0.0;
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t f = 0; f + stride < t.frames(); f += stride) {
        sum += dense_flow(luma_plane(t, f), luma_plane(t, f + stride), opt).mean_magnitude();
        ++pairs;
    }
    return normalized_motion(sum / static_cast<double>(pairs), t.height(), t.width());
}

}  // namespace panokit::curator

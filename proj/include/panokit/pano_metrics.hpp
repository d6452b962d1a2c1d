#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "panokit/error.hpp"
#include "panokit/sphere_geom.hpp"
#include "panokit/tensor.hpp"

namespace panokit {

/// Video frames with values clamped to [0, 1] on construction. Same
/// (C, F, H, W) layout as every other tensor in the library.
class VideoFrames {
public:
    explicit VideoFrames(Tensor frames) : data_(std::move(frames)) {
        for (double& v : data_.values()) v = std::clamp(v, 0.0, 1.0);
    }

    [[nodiscard]] const Tensor& tensor() const noexcept { return data_; }
    [[nodiscard]] std::size_t frames() const noexcept { return data_.frames(); }

private:
    Tensor data_;
};

struct SeamReport {
    std::vector<double> per_frame;    // mean |left - right| per frame
    std::vector<double> row_profile;  // mean over frames and channels, per row
    double mean = 0.0;                // over frames, rows and channels jointly
};

/// |frame[y, 0] - frame[y, W - 1]| per row, averaged over channels.
inline std::vector<double> seam_profile(const Tensor& t, std::size_t frame) {
    detail::require(t.width() >= 2, "seam_profile: width must be >= 2");
    detail::require(frame < t.frames(), "seam_profile: frame out of range");
    std::vector<double> profile(t.height(), 0.0);
    const std::size_t last = t.width() - 1;
    for (std::size_t y = 0; y < t.height(); ++y) {
        double sum = 0.0;
        for (std::size_t c = 0; c < t.channels(); ++c) sum += std::abs(t(c, frame, y, 0) - t(c, frame, y, last));
        profile[y] = sum / static_cast<double>(t.channels());
    }
    return profile;
}

/// Mean absolute difference across the left/right boundary columns. Lower is better.
inline SeamReport end_continuity(const VideoFrames& video) {
    const Tensor& t = video.tensor();
    detail::require(t.width() >= 2, "end_continuity: width must be >= 2");
    SeamReport report;
    report.row_profile.assign(t.height(), 0.0);
    for (std::size_t f = 0; f < t.frames(); ++f) {
        const auto profile = seam_profile(t, f);
        report.per_frame.push_back(std::accumulate(profile.begin(), profile.end(), 0.0) /
                                   static_cast<double>(profile.size()));
        for (std::size_t y = 0; y < profile.size(); ++y) report.row_profile[y] += profile[y];
    }
    for (double& v : report.row_profile) v /= static_cast<double>(t.frames());
    report.mean = std::accumulate(report.per_frame.begin(), report.per_frame.end(), 0.0) /
                  static_cast<double>(report.per_frame.size());
    return report;
}

/// Mean over (channel, frame, row) of | |d_left - d_right| - |o_left - o_right| |:
/// how far a video's boundary differences depart from a reference rendering of
/// the same content (e.g. decoding of the infinitely wrapped latent).
inline double seam_excess(const VideoFrames& video, const VideoFrames& reference) {
    const Tensor& a = video.tensor();
    const Tensor& b = reference.tensor();
    require_same_shape(a, b, "seam_excess");
    detail::require(a.width() >= 2, "seam_excess: width must be >= 2");
    const std::size_t last = a.width() - 1;
    double sum = 0.0;
    for (std::size_t c = 0; c < a.channels(); ++c)
        for (std::size_t f = 0; f < a.frames(); ++f)
            for (std::size_t y = 0; y < a.height(); ++y)
                sum += std::abs(std::abs(a(c, f, y, 0) - a(c, f, y, last)) -
                                std::abs(b(c, f, y, 0) - b(c, f, y, last)));
    return sum / static_cast<double>(a.channels() * a.frames() * a.height());
}

// ---------------------------------------------------------------------------
// Cubemap-weighted aggregation
// ---------------------------------------------------------------------------

/// Per-face weights indexed by CubeFace; must sum to 1.
struct FaceWeightTable {
    std::array<double, 6> weights{1.0 / 12, 1.0 / 12, 1.0 / 12, 1.0 / 12, 1.0 / 3, 1.0 / 3};

    [[nodiscard]] double operator[](CubeFace f) const noexcept {
        return weights[static_cast<std::size_t>(f)];
    }

    void validate() const {
        double sum = 0.0;
        for (double w : weights) {
            detail::require(w >= 0.0, "face weights must be non-negative");
            sum += w;
        }
        detail::require(std::abs(sum - 1.0) < 1e-12, "face weights must sum to 1");
    }
};

/// A per-face metric Phi applied to the projected face video, shaped (C, F, n, n).
using FaceMetric = std::function<double(const Tensor& face_video)>;

/// Face-metric failure, tagged with the face it came from.
class FaceMetricError : public Error {
public:
    FaceMetricError(CubeFace face, const std::string& what)
        : Error("face metric failed on " + std::string(face_name(face)) + " face: " + what),
          face_(face) {}
    [[nodiscard]] CubeFace face() const noexcept { return face_; }

private:
    CubeFace face_;
};

/// Projects every frame onto the cube; returns one (C, F, n, n) video per face.
inline std::array<Tensor, 6> project_video_to_cube(const Tensor& video, std::size_t face_size) {
    std::array<Tensor, 6> faces;
    for (auto& f : faces) f = Tensor({video.channels(), video.frames(), face_size, face_size});
    for (std::size_t fr = 0; fr < video.frames(); ++fr) {
        const CubemapFrame cm = erp_to_cubemap(video, fr, face_size);
        for (std::size_t fi = 0; fi < 6; ++fi)
            for (std::size_t c = 0; c < video.channels(); ++c)
                for (std::size_t y = 0; y < face_size; ++y) {
                    auto src = cm.faces[fi].row(c, 0, y);
                    std::ranges::copy(src, faces[fi].row(c, fr, y).begin());
                }
    }
    return faces;
}

struct CubemapScore {
    double score = 0.0;
    std::array<double, 6> per_face{};
};

/// sum_f alpha_f * Phi(P_f(v)).
inline CubemapScore cubemap_weighted_score(const VideoFrames& video, const FaceMetric& metric,
                                           const FaceWeightTable& weights, std::size_t face_size) {
    weights.validate();
    const auto faces = project_video_to_cube(video.tensor(), face_size);
    CubemapScore result;
    for (CubeFace face : kCubeFaces) {
        const auto idx = static_cast<std::size_t>(face);
        double value = 0.0;
        try {
            value = metric(faces[idx]);
        } catch (const std::exception& e) {
            throw FaceMetricError(face, e.what());
        }
        result.per_face[idx] = value;
    }
    // Summed as offsets from one face so a uniform Phi reproduces its value exactly.
    const double base = result.per_face[0];
    double offset = 0.0;
    for (CubeFace face : kCubeFaces) offset += weights[face] * (result.per_face[static_cast<std::size_t>(face)] - base);
    result.score = base + offset;
    return result;
}

// Reference face metrics ----------------------------------------------------

/// Mean pixel value over the face video.
inline double face_mean(const Tensor& face) {
    auto v = face.values();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Mean absolute difference between horizontally and vertically adjacent pixels.
inline double face_total_variation(const Tensor& face) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t c = 0; c < face.channels(); ++c)
        for (std::size_t f = 0; f < face.frames(); ++f)
            for (std::size_t y = 0; y < face.height(); ++y)
                for (std::size_t x = 0; x < face.width(); ++x) {
                    if (x + 1 < face.width()) {
                        sum += std::abs(face(c, f, y, x + 1) - face(c, f, y, x));
                        ++count;
                    }
                    if (y + 1 < face.height()) {
                        sum += std::abs(face(c, f, y + 1, x) - face(c, f, y, x));
                        ++count;
                    }
                }
    return count ? sum / static_cast<double>(count) : 0.0;
}

inline std::map<std::string, FaceMetric> builtin_face_metrics() {
    return {{"mean", face_mean}, {"total-variation", face_total_variation}};
}

}  // namespace panokit

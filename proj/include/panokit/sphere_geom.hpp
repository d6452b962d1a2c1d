#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string_view>

#include "panokit/error.hpp"
#include "panokit/parallel.hpp"
#include "panokit/tensor.hpp"

namespace panokit {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Discrete equirectangular grid: width 2R, height R, R = sphere radius in pixels.
class ErpGrid {
public:
    explicit ErpGrid(std::size_t radius) : radius_(radius) {
        detail::require(radius >= 1, "ERP radius must be >= 1");
    }

    /// Grid implied by a tensor whose width is twice its height.
    static ErpGrid of(const Tensor& t) {
        if (t.width() != 2 * t.height())
            throw ShapeMismatch("ERP frames need width == 2 * height, got " + t.shape().str());
        return ErpGrid(t.height());
    }

    [[nodiscard]] std::size_t radius() const noexcept { return radius_; }
    [[nodiscard]] std::size_t width() const noexcept { return 2 * radius_; }
    [[nodiscard]] std::size_t height() const noexcept { return radius_; }

    /// Latitude of the centre of row y.
    [[nodiscard]] double row_latitude(std::size_t y) const noexcept {
        const double r = static_cast<double>(radius_);
        return (2.0 * static_cast<double>(y) + 1.0 - r) * kPi / (2.0 * r);
    }

    friend bool operator==(const ErpGrid&, const ErpGrid&) = default;

private:
    std::size_t radius_;
};

/// Longitude phi in [0, 2pi), latitude theta in [-pi/2, pi/2].
struct SphericalCoord {
    double longitude = 0.0;
    double latitude = 0.0;
};

/// Continuous pixel position; integer values are pixel centres.
struct PixelCoord {
    double x = 0.0;
    double y = 0.0;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) noexcept { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator*(double s, Vec3 a) noexcept { return {s * a.x, s * a.y, s * a.z}; }
    [[nodiscard]] double dot(Vec3 o) const noexcept { return x * o.x + y * o.y + z * o.z; }
    [[nodiscard]] Vec3 cross(Vec3 o) const noexcept {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    [[nodiscard]] double norm() const noexcept { return std::sqrt(dot(*this)); }
    [[nodiscard]] Vec3 normalized() const noexcept { return (1.0 / norm()) * *this; }
};

[[nodiscard]] inline double wrap_longitude(double phi) noexcept {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w >= kTwoPi ? 0.0 : w;
}

[[nodiscard]] inline double wrap_periodic(double x, double period) noexcept {
    double w = std::fmod(x, period);
    if (w < 0.0) w += period;
    return w >= period ? 0.0 : w;
}

/// Pixel -> sphere. Pixel centres land on cell-centre angles; x wraps modulo 2R.
[[nodiscard]] inline SphericalCoord erp_to_sphere(PixelCoord p, const ErpGrid& g) {
    detail::require(std::isfinite(p.x) && std::isfinite(p.y), "erp_to_sphere: non-finite pixel");
    const double r = static_cast<double>(g.radius());
    const double x = wrap_periodic(p.x, 2.0 * r);
    return {wrap_longitude((2.0 * x + 1.0) * kPi / (2.0 * r)),
            (2.0 * p.y + 1.0 - r) * kPi / (2.0 * r)};
}

/// Exact inverse of erp_to_sphere; returns sub-pixel coordinates.
[[nodiscard]] inline PixelCoord sphere_to_erp(SphericalCoord s, const ErpGrid& g) {
    detail::require(std::isfinite(s.longitude) && std::isfinite(s.latitude),
                    "sphere_to_erp: non-finite angle");
    detail::require(std::abs(s.latitude) <= kPi / 2.0, "sphere_to_erp: |latitude| > pi/2");
    const double r = static_cast<double>(g.radius());
    const double x = s.longitude * r / kPi - 0.5;
    const double y = (s.latitude * 2.0 * r / kPi + r - 1.0) / 2.0;
    return {wrap_periodic(x, 2.0 * r), y};
}

struct ArcLengths {
    double along_latitude = 0.0;   // ds_phi
    double along_longitude = 0.0;  // ds_theta
};

/// Infinitesimal arc lengths along constant latitude (R cos(theta) dphi) and
/// constant longitude (R dtheta).
[[nodiscard]] inline ArcLengths arc_lengths(double theta, double d_phi, double d_theta,
                                            double radius) {
    detail::require(std::isfinite(theta) && std::isfinite(d_phi) && std::isfinite(d_theta) &&
                        std::isfinite(radius),
                    "arc_lengths: non-finite input");
    detail::require(std::abs(theta) <= kPi / 2.0, "arc_lengths: |theta| > pi/2");
    return {radius * std::cos(theta) * d_phi, radius * d_theta};
}

enum class FrequencyAxis { horizontal, vertical };

/// Spherical frequency (cycles per unit distance) -> image frequency (cycles per pixel).
[[nodiscard]] inline double cartesian_frequency(double f_sph, double theta, double radius,
                                                FrequencyAxis axis) {
    detail::require(f_sph >= 0.0, "cartesian_frequency: negative frequency");
    if (axis == FrequencyAxis::vertical) return radius * f_sph;
    // cos(pi/2) is ~6e-17 in floating point; the pole is exactly zero.
    if (std::abs(theta) == kPi / 2.0) return 0.0;
    return radius * f_sph * std::cos(theta);
}

/// Unit direction for (longitude, latitude). Longitude 0 at latitude 0 is +z,
/// longitude pi/2 is +x, latitude +pi/2 is +y.
[[nodiscard]] inline Vec3 direction_of(SphericalCoord s) noexcept {
    const double c = std::cos(s.latitude);
    return {c * std::sin(s.longitude), std::sin(s.latitude), c * std::cos(s.longitude)};
}

[[nodiscard]] inline SphericalCoord spherical_of(Vec3 d) noexcept {
    const double n = d.norm();
    const double lat = std::asin(std::clamp(d.y / n, -1.0, 1.0));
    return {wrap_longitude(std::atan2(d.x, d.z)), lat};
}

/// Bilinear sample of plane (c, f) at continuous pixel position; x wraps
/// modulo width, y clamps to the first/last row.
[[nodiscard]] inline double sample_bilinear_wrap(const Tensor& t, std::size_t c, std::size_t f,
                                                 double x, double y) noexcept {
    const auto w = static_cast<double>(t.width());
    const double h_max = static_cast<double>(t.height() - 1);
    const double xs = wrap_periodic(x, w);
    const double ys = std::clamp(y, 0.0, h_max);
    const double x0f = std::floor(xs);
    const double y0f = std::floor(ys);
    const double fx = xs - x0f;
    const double fy = ys - y0f;
    const auto x0 = static_cast<std::size_t>(x0f);
    const std::size_t x1 = (x0 + 1) % t.width();
    const auto y0 = static_cast<std::size_t>(y0f);
    const std::size_t y1 = std::min(y0 + 1, t.height() - 1);
    const double top = (1.0 - fx) * t(c, f, y0, x0) + fx * t(c, f, y0, x1);
    const double bottom = (1.0 - fx) * t(c, f, y1, x0) + fx * t(c, f, y1, x1);
    return (1.0 - fy) * top + fy * bottom;
}

/// Bilinear sample with both axes clamped (cube faces, perspective images).
[[nodiscard]] inline double sample_bilinear_clamp(const Tensor& t, std::size_t c, std::size_t f,
                                                  double x, double y) noexcept {
    const double xs = std::clamp(x, 0.0, static_cast<double>(t.width() - 1));
    const double ys = std::clamp(y, 0.0, static_cast<double>(t.height() - 1));
    const auto x0 = static_cast<std::size_t>(std::floor(xs));
    const auto y0 = static_cast<std::size_t>(std::floor(ys));
    const std::size_t x1 = std::min(x0 + 1, t.width() - 1);
    const std::size_t y1 = std::min(y0 + 1, t.height() - 1);
    const double fx = xs - static_cast<double>(x0);
    const double fy = ys - static_cast<double>(y0);
    const double top = (1.0 - fx) * t(c, f, y0, x0) + fx * t(c, f, y0, x1);
    const double bottom = (1.0 - fx) * t(c, f, y1, x0) + fx * t(c, f, y1, x1);
    return (1.0 - fy) * top + fy * bottom;
}

/// Samples an ERP frame in a world direction.
[[nodiscard]] inline double sample_erp(const Tensor& erp, std::size_t c, std::size_t f, Vec3 dir,
                                       const ErpGrid& g) {
    const PixelCoord p = sphere_to_erp(spherical_of(dir), g);
    return sample_bilinear_wrap(erp, c, f, p.x, p.y);
}

// ---------------------------------------------------------------------------
// Cubemap
// ---------------------------------------------------------------------------

enum class CubeFace : std::size_t { front = 0, right, back, left, top, bottom };

inline constexpr std::array<CubeFace, 6> kCubeFaces = {CubeFace::front, CubeFace::right,
                                                        CubeFace::back,  CubeFace::left,
                                                        CubeFace::top,   CubeFace::bottom};

[[nodiscard]] constexpr std::string_view face_name(CubeFace f) noexcept {
    switch (f) {
        case CubeFace::front: return "front";
        case CubeFace::right: return "right";
        case CubeFace::back: return "back";
        case CubeFace::left: return "left";
        case CubeFace::top: return "top";
        case CubeFace::bottom: return "bottom";
    }
    return "?";
}

/// Face basis: image column runs along `right`, image row runs against `up`.
struct FaceBasis {
    Vec3 forward;
    Vec3 right;
    Vec3 up;
};

// front = +z, right = +x, back = -z, left = -x, top = +y, bottom = -y.
[[nodiscard]] constexpr FaceBasis face_basis(CubeFace f) noexcept {
    switch (f) {
        case CubeFace::front: return {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}};
        case CubeFace::right: return {{1, 0, 0}, {0, 0, -1}, {0, 1, 0}};
        case CubeFace::back: return {{0, 0, -1}, {-1, 0, 0}, {0, 1, 0}};
        case CubeFace::left: return {{-1, 0, 0}, {0, 0, 1}, {0, 1, 0}};
        case CubeFace::top: return {{0, 1, 0}, {1, 0, 0}, {0, 0, -1}};
        case CubeFace::bottom: return {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}};
    }
    return {};
}

/// Direction through pixel centre (i, j) of an n x n face (90 degree field of view).
[[nodiscard]] inline Vec3 face_pixel_direction(CubeFace f, double i, double j,
                                               std::size_t n) noexcept {
    const FaceBasis b = face_basis(f);
    const double u = 2.0 * (i + 0.5) / static_cast<double>(n) - 1.0;
    const double v = 2.0 * (j + 0.5) / static_cast<double>(n) - 1.0;
    return b.forward + u * b.right + (-v) * b.up;
}

/// Face hit by a direction: the axis with the largest absolute component.
[[nodiscard]] inline CubeFace face_of(Vec3 d) noexcept {
    const double ax = std::abs(d.x), ay = std::abs(d.y), az = std::abs(d.z);
    if (ay >= ax && ay >= az) return d.y > 0 ? CubeFace::top : CubeFace::bottom;
    if (ax >= az) return d.x > 0 ? CubeFace::right : CubeFace::left;
    return d.z > 0 ? CubeFace::front : CubeFace::back;
}

/// Six square faces of one frame, each shaped (C, 1, n, n), indexed by CubeFace.
struct CubemapFrame {
    std::array<Tensor, 6> faces;

    [[nodiscard]] const Tensor& operator[](CubeFace f) const noexcept {
        return faces[static_cast<std::size_t>(f)];
    }
    Tensor& operator[](CubeFace f) noexcept { return faces[static_cast<std::size_t>(f)]; }
    [[nodiscard]] std::size_t face_size() const noexcept { return faces[0].width(); }
    [[nodiscard]] std::size_t channels() const noexcept { return faces[0].channels(); }
};

/// Gnomonic projection of ERP frame `frame` onto the six cube faces.
[[nodiscard]] inline CubemapFrame erp_to_cubemap(const Tensor& erp, std::size_t frame,
                                                 std::size_t face_size) {
    detail::require(face_size >= 2, "erp_to_cubemap: face_size must be >= 2");
    detail::require(frame < erp.frames(), "erp_to_cubemap: frame out of range");
    const ErpGrid g = ErpGrid::of(erp);
    CubemapFrame cm;
    for (CubeFace face : kCubeFaces) cm[face] = Tensor({erp.channels(), 1, face_size, face_size});
    parallel_for(6, [&](std::size_t fi) {
        const CubeFace face = kCubeFaces[fi];
        Tensor& out = cm[face];
        for (std::size_t j = 0; j < face_size; ++j)
            for (std::size_t i = 0; i < face_size; ++i) {
                const Vec3 d = face_pixel_direction(face, static_cast<double>(i),
                                                    static_cast<double>(j), face_size);
                const PixelCoord p = sphere_to_erp(spherical_of(d), g);
                for (std::size_t c = 0; c < erp.channels(); ++c)
                    out(c, 0, j, i) = sample_bilinear_wrap(erp, c, frame, p.x, p.y);
            }
    });
    return cm;
}

/// Samples a cubemap in a world direction (bilinear within the hit face).
[[nodiscard]] inline double sample_cubemap(const CubemapFrame& cm, std::size_t c, Vec3 d) noexcept {
    const CubeFace face = face_of(d);
    const FaceBasis b = face_basis(face);
    const double depth = d.dot(b.forward);
    const double u = d.dot(b.right) / depth;
    const double v = -d.dot(b.up) / depth;
    const auto n = static_cast<double>(cm.face_size());
    const double i = (u + 1.0) * n / 2.0 - 0.5;
    const double j = (v + 1.0) * n / 2.0 - 0.5;
    return sample_bilinear_clamp(cm[face], c, 0, i, j);
}

/// Inverse of erp_to_cubemap: an ERP frame shaped (C, 1, R, 2R).
[[nodiscard]] inline Tensor cubemap_to_erp(const CubemapFrame& cm, const ErpGrid& g) {
    for (CubeFace f : kCubeFaces) {
        const Tensor& t = cm[f];
        if (t.shape() != cm.faces[0].shape() || t.width() != t.height())
            throw ShapeMismatch("cubemap faces must be square and identically shaped");
    }
    Tensor out({cm.channels(), 1, g.height(), g.width()});
    parallel_for(g.height(), [&](std::size_t y) {
        for (std::size_t x = 0; x < g.width(); ++x) {
            const Vec3 d = direction_of(
                erp_to_sphere({static_cast<double>(x), static_cast<double>(y)}, g));
            for (std::size_t c = 0; c < cm.channels(); ++c) out(c, 0, y, x) = sample_cubemap(cm, c, d);
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Perspective
// ---------------------------------------------------------------------------

/// Pinhole camera looking at `view` with horizontal field of view `fov`.
struct PinholeCamera {
    Vec3 forward;
    Vec3 right;
    Vec3 up;
    double focal = 1.0;  // pixels
    std::size_t width = 1;
    std::size_t height = 1;

    PinholeCamera(SphericalCoord view, double fov, std::size_t out_w, std::size_t out_h) {
        detail::require(fov > 0.0 && fov < kPi, "perspective: fov must be in (0, pi)");
        detail::require(out_w >= 1 && out_h >= 1, "perspective: degenerate output size");
        forward = direction_of(view);
        right = Vec3{std::cos(view.longitude), 0.0, -std::sin(view.longitude)};
        up = forward.cross(right);
        focal = static_cast<double>(out_w) / 2.0 / std::tan(fov / 2.0);
        width = out_w;
        height = out_h;
    }

    /// Ray through continuous image position (i, j); integer values are pixel centres.
    [[nodiscard]] Vec3 ray(double i, double j) const noexcept {
        const double px = i + 0.5 - static_cast<double>(width) / 2.0;
        const double py = j + 0.5 - static_cast<double>(height) / 2.0;
        return focal * forward + px * right + (-py) * up;
    }
};

/// Renders ERP frame `frame` through a pinhole camera; result shaped (C, 1, out_h, out_w).
[[nodiscard]] inline Tensor erp_to_perspective(const Tensor& erp, std::size_t frame,
                                               SphericalCoord view, double fov,
                                               std::size_t out_w, std::size_t out_h) {
    detail::require(frame < erp.frames(), "erp_to_perspective: frame out of range");
    const ErpGrid g = ErpGrid::of(erp);
    const PinholeCamera cam(view, fov, out_w, out_h);
    Tensor out({erp.channels(), 1, out_h, out_w});
    for (std::size_t j = 0; j < out_h; ++j)
        for (std::size_t i = 0; i < out_w; ++i) {
            const PixelCoord p = sphere_to_erp(
                spherical_of(cam.ray(static_cast<double>(i), static_cast<double>(j))), g);
            for (std::size_t c = 0; c < erp.channels(); ++c)
                out(c, 0, j, i) = sample_bilinear_wrap(erp, c, frame, p.x, p.y);
        }
    return out;
}

}  // namespace panokit

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "panokit/dft.hpp"
#include "panokit/error.hpp"
#include "panokit/parallel.hpp"
#include "panokit/rng.hpp"
#include "panokit/sphere_geom.hpp"
#include "panokit/tensor.hpp"

namespace panokit {

/// Gaussian noise on an ERP grid: data is (C, 1, R, 2R).
struct NoiseField {
    Tensor data;
    ErpGrid grid{1};
    std::uint64_t seed = 0;

    NoiseField(Tensor values, ErpGrid g, std::uint64_t s) : data(std::move(values)), grid(g), seed(s) {
        if (data.height() != grid.height() || data.width() != grid.width())
            throw ShapeMismatch("noise field " + data.shape().str() +
                                " does not match ERP grid of radius " +
                                std::to_string(grid.radius()));
    }
};

/// Fills a tensor with i.i.d. standard normals; element i of the flattened
/// tensor is GaussianStream(seed)(i).
inline Tensor gaussian_tensor(Shape shape, std::uint64_t seed) {
    Tensor t(shape);
    const GaussianStream rng(seed);
    auto v = t.values();
    const std::size_t pairs = (v.size() + 1) / 2;
    parallel_for(pairs, [&](std::size_t k) {
        const auto z = rng.normal_pair(k);
        v[2 * k] = z[0];
        if (2 * k + 1 < v.size()) v[2 * k + 1] = z[1];
    });
    return t;
}

inline NoiseField sample_iid_gaussian(const ErpGrid& g, std::size_t channels, std::uint64_t seed) {
    detail::require(channels >= 1, "sample_iid_gaussian: channels must be >= 1");
    return NoiseField(gaussian_tensor({channels, 1, g.height(), g.width()}, seed), g, seed);
}

[[nodiscard]] constexpr double sign_or_zero(double v) noexcept {
    return static_cast<double>((0.0 < v) - (v < 0.0));
}

namespace detail {

/// sgn(BI(P)) * sqrt(BI(P^2)) on plane (c, f); x wraps, y clamps.
inline double vp_interp_plane(const Tensor& t, std::size_t c, std::size_t f, double x, double y) {
    const auto w = static_cast<double>(t.width());
    const double xs = wrap_periodic(x, w);
    const double ys = std::clamp(y, 0.0, static_cast<double>(t.height() - 1));
    const double x0f = std::floor(xs);
    const double y0f = std::floor(ys);
    const double fx = xs - x0f;
    const double fy = ys - y0f;
    const auto x0 = static_cast<std::size_t>(x0f);
    const auto y0 = static_cast<std::size_t>(y0f);
    if (fx == 0.0 && fy == 0.0) return t(c, f, y0, x0);

    const std::size_t x1 = (x0 + 1) % t.width();
    const std::size_t y1 = std::min(y0 + 1, t.height() - 1);
    const double w00 = (1.0 - fx) * (1.0 - fy);
    const double w10 = fx * (1.0 - fy);
    const double w01 = (1.0 - fx) * fy;
    const double w11 = fx * fy;
    const double p00 = t(c, f, y0, x0), p10 = t(c, f, y0, x1);
    const double p01 = t(c, f, y1, x0), p11 = t(c, f, y1, x1);
    const double linear = w00 * p00 + w10 * p10 + w01 * p01 + w11 * p11;
    const double squares = w00 * p00 * p00 + w10 * p10 * p10 + w01 * p01 * p01 + w11 * p11 * p11;
    return sign_or_zero(linear) * std::sqrt(squares);
}

}  // namespace detail

/// Variance-preserving interpolation of every channel at (x, y):
/// sgn(BI(P, x, y)) * sqrt(BI(P^2, x, y)), with sgn(0) = 0.
inline std::vector<double> variance_preserving_interp(const NoiseField& field, double x, double y) {
    std::vector<double> out(field.data.channels());
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = detail::vp_interp_plane(field.data, c, 0, x, y);
    return out;
}

/// Source column sampled for output column x of row y under latitude-aware
/// remapping: R + (x - R) cos(theta_y).
[[nodiscard]] inline double remap_source_x(std::size_t x, std::size_t y, const ErpGrid& g) noexcept {
    const auto r = static_cast<double>(g.radius());
    return r + (static_cast<double>(x) - r) * std::cos(g.row_latitude(y));
}

/// Latitude-aware remap of every (channel, frame) plane of an ERP tensor.
inline Tensor latitude_aware_remap(const Tensor& src) {
    const ErpGrid g = ErpGrid::of(src);
    Tensor out(src.shape());
    const std::size_t planes = src.channels() * src.frames();
    parallel_for(planes * g.height(), [&](std::size_t job) {
        const std::size_t plane = job / g.height();
        const std::size_t y = job % g.height();
        const std::size_t c = plane / src.frames();
        const std::size_t f = plane % src.frames();
        auto row = out.row(c, f, y);
        for (std::size_t x = 0; x < g.width(); ++x)
            row[x] = detail::vp_interp_plane(src, c, f, remap_source_x(x, y, g), static_cast<double>(y));
    });
    return out;
}

inline NoiseField latitude_aware_remap(const NoiseField& field) {
    return NoiseField(latitude_aware_remap(field.data), field.grid, field.seed);
}

// ---------------------------------------------------------------------------
// Spectral support
// ---------------------------------------------------------------------------

/// Smallest number of lowest-|frequency| DFT bins holding at least
/// `energy_threshold` of the row's spectral energy.
inline std::size_t row_spectrum_support(std::span<const double> row, double energy_threshold) {
    detail::require(energy_threshold > 0.0 && energy_threshold < 1.0,
                    "row_spectrum_support: threshold must be in (0, 1)");
    const auto power = power_spectrum(row);
    const double total = std::accumulate(power.begin(), power.end(), 0.0);
    detail::require(total > 0.0, "row_spectrum_support: zero-energy row");
    const double target = energy_threshold * total;
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t bin : bins_by_frequency(row.size())) {
        acc += power[bin];
        ++count;
        if (acc >= target) break;
    }
    return count;
}

struct SpectrumReport {
    std::size_t row_index = 0;
    double latitude = 0.0;
    double measured_support = 0.0;  // mean over channels/frames (and fields, when ensembled)
    double predicted_support = 0.0;  // 2R cos(theta)
};

/// Per-row support averaged over every (channel, frame) plane of an ERP tensor.
inline std::vector<SpectrumReport> spectrum_report(const Tensor& erp, double energy_threshold) {
    const ErpGrid g = ErpGrid::of(erp);
    std::vector<SpectrumReport> rows(g.height());
    const double planes = static_cast<double>(erp.channels() * erp.frames());
    for (std::size_t y = 0; y < g.height(); ++y) {
        double sum = 0.0;
        for (std::size_t c = 0; c < erp.channels(); ++c)
            for (std::size_t f = 0; f < erp.frames(); ++f)
                sum += static_cast<double>(row_spectrum_support(erp.row(c, f, y), energy_threshold));
        const double theta = g.row_latitude(y);
        rows[y] = {y, theta, sum / planes, 2.0 * static_cast<double>(g.radius()) * std::cos(theta)};
    }
    return rows;
}

/// Support of the equator, interpolated between the two rows straddling it when R is even.
inline double equator_support(const std::vector<SpectrumReport>& rows) {
    detail::require(!rows.empty(), "equator_support: empty report");
    const std::size_t n = rows.size();
    if (n % 2 == 1) return rows[n / 2].measured_support;
    return 0.5 * (rows[n / 2 - 1].measured_support + rows[n / 2].measured_support);
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // unbiased; 0 for a single sample
    std::size_t count = 0;
};

/// Streaming mean/variance (Welford) so ensembles can be folded in.
class MomentAccumulator {
public:
    void add(double v) noexcept {
        ++n_;
        const double d = v - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (v - mean_);
    }
    void add(std::span<const double> values) noexcept {
        for (double v : values) add(v);
    }
    [[nodiscard]] Moments moments() const noexcept {
        return {mean_, n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0, n_};
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct FieldStatistics {
    std::vector<Moments> rows;
    Moments global;
};

inline FieldStatistics field_statistics(const Tensor& t) {
    FieldStatistics s;
    s.rows.resize(t.height());
    MomentAccumulator global;
    for (std::size_t y = 0; y < t.height(); ++y) {
        MomentAccumulator row;
        for (std::size_t c = 0; c < t.channels(); ++c)
            for (std::size_t f = 0; f < t.frames(); ++f) {
                row.add(t.row(c, f, y));
                global.add(t.row(c, f, y));
            }
        s.rows[y] = row.moments();
    }
    s.global = global.moments();
    return s;
}

inline FieldStatistics field_statistics(const NoiseField& field) { return field_statistics(field.data); }

}  // namespace panokit

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>

#include "panokit/sphere_geom.hpp"
#include "panokit/tensor.hpp"

namespace fixtures {

/// Fills a (C, F, R, 2R) ERP tensor from a function of the unit direction.
inline panokit::Tensor erp_from_direction(std::size_t radius, const std::function<double(panokit::Vec3)>& fn,
                                          std::size_t channels = 1, std::size_t frames = 1) {
    const panokit::ErpGrid g(radius);
    panokit::Tensor t({channels, frames, g.height(), g.width()});
    for (std::size_t y = 0; y < g.height(); ++y)
        for (std::size_t x = 0; x < g.width(); ++x) {
            const auto s = panokit::erp_to_sphere({static_cast<double>(x), static_cast<double>(y)}, g);
            const double v = fn(panokit::direction_of(s));
            for (std::size_t c = 0; c < channels; ++c)
                for (std::size_t f = 0; f < frames; ++f) t(c, f, y, x) = v;
        }
    return t;
}

/// A low-degree polynomial in the direction: continuous over the whole sphere.
inline double smooth_field(panokit::Vec3 d) {
    return 0.5 + 0.2 * d.x + 0.1 * d.z + 0.15 * d.y * d.z - 0.1 * d.x * d.y;
}

inline panokit::Tensor random_tensor(panokit::Shape s, std::uint32_t seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    panokit::Tensor t(s);
    for (double& v : t.values()) v = dist(gen);
    return t;
}

}  // namespace fixtures

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "panokit/error.hpp"

namespace panokit {

/// Dimensions of a dense (channels, frames, height, width) tensor.
struct Shape {
    std::size_t channels = 1;
    std::size_t frames = 1;
    std::size_t height = 1;
    std::size_t width = 1;

    [[nodiscard]] constexpr std::size_t size() const noexcept {
        return channels * frames * height * width;
    }
    [[nodiscard]] constexpr std::size_t plane_size() const noexcept { return height * width; }

    friend constexpr bool operator==(const Shape&, const Shape&) = default;

    [[nodiscard]] std::string str() const {
        std::ostringstream os;
        os << "(" << channels << ", " << frames << ", " << height << ", " << width << ")";
        return os.str();
    }
};

/// Dense real tensor laid out as C x F x H x W, row-major.
///
/// The width axis is the periodic (longitude) axis for panoramic content;
/// every shift and pad operation in the library acts on it.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(Shape shape, double fill = 0.0) : shape_(shape), data_(shape.size(), fill) {
        detail::require(shape.size() > 0, "tensor dimensions must be positive, got " + shape.str());
    }

    Tensor(Shape shape, std::vector<double> values) : shape_(shape), data_(std::move(values)) {
        detail::require(shape.size() > 0, "tensor dimensions must be positive, got " + shape.str());
        if (data_.size() != shape.size()) {
            throw ShapeMismatch("tensor payload has " + std::to_string(data_.size()) +
                                " values, shape " + shape.str() + " needs " +
                                std::to_string(shape.size()));
        }
    }

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
    [[nodiscard]] std::size_t channels() const noexcept { return shape_.channels; }
    [[nodiscard]] std::size_t frames() const noexcept { return shape_.frames; }
    [[nodiscard]] std::size_t height() const noexcept { return shape_.height; }
    [[nodiscard]] std::size_t width() const noexcept { return shape_.width; }

    [[nodiscard]] std::size_t index(std::size_t c, std::size_t f, std::size_t y,
                                    std::size_t x) const noexcept {
        return ((c * shape_.frames + f) * shape_.height + y) * shape_.width + x;
    }

    double& operator()(std::size_t c, std::size_t f, std::size_t y, std::size_t x) noexcept {
        return data_[index(c, f, y, x)];
    }
    double operator()(std::size_t c, std::size_t f, std::size_t y, std::size_t x) const noexcept {
        return data_[index(c, f, y, x)];
    }

    [[nodiscard]] std::span<double> values() noexcept { return data_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return data_; }

    [[nodiscard]] std::span<double> row(std::size_t c, std::size_t f, std::size_t y) noexcept {
        return std::span<double>(data_).subspan(index(c, f, y, 0), shape_.width);
    }
    [[nodiscard]] std::span<const double> row(std::size_t c, std::size_t f,
                                              std::size_t y) const noexcept {
        return std::span<const double>(data_).subspan(index(c, f, y, 0), shape_.width);
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    Shape shape_{};
    std::vector<double> data_;
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (a.shape() != b.shape()) {
        throw ShapeMismatch(std::string(what) + ": shape " + a.shape().str() + " vs " +
                            b.shape().str());
    }
}

/// Extracts frames [first, first + count) as a new tensor.
inline Tensor slice_frames(const Tensor& t, std::size_t first, std::size_t count) {
    detail::require(count > 0 && first + count <= t.frames(), "frame slice out of range");
    Shape s = t.shape();
    s.frames = count;
    Tensor out(s);
    for (std::size_t c = 0; c < s.channels; ++c)
        for (std::size_t f = 0; f < count; ++f)
            for (std::size_t y = 0; y < s.height; ++y) {
                auto src = t.row(c, first + f, y);
                std::ranges::copy(src, out.row(c, f, y).begin());
            }
    return out;
}

[[nodiscard]] inline double max_abs_difference(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "max_abs_difference");
    double m = 0.0;
    auto av = a.values();
    auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) m = std::max(m, std::abs(av[i] - bv[i]));
    return m;
}

}  // namespace panokit

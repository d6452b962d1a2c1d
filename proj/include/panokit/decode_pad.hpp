#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "panokit/error.hpp"
#include "panokit/tensor.hpp"

namespace panokit {

/// Latent -> frames. Output width is `upsample` times the input width.
struct DecoderInterface {
    std::function<Tensor(const Tensor&)> decode;
    std::size_t upsample = 1;
    /// Horizontal receptive half-width in latent columns; padding r >= this
    /// makes padded decoding seam-exact.
    std::size_t receptive_half_width = 0;

    Tensor operator()(const Tensor& z) const {
        Tensor out = decode(z);
        if (out.width() != upsample * z.width())
            throw ShapeMismatch("decoder produced width " + std::to_string(out.width()) +
                                ", expected " + std::to_string(upsample * z.width()));
        return out;
    }
};

/// Extends the width axis by r wrapped columns per side; output column x holds
/// input column (x - r) mod W.
inline Tensor circular_pad(const Tensor& z, std::size_t r) {
    const std::size_t w = z.width();
    if (r > w)
        throw InvalidArgument("circular_pad: r = " + std::to_string(r) + " exceeds width " +
                              std::to_string(w));
    if (r == 0) return z;
    Shape s = z.shape();
    s.width = w + 2 * r;
    Tensor out(s);
    for (std::size_t c = 0; c < s.channels; ++c)
        for (std::size_t f = 0; f < s.frames; ++f)
            for (std::size_t y = 0; y < s.height; ++y) {
                auto src = z.row(c, f, y);
                auto dst = out.row(c, f, y);
                for (std::size_t x = 0; x < s.width; ++x) dst[x] = src[(x + w - r) % w];
            }
    return out;
}

/// Removes equal margins from both sides of the width axis.
inline Tensor center_crop(const Tensor& frames, std::size_t target_width) {
    const std::size_t w = frames.width();
    detail::require(target_width >= 1, "center_crop: target width must be positive");
    if (target_width > w || (w - target_width) % 2 != 0)
        throw InvalidArgument("center_crop: cannot crop width " + std::to_string(w) + " to " +
                              std::to_string(target_width) + " with equal margins");
    const std::size_t margin = (w - target_width) / 2;
    if (margin == 0) return frames;
    Shape s = frames.shape();
    s.width = target_width;
    Tensor out(s);
    for (std::size_t c = 0; c < s.channels; ++c)
        for (std::size_t f = 0; f < s.frames; ++f)
            for (std::size_t y = 0; y < s.height; ++y) {
                auto src = frames.row(c, f, y).subspan(margin, target_width);
                std::ranges::copy(src, out.row(c, f, y).begin());
            }
    return out;
}

/// Crop(D(P_r(z))): decode with r wrapped columns of context per side.
inline Tensor padded_decode(const Tensor& z, const DecoderInterface& decoder, std::size_t r) {
    const Tensor decoded = decoder(circular_pad(z, r));
    return center_crop(decoded, decoder.upsample * z.width());
}

/// Odd-sized 2-D convolution kernel, row-major (rows = height offsets).
class ConvKernel {
public:
    ConvKernel(std::size_t rows, std::size_t cols, std::vector<double> weights)
        : rows_(rows), cols_(cols), weights_(std::move(weights)) {
        if (rows % 2 == 0 || cols % 2 == 0)
            throw InvalidArgument("convolution kernel extents must be odd, got " +
                                  std::to_string(rows) + "x" + std::to_string(cols));
        detail::require(weights_.size() == rows * cols, "kernel weight count mismatch");
    }

    static ConvKernel delta() { return ConvKernel(1, 1, {1.0}); }

    static ConvKernel box(std::size_t half_width) {
        const std::size_t n = 2 * half_width + 1;
        return ConvKernel(n, n, std::vector<double>(n * n, 1.0 / static_cast<double>(n * n)));
    }

    /// Normalised kernel whose weights grow left to right, so zero padding
    /// attenuates the left and right borders differently (a boundary
    /// behaviour that is not mirror-symmetric, like a learned decoder).
    static ConvKernel skewed(std::size_t half_width) {
        const std::size_t n = 2 * half_width + 1;
        std::vector<double> w(n * n);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double dy = std::abs(static_cast<double>(i) - static_cast<double>(half_width));
                w[i * n + j] = (1.0 + static_cast<double>(j)) *
                               (static_cast<double>(half_width) + 1.0 - dy);
                sum += w[i * n + j];
            }
        for (double& v : w) v /= sum;
        return ConvKernel(n, n, std::move(w));
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t half_rows() const noexcept { return rows_ / 2; }
    [[nodiscard]] std::size_t half_cols() const noexcept { return cols_ / 2; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept {
        return weights_[i * cols_ + j];
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> weights_;
};

/// Zero-padded 2-D convolution of every (channel, frame) plane followed by
/// nearest-neighbour upsampling by u on both spatial axes. Deliberately not
/// circular: it has no notion of the panorama's wrap-around.
inline Tensor reference_conv_decode(const Tensor& z, const ConvKernel& kernel, std::size_t upsample) {
    detail::require(upsample >= 1, "reference_conv_decode: upsample must be >= 1");
    const Shape in = z.shape();
    const auto hr = static_cast<std::ptrdiff_t>(kernel.half_rows());
    const auto hc = static_cast<std::ptrdiff_t>(kernel.half_cols());
    const auto H = static_cast<std::ptrdiff_t>(in.height);
    const auto W = static_cast<std::ptrdiff_t>(in.width);

    Shape out_shape = in;
    out_shape.height *= upsample;
    out_shape.width *= upsample;
    Tensor out(out_shape);
    std::vector<double> filtered(in.plane_size());
    for (std::size_t c = 0; c < in.channels; ++c)
        for (std::size_t f = 0; f < in.frames; ++f) {
            for (std::ptrdiff_t y = 0; y < H; ++y)
                for (std::ptrdiff_t x = 0; x < W; ++x) {
                    double acc = 0.0;
                    for (std::ptrdiff_t i = -hr; i <= hr; ++i) {
                        const std::ptrdiff_t yy = y + i;
                        if (yy < 0 || yy >= H) continue;
                        for (std::ptrdiff_t j = -hc; j <= hc; ++j) {
                            const std::ptrdiff_t xx = x + j;
                            if (xx < 0 || xx >= W) continue;
                            acc += kernel(static_cast<std::size_t>(i + hr), static_cast<std::size_t>(j + hc)) *
                                   z(c, f, static_cast<std::size_t>(yy), static_cast<std::size_t>(xx));
                        }
                    }
                    filtered[static_cast<std::size_t>(y * W + x)] = acc;
                }
            for (std::size_t y = 0; y < out_shape.height; ++y)
                for (std::size_t x = 0; x < out_shape.width; ++x)
                    out(c, f, y, x) = filtered[(y / upsample) * in.width + x / upsample];
        }
    return out;
}

inline DecoderInterface make_identity_decoder() {
    return {[](const Tensor& z) { return z; }, 1, 0};
}

inline DecoderInterface make_reference_conv_decoder(ConvKernel kernel, std::size_t upsample = 1) {
    const std::size_t k = kernel.half_cols();
    return {[kernel = std::move(kernel), upsample](const Tensor& z) {
                return reference_conv_decode(z, kernel, upsample);
            },
            upsample, k};
}

}  // namespace panokit

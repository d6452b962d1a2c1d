#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace panokit {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Stateless: every output block is a pure function of (counter, key), so any
/// element of a random tensor can be produced independently of the others.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    static constexpr int kRounds = 10;

    [[nodiscard]] static constexpr Counter block(Counter ctr, Key key) noexcept {
        for (int r = 0; r < kRounds; ++r) {
            if (r > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }
};

/// Seeded standard-normal source addressable by element index.
///
/// Element n is drawn from Philox block (n / 2, stream) keyed by the seed and
/// converted with Box-Muller; the block's two 53-bit uniforms yield the pair
/// (2k, 2k + 1). Identifier: "philox4x32-10/box-muller/v1".
class GaussianStream {
public:
    static constexpr std::string_view kIdentifier = "philox4x32-10/box-muller/v1";

    explicit GaussianStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    [[nodiscard]] double operator()(std::uint64_t n) const noexcept {
        const auto pair = normal_pair(n >> 1);
        return (n & 1u) ? pair[1] : pair[0];
    }

    [[nodiscard]] std::array<double, 2> normal_pair(std::uint64_t k) const noexcept {
        const auto bits = Philox4x32::block(
            {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
             static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
            key_);
        // u1 in (0, 1] keeps the log finite.
        const double u1 = 1.0 - to_unit(bits[0], bits[1]);
        const double u2 = to_unit(bits[2], bits[3]);
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

    /// Uniform in [0, 1) with 53 random bits.
    [[nodiscard]] static constexpr double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
        const std::uint64_t mantissa = (std::uint64_t{hi >> 5} << 26) | (lo >> 6);
        return static_cast<double>(mantissa) * 0x1.0p-53;
    }

private:
    Philox4x32::Key key_;
    std::uint64_t stream_;
};

/// Uniform [0, 1) source addressable by element index; same block layout as
/// GaussianStream (two uniforms per block).
class UniformStream {
public:
    explicit UniformStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    [[nodiscard]] double operator()(std::uint64_t n) const noexcept {
        const std::uint64_t k = n >> 1;
        const auto bits = Philox4x32::block(
            {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32),
             static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
            key_);
        return (n & 1u) ? GaussianStream::to_unit(bits[2], bits[3])
                        : GaussianStream::to_unit(bits[0], bits[1]);
    }

private:
    Philox4x32::Key key_;
    std::uint64_t stream_;
};

}  // namespace panokit

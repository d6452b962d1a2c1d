#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace panokit {

/// Direct O(N^2) DFT. X[k] = sum_n x[n] exp(-2 pi i k n / N).
inline std::vector<std::complex<double>> dft_direct(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{};
        for (std::size_t j = 0; j < n; ++j) {
            // (k * j) mod n keeps the phase argument small and exact.
            const double phase = -2.0 * std::numbers::pi * static_cast<double>((k * j) % n) /
                                 static_cast<double>(n);
            acc += x[j] * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        out[k] = acc;
    }
    return out;
}

/// Iterative radix-2 FFT; falls back to the direct DFT for other lengths.
inline std::vector<std::complex<double>> dft(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0 || !std::has_single_bit(n)) return dft_direct(x);

    std::vector<std::complex<double>> a(x.begin(), x.end());
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> w(std::cos(angle * static_cast<double>(k)),
                                             std::sin(angle * static_cast<double>(k)));
                const auto u = a[start + k];
                const auto v = a[start + k + len / 2] * w;
                a[start + k] = u + v;
                a[start + k + len / 2] = u - v;
            }
        }
    }
    return a;
}

/// |X[k]|^2 for every bin.
inline std::vector<double> power_spectrum(std::span<const double> x) {
    const auto spec = dft(x);
    std::vector<double> p(spec.size());
    for (std::size_t k = 0; k < spec.size(); ++k) p[k] = std::norm(spec[k]);
    return p;
}

/// Bin indices ordered by |frequency|: 0, 1, N-1, 2, N-2, ...
inline std::vector<std::size_t> bins_by_frequency(std::size_t n) {
    std::vector<std::size_t> order;
    order.reserve(n);
    if (n == 0) return order;
    order.push_back(0);
    for (std::size_t k = 1; 2 * k <= n; ++k) {
        order.push_back(k);
        if (n - k != k) order.push_back(n - k);
    }
    return order;
}

}  // namespace panokit

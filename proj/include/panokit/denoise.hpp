#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "panokit/error.hpp"
#include "panokit/noise_field.hpp"
#include "panokit/tensor.hpp"

namespace panokit {

// ---------------------------------------------------------------------------
// Flow matching
// ---------------------------------------------------------------------------

/// z_t = t * z1 + (1 - t) * z0.
inline Tensor flow_interpolate(const Tensor& z0, const Tensor& z1, double t) {
    require_same_shape(z0, z1, "flow_interpolate");
    detail::require(t >= 0.0 && t <= 1.0, "flow_interpolate: t must be in [0, 1]");
    Tensor out(z0.shape());
    auto a = z0.values(), b = z1.values();
    auto o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = t * b[i] + (1.0 - t) * a[i];
    return out;
}

/// Ground-truth velocity of the straight path: z1 - z0.
inline Tensor flow_velocity(const Tensor& z0, const Tensor& z1) {
    require_same_shape(z0, z1, "flow_velocity");
    Tensor out(z0.shape());
    auto a = z0.values(), b = z1.values();
    auto o = out.values();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = b[i] - a[i];
    return out;
}

/// Mean squared error between predicted and true velocity.
inline double flow_loss(const Tensor& predicted, const Tensor& target) {
    require_same_shape(predicted, target, "flow_loss");
    auto p = predicted.values(), q = target.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - q[i];
        sum += d * d;
    }
    return sum / static_cast<double>(p.size());
}

// ---------------------------------------------------------------------------
// Circular shift
// ---------------------------------------------------------------------------

[[nodiscard]] inline std::size_t mod_width(std::int64_t s, std::size_t width) noexcept {
    const auto w = static_cast<std::int64_t>(width);
    return static_cast<std::size_t>(((s % w) + w) % w);
}

/// Rolls the width axis: output column x is input column (x - s) mod W.
inline Tensor circular_shift(const Tensor& z, std::int64_t s) {
    const std::size_t w = z.width();
    const std::size_t shift = mod_width(s, w);
    if (shift == 0) return z;
    Tensor out(z.shape());
    for (std::size_t c = 0; c < z.channels(); ++c)
        for (std::size_t f = 0; f < z.frames(); ++f)
            for (std::size_t y = 0; y < z.height(); ++y) {
                auto src = z.row(c, f, y);
                auto dst = out.row(c, f, y);
                std::ranges::rotate_copy(src, src.begin() + static_cast<std::ptrdiff_t>(w - shift),
                                         dst.begin());
            }
    return out;
}

// ---------------------------------------------------------------------------
// Predictors and schedules
// ---------------------------------------------------------------------------

/// Velocity predictor: (latent, t, conditioning) -> velocity of identical shape.
using Predictor = std::function<Tensor(const Tensor& latent, double t, std::string_view conditioning)>;

/// Ascending timesteps from noise (t = 0) to data (t = 1). Step k integrates
/// from timesteps[k] to timesteps[k + 1]; when rotated, step k rolls the
/// latent by k mod W columns.
struct DenoiseSchedule {
    std::vector<double> timesteps;
    bool rotated = false;

    static DenoiseSchedule uniform(std::size_t steps, bool rotated = false) {
        detail::require(steps >= 1, "schedule needs at least one step");
        DenoiseSchedule s;
        s.rotated = rotated;
        s.timesteps.resize(steps + 1);
        for (std::size_t k = 0; k <= steps; ++k)
            s.timesteps[k] = static_cast<double>(k) / static_cast<double>(steps);
        return s;
    }

    [[nodiscard]] std::size_t steps() const noexcept {
        return timesteps.empty() ? 0 : timesteps.size() - 1;
    }
    [[nodiscard]] double dt(std::size_t step) const { return timesteps.at(step + 1) - timesteps.at(step); }

    [[nodiscard]] std::int64_t shift(std::size_t step, std::size_t width) const noexcept {
        return rotated ? static_cast<std::int64_t>(step % width) : 0;
    }

    void validate() const {
        detail::require(steps() >= 1, "empty denoise schedule");
        for (std::size_t k = 0; k < timesteps.size(); ++k) {
            detail::require(timesteps[k] >= 0.0 && timesteps[k] <= 1.0,
                            "schedule timesteps must lie in [0, 1]");
            if (k > 0)
                detail::require(timesteps[k] > timesteps[k - 1], "schedule timesteps must ascend");
        }
    }
};

namespace detail {

inline Tensor checked_predict(const Predictor& predictor, const Tensor& z, double t,
                              std::string_view conditioning) {
    Tensor v = predictor(z, t, conditioning);
    if (v.shape() != z.shape())
        throw ShapeMismatch("predictor returned " + v.shape().str() + " for latent " +
                            z.shape().str());
    return v;
}

}  // namespace detail

/// Euler step with an explicit roll amount:
/// Z' = R_{-s}( R_s(Z) + dt * predictor(R_s(Z), t) ).
inline Tensor shifted_euler_step(const Tensor& z, std::int64_t shift, double t, double dt,
                                 const Predictor& predictor, std::string_view conditioning = {}) {
    Tensor rolled = circular_shift(z, shift);
    const Tensor v = detail::checked_predict(predictor, rolled, t, conditioning);
    auto r = rolled.values();
    auto vv = v.values();
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += dt * vv[i];
    return circular_shift(rolled, -shift);
}

/// One step of rotated denoising at schedule index `step`.
inline Tensor rotated_denoise_step(const Tensor& z, std::size_t step, const DenoiseSchedule& schedule,
                                   const Predictor& predictor, std::string_view conditioning = {}) {
    detail::require(step < schedule.steps(), "rotated_denoise_step: step out of range");
    return shifted_euler_step(z, schedule.shift(step, z.width()), schedule.timesteps[step],
                              schedule.dt(step), predictor, conditioning);
}

struct RunOptions {
    /// Applies latitude-aware remapping to the initial latent (requires W == 2H).
    bool latitude_aware_init = false;
    std::string conditioning;
};

/// Full sampler; with schedule.rotated == false this is plain Euler flow matching.
inline Tensor run_denoise(const Tensor& z_init, const DenoiseSchedule& schedule,
                          const Predictor& predictor, const RunOptions& options = {}) {
    schedule.validate();
    Tensor z = options.latitude_aware_init ? latitude_aware_remap(z_init) : z_init;
    for (std::size_t k = 0; k < schedule.steps(); ++k)
        z = rotated_denoise_step(z, k, schedule, predictor, options.conditioning);
    return z;
}

// ---------------------------------------------------------------------------
// Seam error accumulation
// ---------------------------------------------------------------------------

/// Per-step prediction-error profile over logical columns.
struct SeamErrorModel {
    std::function<std::vector<double>(std::size_t step, std::size_t width)> profile;

    /// Unit error concentrated at one logical column.
    static SeamErrorModel impulse(std::size_t column = 0, double magnitude = 1.0) {
        return {[=](std::size_t, std::size_t w) {
            std::vector<double> e(w, 0.0);
            e.at(column % w) = magnitude;
            return e;
        }};
    }

    static SeamErrorModel uniform(double magnitude = 1.0) {
        return {[=](std::size_t, std::size_t w) { return std::vector<double>(w, magnitude); }};
    }
};

/// E_T(x) = sum_t eps_t((x + s_t) mod W), s_t = t mod W when rotated, else 0.
inline std::vector<double> accumulate_seam_error(const SeamErrorModel& model, std::size_t steps,
                                                 std::size_t width, bool rotated) {
    detail::require(steps >= 1, "accumulate_seam_error: T must be >= 1");
    detail::require(width >= 1, "accumulate_seam_error: W must be >= 1");
    std::vector<double> total(width, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
        const auto eps = model.profile(t, width);
        detail::require(eps.size() == width, "seam error profile has wrong length");
        const std::size_t s = rotated ? t % width : 0;
        for (std::size_t x = 0; x < width; ++x) {
            detail::require(eps[(x + s) % width] >= 0.0, "seam error profile must be non-negative");
            total[x] += eps[(x + s) % width];
        }
    }
    return total;
}

// ---------------------------------------------------------------------------
// Long-video windowing
// ---------------------------------------------------------------------------

struct TemporalChunk {
    std::size_t start = 0;
    std::size_t length = 0;
};

/// Chunks of `chunk_len` frames advancing by chunk_len - overlap; the last
/// chunk is aligned to the end of the video.
inline std::vector<TemporalChunk> temporal_chunks(std::size_t frames, std::size_t chunk_len,
                                                  std::size_t overlap) {
    detail::require(overlap > 0 && overlap < chunk_len && chunk_len <= frames,
                    "inconsistent chunking: need 0 < overlap < chunk_len <= frames");
    const std::size_t stride = chunk_len - overlap;
    std::vector<TemporalChunk> chunks;
    std::size_t start = 0;
    while (start + chunk_len < frames) {
        chunks.push_back({start, chunk_len});
        start += stride;
    }
    chunks.push_back({frames - chunk_len, chunk_len});
    return chunks;
}

/// Unnormalised linear-ramp weight of local frame i within chunk `idx`.
/// Weights rise 0 -> 1 across the overlap with the previous chunk and fall
/// across the overlap with the next one.
inline double chunk_ramp_weight(const std::vector<TemporalChunk>& chunks, std::size_t idx,
                                std::size_t i) {
    const TemporalChunk& ch = chunks[idx];
    double w = 1.0;
    if (idx > 0) {
        const TemporalChunk& prev = chunks[idx - 1];
        const std::size_t ov = prev.start + prev.length - ch.start;
        w = std::min(w, static_cast<double>(i + 1) / static_cast<double>(ov + 1));
    }
    if (idx + 1 < chunks.size()) {
        const TemporalChunk& next = chunks[idx + 1];
        const std::size_t ov = ch.start + ch.length - next.start;
        w = std::min(w, static_cast<double>(ch.length - i) / static_cast<double>(ov + 1));
    }
    return w;
}

/// Normalised blending table: weights[f] lists (chunk index, weight) pairs
/// covering frame f; weights at each frame sum to 1.
inline std::vector<std::vector<std::pair<std::size_t, double>>> blend_weights(
    const std::vector<TemporalChunk>& chunks, std::size_t frames) {
    std::vector<std::vector<std::pair<std::size_t, double>>> table(frames);
    for (std::size_t k = 0; k < chunks.size(); ++k)
        for (std::size_t i = 0; i < chunks[k].length; ++i)
            table[chunks[k].start + i].emplace_back(k, chunk_ramp_weight(chunks, k, i));
    for (auto& entries : table) {
        double sum = 0.0;
        for (const auto& e : entries) sum += e.second;
        for (auto& e : entries) e.second /= sum;
    }
    return table;
}

/// Denoises a long latent by updating overlapping temporal chunks independently
/// at every step and merging them with linear ramps.
inline Tensor windowed_long_denoise(const Tensor& z_long, std::size_t chunk_len, std::size_t overlap,
                                    const DenoiseSchedule& schedule, const Predictor& predictor,
                                    const RunOptions& options = {}) {
    schedule.validate();
    const auto chunks = temporal_chunks(z_long.frames(), chunk_len, overlap);
    Tensor z = options.latitude_aware_init ? latitude_aware_remap(z_long) : z_long;
    const Shape shape = z.shape();

    for (std::size_t k = 0; k < schedule.steps(); ++k) {
        std::vector<Tensor> updated;
        updated.reserve(chunks.size());
        for (const auto& ch : chunks)
            updated.push_back(rotated_denoise_step(slice_frames(z, ch.start, ch.length), k, schedule,
                                                   predictor, options.conditioning));

        // Running weighted mean: acc += (w / W_acc) * (value - acc). Equal
        // chunk values merge to exactly that value.
        Tensor merged(shape);
        std::vector<double> weight_sum(shape.frames, 0.0);
        for (std::size_t idx = 0; idx < chunks.size(); ++idx) {
            const auto& ch = chunks[idx];
            for (std::size_t i = 0; i < ch.length; ++i) {
                const std::size_t f = ch.start + i;
                const double w = chunk_ramp_weight(chunks, idx, i);
                weight_sum[f] += w;
                const double alpha = w / weight_sum[f];
                for (std::size_t c = 0; c < shape.channels; ++c)
                    for (std::size_t y = 0; y < shape.height; ++y) {
                        auto dst = merged.row(c, f, y);
                        auto src = updated[idx].row(c, i, y);
                        if (weight_sum[f] == w) {
                            std::ranges::copy(src, dst.begin());
                        } else {
                            for (std::size_t x = 0; x < shape.width; ++x)
                                dst[x] += alpha * (src[x] - dst[x]);
                        }
                    }
            }
        }
        z = std::move(merged);
    }
    return z;
}

// ---------------------------------------------------------------------------
// Inpainting / outpainting
// ---------------------------------------------------------------------------

/// Masked denoising: elements with mask != 0 are generated; elements with
/// mask == 0 are pinned to the reference's noisy path
/// flow_interpolate(noise, reference, t) before every step and to the
/// reference itself at the end.
inline Tensor masked_denoise(const Tensor& z, const Tensor& mask, const Tensor& reference,
                             const DenoiseSchedule& schedule, const Predictor& predictor,
                             std::uint64_t noise_seed, const RunOptions& options = {}) {
    require_same_shape(z, mask, "masked_denoise mask");
    require_same_shape(z, reference, "masked_denoise reference");
    schedule.validate();
    const Tensor noise = gaussian_tensor(z.shape(), noise_seed);
    auto m = mask.values();
    auto ref = reference.values();
    auto nz = noise.values();

    Tensor cur = z;
    for (std::size_t k = 0; k < schedule.steps(); ++k) {
        const double t = schedule.timesteps[k];
        auto v = cur.values();
        for (std::size_t i = 0; i < v.size(); ++i)
            if (m[i] == 0.0) v[i] = t * ref[i] + (1.0 - t) * nz[i];
        cur = rotated_denoise_step(cur, k, schedule, predictor, options.conditioning);
    }
    auto v = cur.values();
    for (std::size_t i = 0; i < v.size(); ++i)
        if (m[i] == 0.0) v[i] = ref[i];
    return cur;
}

}  // namespace panokit

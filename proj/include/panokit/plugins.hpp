#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "panokit/decode_pad.hpp"
#include "panokit/denoise.hpp"
#include "panokit/error.hpp"
#include "panokit/rng.hpp"

namespace panokit {

/// Construction parameters shared by every plugin factory.
struct PluginParams {
    std::uint64_t seed = 0;
    /// Target latent for oracle predictors.
    std::optional<Tensor> target;
    double scale = 1.0;
};

// Built-in predictors -------------------------------------------------------

inline Predictor make_zero_predictor() {
    return [](const Tensor& z, double, std::string_view) { return Tensor(z.shape()); };
}

/// Exact velocity toward a fixed target along the straight path:
/// v = (target - z) / (1 - t). Euler integration on a schedule ending at
/// t = 1 lands on the target.
inline Predictor make_constant_target_predictor(Tensor target) {
    return [target = std::move(target)](const Tensor& z, double t, std::string_view) {
        require_same_shape(z, target, "constant-target predictor");
        detail::require(t < 1.0, "constant-target predictor is singular at t = 1");
        Tensor v(z.shape());
        auto o = v.values();
        auto a = z.values(), b = target.values();
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = (b[i] - a[i]) / (1.0 - t);
        return v;
    };
}

/// +scale at input column 0 only, zero elsewhere: a prediction error pinned to
/// whatever content sits at the predictor's left border.
inline Predictor make_seam_impulse_predictor(double scale = 1.0) {
    return [scale](const Tensor& z, double, std::string_view) {
        Tensor v(z.shape());
        for (std::size_t c = 0; c < z.channels(); ++c)
            for (std::size_t f = 0; f < z.frames(); ++f)
                for (std::size_t y = 0; y < z.height(); ++y) v(c, f, y, 0) = scale;
        return v;
    };
}

/// v = scale * tanh(z) - 0.5 z, applied elementwise (shift-equivariant).
inline Predictor make_pointwise_predictor(double scale = 1.0) {
    return [scale](const Tensor& z, double, std::string_view) {
        Tensor v(z.shape());
        auto o = v.values();
        auto a = z.values();
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = scale * std::tanh(a[i]) - 0.5 * a[i];
        return v;
    };
}

/// Seeded Gaussian velocity; the stream is selected by the bits of t so equal
/// (seed, t) give equal output regardless of call order.
inline Predictor make_seeded_random_predictor(std::uint64_t seed, double scale = 1.0) {
    return [seed, scale](const Tensor& z, double t, std::string_view) {
        std::uint64_t stream = 0;
        static_assert(sizeof(stream) == sizeof(t));
        std::memcpy(&stream, &t, sizeof(t));
        const GaussianStream rng(seed, stream);
        Tensor v(z.shape());
        auto o = v.values();
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = scale * rng(i);
        return v;
    };
}

// Registry ------------------------------------------------------------------

/// Named predictor and decoder factories addressable from the command line.
class PluginRegistry {
public:
    using PredictorFactory = std::function<Predictor(const PluginParams&)>;
    using DecoderFactory = std::function<DecoderInterface(const PluginParams&)>;

    void add_predictor(std::string name, PredictorFactory factory) {
        predictors_[std::move(name)] = std::move(factory);
    }
    void add_decoder(std::string name, DecoderFactory factory) {
        decoders_[std::move(name)] = std::move(factory);
    }

    [[nodiscard]] bool has_predictor(const std::string& name) const { return predictors_.contains(name); }
    [[nodiscard]] bool has_decoder(const std::string& name) const { return decoders_.contains(name); }

    [[nodiscard]] Predictor predictor(const std::string& name, const PluginParams& params = {}) const {
        const auto it = predictors_.find(name);
        if (it == predictors_.end()) throw InvalidArgument("unknown predictor '" + name + "'");
        return it->second(params);
    }

    [[nodiscard]] DecoderInterface decoder(const std::string& name, const PluginParams& params = {}) const {
        const auto it = decoders_.find(name);
        if (it == decoders_.end()) throw InvalidArgument("unknown decoder '" + name + "'");
        return it->second(params);
    }

    [[nodiscard]] std::vector<std::string> predictor_names() const { return keys(predictors_); }
    [[nodiscard]] std::vector<std::string> decoder_names() const { return keys(decoders_); }

    static PluginRegistry with_builtins() {
        PluginRegistry r;
        r.add_predictor("zero-velocity", [](const PluginParams&) { return make_zero_predictor(); });
        r.add_predictor("constant-target", [](const PluginParams& p) {
            if (!p.target) throw InvalidArgument("constant-target predictor needs a target latent");
            return make_constant_target_predictor(*p.target);
        });
        r.add_predictor("seam-impulse",
                        [](const PluginParams& p) { return make_seam_impulse_predictor(p.scale); });
        r.add_predictor("pointwise-nonlinear",
                        [](const PluginParams& p) { return make_pointwise_predictor(p.scale); });
        r.add_predictor("seeded-random", [](const PluginParams& p) {
            return make_seeded_random_predictor(p.seed, p.scale);
        });
        r.add_decoder("identity", [](const PluginParams&) { return make_identity_decoder(); });
        r.add_decoder("reference-conv", [](const PluginParams&) {
            return make_reference_conv_decoder(ConvKernel::skewed(2), 1);
        });
        r.add_decoder("reference-conv-x2", [](const PluginParams&) {
            return make_reference_conv_decoder(ConvKernel::skewed(2), 2);
        });
        return r;
    }

private:
    template <class Map>
    static std::vector<std::string> keys(const Map& m) {
        std::vector<std::string> out;
        for (const auto& [k, v] : m) out.push_back(k);
        return out;
    }

    std::map<std::string, PredictorFactory> predictors_;
    std::map<std::string, DecoderFactory> decoders_;
};

}  // namespace panokit

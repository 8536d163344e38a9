#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfdd/init.hpp"
#include "rfdd/nn.hpp"
#include "rfdd/rng.hpp"
#include "rfdd/tensor.hpp"
#include "rfdd/weights.hpp"

namespace rfdd {

struct IrmConfig {
    int hidden_channels = 8;
    int core_kernel = 5;
    float bn_eps = 1e-5f;
    float clamp_lo = 1e-4f;
    float clamp_hi = 1.0f;
    // Test hook: return the input untouched, skipping the whole graph.
    bool identity_bypass = false;
};

// Smooths the Max-RGB illumination map. Graph: a 1x1 entry expansion, a
// CoreBlock (5x5 depthwise, 1x1 pointwise, GELU, BN) joined back residually,
// and a 1x1 exit compression with an output clamp.
inline Tensor irm_forward(const Tensor& illumination, const WeightStore& weights,
                          const IrmConfig& cfg = {}) {
    if (illumination.channels != 1) {
        throw std::invalid_argument("irm_forward: expected a single-channel map, got " +
                                    illumination.shape_str());
    }
    if (cfg.identity_bypass) {
        return illumination;
    }
    const int hc = cfg.hidden_channels;
    const std::uint32_t h = static_cast<std::uint32_t>(hc);
    const std::uint32_t kk = static_cast<std::uint32_t>(cfg.core_kernel);

    const ConvSpec entry_spec{1, hc, 1, 1, 1, true};
    const Tensor x = conv2d(illumination, entry_spec, weights.span("irm.entry.weight", {h, 1, 1, 1}),
                            weights.span("irm.entry.bias", {h}));

    const ConvSpec dw_spec{hc, hc, cfg.core_kernel, 1, hc, true};
    Tensor y = conv2d(x, dw_spec, weights.span("irm.core.dw.weight", {h, 1, kk, kk}),
                      weights.span("irm.core.dw.bias", {h}));
    const ConvSpec pw_spec{hc, hc, 1, 1, 1, true};
    y = conv2d(y, pw_spec, weights.span("irm.core.pw.weight", {h, h, 1, 1}),
               weights.span("irm.core.pw.bias", {h}));
    y = activation(y, Activation::Gelu);
    y = batchnorm_infer(y, weights.span("irm.core.bn.gamma", {h}),
                        weights.span("irm.core.bn.beta", {h}),
                        weights.span("irm.core.bn.running_mean", {h}),
                        weights.span("irm.core.bn.running_var", {h}), cfg.bn_eps);

    // residual join onto the entry-convolved input
    Tensor z = x;
    for (std::size_t i = 0; i < z.data.size(); ++i) z.data[i] += y.data[i];

    const ConvSpec exit_spec{hc, 1, 1, 1, 1, true};
    Tensor out = conv2d(z, exit_spec, weights.span("irm.exit.weight", {1, h, 1, 1}),
                        weights.span("irm.exit.bias", {1}));
    for (float& v : out.data) v = clampf(v, cfg.clamp_lo, cfg.clamp_hi);
    return out;
}

inline void irm_init_weights(WeightStore& store, std::uint64_t seed, const IrmConfig& cfg = {}) {
    SeqRng rng(seed);
    const int hc = cfg.hidden_channels;
    detail::init_conv(store, rng, "irm.entry", hc, 1, 1);
    detail::init_conv(store, rng, "irm.core.dw", hc, 1, cfg.core_kernel);
    detail::init_conv(store, rng, "irm.core.pw", hc, hc, 1);
    detail::init_conv(store, rng, "irm.exit", 1, hc, 1);
    const std::uint32_t h = static_cast<std::uint32_t>(hc);
    store.put("irm.core.bn.gamma", {h}, std::vector<float>(hc, 1.0f));
    store.put("irm.core.bn.beta", {h}, std::vector<float>(hc, 0.0f));
    store.put("irm.core.bn.running_mean", {h}, std::vector<float>(hc, 0.0f));
    store.put("irm.core.bn.running_var", {h}, std::vector<float>(hc, 1.0f));
}

inline WeightStore irm_init_weights(std::uint64_t seed, const IrmConfig& cfg = {}) {
    WeightStore store;
    irm_init_weights(store, seed, cfg);
    return store;
}

}  // namespace rfdd

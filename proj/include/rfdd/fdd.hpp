#pragma once

#include <cstdint>
#include <vector>

#include "rfdd/dct.hpp"
#include "rfdd/init.hpp"
#include "rfdd/nn.hpp"
#include "rfdd/tensor.hpp"
#include "rfdd/weights.hpp"

namespace rfdd {

struct FddConfig {
    int channels = 16;
    int gcm_kernel = 7;
    int gcm_mlp_expand = 2;
    int ansu_noise_kernel = 7;
    int ansu_gate_kernel = 3;
    int acgf_reduction = 4;
    float alpha = 0.25f;
    float beta = 0.5f;

    int acgf_hidden() const {
        const int h = 3 * channels / acgf_reduction;
        return h < 4 ? 4 : h;
    }
};

// Binary partition of the spectrum plane. low + mid + high covers every
// coefficient exactly once.
struct BandMasks {
    int height = 0;
    int width = 0;
    float alpha = 0.0f;
    float beta = 0.0f;
    std::vector<std::uint8_t> low, mid, high;
};

inline BandMasks band_masks(int height, int width, float alpha, float beta) {
    if (!(alpha > 0.0f && alpha < beta && beta <= 1.0f)) {
        throw std::invalid_argument("band_masks: need 0 < alpha < beta <= 1, got alpha=" +
                                    std::to_string(alpha) + ", beta=" + std::to_string(beta));
    }
    BandMasks m;
    m.height = height;
    m.width = width;
    m.alpha = alpha;
    m.beta = beta;
    const std::size_t n = static_cast<std::size_t>(height) * width;
    m.low.assign(n, 0);
    m.mid.assign(n, 0);
    m.high.assign(n, 0);
    const int low_i = static_cast<int>(std::floor(static_cast<double>(alpha) * height));
    const int low_j = static_cast<int>(std::floor(static_cast<double>(alpha) * width));
    const int high_i = static_cast<int>(std::floor(static_cast<double>(beta) * height));
    const int high_j = static_cast<int>(std::floor(static_cast<double>(beta) * width));
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j) {
            const std::size_t p = static_cast<std::size_t>(i) * width + j;
            if (i >= high_i || j >= high_j) {
                m.high[p] = 1;
            } else if (i < low_i && j < low_j) {
                m.low[p] = 1;
            } else {
                m.mid[p] = 1;
            }
        }
    }
    return m;
}

// The three masked copies of one spectrum.
struct BandSet {
    Tensor low, mid, high;
};

inline BandSet band_split(const Tensor& freq, const BandMasks& masks) {
    if (freq.height != masks.height || freq.width != masks.width) {
        throw std::invalid_argument("band_split: spectrum " + freq.shape_str() +
                                    " does not match mask plane " + std::to_string(masks.height) +
                                    "x" + std::to_string(masks.width));
    }
    BandSet bands{Tensor(freq.channels, freq.height, freq.width),
                  Tensor(freq.channels, freq.height, freq.width),
                  Tensor(freq.channels, freq.height, freq.width)};
    const std::size_t plane = freq.plane_size();
    for (int c = 0; c < freq.channels; ++c) {
        const float* src = freq.plane(c);
        float* lo = bands.low.plane(c);
        float* mi = bands.mid.plane(c);
        float* hi = bands.high.plane(c);
        for (std::size_t p = 0; p < plane; ++p) {
            lo[p] = masks.low[p] ? src[p] : 0.0f;
            mi[p] = masks.mid[p] ? src[p] : 0.0f;
            hi[p] = masks.high[p] ? src[p] : 0.0f;
        }
    }
    return bands;
}

// Low-band expert: three parallel branches (large-kernel depthwise structure
// smoothing, pointwise MLP re-calibration, 1x1 residual) summed onto the input.
inline Tensor gcm_forward(const Tensor& low, const WeightStore& w, const FddConfig& cfg) {
    const int c = cfg.channels;
    const std::uint32_t cu = static_cast<std::uint32_t>(c);
    const std::uint32_t ku = static_cast<std::uint32_t>(cfg.gcm_kernel);
    const int expanded = c * cfg.gcm_mlp_expand;
    const std::uint32_t eu = static_cast<std::uint32_t>(expanded);

    const Tensor dw = conv2d(low, ConvSpec{c, c, cfg.gcm_kernel, 1, c, true},
                             w.span("gcm.dw.weight", {cu, 1, ku, ku}), w.span("gcm.dw.bias", {cu}));
    Tensor pw = conv2d(low, ConvSpec{c, expanded, 1, 1, 1, true},
                       w.span("gcm.pw1.weight", {eu, cu, 1, 1}), w.span("gcm.pw1.bias", {eu}));
    pw = activation(pw, Activation::Gelu);
    pw = conv2d(pw, ConvSpec{expanded, c, 1, 1, 1, true},
                w.span("gcm.pw2.weight", {cu, eu, 1, 1}), w.span("gcm.pw2.bias", {cu}));
    const Tensor res = conv2d(low, ConvSpec{c, c, 1, 1, 1, true},
                              w.span("gcm.res.weight", {cu, cu, 1, 1}), w.span("gcm.res.bias", {cu}));

    Tensor out = low;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] += dw.data[i] + pw.data[i] + res.data[i];
    }
    return out;
}

// Mid-band expert: split gating F1 * gelu(F2), simplified channel attention on
// the gated feature, residual projection back onto the input.
inline Tensor drg_forward(const Tensor& mid, const WeightStore& w, const FddConfig& cfg) {
    const int c = cfg.channels;
    const std::uint32_t cu = static_cast<std::uint32_t>(c);
    const std::uint32_t du = static_cast<std::uint32_t>(2 * c);

    const Tensor expanded = conv2d(mid, ConvSpec{c, 2 * c, 1, 1, 1, true},
                                   w.span("drg.expand.weight", {du, cu, 1, 1}),
                                   w.span("drg.expand.bias", {du}));
    auto [f1, f2] = split_halves(expanded);
    Tensor gated = f1;
    for (std::size_t i = 0; i < gated.data.size(); ++i) {
        gated.data[i] *= gelu(f2.data[i]);
    }

    const std::vector<float> pooled = global_avg_pool(gated);
    std::span<const float> sca_w = w.span("drg.sca.weight", {cu, cu});
    std::span<const float> sca_b = w.span("drg.sca.bias", {cu});
    std::vector<float> scale(static_cast<std::size_t>(c));
    for (int i = 0; i < c; ++i) {
        float acc = sca_b[i];
        for (int j = 0; j < c; ++j) acc += sca_w[static_cast<std::size_t>(i) * c + j] * pooled[j];
        scale[static_cast<std::size_t>(i)] = sigmoid(acc);
    }
    for (int ch = 0; ch < c; ++ch) {
        float* p = gated.plane(ch);
        for (std::size_t i = 0; i < gated.plane_size(); ++i) p[i] *= scale[ch];
    }

    const Tensor proj = conv2d(gated, ConvSpec{c, c, 1, 1, 1, true},
                               w.span("drg.proj.weight", {cu, cu, 1, 1}),
                               w.span("drg.proj.bias", {cu}));
    Tensor out = mid;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += proj.data[i];
    return out;
}

// High-band expert: predict the diffuse noise pattern from the normalized
// input, modulate it with a learned gate, subtract.
inline Tensor ansu_forward(const Tensor& high, const WeightStore& w, const FddConfig& cfg) {
    const int c = cfg.channels;
    const std::uint32_t cu = static_cast<std::uint32_t>(c);
    const std::uint32_t nk = static_cast<std::uint32_t>(cfg.ansu_noise_kernel);
    const std::uint32_t gk = static_cast<std::uint32_t>(cfg.ansu_gate_kernel);

    const Tensor normalized = spatial_normalize(high, 1e-6f);
    Tensor noise = conv2d(normalized, ConvSpec{c, c, cfg.ansu_noise_kernel, 1, c, true},
                          w.span("ansu.noise.dw.weight", {cu, 1, nk, nk}),
                          w.span("ansu.noise.dw.bias", {cu}));
    noise = conv2d(noise, ConvSpec{c, c, 1, 1, 1, true},
                   w.span("ansu.noise.pw.weight", {cu, cu, 1, 1}),
                   w.span("ansu.noise.pw.bias", {cu}));
    const Tensor gate = conv2d(normalized, ConvSpec{c, c, cfg.ansu_gate_kernel, 1, 1, true},
                               w.span("ansu.gate.weight", {cu, cu, gk, gk}),
                               w.span("ansu.gate.bias", {cu}));

    Tensor out = high;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        out.data[i] -= noise.data[i] * sigmoid(gate.data[i]);
    }
    return out;
}

// Per-channel fusion gates in (0, 2), derived from the pooled cross-band
// context through a two-layer generator.
inline std::vector<float> acgf_gates(const BandSet& bands, const WeightStore& w,
                                     const FddConfig& cfg) {
    const int c = cfg.channels;
    const int hidden = cfg.acgf_hidden();
    const std::uint32_t tcu = static_cast<std::uint32_t>(3 * c);
    const std::uint32_t hu = static_cast<std::uint32_t>(hidden);

    const Tensor stacked = concat_channels(bands.low, bands.mid, bands.high);
    const std::vector<float> context = global_avg_pool(stacked);

    std::span<const float> w1 = w.span("acgf.fc1.weight", {hu, tcu});
    std::span<const float> b1 = w.span("acgf.fc1.bias", {hu});
    std::vector<float> mid(static_cast<std::size_t>(hidden));
    for (int i = 0; i < hidden; ++i) {
        float acc = b1[i];
        for (int j = 0; j < 3 * c; ++j) {
            acc += w1[static_cast<std::size_t>(i) * (3 * c) + j] * context[j];
        }
        mid[static_cast<std::size_t>(i)] = gelu(acc);
    }

    std::span<const float> w2 = w.span("acgf.fc2.weight", {tcu, hu});
    std::span<const float> b2 = w.span("acgf.fc2.bias", {tcu});
    std::vector<float> gates(static_cast<std::size_t>(3 * c));
    for (int i = 0; i < 3 * c; ++i) {
        float acc = b2[i];
        for (int j = 0; j < hidden; ++j) {
            acc += w2[static_cast<std::size_t>(i) * hidden + j] * mid[j];
        }
        gates[static_cast<std::size_t>(i)] = 2.0f * sigmoid(acc);
    }
    return gates;
}

// Channel-wise weighted summation of the processed bands.
inline Tensor acgf_fuse(const BandSet& bands, const WeightStore& w, const FddConfig& cfg) {
    require_same_shape(bands.low, bands.mid, "acgf_fuse");
    require_same_shape(bands.low, bands.high, "acgf_fuse");
    const int c = cfg.channels;
    const std::vector<float> gates = acgf_gates(bands, w, cfg);

    Tensor fused(bands.low.channels, bands.low.height, bands.low.width);
    for (int ch = 0; ch < c; ++ch) {
        const float g_low = gates[static_cast<std::size_t>(ch)];
        const float g_mid = gates[static_cast<std::size_t>(c + ch)];
        const float g_high = gates[static_cast<std::size_t>(2 * c + ch)];
        const float* lo = bands.low.plane(ch);
        const float* mi = bands.mid.plane(ch);
        const float* hi = bands.high.plane(ch);
        float* dst = fused.plane(ch);
        for (std::size_t p = 0; p < fused.plane_size(); ++p) {
            dst[p] = lo[p] * g_low + mi[p] * g_mid + hi[p] * g_high;
        }
    }
    return fused;
}

// Full frequency-domain refinement: project, split, run the experts, fuse,
// reconstruct, add back residually.
inline Tensor fdd_apply(const Tensor& spatial, const WeightStore& w, const FddConfig& cfg) {
    if (spatial.channels != cfg.channels) {
        throw std::invalid_argument("fdd_apply: input has " + std::to_string(spatial.channels) +
                                    " channels, cfg.channels is " + std::to_string(cfg.channels));
    }
    const Tensor freq = dct2(spatial);
    const BandMasks masks = band_masks(freq.height, freq.width, cfg.alpha, cfg.beta);
    BandSet bands = band_split(freq, masks);
    bands.low = gcm_forward(bands.low, w, cfg);
    bands.mid = drg_forward(bands.mid, w, cfg);
    bands.high = ansu_forward(bands.high, w, cfg);
    const Tensor fused = acgf_fuse(bands, w, cfg);
    const Tensor refined = idct2(fused);

    Tensor out = spatial;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += refined.data[i];
    return out;
}

inline void fdd_init_weights(WeightStore& store, std::uint64_t seed, const FddConfig& cfg = {}) {
    SeqRng rng(seed);
    const int c = cfg.channels;
    detail::init_conv(store, rng, "gcm.dw", c, 1, cfg.gcm_kernel);
    detail::init_conv(store, rng, "gcm.pw1", c * cfg.gcm_mlp_expand, c, 1);
    detail::init_conv(store, rng, "gcm.pw2", c, c * cfg.gcm_mlp_expand, 1);
    detail::init_conv(store, rng, "gcm.res", c, c, 1);
    detail::init_conv(store, rng, "drg.expand", 2 * c, c, 1);
    detail::init_fc(store, rng, "drg.sca", c, c);
    detail::init_conv(store, rng, "drg.proj", c, c, 1);
    detail::init_conv(store, rng, "ansu.noise.dw", c, 1, cfg.ansu_noise_kernel);
    detail::init_conv(store, rng, "ansu.noise.pw", c, c, 1);
    detail::init_conv(store, rng, "ansu.gate", c, c, cfg.ansu_gate_kernel);
    detail::init_fc(store, rng, "acgf.fc1", cfg.acgf_hidden(), 3 * c);
    detail::init_fc(store, rng, "acgf.fc2", 3 * c, cfg.acgf_hidden());
}

}  // namespace rfdd

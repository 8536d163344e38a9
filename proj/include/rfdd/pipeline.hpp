#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "rfdd/color.hpp"
#include "rfdd/fdd.hpp"
#include "rfdd/irm.hpp"
#include "rfdd/nn.hpp"
#include "rfdd/tensor.hpp"
#include "rfdd/weights.hpp"

namespace rfdd {

// All pipeline hyperparameters. lambda_perceptual stays 0: no perceptual
// network ships with this library.
struct EnhanceConfig {
    int feature_channels = 16;
    int downsample_levels = 2;
    IrmConfig irm;
    FddConfig fdd;
    float k = 1.0f;
    float lambda_aux = 0.3f;
    float lambda_hvi = 1.0f;
    float lambda_l1 = 1.0f;
    float lambda_perceptual = 0.0f;
    float lambda_edge = 0.1f;
    float lambda_ssim = 0.5f;

    int spatial_multiple() const { return 1 << downsample_levels; }
};

namespace detail {

inline Tensor upsample_nearest2(const Tensor& input) {
    Tensor out(input.channels, input.height * 2, input.width * 2);
    for (int c = 0; c < input.channels; ++c) {
        const float* src = input.plane(c);
        float* dst = out.plane(c);
        for (int y = 0; y < out.height; ++y) {
            const float* src_row = src + static_cast<std::size_t>(y / 2) * input.width;
            float* dst_row = dst + static_cast<std::size_t>(y) * out.width;
            for (int x = 0; x < out.width; ++x) {
                dst_row[x] = src_row[x / 2];
            }
        }
    }
    return out;
}

inline Tensor channel_mean(const Tensor& input) {
    Tensor out(1, input.height, input.width);
    const double inv = 1.0 / input.channels;
    for (std::size_t p = 0; p < out.plane_size(); ++p) {
        double acc = 0.0;
        for (int c = 0; c < input.channels; ++c) {
            acc += input.data[static_cast<std::size_t>(c) * input.plane_size() + p];
        }
        out.data[p] = static_cast<float>(acc * inv);
    }
    return out;
}

}  // namespace detail

// Stand-in encoder for the host network: stride-2 3x3 convolutions with GELU,
// widths doubling up to feature_channels.
inline Tensor backbone_encode(const Tensor& planes, const WeightStore& w, const EnhanceConfig& cfg,
                              const std::string& branch) {
    const int levels = cfg.downsample_levels;
    const int multiple = cfg.spatial_multiple();
    if (planes.height % multiple != 0 || planes.width % multiple != 0) {
        throw std::invalid_argument("backbone_encode: spatial dims " + planes.shape_str() +
                                    " must be divisible by " + std::to_string(multiple) +
                                    "; pad the input to the next multiple first");
    }
    Tensor x = planes;
    int in_c = planes.channels;
    for (int level = 0; level < levels; ++level) {
        const int out_c = cfg.feature_channels >> (levels - 1 - level);
        const std::string name = branch + ".enc" + std::to_string(level);
        x = conv2d(x, ConvSpec{in_c, out_c, 3, 2, 1, true},
                   w.span(name + ".weight",
                          {static_cast<std::uint32_t>(out_c), static_cast<std::uint32_t>(in_c), 3, 3}),
                   w.span(name + ".bias", {static_cast<std::uint32_t>(out_c)}));
        x = activation(x, Activation::Gelu);
        in_c = out_c;
    }
    return x;
}

// Mirror of the encoder: nearest-neighbor upsampling with 3x3 convolutions at
// feature width, then a 1x1 head down to the branch's plane count.
inline Tensor backbone_decode(const Tensor& features, const WeightStore& w,
                              const EnhanceConfig& cfg, const std::string& branch,
                              int out_planes) {
    const int fc = cfg.feature_channels;
    const std::uint32_t fcu = static_cast<std::uint32_t>(fc);
    if (features.channels != fc) {
        throw std::invalid_argument("backbone_decode: features have " +
                                    std::to_string(features.channels) + " channels, expected " +
                                    std::to_string(fc));
    }
    Tensor x = features;
    for (int level = 0; level < cfg.downsample_levels; ++level) {
        const std::string name = branch + ".dec" + std::to_string(level);
        x = detail::upsample_nearest2(x);
        x = conv2d(x, ConvSpec{fc, fc, 3, 1, 1, true}, w.span(name + ".weight", {fcu, fcu, 3, 3}),
                   w.span(name + ".bias", {fcu}));
        x = activation(x, Activation::Gelu);
    }
    return conv2d(x, ConvSpec{fc, out_planes, 1, 1, 1, true},
                  w.span(branch + ".head.weight",
                         {static_cast<std::uint32_t>(out_planes), fcu, 1, 1}),
                  w.span(branch + ".head.bias", {static_cast<std::uint32_t>(out_planes)}));
}

// Full enhancement graph: RHVI decoupling, dual-branch refinement with FDD at
// the chrominance bottleneck, inverse transform back to sRGB.
inline RgbImage enhance(const RgbImage& img, const WeightStore& w, const EnhanceConfig& cfg) {
    auto [hvi, refined] = rhvi_forward(img, w, cfg.k, cfg.irm);

    // chrominance branch
    const Tensor chroma_in = concat_channels(hvi.h, hvi.v);
    Tensor features = backbone_encode(chroma_in, w, cfg, "chroma");
    features = fdd_apply(features, w, cfg.fdd);
    const Tensor chroma_delta = backbone_decode(features, w, cfg, "chroma", 2);
    Tensor h_out = hvi.h;
    Tensor v_out = hvi.v;
    for (std::size_t p = 0; p < h_out.plane_size(); ++p) {
        h_out.data[p] += chroma_delta.data[p];
        v_out.data[p] += chroma_delta.data[chroma_delta.plane_size() + p];
    }

    // luminance branch
    const Tensor luma_features = backbone_encode(refined, w, cfg, "luma");
    const Tensor luma_delta = backbone_decode(luma_features, w, cfg, "luma", 1);
    Tensor i_out = refined;
    for (std::size_t p = 0; p < i_out.plane_size(); ++p) {
        i_out.data[p] = clampf(i_out.data[p] + luma_delta.data[p], cfg.irm.clamp_lo,
                               cfg.irm.clamp_hi);
    }

    RgbImage out = hvi_inverse(HviImage{std::move(h_out), std::move(v_out), std::move(i_out), cfg.k});
    assert_finite(out.planes, "enhance output");
    return out;
}

// Spatial reconstructions of the chrominance bottleneck, one plane per band.
struct BandResponses {
    Tensor low, mid, high;
};

inline BandResponses bands_visualize(const RgbImage& img, const WeightStore& w,
                                     const EnhanceConfig& cfg, bool normalize = true) {
    auto [hvi, refined] = rhvi_forward(img, w, cfg.k, cfg.irm);
    const Tensor chroma_in = concat_channels(hvi.h, hvi.v);
    const Tensor features = backbone_encode(chroma_in, w, cfg, "chroma");
    const Tensor freq = dct2(features);
    const BandMasks masks = band_masks(freq.height, freq.width, cfg.fdd.alpha, cfg.fdd.beta);
    const BandSet bands = band_split(freq, masks);

    BandResponses out{detail::channel_mean(idct2(bands.low)), detail::channel_mean(idct2(bands.mid)),
                      detail::channel_mean(idct2(bands.high))};
    if (normalize) {
        for (Tensor* t : {&out.low, &out.mid, &out.high}) {
            float lo = t->data[0], hi = t->data[0];
            for (float v : t->data) {
                if (v < lo) lo = v;
                if (v > hi) hi = v;
            }
            const float range = hi - lo;
            for (float& v : t->data) {
                v = range > 0.0f ? (v - lo) / range : 0.0f;
            }
        }
    }
    return out;
}

inline WeightStore init_enhance_weights(std::uint64_t seed, const EnhanceConfig& cfg = {}) {
    WeightStore store;
    irm_init_weights(store, seed, cfg.irm);
    fdd_init_weights(store, seed + 1, cfg.fdd);

    const int levels = cfg.downsample_levels;
    const int fc = cfg.feature_channels;
    const struct {
        const char* name;
        int planes;
    } branches[] = {{"chroma", 2}, {"luma", 1}};
    std::uint64_t branch_seed = seed + 2;
    for (const auto& branch : branches) {
        SeqRng rng(branch_seed++);
        int in_c = branch.planes;
        for (int level = 0; level < levels; ++level) {
            const int out_c = fc >> (levels - 1 - level);
            detail::init_conv(store, rng, std::string(branch.name) + ".enc" + std::to_string(level),
                              out_c, in_c, 3);
            in_c = out_c;
        }
        for (int level = 0; level < levels; ++level) {
            detail::init_conv(store, rng, std::string(branch.name) + ".dec" + std::to_string(level),
                              fc, fc, 3);
        }
        detail::init_conv(store, rng, std::string(branch.name) + ".head", branch.planes, fc, 1);
    }
    return store;
}

// Edge-replicate padding on the bottom/right up to the next multiple.
inline Tensor pad_to_multiple(const Tensor& input, int multiple) {
    const int h = (input.height + multiple - 1) / multiple * multiple;
    const int w = (input.width + multiple - 1) / multiple * multiple;
    if (h == input.height && w == input.width) return input;
    Tensor out(input.channels, h, w);
    for (int c = 0; c < input.channels; ++c) {
        for (int y = 0; y < h; ++y) {
            const int sy = y < input.height ? y : input.height - 1;
            const float* src_row = input.plane(c) + static_cast<std::size_t>(sy) * input.width;
            float* dst_row = out.plane(c) + static_cast<std::size_t>(y) * w;
            for (int x = 0; x < w; ++x) {
                dst_row[x] = src_row[x < input.width ? x : input.width - 1];
            }
        }
    }
    return out;
}

inline Tensor crop_to(const Tensor& input, int height, int width) {
    if (height > input.height || width > input.width) {
        throw std::invalid_argument("crop_to: target exceeds input size");
    }
    if (height == input.height && width == input.width) return input;
    Tensor out(input.channels, height, width);
    for (int c = 0; c < input.channels; ++c) {
        for (int y = 0; y < height; ++y) {
            const float* src_row = input.plane(c) + static_cast<std::size_t>(y) * input.width;
            std::copy(src_row, src_row + width,
                      out.plane(c) + static_cast<std::size_t>(y) * width);
        }
    }
    return out;
}

}  // namespace rfdd

#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rfdd/tensor.hpp"

namespace rfdd {

// Geometry of a single convolution. Padding is implied: (kernel-1)/2 zeros on
// each border, so stride-1 convolutions preserve the spatial size.
struct ConvSpec {
    int in_channels = 0;
    int out_channels = 0;
    int kernel = 1;   // odd side length
    int stride = 1;   // 1 or 2
    int groups = 1;   // 1 (dense) or in_channels (depthwise)
    bool has_bias = true;

    std::size_t weight_count() const {
        return static_cast<std::size_t>(out_channels) * (in_channels / groups) * kernel * kernel;
    }

    void validate() const {
        if (in_channels <= 0 || out_channels <= 0) {
            throw std::invalid_argument("ConvSpec: channel counts must be positive");
        }
        if (kernel <= 0 || kernel % 2 == 0) {
            throw std::invalid_argument("ConvSpec: kernel must be a positive odd length, got " +
                                        std::to_string(kernel));
        }
        if (stride != 1 && stride != 2) {
            throw std::invalid_argument("ConvSpec: stride must be 1 or 2, got " +
                                        std::to_string(stride));
        }
        if (groups <= 0 || in_channels % groups != 0 || out_channels % groups != 0) {
            throw std::invalid_argument(
                "ConvSpec: groups must divide in_channels and out_channels (groups=" +
                std::to_string(groups) + ", in=" + std::to_string(in_channels) +
                ", out=" + std::to_string(out_channels) + ")");
        }
    }
};

// Zero-padded 2-D convolution with a fixed loop nest: output channel, row,
// column, then input channel and kernel taps. float32 accumulation, so results
// are bit-stable across runs.
//
// weights: (out_channels, in_channels/groups, kernel, kernel) flattened row-major.
// bias: empty or one value per output channel.
inline Tensor conv2d(const Tensor& input, const ConvSpec& spec, std::span<const float> weights,
                     std::span<const float> bias = {}) {
    spec.validate();
    if (input.channels != spec.in_channels) {
        throw std::invalid_argument("conv2d: input has " + std::to_string(input.channels) +
                                    " channels, spec.in_channels is " +
                                    std::to_string(spec.in_channels));
    }
    if (weights.size() != spec.weight_count()) {
        throw std::invalid_argument("conv2d: weight buffer holds " +
                                    std::to_string(weights.size()) + " values, expected " +
                                    std::to_string(spec.weight_count()));
    }
    if (spec.has_bias) {
        if (bias.size() != static_cast<std::size_t>(spec.out_channels)) {
            throw std::invalid_argument("conv2d: bias holds " + std::to_string(bias.size()) +
                                        " values, expected " + std::to_string(spec.out_channels));
        }
    } else if (!bias.empty()) {
        throw std::invalid_argument("conv2d: bias given but spec.has_bias is false");
    }

    const int k = spec.kernel;
    const int pad = (k - 1) / 2;
    const int in_h = input.height;
    const int in_w = input.width;
    const int out_h = (in_h + spec.stride - 1) / spec.stride;
    const int out_w = (in_w + spec.stride - 1) / spec.stride;
    const int group_in = spec.in_channels / spec.groups;
    const int group_out = spec.out_channels / spec.groups;

    Tensor out(spec.out_channels, out_h, out_w);
    for (int oc = 0; oc < spec.out_channels; ++oc) {
        const int group = oc / group_out;
        const int ic_base = group * group_in;
        const float* w_oc = weights.data() + static_cast<std::size_t>(oc) * group_in * k * k;
        const float b = spec.has_bias ? bias[oc] : 0.0f;
        float* out_plane = out.plane(oc);
        for (int oy = 0; oy < out_h; ++oy) {
            const int iy0 = oy * spec.stride - pad;
            for (int ox = 0; ox < out_w; ++ox) {
                const int ix0 = ox * spec.stride - pad;
                float acc = b;
                for (int ci = 0; ci < group_in; ++ci) {
                    const float* in_plane = input.plane(ic_base + ci);
                    const float* w_ci = w_oc + static_cast<std::size_t>(ci) * k * k;
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = iy0 + ky;
                        if (iy < 0 || iy >= in_h) continue;
                        const float* in_row = in_plane + static_cast<std::size_t>(iy) * in_w;
                        const float* w_row = w_ci + static_cast<std::size_t>(ky) * k;
                        for (int kx = 0; kx < k; ++kx) {
                            const int ix = ix0 + kx;
                            if (ix < 0 || ix >= in_w) continue;
                            acc += in_row[ix] * w_row[kx];
                        }
                    }
                }
                out_plane[static_cast<std::size_t>(oy) * out_w + ox] = acc;
            }
        }
    }
    return out;
}

// gelu via the tanh approximation; no erf dependency.
inline float gelu(float x) {
    const double xd = x;
    const double inner = 0.7978845608028654 * (xd + 0.044715 * xd * xd * xd);
    return static_cast<float>(0.5 * xd * (1.0 + std::tanh(inner)));
}

// Numerically stable logistic, clamped into the open interval (0,1) so the
// documented range holds for every finite input.
inline float sigmoid(float x) {
    const double xd = x;
    double v;
    if (xd >= 0.0) {
        v = 1.0 / (1.0 + std::exp(-xd));
    } else {
        const double e = std::exp(xd);
        v = e / (1.0 + e);
    }
    float f = static_cast<float>(v);
    const float lo = std::numeric_limits<float>::denorm_min();
    const float hi = 1.0f - std::numeric_limits<float>::epsilon() / 2.0f;  // nextafter(1, 0)
    return f < lo ? lo : (f > hi ? hi : f);
}

enum class Activation { Gelu, Sigmoid };

inline Tensor activation(const Tensor& input, Activation mode) {
    Tensor out = input;
    if (mode == Activation::Gelu) {
        for (float& v : out.data) v = gelu(v);
    } else {
        for (float& v : out.data) v = sigmoid(v);
    }
    return out;
}

// Inference-mode batch normalization: per-channel affine with frozen statistics.
inline Tensor batchnorm_infer(const Tensor& input, std::span<const float> gamma,
                              std::span<const float> beta, std::span<const float> running_mean,
                              std::span<const float> running_var, float eps) {
    const std::size_t c = static_cast<std::size_t>(input.channels);
    if (gamma.size() != c || beta.size() != c || running_mean.size() != c ||
        running_var.size() != c) {
        throw std::invalid_argument("batchnorm_infer: parameter vectors must have length " +
                                    std::to_string(c));
    }
    for (std::size_t i = 0; i < c; ++i) {
        if (running_var[i] < 0.0f) {
            throw std::invalid_argument("batchnorm_infer: negative variance at channel " +
                                        std::to_string(i));
        }
    }
    Tensor out(input.channels, input.height, input.width);
    for (int ch = 0; ch < input.channels; ++ch) {
        const float scale = gamma[ch] / std::sqrt(running_var[ch] + eps);
        const float shift = beta[ch] - running_mean[ch] * scale;
        const float* src = input.plane(ch);
        float* dst = out.plane(ch);
        for (std::size_t i = 0; i < input.plane_size(); ++i) {
            dst[i] = src[i] * scale + shift;
        }
    }
    return out;
}

// Spatial mean per channel. Accumulates in double with a fixed order; the
// downstream gates need the mean of small planes to better than float noise.
inline std::vector<float> global_avg_pool(const Tensor& input) {
    std::vector<float> pooled(static_cast<std::size_t>(input.channels));
    const double inv = 1.0 / static_cast<double>(input.plane_size());
    for (int c = 0; c < input.channels; ++c) {
        const float* src = input.plane(c);
        double acc = 0.0;
        for (std::size_t i = 0; i < input.plane_size(); ++i) acc += src[i];
        pooled[static_cast<std::size_t>(c)] = static_cast<float>(acc * inv);
    }
    return pooled;
}

// Stacks tensors along the channel axis in argument order.
inline Tensor concat_channels(std::span<const Tensor* const> parts) {
    if (parts.empty()) {
        throw std::invalid_argument("concat_channels: no inputs");
    }
    int total = 0;
    for (const Tensor* t : parts) {
        if (t->height != parts[0]->height || t->width != parts[0]->width) {
            throw std::invalid_argument("concat_channels: spatial mismatch, " +
                                        parts[0]->shape_str() + " vs " + t->shape_str());
        }
        total += t->channels;
    }
    Tensor out(total, parts[0]->height, parts[0]->width);
    std::size_t offset = 0;
    for (const Tensor* t : parts) {
        std::copy(t->data.begin(), t->data.end(), out.data.begin() + offset);
        offset += t->data.size();
    }
    return out;
}

inline Tensor concat_channels(const Tensor& a, const Tensor& b) {
    const Tensor* parts[] = {&a, &b};
    return concat_channels(std::span<const Tensor* const>(parts, 2));
}

inline Tensor concat_channels(const Tensor& a, const Tensor& b, const Tensor& c) {
    const Tensor* parts[] = {&a, &b, &c};
    return concat_channels(std::span<const Tensor* const>(parts, 3));
}

// First C/2 channels, then the last C/2.
inline std::pair<Tensor, Tensor> split_halves(const Tensor& input) {
    if (input.channels % 2 != 0) {
        throw std::invalid_argument("split_halves: channel count " +
                                    std::to_string(input.channels) + " is odd");
    }
    const int half = input.channels / 2;
    Tensor first(half, input.height, input.width);
    Tensor second(half, input.height, input.width);
    std::copy(input.data.begin(), input.data.begin() + first.data.size(), first.data.begin());
    std::copy(input.data.begin() + first.data.size(), input.data.end(), second.data.begin());
    return {std::move(first), std::move(second)};
}

// Per-channel standardization over spatial positions: (x - mean) / sqrt(var + eps).
// Two-pass statistics in double so a constant channel maps to exact zeros.
inline Tensor spatial_normalize(const Tensor& input, float eps) {
    Tensor out(input.channels, input.height, input.width);
    const std::size_t n = input.plane_size();
    const double inv = 1.0 / static_cast<double>(n);
    for (int c = 0; c < input.channels; ++c) {
        const float* src = input.plane(c);
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += src[i];
        mean *= inv;
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = src[i] - mean;
            var += d * d;
        }
        var *= inv;
        const double scale = 1.0 / std::sqrt(var + static_cast<double>(eps));
        float* dst = out.plane(c);
        for (std::size_t i = 0; i < n; ++i) {
            dst[i] = static_cast<float>((src[i] - mean) * scale);
        }
    }
    return out;
}

}  // namespace rfdd

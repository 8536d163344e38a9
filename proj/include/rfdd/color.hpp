#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "rfdd/irm.hpp"
#include "rfdd/tensor.hpp"
#include "rfdd/weights.hpp"

namespace rfdd {

// sRGB image: 3 planes in R, G, B order, values in [0, 1].
struct RgbImage {
    Tensor planes;

    static RgbImage ingest(Tensor raw) {
        if (raw.channels != 3) {
            throw std::invalid_argument("RgbImage: expected 3 channels, got " + raw.shape_str());
        }
        for (float& v : raw.data) v = clampf(v, 0.0f, 1.0f);
        return RgbImage{std::move(raw)};
    }

    int height() const { return planes.height; }
    int width() const { return planes.width; }
};

// Max-RGB illumination estimate: per-pixel channel maximum.
inline Tensor max_rgb(const Tensor& rgb) {
    if (rgb.channels != 3) {
        throw std::invalid_argument("max_rgb: expected 3 channels, got " + rgb.shape_str());
    }
    Tensor out(1, rgb.height, rgb.width);
    const float* r = rgb.plane(0);
    const float* g = rgb.plane(1);
    const float* b = rgb.plane(2);
    float* dst = out.plane(0);
    for (std::size_t i = 0; i < out.plane_size(); ++i) {
        float m = r[i] > g[i] ? r[i] : g[i];
        dst[i] = m > b[i] ? m : b[i];
    }
    return out;
}

inline Tensor max_rgb(const RgbImage& img) { return max_rgb(img.planes); }

// Per-pixel difference between noisy and clean Max-RGB maps plus summary
// statistics. Individual pixels may go negative; only the expectation is
// non-negative.
struct BiasReport {
    Tensor bias_map;
    float mean_bias = 0.0f;
    float positive_fraction = 0.0f;
    float max_bias = 0.0f;
};

// Works on raw 3-channel tensors: noisy observations legitimately fall
// outside [0, 1], so no ingest clamp is applied here.
inline BiasReport noise_bias(const Tensor& clean, const Tensor& noisy) {
    require_same_shape(clean, noisy, "noise_bias");
    const Tensor clean_max = max_rgb(clean);
    const Tensor noisy_max = max_rgb(noisy);

    BiasReport report;
    report.bias_map = Tensor(1, clean.height, clean.width);
    const std::size_t n = report.bias_map.plane_size();
    double sum = 0.0;
    std::size_t positive = 0;
    float max_bias = -std::numeric_limits<float>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const float d = noisy_max.data[i] - clean_max.data[i];
        report.bias_map.data[i] = d;
        sum += d;
        if (d > 0.0f) ++positive;
        if (d > max_bias) max_bias = d;
    }
    report.mean_bias = static_cast<float>(sum / static_cast<double>(n));
    report.positive_fraction = static_cast<float>(static_cast<double>(positive) / n);
    report.max_bias = max_bias;
    return report;
}

// Luminance plane I in [0,1] plus the two chrominance planes H, V in [-1,1].
// k is the density parameter of the intensity-collapse radius.
struct HviImage {
    Tensor h;
    Tensor v;
    Tensor i;
    float k = 1.0f;
};

// Radius of the chrominance disc at a given luminance: chrominance collapses
// toward zero as the pixel darkens.
inline double collapse_radius(double intensity, double k) {
    return std::pow(std::sin(1.5707963267948966 * intensity) + 1e-8, 1.0 / k);
}

namespace detail {

// Hexcone hue in [0,1) and saturation in [0,1]; h = 0 when max == min.
inline void rgb_to_hue_sat(double r, double g, double b, double& hue, double& sat) {
    const double mx = std::max(r, std::max(g, b));
    const double mn = std::min(r, std::min(g, b));
    const double delta = mx - mn;
    sat = delta / std::max(mx, 1e-8);
    if (delta <= 0.0) {
        hue = 0.0;
        return;
    }
    double h;
    if (mx == r) {
        h = (g - b) / delta;
        if (h < 0.0) h += 6.0;
    } else if (mx == g) {
        h = (b - r) / delta + 2.0;
    } else {
        h = (r - g) / delta + 4.0;
    }
    hue = h / 6.0;
    if (hue >= 1.0) hue -= 1.0;
}

// Standard hexcone HSV -> RGB with value = luminance.
inline void hue_sat_value_to_rgb(double hue, double sat, double value, double& r, double& g,
                                 double& b) {
    if (sat <= 0.0) {
        r = g = b = value;
        return;
    }
    double h6 = hue * 6.0;
    if (h6 >= 6.0) h6 -= 6.0;
    const int sector = std::min(static_cast<int>(h6), 5);
    const double f = h6 - sector;
    const double p = value * (1.0 - sat);
    const double q = value * (1.0 - sat * f);
    const double t = value * (1.0 - sat * (1.0 - f));
    switch (sector) {
        case 0: r = value; g = t; b = p; break;
        case 1: r = q; g = value; b = p; break;
        case 2: r = p; g = value; b = t; break;
        case 3: r = p; g = q; b = value; break;
        case 4: r = t; g = p; b = value; break;
        default: r = value; g = p; b = q; break;
    }
}

// Shared forward core: hue/saturation from the raw RGB pixel, radius and
// luminance from the supplied I plane.
inline HviImage hvi_from_luminance(const RgbImage& img, const Tensor& luminance, float k) {
    if (k <= 0.0f) {
        throw std::invalid_argument("hvi transform: k must be positive");
    }
    HviImage out;
    out.k = k;
    out.h = Tensor(1, img.height(), img.width());
    out.v = Tensor(1, img.height(), img.width());
    out.i = luminance;
    const float* r = img.planes.plane(0);
    const float* g = img.planes.plane(1);
    const float* b = img.planes.plane(2);
    const float* lum = luminance.plane(0);
    for (std::size_t p = 0; p < out.h.plane_size(); ++p) {
        double hue, sat;
        rgb_to_hue_sat(r[p], g[p], b[p], hue, sat);
        const double radius = collapse_radius(lum[p], k);
        const double angle = 6.283185307179586 * hue;
        out.h.data[p] = static_cast<float>(radius * sat * std::cos(angle));
        out.v.data[p] = static_cast<float>(radius * sat * std::sin(angle));
    }
    return out;
}

}  // namespace detail

// Polar luminance-chrominance decomposition with Max-RGB luminance.
inline HviImage hvi_forward(const RgbImage& img, float k) {
    return detail::hvi_from_luminance(img, max_rgb(img), k);
}

inline RgbImage hvi_inverse(const HviImage& hvi) {
    require_same_shape(hvi.h, hvi.v, "hvi_inverse");
    require_same_shape(hvi.h, hvi.i, "hvi_inverse");
    Tensor rgb(3, hvi.h.height, hvi.h.width);
    float* r = rgb.plane(0);
    float* g = rgb.plane(1);
    float* b = rgb.plane(2);
    for (std::size_t p = 0; p < hvi.h.plane_size(); ++p) {
        const double hh = hvi.h.data[p];
        const double vv = hvi.v.data[p];
        const double lum = hvi.i.data[p];
        const double radius = collapse_radius(lum, hvi.k);
        double sat = std::sqrt(hh * hh + vv * vv) / std::max(radius, 1e-8);
        sat = std::min(std::max(sat, 0.0), 1.0);
        double hue = 0.0;
        if (hh != 0.0 || vv != 0.0) {
            hue = std::atan2(vv, hh) / 6.283185307179586;
            if (hue < 0.0) hue += 1.0;
            if (hue >= 1.0) hue -= 1.0;
        }
        double rr, gg, bb;
        detail::hue_sat_value_to_rgb(hue, sat, lum, rr, gg, bb);
        r[p] = clampf(static_cast<float>(rr), 0.0f, 1.0f);
        g[p] = clampf(static_cast<float>(gg), 0.0f, 1.0f);
        b[p] = clampf(static_cast<float>(bb), 0.0f, 1.0f);
    }
    return RgbImage{std::move(rgb)};
}

// Robust variant: the luminance plane is refined by the IRM before the
// chrominance geometry is built on it. Hue and saturation still come from the
// raw pixel. Returns the transform and the refined map.
inline std::pair<HviImage, Tensor> rhvi_forward(const RgbImage& img, const WeightStore& irm_weights,
                                                float k, const IrmConfig& cfg = {}) {
    Tensor refined = irm_forward(max_rgb(img), irm_weights, cfg);
    HviImage hvi = detail::hvi_from_luminance(img, refined, k);
    return {std::move(hvi), std::move(refined)};
}

}  // namespace rfdd

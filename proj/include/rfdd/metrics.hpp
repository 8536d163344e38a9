#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "rfdd/color.hpp"
#include "rfdd/nn.hpp"
#include "rfdd/pipeline.hpp"
#include "rfdd/tensor.hpp"

namespace rfdd {

inline double mean_abs_diff(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mean_abs_diff");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        acc += std::abs(static_cast<double>(a.data[i]) - b.data[i]);
    }
    return acc / static_cast<double>(a.data.size());
}

// Peak signal-to-noise ratio against peak 1.0, capped at 99 dB so identical
// images do not produce infinities in reports.
inline double psnr(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "psnr");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - b.data[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.data.size());
    if (mse <= 0.0) return 99.0;
    const double value = 10.0 * std::log10(1.0 / mse);
    return value > 99.0 ? 99.0 : value;
}

inline double psnr(const RgbImage& a, const RgbImage& b) { return psnr(a.planes, b.planes); }

namespace detail {

inline std::vector<double> gaussian_window_11() {
    // 11x11, sigma = 1.5, normalized to sum 1
    std::vector<double> win(121);
    double sum = 0.0;
    for (int y = 0; y < 11; ++y) {
        for (int x = 0; x < 11; ++x) {
            const double dy = y - 5;
            const double dx = x - 5;
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * 1.5 * 1.5));
            win[static_cast<std::size_t>(y) * 11 + x] = v;
            sum += v;
        }
    }
    for (double& v : win) v /= sum;
    return win;
}

}  // namespace detail

// Mean structural similarity, 11x11 Gaussian window (sigma 1.5), computed on
// interior windows per channel and averaged. Identical inputs give exactly 1.
inline double ssim(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "ssim");
    if (a.height < 11 || a.width < 11) {
        throw std::invalid_argument("ssim: spatial dims must be at least 11, got " +
                                    a.shape_str());
    }
    constexpr double kC1 = 0.01 * 0.01;
    constexpr double kC2 = 0.03 * 0.03;
    const std::vector<double> win = detail::gaussian_window_11();
    const int out_h = a.height - 10;
    const int out_w = a.width - 10;

    double channel_sum = 0.0;
    for (int c = 0; c < a.channels; ++c) {
        const float* pa = a.plane(c);
        const float* pb = b.plane(c);
        double acc = 0.0;
        for (int y = 0; y < out_h; ++y) {
            for (int x = 0; x < out_w; ++x) {
                double mu_a = 0.0, mu_b = 0.0, aa = 0.0, bb = 0.0, ab = 0.0;
                for (int wy = 0; wy < 11; ++wy) {
                    const float* ra = pa + static_cast<std::size_t>(y + wy) * a.width + x;
                    const float* rb = pb + static_cast<std::size_t>(y + wy) * a.width + x;
                    const double* wr = win.data() + static_cast<std::size_t>(wy) * 11;
                    for (int wx = 0; wx < 11; ++wx) {
                        const double va = ra[wx];
                        const double vb = rb[wx];
                        const double wv = wr[wx];
                        mu_a += wv * va;
                        mu_b += wv * vb;
                        aa += wv * va * va;
                        bb += wv * vb * vb;
                        ab += wv * va * vb;
                    }
                }
                const double var_a = aa - mu_a * mu_a;
                const double var_b = bb - mu_b * mu_b;
                const double cov = ab - mu_a * mu_b;
                acc += ((2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2)) /
                       ((mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2));
            }
        }
        channel_sum += acc / (static_cast<double>(out_h) * out_w);
    }
    return channel_sum / a.channels;
}

inline double ssim(const RgbImage& a, const RgbImage& b) { return ssim(a.planes, b.planes); }

namespace detail {

// Sobel gradient magnitude on interior pixels; borders are excluded so
// constant images are exactly gradient-free.
inline Tensor sobel_magnitude(const Tensor& img) {
    if (img.height < 3 || img.width < 3) {
        return Tensor(img.channels, 1, 1, 0.0f);
    }
    Tensor out(img.channels, img.height - 2, img.width - 2);
    for (int c = 0; c < img.channels; ++c) {
        const float* p = img.plane(c);
        float* dst = out.plane(c);
        const int w = img.width;
        for (int y = 1; y < img.height - 1; ++y) {
            for (int x = 1; x < img.width - 1; ++x) {
                const float* r0 = p + static_cast<std::size_t>(y - 1) * w + x;
                const float* r1 = p + static_cast<std::size_t>(y) * w + x;
                const float* r2 = p + static_cast<std::size_t>(y + 1) * w + x;
                const double gx = (r0[1] - r0[-1]) + 2.0 * (r1[1] - r1[-1]) + (r2[1] - r2[-1]);
                const double gy = (r2[-1] - r0[-1]) + 2.0 * (r2[0] - r0[0]) + (r2[1] - r0[1]);
                dst[static_cast<std::size_t>(y - 1) * out.width + (x - 1)] =
                    static_cast<float>(std::sqrt(gx * gx + gy * gy));
            }
        }
    }
    return out;
}

}  // namespace detail

// Mean absolute difference between Sobel gradient magnitudes.
inline double edge_loss(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "edge_loss");
    return mean_abs_diff(detail::sobel_magnitude(a), detail::sobel_magnitude(b));
}

inline double edge_loss(const RgbImage& a, const RgbImage& b) {
    return edge_loss(a.planes, b.planes);
}

struct LossBreakdown {
    float l1 = 0.0f;
    float edge = 0.0f;
    float ssim_loss = 0.0f;
    float hvi_l1 = 0.0f;
    float hvi_edge = 0.0f;
    float hvi_ssim = 0.0f;
    float aux = 0.0f;
    float total = 0.0f;
};

// Composite objective: L1 + edge + SSIM supervision in both sRGB and HVI
// space, plus the auxiliary illumination term against the target's Max-RGB.
// No perceptual term; that weight is fixed at zero.
inline LossBreakdown loss_total(const RgbImage& pred, const RgbImage& gt, const Tensor& i_refined,
                                const EnhanceConfig& cfg, float k) {
    require_same_shape(pred.planes, gt.planes, "loss_total");
    const HviImage hvi_pred = hvi_forward(pred, k);
    const HviImage hvi_gt = hvi_forward(gt, k);
    const Tensor hp = concat_channels(hvi_pred.h, hvi_pred.v, hvi_pred.i);
    const Tensor hg = concat_channels(hvi_gt.h, hvi_gt.v, hvi_gt.i);

    LossBreakdown out;
    out.l1 = static_cast<float>(mean_abs_diff(pred.planes, gt.planes));
    out.edge = static_cast<float>(edge_loss(pred, gt));
    out.ssim_loss = static_cast<float>(1.0 - ssim(pred, gt));
    out.hvi_l1 = static_cast<float>(mean_abs_diff(hp, hg));
    out.hvi_edge = static_cast<float>(edge_loss(hp, hg));
    out.hvi_ssim = static_cast<float>(1.0 - ssim(hp, hg));
    out.aux = static_cast<float>(mean_abs_diff(i_refined, max_rgb(gt)));

    const double srgb = static_cast<double>(cfg.lambda_l1) * out.l1 +
                        static_cast<double>(cfg.lambda_edge) * out.edge +
                        static_cast<double>(cfg.lambda_ssim) * out.ssim_loss;
    const double hvi = static_cast<double>(cfg.lambda_l1) * out.hvi_l1 +
                       static_cast<double>(cfg.lambda_edge) * out.hvi_edge +
                       static_cast<double>(cfg.lambda_ssim) * out.hvi_ssim;
    out.total = static_cast<float>(srgb + static_cast<double>(cfg.lambda_hvi) * hvi +
                                   static_cast<double>(cfg.lambda_aux) * out.aux);
    return out;
}

// Central differences of a scalar function along a direction, at step h and
// h/2. The caller compares the two estimates; disagreement flags a rough or
// mis-wired loss surface.
inline std::pair<double, double> fd_gradient_check(
    const std::function<double(const std::vector<double>&)>& fn, const std::vector<double>& point,
    const std::vector<double>& direction, double h) {
    if (h <= 0.0) {
        throw std::invalid_argument("fd_gradient_check: step must be positive");
    }
    if (point.size() != direction.size()) {
        throw std::invalid_argument("fd_gradient_check: point and direction sizes differ");
    }
    auto derivative = [&](double step) {
        std::vector<double> forward = point;
        std::vector<double> backward = point;
        for (std::size_t i = 0; i < point.size(); ++i) {
            forward[i] += step * direction[i];
            backward[i] -= step * direction[i];
        }
        const double fp = fn(forward);
        const double fm = fn(backward);
        if (!std::isfinite(fp) || !std::isfinite(fm)) {
            throw std::runtime_error("fd_gradient_check: non-finite function evaluation");
        }
        return (fp - fm) / (2.0 * step);
    };
    return {derivative(h), derivative(h / 2.0)};
}

}  // namespace rfdd

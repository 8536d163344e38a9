#pragma once

#include <cmath>
#include <vector>

#include "rfdd/tensor.hpp"

namespace rfdd {

namespace detail {

inline constexpr double kPi = 3.14159265358979323846;

// Orthonormal DCT-II basis: basis[u][j] = a(u) * cos(pi * (2j+1) * u / (2n)),
// a(0) = sqrt(1/n), a(u>0) = sqrt(2/n).
inline std::vector<double> dct_basis(int n) {
    std::vector<double> basis(static_cast<std::size_t>(n) * n);
    const double a0 = std::sqrt(1.0 / n);
    const double ak = std::sqrt(2.0 / n);
    for (int u = 0; u < n; ++u) {
        const double scale = (u == 0) ? a0 : ak;
        for (int j = 0; j < n; ++j) {
            basis[static_cast<std::size_t>(u) * n + j] =
                scale * std::cos(kPi * (2.0 * j + 1.0) * u / (2.0 * n));
        }
    }
    return basis;
}

}  // namespace detail

// Per-channel orthonormal 2-D DCT-II, computed separably (rows, then columns)
// with double accumulation and a fixed summation order.
inline Tensor dct2(const Tensor& x) {
    const int h = x.height;
    const int w = x.width;
    const std::vector<double> row_basis = detail::dct_basis(w);
    const std::vector<double> col_basis = detail::dct_basis(h);

    Tensor out(x.channels, h, w);
    std::vector<double> tmp(static_cast<std::size_t>(h) * w);
    for (int c = 0; c < x.channels; ++c) {
        const float* src = x.plane(c);
        // rows: tmp[i][v] = sum_j x[i][j] * B_w[v][j]
        for (int i = 0; i < h; ++i) {
            for (int v = 0; v < w; ++v) {
                double acc = 0.0;
                const double* b = row_basis.data() + static_cast<std::size_t>(v) * w;
                const float* row = src + static_cast<std::size_t>(i) * w;
                for (int j = 0; j < w; ++j) acc += row[j] * b[j];
                tmp[static_cast<std::size_t>(i) * w + v] = acc;
            }
        }
        // columns: X[u][v] = sum_i tmp[i][v] * B_h[u][i]
        float* dst = out.plane(c);
        for (int u = 0; u < h; ++u) {
            const double* b = col_basis.data() + static_cast<std::size_t>(u) * h;
            for (int v = 0; v < w; ++v) {
                double acc = 0.0;
                for (int i = 0; i < h; ++i) acc += tmp[static_cast<std::size_t>(i) * w + v] * b[i];
                dst[static_cast<std::size_t>(u) * w + v] = static_cast<float>(acc);
            }
        }
    }
    return out;
}

// Exact inverse of dct2: orthonormal DCT-III, separable.
inline Tensor idct2(const Tensor& spectrum) {
    const int h = spectrum.height;
    const int w = spectrum.width;
    const std::vector<double> row_basis = detail::dct_basis(w);
    const std::vector<double> col_basis = detail::dct_basis(h);

    Tensor out(spectrum.channels, h, w);
    std::vector<double> tmp(static_cast<std::size_t>(h) * w);
    for (int c = 0; c < spectrum.channels; ++c) {
        const float* src = spectrum.plane(c);
        // rows: tmp[u][j] = sum_v X[u][v] * B_w[v][j]
        for (int u = 0; u < h; ++u) {
            const float* row = src + static_cast<std::size_t>(u) * w;
            for (int j = 0; j < w; ++j) {
                double acc = 0.0;
                for (int v = 0; v < w; ++v) {
                    acc += row[v] * row_basis[static_cast<std::size_t>(v) * w + j];
                }
                tmp[static_cast<std::size_t>(u) * w + j] = acc;
            }
        }
        // columns: x[i][j] = sum_u tmp[u][j] * B_h[u][i]
        float* dst = out.plane(c);
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j < w; ++j) {
                double acc = 0.0;
                for (int u = 0; u < h; ++u) {
                    acc += tmp[static_cast<std::size_t>(u) * w + j] *
                           col_basis[static_cast<std::size_t>(u) * h + i];
                }
                dst[static_cast<std::size_t>(i) * w + j] = static_cast<float>(acc);
            }
        }
    }
    return out;
}

// Verification oracle: the literal quadruple-loop definition in 64-bit
// arithmetic. O(H^2 W^2) per channel; test-scale inputs only.
inline Tensor dct2_naive(const Tensor& x) {
    const int h = x.height;
    const int w = x.width;
    const double a0h = std::sqrt(1.0 / h), akh = std::sqrt(2.0 / h);
    const double a0w = std::sqrt(1.0 / w), akw = std::sqrt(2.0 / w);

    Tensor out(x.channels, h, w);
    for (int c = 0; c < x.channels; ++c) {
        const float* src = x.plane(c);
        float* dst = out.plane(c);
        for (int u = 0; u < h; ++u) {
            for (int v = 0; v < w; ++v) {
                double acc = 0.0;
                for (int i = 0; i < h; ++i) {
                    for (int j = 0; j < w; ++j) {
                        acc += src[static_cast<std::size_t>(i) * w + j] *
                               std::cos(detail::kPi * (2.0 * i + 1.0) * u / (2.0 * h)) *
                               std::cos(detail::kPi * (2.0 * j + 1.0) * v / (2.0 * w));
                    }
                }
                const double au = (u == 0) ? a0h : akh;
                const double av = (v == 0) ? a0w : akw;
                dst[static_cast<std::size_t>(u) * w + v] = static_cast<float>(au * av * acc);
            }
        }
    }
    return out;
}

}  // namespace rfdd

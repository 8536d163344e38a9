#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfdd {

// Dense rank-3 float tensor, laid out channel-major: data[(c*height + y)*width + x].
// The single carrier type for images, feature maps and frequency spectra.
struct Tensor {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;

    Tensor() = default;

    Tensor(int c, int h, int w, float fill = 0.0f)
        : channels(c), height(h), width(w) {
        if (c <= 0 || h <= 0 || w <= 0) {
            throw std::invalid_argument(
                "Tensor: dimensions must be positive, got (" + std::to_string(c) + ", " +
                std::to_string(h) + ", " + std::to_string(w) + ")");
        }
        data.assign(static_cast<std::size_t>(c) * h * w, fill);
    }

    std::size_t size() const { return data.size(); }
    std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }

    float& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    float at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }

    float* plane(int c) { return data.data() + static_cast<std::size_t>(c) * plane_size(); }
    const float* plane(int c) const {
        return data.data() + static_cast<std::size_t>(c) * plane_size();
    }

    bool same_shape(const Tensor& other) const {
        return channels == other.channels && height == other.height && width == other.width;
    }

    std::string shape_str() const {
        return "(" + std::to_string(channels) + ", " + std::to_string(height) + ", " +
               std::to_string(width) + ")";
    }
};

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* where) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(where) + ": shape mismatch, " + a.shape_str() +
                                    " vs " + b.shape_str());
    }
}

// Enhancement-path values must stay finite; tests and the pipeline call this
// at trust boundaries.
inline void assert_finite(const Tensor& t, const char* what) {
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        if (!std::isfinite(t.data[i])) {
            throw std::runtime_error(std::string(what) + ": non-finite value at flat index " +
                                     std::to_string(i));
        }
    }
}

inline float clampf(float v, float lo, float hi) {
    return v < lo ? lo : (v > hi ? hi : v);
}

}  // namespace rfdd

#pragma once

#include <cmath>
#include <cstdint>

#include "rfdd/color.hpp"
#include "rfdd/rng.hpp"
#include "rfdd/tensor.hpp"

namespace rfdd {

// Synthetic low-light degradation: gamma dimming plus signal-dependent
// Gaussian noise standing in for the sensor's Poisson-Gaussian mixture.
struct DegradeParams {
    float gamma = 2.2f;
    float dim = 0.2f;
    float sigma_read = 0.02f;
    float sigma_shot = 0.05f;
    std::uint64_t seed = 0;

    void validate() const {
        if (gamma < 1.0f) throw std::invalid_argument("DegradeParams: gamma must be >= 1");
        if (!(dim > 0.0f && dim <= 1.0f)) {
            throw std::invalid_argument("DegradeParams: dim must be in (0, 1]");
        }
        if (sigma_read < 0.0f || sigma_shot < 0.0f) {
            throw std::invalid_argument("DegradeParams: sigma values must be non-negative");
        }
    }
};

// s = dim * clean^gamma, then n ~ N(0, sigma_read^2 + sigma_shot^2 * s) drawn
// from a counter-based stream, clamped to [0, 1].
inline RgbImage degrade(const RgbImage& clean, const DegradeParams& params) {
    params.validate();
    const CounterRng rng(params.seed);
    Tensor out(3, clean.height(), clean.width());
    const double gamma = params.gamma;
    const double dim = params.dim;
    const double read_var = static_cast<double>(params.sigma_read) * params.sigma_read;
    const double shot_var = static_cast<double>(params.sigma_shot) * params.sigma_shot;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const double s = dim * std::pow(static_cast<double>(clean.planes.data[i]), gamma);
        const double sigma = std::sqrt(read_var + shot_var * s);
        const double v = s + sigma * rng.normal(i);
        out.data[i] = clampf(static_cast<float>(v), 0.0f, 1.0f);
    }
    return RgbImage{std::move(out)};
}

}  // namespace rfdd

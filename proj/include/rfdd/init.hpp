#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rfdd/rng.hpp"
#include "rfdd/weights.hpp"

namespace rfdd::detail {

// Draw a conv weight + bias pair, uniform in +-1/sqrt(fan_in).
inline void init_conv(WeightStore& store, SeqRng& rng, const std::string& name, int out_c,
                      int in_per_group, int kernel) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_per_group) * kernel * kernel);
    std::vector<float> w(static_cast<std::size_t>(out_c) * in_per_group * kernel * kernel);
    for (float& v : w) v = static_cast<float>(rng.uniform_signed(bound));
    std::vector<float> b(static_cast<std::size_t>(out_c));
    for (float& v : b) v = static_cast<float>(rng.uniform_signed(bound));
    store.put(name + ".weight",
              {static_cast<std::uint32_t>(out_c), static_cast<std::uint32_t>(in_per_group),
               static_cast<std::uint32_t>(kernel), static_cast<std::uint32_t>(kernel)},
              std::move(w));
    store.put(name + ".bias", {static_cast<std::uint32_t>(out_c)}, std::move(b));
}

// Fully connected layer on pooled vectors, row-major (out_dim, in_dim).
inline void init_fc(WeightStore& store, SeqRng& rng, const std::string& name, int out_dim,
                    int in_dim) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in_dim));
    std::vector<float> w(static_cast<std::size_t>(out_dim) * in_dim);
    for (float& v : w) v = static_cast<float>(rng.uniform_signed(bound));
    std::vector<float> b(static_cast<std::size_t>(out_dim));
    for (float& v : b) v = static_cast<float>(rng.uniform_signed(bound));
    store.put(name + ".weight",
              {static_cast<std::uint32_t>(out_dim), static_cast<std::uint32_t>(in_dim)},
              std::move(w));
    store.put(name + ".bias", {static_cast<std::uint32_t>(out_dim)}, std::move(b));
}

}  // namespace rfdd::detail

#include "selftest.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>

#include "rfdd/rfdd.hpp"

namespace {

using namespace rfdd;

Tensor random_tensor(int c, int h, int w, std::uint64_t seed, float lo = -1.0f, float hi = 1.0f) {
    const CounterRng rng(seed);
    Tensor t(c, h, w);
    for (std::size_t i = 0; i < t.data.size(); ++i) {
        t.data[i] = static_cast<float>(lo + (hi - lo) * rng.uniform(i));
    }
    return t;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        m = std::max(m, std::abs(static_cast<double>(a.data[i]) - b.data[i]));
    }
    return m;
}

double energy(const Tensor& t) {
    double e = 0.0;
    for (float v : t.data) e += static_cast<double>(v) * v;
    return e;
}

bool check_dct() {
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
        const Tensor x = random_tensor(1, 8, 8, seed);
        if (max_abs_diff(dct2(x), dct2_naive(x)) > 1e-5) return false;
        const Tensor spectrum = dct2(x);
        if (std::abs(energy(spectrum) - energy(x)) > 1e-6 * energy(x)) return false;
        if (max_abs_diff(idct2(spectrum), x) > 1e-6) return false;
    }
    return true;
}

bool check_masks() {
    const BandMasks m = band_masks(8, 8, 0.25f, 0.5f);
    int low = 0, mid = 0, high = 0;
    for (std::size_t i = 0; i < m.low.size(); ++i) {
        low += m.low[i];
        mid += m.mid[i];
        high += m.high[i];
        if (m.low[i] + m.mid[i] + m.high[i] != 1) return false;
    }
    if (low != 4 || mid != 12 || high != 48) return false;
    for (auto [h, w] : {std::pair{5, 9}, std::pair{16, 16}}) {
        const BandMasks mm = band_masks(h, w, 0.25f, 0.5f);
        for (std::size_t i = 0; i < mm.low.size(); ++i) {
            if (mm.low[i] + mm.mid[i] + mm.high[i] != 1) return false;
        }
    }
    return true;
}

bool check_nn_primitives() {
    if (gelu(0.0f) != 0.0f) return false;
    if (sigmoid(0.0f) != 0.5f) return false;
    if (std::abs(gelu(10.0f) - 10.0f) > 1e-4f) return false;
    const Tensor x = random_tensor(3, 6, 6, 7);
    std::vector<float> identity(9, 0.0f);
    identity[0] = 1.0f;
    identity[4] = 1.0f;
    identity[8] = 1.0f;
    const Tensor y = conv2d(x, ConvSpec{3, 3, 1, 1, 1, false}, identity);
    return max_abs_diff(x, y) == 0.0;
}

bool check_hvi_round_trip() {
    const Tensor raw = random_tensor(3, 16, 16, 11, 0.05f, 1.0f);
    const RgbImage img = RgbImage::ingest(raw);
    const RgbImage back = hvi_inverse(hvi_forward(img, 1.0f));
    return max_abs_diff(img.planes, back.planes) <= 1e-4;
}

bool check_fdd_neutral() {
    const FddConfig cfg;
    const WeightStore w = zeroed([&] {
        WeightStore s;
        fdd_init_weights(s, 0, cfg);
        return s;
    }());
    const Tensor x = random_tensor(cfg.channels, 16, 16, 13);
    const BandMasks masks = band_masks(16, 16, cfg.alpha, cfg.beta);
    const BandSet bands = band_split(dct2(x), masks);
    if (max_abs_diff(gcm_forward(bands.low, w, cfg), bands.low) != 0.0) return false;
    if (max_abs_diff(drg_forward(bands.mid, w, cfg), bands.mid) != 0.0) return false;
    if (max_abs_diff(ansu_forward(bands.high, w, cfg), bands.high) != 0.0) return false;
    for (float g : acgf_gates(bands, w, cfg)) {
        if (g != 1.0f) return false;
    }
    Tensor doubled = x;
    for (float& v : doubled.data) v *= 2.0f;
    return max_abs_diff(fdd_apply(x, w, cfg), doubled) <= 1e-5;
}

bool check_weight_container() {
    WeightStore store;
    store.put("a.weight", {2, 3}, {1.0f, -2.0f, 3.5f, 0.25f, -0.125f, 4.0f});
    store.put("b.bias", {4}, {0.0f, 1.0f, 2.0f, 3.0f});
    const auto path = std::filesystem::temp_directory_path() / "rfdd_selftest.rfdd";
    save_weights(store, path);
    const WeightStore loaded = load_weights(path);
    bool ok = loaded == store;

    std::ofstream bad(path, std::ios::binary | std::ios::trunc);
    bad << "XFDD";
    bad.close();
    try {
        load_weights(path);
        ok = false;
    } catch (const FormatError&) {
    }
    std::filesystem::remove(path);
    return ok;
}

bool check_loss_zero() {
    const RgbImage img = RgbImage::ingest(random_tensor(3, 16, 16, 17, 0.0f, 1.0f));
    const EnhanceConfig cfg;
    const LossBreakdown loss = loss_total(img, img, max_rgb(img), cfg, cfg.k);
    return loss.l1 == 0.0f && loss.edge == 0.0f && loss.ssim_loss == 0.0f &&
           loss.hvi_l1 == 0.0f && loss.hvi_edge == 0.0f && loss.hvi_ssim == 0.0f &&
           loss.aux == 0.0f && loss.total == 0.0f;
}

}  // namespace

int run_selftest(std::ostream& out) {
    const struct {
        const char* name;
        bool (*fn)();
    } checks[] = {
        {"dct-oracle", check_dct},
        {"band-masks", check_masks},
        {"nn-primitives", check_nn_primitives},
        {"hvi-round-trip", check_hvi_round_trip},
        {"fdd-neutral", check_fdd_neutral},
        {"weight-container", check_weight_container},
        {"loss-zero", check_loss_zero},
    };
    int failures = 0;
    for (const auto& check : checks) {
        bool ok = false;
        try {
            ok = check.fn();
        } catch (const std::exception& e) {
            out << "FAIL " << check.name << " (" << e.what() << ")\n";
            ++failures;
            continue;
        }
        if (ok) {
            out << "ok " << check.name << "\n";
        } else {
            out << "FAIL " << check.name << "\n";
            ++failures;
        }
    }
    return failures;
}

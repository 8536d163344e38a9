#include <gtest/gtest.h>

#include <cmath>

#include "rfdd/color.hpp"
#include "rfdd/rng.hpp"
#include "test_util.hpp"

using namespace rfdd;
using testutil::bitwise_equal;
using testutil::max_abs_diff;
using testutil::random_tensor;
using testutil::total_variation;

namespace {

RgbImage pixel(float r, float g, float b) {
    Tensor t(3, 1, 1);
    t.at(0, 0, 0) = r;
    t.at(1, 0, 0) = g;
    t.at(2, 0, 0) = b;
    return RgbImage::ingest(std::move(t));
}

}  // namespace

TEST(MaxRgb, ExamplePixels) {
    EXPECT_FLOAT_EQ(max_rgb(pixel(0.2f, 0.5f, 0.3f)).data[0], 0.5f);
    EXPECT_FLOAT_EQ(max_rgb(pixel(0.4f, 0.4f, 0.4f)).data[0], 0.4f);
    const RgbImage black = RgbImage::ingest(Tensor(3, 4, 4, 0.0f));
    for (float v : max_rgb(black).data) EXPECT_EQ(v, 0.0f);
}

TEST(MaxRgb, DominatesEveryChannel) {
    const Tensor rgb = random_tensor(3, 9, 7, 5, 0.0f, 1.0f);
    const Tensor mx = max_rgb(rgb);
    for (int y = 0; y < rgb.height; ++y) {
        for (int x = 0; x < rgb.width; ++x) {
            bool attained = false;
            for (int c = 0; c < 3; ++c) {
                EXPECT_GE(mx.at(0, y, x), rgb.at(c, y, x));
                attained = attained || mx.at(0, y, x) == rgb.at(c, y, x);
            }
            EXPECT_TRUE(attained);
        }
    }
}

TEST(NoiseBias, PerPixelArithmetic) {
    const RgbImage clean = pixel(0.1f, 0.2f, 0.3f);
    const RgbImage spike = pixel(0.6f, 0.2f, 0.3f);
    EXPECT_NEAR(noise_bias(clean.planes, spike.planes).bias_map.data[0], 0.3f, 1e-7f);

    const BiasReport same = noise_bias(clean.planes, clean.planes);
    EXPECT_EQ(same.bias_map.data[0], 0.0f);
    EXPECT_EQ(same.positive_fraction, 0.0f);

    // per-pixel bias may be negative; only the expectation is non-negative
    const RgbImage dimmer = pixel(0.1f, 0.2f, 0.25f);
    EXPECT_NEAR(noise_bias(clean.planes, dimmer.planes).bias_map.data[0], -0.05f, 1e-7f);
}

TEST(NoiseBias, ShapeMismatchRejected) {
    const Tensor a(3, 4, 4, 0.1f);
    const Tensor b(3, 4, 5, 0.1f);
    EXPECT_THROW(noise_bias(a, b), std::invalid_argument);
}

TEST(NoiseBias, MeanIsPositiveUnderGaussianNoise) {
    // clean uniform in [0, 0.5]^3, unclamped additive noise sigma = 0.1
    const int side = 128;
    const Tensor clean = random_tensor(3, side, side, 2024, 0.0f, 0.5f);
    Tensor noisy = clean;
    const CounterRng noise(77);
    for (std::size_t i = 0; i < noisy.data.size(); ++i) {
        noisy.data[i] += static_cast<float>(0.1 * noise.normal(i));
    }
    const BiasReport report = noise_bias(clean, noisy);
    EXPECT_GT(report.mean_bias, 0.0f);
    EXPECT_GT(report.positive_fraction, 0.5f);
    EXPECT_GE(report.max_bias, report.mean_bias);

    // report statistics agree with a direct recomputation
    double mean = 0.0;
    for (float v : report.bias_map.data) mean += v;
    mean /= static_cast<double>(report.bias_map.data.size());
    EXPECT_NEAR(report.mean_bias, mean, 1e-6);
}

TEST(HviForward, GrayAndBlackPixels) {
    const HviImage gray = hvi_forward(pixel(0.5f, 0.5f, 0.5f), 1.0f);
    EXPECT_EQ(gray.h.data[0], 0.0f);
    EXPECT_EQ(gray.v.data[0], 0.0f);
    EXPECT_FLOAT_EQ(gray.i.data[0], 0.5f);

    const HviImage black = hvi_forward(pixel(0.0f, 0.0f, 0.0f), 1.0f);
    EXPECT_EQ(black.h.data[0], 0.0f);
    EXPECT_EQ(black.v.data[0], 0.0f);
    EXPECT_EQ(black.i.data[0], 0.0f);
}

TEST(HviForward, PureRed) {
    const HviImage red = hvi_forward(pixel(1.0f, 0.0f, 0.0f), 1.0f);
    EXPECT_FLOAT_EQ(red.i.data[0], 1.0f);
    EXPECT_NEAR(red.h.data[0], 1.0f, 1e-6f);
    EXPECT_NEAR(red.v.data[0], 0.0f, 1e-6f);

    const RgbImage back = hvi_inverse(red);
    EXPECT_NEAR(back.planes.at(0, 0, 0), 1.0f, 1e-5f);
    EXPECT_NEAR(back.planes.at(1, 0, 0), 0.0f, 1e-5f);
    EXPECT_NEAR(back.planes.at(2, 0, 0), 0.0f, 1e-5f);
}

TEST(HviForward, RejectsNonPositiveK) {
    EXPECT_THROW(hvi_forward(pixel(0.5f, 0.5f, 0.5f), 0.0f), std::invalid_argument);
}

TEST(HviInverse, ZeroChromaIsGray) {
    HviImage flat{Tensor(1, 3, 3, 0.0f), Tensor(1, 3, 3, 0.0f), Tensor(1, 3, 3, 0.7f), 1.0f};
    const RgbImage out = hvi_inverse(flat);
    for (float v : out.planes.data) EXPECT_FLOAT_EQ(v, 0.7f);
}

TEST(HviInverse, ZeroLuminanceIsBlack) {
    HviImage dark{Tensor(1, 2, 2, 0.003f), Tensor(1, 2, 2, -0.002f), Tensor(1, 2, 2, 0.0f), 1.0f};
    const RgbImage out = hvi_inverse(dark);
    for (float v : out.planes.data) EXPECT_EQ(v, 0.0f);
}

TEST(HviRoundTrip, SpecExample) {
    const RgbImage img = pixel(0.8f, 0.4f, 0.2f);
    const RgbImage back = hvi_inverse(hvi_forward(img, 1.0f));
    EXPECT_LE(max_abs_diff(img.planes, back.planes), 1e-5);
}

TEST(HviRoundTrip, RandomImagesAcrossK) {
    for (const float k : {0.5f, 1.0f, 2.0f}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const RgbImage img =
                RgbImage::ingest(random_tensor(3, 16, 16, 900 + seed, 0.05f, 1.0f));
            const HviImage hvi = hvi_forward(img, k);
            const RgbImage back = hvi_inverse(hvi);
            EXPECT_LE(max_abs_diff(img.planes, back.planes), 1e-4)
                << "k=" << k << " seed=" << seed;
        }
    }
}

TEST(HviForward, ChromaStaysInsideCollapseRadius) {
    for (const float k : {0.5f, 1.0f, 2.0f}) {
        const RgbImage img = RgbImage::ingest(random_tensor(3, 24, 24, 321, 0.0f, 1.0f));
        const HviImage hvi = hvi_forward(img, k);
        for (std::size_t p = 0; p < hvi.h.plane_size(); ++p) {
            const double r = collapse_radius(hvi.i.data[p], k);
            const double c2 = static_cast<double>(hvi.h.data[p]) * hvi.h.data[p] +
                              static_cast<double>(hvi.v.data[p]) * hvi.v.data[p];
            EXPECT_LE(c2, r * r + 1e-6);
        }
    }
}

TEST(RhviForward, IdentityBypassMatchesPlainTransform) {
    const RgbImage img = RgbImage::ingest(random_tensor(3, 12, 12, 61, 0.0f, 1.0f));
    IrmConfig cfg;
    cfg.identity_bypass = true;
    const auto [rhvi, refined] = rhvi_forward(img, WeightStore{}, 1.0f, cfg);
    const HviImage plain = hvi_forward(img, 1.0f);
    EXPECT_TRUE(bitwise_equal(rhvi.h, plain.h));
    EXPECT_TRUE(bitwise_equal(rhvi.v, plain.v));
    EXPECT_TRUE(bitwise_equal(rhvi.i, plain.i));
    EXPECT_TRUE(bitwise_equal(refined, plain.i));
}

TEST(RhviForward, ZeroWeightsClampLuminanceToFloor) {
    const RgbImage img = RgbImage::ingest(random_tensor(3, 8, 8, 62, 0.0f, 1.0f));
    const WeightStore zeros = zeroed(irm_init_weights(0));
    const auto [rhvi, refined] = rhvi_forward(img, zeros, 1.0f);
    for (float v : refined.data) EXPECT_EQ(v, 1e-4f);
    for (float v : rhvi.i.data) EXPECT_EQ(v, 1e-4f);
}

TEST(RhviForward, MissingWeightNamesTensor) {
    const RgbImage img = RgbImage::ingest(random_tensor(3, 8, 8, 63, 0.0f, 1.0f));
    try {
        rhvi_forward(img, WeightStore{}, 1.0f);
        FAIL() << "expected lookup error";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("irm.entry.weight"), std::string::npos);
    }
}

TEST(RhviForward, SmoothingWeightsReduceTotalVariation) {
    // hand-built IRM that routes box-filtered luminance through the exit:
    // refined = clamp(gelu(box5(I)), 1e-4, 1)
    const IrmConfig cfg;
    WeightStore w = zeroed(irm_init_weights(0, cfg));
    const int hc = cfg.hidden_channels;

    std::vector<float> entry(static_cast<std::size_t>(hc), 0.0f);
    entry[0] = 1.0f;
    w.put("irm.entry.weight", {static_cast<std::uint32_t>(hc), 1, 1, 1}, std::move(entry));

    std::vector<float> dw(static_cast<std::size_t>(hc) * 25, 0.0f);
    for (int i = 0; i < 25; ++i) dw[static_cast<std::size_t>(i)] = 1.0f / 25.0f;
    w.put("irm.core.dw.weight", {static_cast<std::uint32_t>(hc), 1, 5, 5}, std::move(dw));

    std::vector<float> pw(static_cast<std::size_t>(hc) * hc, 0.0f);
    pw[static_cast<std::size_t>(hc)] = 1.0f;  // channel 1 <- channel 0
    w.put("irm.core.pw.weight", {static_cast<std::uint32_t>(hc), static_cast<std::uint32_t>(hc), 1, 1},
          std::move(pw));

    std::vector<float> bn_identity(static_cast<std::size_t>(hc), 1.0f);
    w.put("irm.core.bn.gamma", {static_cast<std::uint32_t>(hc)}, bn_identity);
    w.put("irm.core.bn.running_var", {static_cast<std::uint32_t>(hc)}, bn_identity);

    std::vector<float> exit(static_cast<std::size_t>(hc), 0.0f);
    exit[1] = 1.0f;
    w.put("irm.exit.weight", {1, static_cast<std::uint32_t>(hc), 1, 1}, std::move(exit));

    // noisy gray fixture
    Tensor noisy(3, 32, 32);
    const CounterRng rng(4242);
    for (std::size_t p = 0; p < noisy.plane_size(); ++p) {
        const float v = static_cast<float>(0.3 + 0.25 * (2.0 * rng.uniform(p) - 1.0));
        noisy.at(0, static_cast<int>(p) / 32, static_cast<int>(p) % 32) = v;
        noisy.at(1, static_cast<int>(p) / 32, static_cast<int>(p) % 32) = v;
        noisy.at(2, static_cast<int>(p) / 32, static_cast<int>(p) % 32) = v;
    }
    const RgbImage img = RgbImage::ingest(std::move(noisy));

    const Tensor initial = max_rgb(img);
    const auto [rhvi, refined] = rhvi_forward(img, w, 1.0f, cfg);
    EXPECT_LE(total_variation(refined), total_variation(initial));
    EXPECT_LT(total_variation(refined), 0.5 * total_variation(initial));
}

TEST(RgbImage, IngestClampsAndValidates) {
    Tensor raw(3, 2, 2, 0.5f);
    raw.data[0] = -0.25f;
    raw.data[5] = 1.5f;
    const RgbImage img = RgbImage::ingest(std::move(raw));
    EXPECT_EQ(img.planes.data[0], 0.0f);
    EXPECT_EQ(img.planes.data[5], 1.0f);
    EXPECT_THROW(RgbImage::ingest(Tensor(2, 2, 2, 0.0f)), std::invalid_argument);
}

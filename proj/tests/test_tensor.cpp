#include <gtest/gtest.h>

#include <cmath>

#include "rfdd/nn.hpp"
#include "rfdd/tensor.hpp"
#include "test_util.hpp"

using namespace rfdd;
using testutil::bitwise_equal;
using testutil::max_abs_diff;
using testutil::random_tensor;

TEST(Tensor, RejectsNonPositiveDims) {
    EXPECT_THROW(Tensor(0, 4, 4), std::invalid_argument);
    EXPECT_THROW(Tensor(1, -1, 4), std::invalid_argument);
}

TEST(Tensor, AssertFiniteFlagsNan) {
    Tensor t(1, 2, 2, 1.0f);
    EXPECT_NO_THROW(assert_finite(t, "t"));
    t.data[3] = std::nanf("");
    EXPECT_THROW(assert_finite(t, "t"), std::runtime_error);
}

TEST(Conv2d, IdentityKernelIsExact) {
    const Tensor x = random_tensor(4, 7, 9, 21);
    std::vector<float> w(16, 0.0f);
    for (int c = 0; c < 4; ++c) w[static_cast<std::size_t>(c) * 4 + c] = 1.0f;
    const Tensor y = conv2d(x, ConvSpec{4, 4, 1, 1, 1, false}, w);
    EXPECT_TRUE(bitwise_equal(x, y));
}

TEST(Conv2d, ZeroWeightsGiveZeroOutput) {
    const Tensor x = random_tensor(3, 5, 5, 3);
    const std::vector<float> w(3 * 3 * 9, 0.0f);
    const std::vector<float> b(3, 0.0f);
    const Tensor y = conv2d(x, ConvSpec{3, 3, 3, 1, 1, true}, w, b);
    for (float v : y.data) EXPECT_EQ(v, 0.0f);
}

TEST(Conv2d, DepthwiseBoxKernelKeepsConstantInterior) {
    const Tensor x(2, 6, 6, 0.5f);
    const std::vector<float> w(2 * 9, 1.0f / 9.0f);
    const Tensor y = conv2d(x, ConvSpec{2, 2, 3, 1, 2, false}, w);
    ASSERT_EQ(y.height, 6);
    ASSERT_EQ(y.width, 6);
    for (int c = 0; c < 2; ++c) {
        for (int yy = 1; yy < 5; ++yy) {
            for (int xx = 1; xx < 5; ++xx) {
                EXPECT_NEAR(y.at(c, yy, xx), 0.5f, 1e-6f);
            }
        }
    }
    // zero padding shrinks the border sums
    EXPECT_NEAR(y.at(0, 0, 0), 0.5f * 4.0f / 9.0f, 1e-6f);
}

TEST(Conv2d, StrideTwoOutputShape) {
    const Tensor x = random_tensor(2, 7, 10, 5);
    const std::vector<float> w(4 * 2 * 9, 0.1f);
    const std::vector<float> b(4, 0.0f);
    const Tensor y = conv2d(x, ConvSpec{2, 4, 3, 2, 1, true}, w, b);
    EXPECT_EQ(y.channels, 4);
    EXPECT_EQ(y.height, 4);  // ceil(7/2)
    EXPECT_EQ(y.width, 5);   // ceil(10/2)
}

TEST(Conv2d, IsLinear) {
    const CounterRng rng(99);
    const Tensor x = random_tensor(2, 8, 8, 31);
    const Tensor y = random_tensor(2, 8, 8, 32);
    std::vector<float> w(3 * 2 * 25);
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = static_cast<float>(rng.uniform_signed(i, 0.3));
    }
    const ConvSpec spec{2, 3, 5, 1, 1, false};
    const float a = 0.7f, b = -1.3f;

    Tensor combo(2, 8, 8);
    for (std::size_t i = 0; i < combo.data.size(); ++i) {
        combo.data[i] = a * x.data[i] + b * y.data[i];
    }
    const Tensor lhs = conv2d(combo, spec, w);
    const Tensor cx = conv2d(x, spec, w);
    const Tensor cy = conv2d(y, spec, w);
    Tensor rhs(3, 8, 8);
    for (std::size_t i = 0; i < rhs.data.size(); ++i) {
        rhs.data[i] = a * cx.data[i] + b * cy.data[i];
    }
    EXPECT_LE(max_abs_diff(lhs, rhs), 1e-5);
}

TEST(Conv2d, ShapeMismatchNamesDimension) {
    const Tensor x = random_tensor(3, 4, 4, 1);
    const std::vector<float> w(9, 0.0f);
    try {
        conv2d(x, ConvSpec{2, 1, 3, 1, 1, false}, w);
        FAIL() << "expected contract violation";
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("channels"), std::string::npos);
    }
}

TEST(Activation, GeluPivots) {
    EXPECT_EQ(gelu(0.0f), 0.0f);
    // double-precision oracle of the tanh approximation at x = 3
    const double expected = 0.5 * 3.0 * (1.0 + std::tanh(std::sqrt(2.0 / 3.14159265358979323846) *
                                                         (3.0 + 0.044715 * 27.0)));
    EXPECT_NEAR(expected, 2.9964, 1e-4);
    EXPECT_NEAR(gelu(3.0f), expected, 1e-5);
    EXPECT_LT(std::abs(gelu(10.0f) - 10.0f), 1e-4f);
}

TEST(Activation, SigmoidRange) {
    EXPECT_EQ(sigmoid(0.0f), 0.5f);
    for (float x : {-1000.0f, -88.0f, -20.0f, -1.0f, 1.0f, 20.0f, 88.0f, 1000.0f}) {
        const float v = sigmoid(x);
        EXPECT_GT(v, 0.0f) << "x=" << x;
        EXPECT_LT(v, 1.0f) << "x=" << x;
    }
}

TEST(BatchNorm, IdentityAndAffine) {
    const Tensor x = random_tensor(2, 4, 4, 77);
    const std::vector<float> ones(2, 1.0f), zeros(2, 0.0f);
    const Tensor y = batchnorm_infer(x, ones, zeros, zeros, ones, 0.0f);
    EXPECT_LE(max_abs_diff(x, y), 1e-7);

    // x=2, gamma=3, beta=1, mean=1, var=4 -> 2.5
    const Tensor two(1, 1, 1, 2.0f);
    const std::vector<float> g{3.0f}, be{1.0f}, m{1.0f}, v{4.0f};
    EXPECT_FLOAT_EQ(batchnorm_infer(two, g, be, m, v, 0.0f).data[0], 2.5f);
}

TEST(BatchNorm, ZeroGammaGivesConstantBeta) {
    const Tensor x = random_tensor(2, 3, 3, 8);
    const std::vector<float> gamma(2, 0.0f), beta{0.25f, -0.75f}, mean(2, 0.3f), var(2, 2.0f);
    const Tensor y = batchnorm_infer(x, gamma, beta, mean, var, 1e-5f);
    for (int c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < y.plane_size(); ++i) {
            EXPECT_EQ(y.plane(c)[i], beta[static_cast<std::size_t>(c)]);
        }
    }
}

TEST(BatchNorm, NegativeVarianceRejected) {
    const Tensor x(1, 2, 2, 0.0f);
    const std::vector<float> one(1, 1.0f), zero(1, 0.0f), neg{-0.5f};
    EXPECT_THROW(batchnorm_infer(x, one, zero, zero, neg, 0.0f), std::invalid_argument);
}

TEST(GlobalAvgPool, ConstantAndMean) {
    Tensor x(2, 2, 2, 0.0f);
    x.at(0, 0, 0) = 1.0f;
    x.at(0, 0, 1) = 2.0f;
    x.at(0, 1, 0) = 3.0f;
    x.at(0, 1, 1) = 4.0f;
    for (std::size_t i = 0; i < 4; ++i) x.plane(1)[i] = 0.75f;
    const std::vector<float> pooled = global_avg_pool(x);
    EXPECT_FLOAT_EQ(pooled[0], 2.5f);
    EXPECT_FLOAT_EQ(pooled[1], 0.75f);

    const Tensor tiny = random_tensor(3, 1, 1, 4);
    const std::vector<float> p = global_avg_pool(tiny);
    for (int c = 0; c < 3; ++c) EXPECT_EQ(p[static_cast<std::size_t>(c)], tiny.at(c, 0, 0));
}

TEST(ChannelSurgery, SplitConcatRoundTrip) {
    const Tensor a = random_tensor(3, 5, 4, 41);
    const Tensor b = random_tensor(3, 5, 4, 42);
    const auto [first, second] = split_halves(concat_channels(a, b));
    EXPECT_TRUE(bitwise_equal(first, a));
    EXPECT_TRUE(bitwise_equal(second, b));
}

TEST(ChannelSurgery, ConcatShapeLaw) {
    const Tensor a = random_tensor(2, 3, 3, 1);
    const Tensor b = random_tensor(2, 3, 3, 2);
    const Tensor c = random_tensor(2, 3, 3, 3);
    const Tensor out = concat_channels(a, b, c);
    EXPECT_EQ(out.channels, 6);
    EXPECT_EQ(out.height, 3);
    EXPECT_EQ(out.width, 3);
}

TEST(ChannelSurgery, SplitTwoChannelTensor) {
    Tensor x(2, 2, 2);
    for (std::size_t i = 0; i < 4; ++i) x.plane(0)[i] = 1.0f;
    for (std::size_t i = 0; i < 4; ++i) x.plane(1)[i] = 2.0f;
    const auto [ones, twos] = split_halves(x);
    for (float v : ones.data) EXPECT_EQ(v, 1.0f);
    for (float v : twos.data) EXPECT_EQ(v, 2.0f);
}

TEST(ChannelSurgery, ContractViolations) {
    const Tensor odd = random_tensor(3, 2, 2, 9);
    EXPECT_THROW(split_halves(odd), std::invalid_argument);
    const Tensor a = random_tensor(1, 2, 2, 10);
    const Tensor b = random_tensor(1, 3, 2, 11);
    EXPECT_THROW(concat_channels(a, b), std::invalid_argument);
}

TEST(SpatialNormalize, ConstantChannelMapsToZero) {
    const Tensor x(2, 4, 4, 0.37f);
    const Tensor y = spatial_normalize(x, 1e-6f);
    for (float v : y.data) EXPECT_EQ(v, 0.0f);
}

TEST(SpatialNormalize, TwoPointChannels) {
    Tensor x(1, 1, 2);
    x.at(0, 0, 0) = -1.0f;
    x.at(0, 0, 1) = 1.0f;
    Tensor y = spatial_normalize(x, 1e-12f);
    EXPECT_NEAR(y.at(0, 0, 0), -1.0f, 1e-5f);
    EXPECT_NEAR(y.at(0, 0, 1), 1.0f, 1e-5f);

    x.at(0, 0, 0) = 0.0f;
    x.at(0, 0, 1) = 2.0f;
    y = spatial_normalize(x, 1e-12f);
    EXPECT_NEAR(y.at(0, 0, 0), -1.0f, 1e-5f);
    EXPECT_NEAR(y.at(0, 0, 1), 1.0f, 1e-5f);
}

TEST(SpatialNormalize, StandardizesRandomChannels) {
    const Tensor x = random_tensor(4, 9, 13, 55);
    const Tensor y = spatial_normalize(x, 1e-6f);
    for (int c = 0; c < 4; ++c) {
        double mean = 0.0, var = 0.0;
        const float* p = y.plane(c);
        for (std::size_t i = 0; i < y.plane_size(); ++i) mean += p[i];
        mean /= static_cast<double>(y.plane_size());
        for (std::size_t i = 0; i < y.plane_size(); ++i) {
            var += (p[i] - mean) * (p[i] - mean);
        }
        var /= static_cast<double>(y.plane_size());
        EXPECT_LE(std::abs(mean), 1e-6);
        EXPECT_NEAR(var, 1.0, 1e-3);
    }
}

TEST(Determinism, OpsAreBitStable) {
    const Tensor x = random_tensor(3, 8, 8, 123);
    std::vector<float> w(4 * 3 * 9);
    const CounterRng rng(7);
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = static_cast<float>(rng.uniform_signed(i, 0.5));
    }
    const ConvSpec spec{3, 4, 3, 1, 1, false};
    EXPECT_TRUE(bitwise_equal(conv2d(x, spec, w), conv2d(x, spec, w)));
    EXPECT_TRUE(bitwise_equal(activation(x, Activation::Gelu), activation(x, Activation::Gelu)));
    EXPECT_TRUE(bitwise_equal(spatial_normalize(x, 1e-6f), spatial_normalize(x, 1e-6f)));
    EXPECT_EQ(global_avg_pool(x), global_avg_pool(x));
}

#include <gtest/gtest.h>

#include <cmath>

#include "rfdd/dct.hpp"
#include "test_util.hpp"

using namespace rfdd;
using testutil::energy;
using testutil::max_abs_diff;
using testutil::random_tensor;

TEST(Dct2, ConstantChannelIsPureDc) {
    const Tensor x(1, 2, 2, 1.0f);
    const Tensor spectrum = dct2(x);
    EXPECT_NEAR(spectrum.at(0, 0, 0), 2.0f, 1e-6f);
    EXPECT_NEAR(spectrum.at(0, 0, 1), 0.0f, 1e-7f);
    EXPECT_NEAR(spectrum.at(0, 1, 0), 0.0f, 1e-7f);
    EXPECT_NEAR(spectrum.at(0, 1, 1), 0.0f, 1e-7f);
}

TEST(Dct2, ZeroMapsToZero) {
    const Tensor x(2, 5, 7, 0.0f);
    for (float v : dct2(x).data) EXPECT_EQ(v, 0.0f);
    for (float v : idct2(x).data) EXPECT_EQ(v, 0.0f);
}

TEST(Dct2Naive, ConstantAndImpulse) {
    const Tensor x(1, 2, 2, 1.0f);
    const Tensor spectrum = dct2_naive(x);
    EXPECT_NEAR(spectrum.at(0, 0, 0), 2.0f, 1e-6f);
    EXPECT_NEAR(spectrum.at(0, 1, 1), 0.0f, 1e-7f);

    // impulse at the start of a 1xN row: coefficient u is a(u) cos(pi u / 2N)
    const int n = 8;
    Tensor row(1, 1, n, 0.0f);
    row.at(0, 0, 0) = 1.0f;
    const Tensor rs = dct2_naive(row);
    for (int u = 0; u < n; ++u) {
        const double a = u == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        const double expected = a * std::cos(3.14159265358979323846 * u / (2.0 * n));
        EXPECT_NEAR(rs.at(0, 0, u), expected, 1e-6);
    }
}

TEST(Dct2Naive, ParsevalHoldsTightly) {
    const Tensor x = random_tensor(1, 4, 6, 3);
    const Tensor spectrum = dct2_naive(x);
    const double ex = energy(x);
    EXPECT_NEAR(energy(spectrum), ex, 1e-10 * ex + 1e-12);
}

TEST(Dct2, MatchesNaiveOracle) {
    const struct {
        int h, w;
    } shapes[] = {{8, 8}, {16, 12}, {17, 5}};
    for (const auto& s : shapes) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const Tensor x = random_tensor(2, s.h, s.w, 100 + seed);
            EXPECT_LE(max_abs_diff(dct2(x), dct2_naive(x)), 1e-5)
                << "shape " << s.h << "x" << s.w << " seed " << seed;
        }
    }
}

TEST(Dct2, ParsevalOnRandomInputs) {
    for (const int n : {8, 16, 33, 64}) {
        const Tensor x = random_tensor(1, n, n, static_cast<std::uint64_t>(n));
        const double ex = energy(x);
        EXPECT_NEAR(energy(dct2(x)), ex, 1e-6 * ex) << "size " << n;
    }
}

TEST(Idct2, InverseOfDct2) {
    const Tensor x = random_tensor(3, 16, 12, 44);
    EXPECT_LE(max_abs_diff(idct2(dct2(x)), x), 1e-6);
}

TEST(Idct2, PureDcGivesConstant) {
    Tensor spectrum(1, 2, 2, 0.0f);
    spectrum.at(0, 0, 0) = 2.0f;
    const Tensor x = idct2(spectrum);
    for (float v : x.data) EXPECT_NEAR(v, 1.0f, 1e-6f);
}

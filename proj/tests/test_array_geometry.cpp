#include <gtest/gtest.h>

#include "isac_otfs/array_geometry.hpp"

using namespace isac_otfs;

TEST(SteeringVector, Broadside) {
    for (const auto& v : steering_vector(0.0, 4).entries) EXPECT_NEAR(std::abs(v - cplx(1, 0)), 0.0, 1e-15);
}

TEST(SteeringVector, Endfire) {
    const auto sv = steering_vector(kPi / 2.0, 2);
    EXPECT_NEAR(std::abs(sv.entries[0] - cplx(1, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(sv.entries[1] - cplx(-1, 0)), 0.0, 1e-15);
}

TEST(SteeringVector, ElementwiseFormula) {
    const auto sv = steering_vector(0.6435, 8);
    for (int n = 0; n < 8; ++n)
        EXPECT_NEAR(std::abs(sv.entries[n] - std::exp(cplx(0, n * kPi * std::sin(0.6435)))), 0.0, 1e-12);
    EXPECT_THROW(steering_vector(0.0, 0), ConfigError);
}

TEST(TxBeamformer, Normalization) {
    ArrayConfig a{4, 4, 1.0};
    for (const auto& w : tx_beamformer(0.0, a).weights) EXPECT_NEAR(std::abs(w - cplx(0.5, 0)), 0.0, 1e-15);
    ArrayConfig single{1, 1, 4.0};
    const auto f = tx_beamformer(0.77, single);
    ASSERT_EQ(f.weights.size(), 1u);
    EXPECT_NEAR(std::abs(f.weights[0] - cplx(2, 0)), 0.0, 1e-15);
    ArrayConfig big{64, 64, 1.0};
    double e = 0;
    for (const auto& w : tx_beamformer(0.3, big).weights) e += std::norm(w);
    EXPECT_NEAR(e, 1.0, 1e-10);
    EXPECT_EQ(tx_beamformer(0.3, big).kind, BeamKind::Transmit);
    EXPECT_EQ(rx_beamformer(0.3, big).kind, BeamKind::Receive);
}

TEST(ArrayGain, Alignment) {
    EXPECT_NEAR(array_gain(0.5, 0.5, 64), 4096.0, 1e-8);
    EXPECT_NEAR(array_gain(0.2, -1.1, 1), 1.0, 1e-15);
    cplx s{};
    for (int n = 0; n < 16; ++n) s += std::exp(cplx(0, n * kPi * (std::sin(0.1) - std::sin(0.0))));
    EXPECT_NEAR(array_gain(0.0, 0.1, 16), std::norm(s), 1e-10);
}

TEST(ArrayGain, NeverExceedsSquare) {
    for (double a = -1.5; a < 1.5; a += 0.037)
        for (double b = -1.5; b < 1.5; b += 0.041) ASSERT_LE(array_gain(a, b, 32), 1024.0 + 1e-9);
}

TEST(SteeringInner, MatchesExplicitProduct) {
    const auto a = steering_vector(0.3, 16).entries;
    const auto b = steering_vector(-0.4, 16).entries;
    cplx acc{};
    for (int n = 0; n < 16; ++n) acc += std::conj(a[n]) * b[n];
    EXPECT_NEAR(std::abs(steering_inner(0.3, -0.4, 16) - acc), 0.0, 1e-12);
}

TEST(AngleGrid, MidpointsAndIndex) {
    const auto g = angle_grid(64);
    ASSERT_EQ(g.size(), 64u);
    EXPECT_NEAR(g.front(), -kPi / 2 + kPi / 128, 1e-15);
    EXPECT_NEAR(g.back(), kPi / 2 - kPi / 128, 1e-15);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(angle_grid_index(g[i], 64), i);
    EXPECT_EQ(angle_grid_index(-10.0, 64), 0u);
    EXPECT_EQ(angle_grid_index(10.0, 64), 63u);
}

TEST(ArrayConfig, Validation) {
    EXPECT_THROW((ArrayConfig{0, 1, 1.0}.validate()), ConfigError);
    EXPECT_THROW((ArrayConfig{1, 1, 0.0}.validate()), ConfigError);
    EXPECT_NO_THROW(ArrayConfig{}.validate());
}

#include <gtest/gtest.h>

#include <numeric>

#include "isac_otfs/uplink.hpp"
#include "oracles.hpp"

using namespace isac_otfs;

namespace {
ModemConfig grid(std::size_t N, std::size_t M) {
    ModemConfig c;
    c.N = N;
    c.M = M;
    return c;
}

struct Frame {
    DDGrid x, y;
    std::vector<std::size_t> idx;
};

Frame random_frame(const std::vector<UplinkTap>& taps, const Constellation& c, const ModemConfig& cfg, double n0,
                   RandomStream& rng) {
    Frame f{DDGrid(cfg.N, cfg.M), {}, std::vector<std::size_t>(cfg.cells())};
    for (std::size_t i = 0; i < f.x.size(); ++i) {
        f.idx[i] = rng.index(c.size());
        f.x[i] = c.points[f.idx[i]];
    }
    f.y = apply_dd_channel(f.x, to_dd_taps(taps, cfg), n0, rng);
    return f;
}

std::size_t symbol_errors(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t e = 0;
    for (std::size_t i = 0; i < a.size(); ++i) e += a[i] != b[i];
    return e;
}
}  // namespace

TEST(Spa, SingleTapIsPointMassAndMatchesSingleTapMl) {
    const auto cfg = grid(6, 8);
    const auto c = Constellation::qpsk();
    RandomStream rng(1);
    const std::vector<UplinkTap> taps{{2, 3, std::polar(0.9, 0.7), 1.0}};
    const auto f = random_frame(taps, c, cfg, 1e-8, rng);
    const auto b = spa_detect(f.y, perfect_estimate(taps), c, 1e-8, {});
    for (std::size_t v = 0; v < b.cells; ++v) EXPECT_NEAR(b.at(v)[f.idx[v]], 1.0, 1e-9);
    EXPECT_EQ(decide(b), f.idx);
    // Single-tap ML on the shifted grid gives the same decisions.
    DDGrid unshifted(cfg.N, cfg.M);
    for (std::size_t k = 0; k < cfg.N; ++k)
        for (std::size_t l = 0; l < cfg.M; ++l) unshifted(k, l) = f.y((k + 2) % cfg.N, (l + 3) % cfg.M);
    EXPECT_EQ(detect_single_tap(unshifted, taps[0].gain, c), decide(b));
}

TEST(Spa, ZeroUncertaintyReducesExactly) {
    const std::vector<cplx> g{{0.5, 0.2}, {-0.3, 0.9}, {1.1, -0.4}};
    const std::vector<double> v{0.3, 0.7, 0.11}, zero(3, 0.0);
    for (std::size_t p = 0; p < 3; ++p)
        EXPECT_EQ(spa_message_variance(p, g, v, zero, 0.05, 1.0, true, 1e-12),
                  spa_message_variance(p, g, v, zero, 0.05, 1.0, false, 1e-12));

    const ModemConfig cfg = grid(8, 16);
    const auto c = Constellation::qpsk();
    RandomStream rng(2);
    const auto taps = draw_synthetic_channel(3, 2, 4, rng);
    const auto f = random_frame(taps, c, cfg, 0.1, rng);
    const auto est = perfect_estimate(taps);
    SpaOptions with, without;
    with.use_uncertainty = true;
    without.use_uncertainty = false;
    const auto a = spa_detect(f.y, est, c, 0.1, with);
    const auto b = spa_detect(f.y, est, c, 0.1, without);
    for (std::size_t i = 0; i < a.prob.size(); ++i) ASSERT_NEAR(a.prob[i], b.prob[i], 1e-12);
}

TEST(Spa, UncertaintyTermFormula) {
    const std::vector<cplx> g{{1.0, 0.0}, {0.0, 2.0}};
    const std::vector<double> v{0.5, 0.25}, s2{0.1, 0.2}, zero2(2, 0.0);
    // Toward path 0: (N0 + Es s2_1 + (|g1|^2 + s2_1) V_1) / |g0|^2.
    EXPECT_NEAR(spa_message_variance(0, g, v, s2, 0.05, 2.0, true, 1e-12), 0.05 + 2.0 * 0.2 + 4.2 * 0.25, 1e-15);
    EXPECT_NEAR(spa_message_variance(1, g, v, s2, 0.05, 2.0, false, 1e-12), (0.05 + 1.0 * 0.5) / 4.0, 1e-15);
    EXPECT_EQ(spa_message_variance(0, g, zero2, zero2, 0.0, 1.0, false, 1e-12), 1e-12);
    EXPECT_EQ(spa_message_variance(1, g, zero2, zero2, 0.0, 1.0, false, 1e-12), 1e-12 / 4.0);
}

TEST(Spa, BeliefsNormalizedAfterEveryIteration) {
    const ModemConfig cfg = grid(10, 16);
    const auto c = Constellation::qpsk();
    RandomStream rng(3);
    const auto taps = draw_synthetic_channel(4, 3, 5, rng);
    const auto f = random_frame(taps, c, cfg, 0.3, rng);
    for (std::size_t it = 1; it <= 10; ++it) {
        SpaOptions opt;
        opt.iterations = it;
        opt.tolerance = 0.0;
        const auto b = spa_detect(f.y, perfect_estimate(taps), c, 0.3, opt);
        EXPECT_EQ(b.iterations_run, it);
        for (std::size_t v = 0; v < b.cells; ++v) {
            const auto p = b.at(v);
            ASSERT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
        }
    }
}

TEST(Spa, MatchesExhaustiveMapOnTinyFrames) {
    const auto cfg = grid(2, 2);
    const auto c = Constellation::bpsk();
    std::size_t agree = 0, total = 0;
    for (int t = 0; t < 1000; ++t) {
        RandomStream rng(4, StreamTag::Test, t, 0, 0);
        std::vector<UplinkTap> taps{{0, 0, rng.complex_gaussian(0.5), 0.5}, {1, 1, rng.complex_gaussian(0.5), 0.5}};
        taps[1].k = static_cast<long long>(rng.index(2));
        taps[1].l = taps[1].k == 0 ? 1 : static_cast<long long>(rng.index(2));
        const double power = std::norm(taps[0].gain) + std::norm(taps[1].gain);
        const double n0 = power / db_to_linear(10.0);
        const auto f = random_frame(taps, c, cfg, n0, rng);
        const auto est = perfect_estimate(taps);
        const auto spa = decide(spa_detect(f.y, est, c, n0, {}));
        const auto map = oracle::exhaustive_map(f.y, est, c, n0);
        agree += 4 - symbol_errors(spa, map);
        total += 4;
    }
    EXPECT_GE(static_cast<double>(agree) / static_cast<double>(total), 0.95);
}

TEST(Spa, NoiselessTwoPathIsErrorFree) {
    const ModemConfig cfg;
    const auto c = Constellation::qpsk();
    RandomStream rng(5);
    const std::vector<UplinkTap> taps{{0, 0, cplx(0.9, 0.1), 0.8}, {2, 3, cplx(-0.2, 0.35), 0.2}};
    const auto f = random_frame(taps, c, cfg, 0.0, rng);
    const auto b = spa_detect(f.y, perfect_estimate(taps), c, 1e-9, {});
    EXPECT_EQ(symbol_errors(decide(b), f.idx), 0u);
}

TEST(Spa, KnownCellsStayUniformAndHelp) {
    const ModemConfig cfg;
    const auto c = Constellation::qpsk();
    RandomStream rng(6);
    const auto g = PilotPlacement::guard_space(cfg, 100.0, 6, 10);
    const auto taps = draw_synthetic_channel(4, 6, 10, rng);
    std::vector<cplx> data(g.data_cells(cfg));
    for (auto& d : data) d = c.points[rng.index(4)];
    const DDGrid x = place_symbols(data, g, cfg);
    const DDGrid y = apply_dd_channel(x, to_dd_taps(taps, cfg), 1e-6, rng);
    const auto known = known_cells(g, cfg);
    EXPECT_EQ(known.index.size(), 480u);
    const auto b = spa_detect(y, perfect_estimate(taps), c, 1e-6, {}, known);
    for (auto v : known.index)
        for (double p : b.at(v)) EXPECT_DOUBLE_EQ(p, 0.25);
    const auto d = decide(b);
    std::size_t errors = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (g.role(i / cfg.M, i % cfg.M, cfg) == CellRole::Data) errors += c.points[d[i]] != x[i];
    EXPECT_EQ(errors, 0u);
}

TEST(Spa, RejectsBadInputs) {
    const auto cfg = grid(4, 4);
    const auto c = Constellation::bpsk();
    DDGrid y(4, 4);
    const std::vector<UplinkTap> zero{{0, 0, 0.0, 1.0}};
    EXPECT_THROW(spa_detect(y, perfect_estimate(zero), c, 1.0, {}), DetectionError);
    const std::vector<UplinkTap> ok{{0, 0, 1.0, 1.0}};
    SpaOptions bad;
    bad.iterations = 0;
    EXPECT_THROW(spa_detect(y, perfect_estimate(ok), c, 1.0, bad), ConfigError);
    bad.iterations = 5;
    bad.damping = 1.0;
    EXPECT_THROW(spa_detect(y, perfect_estimate(ok), c, 1.0, bad), ConfigError);
    (void)cfg;
}

TEST(Decide, PointMassAndUniform) {
    SymbolBeliefs b{3, 4, std::vector<double>(12, 0.25), 1};
    EXPECT_EQ(decide(b), (std::vector<std::size_t>{0, 0, 0}));
    b.prob = {0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1};
    EXPECT_EQ(decide(b), (std::vector<std::size_t>{2, 1, 3}));
}

TEST(Mellin, ProductVarianceIdentity) {
    RandomStream rng(8);
    const cplx m1(0.7, -0.2), m2(-0.4, 1.1);
    const double v1 = 0.3, v2 = 0.5;
    const int n = 1000000;
    cplx s{};
    double s2 = 0;
    for (int i = 0; i < n; ++i) {
        const cplx z = (m1 + rng.complex_gaussian(v1)) * (m2 + rng.complex_gaussian(v2));
        s += z;
        s2 += std::norm(z);
    }
    const double emp = s2 / n - std::norm(s / static_cast<double>(n));
    const double theory = v1 * v2 + std::norm(m2) * v1 + std::norm(m1) * v2;
    EXPECT_NEAR(emp / theory, 1.0, 0.02);
}

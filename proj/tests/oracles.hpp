#pragma once

// Brute-force reference implementations used only by the tests.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "isac_otfs/dd_modem.hpp"
#include "isac_otfs/downlink.hpp"
#include "isac_otfs/random.hpp"
#include "isac_otfs/types.hpp"
#include "isac_otfs/uplink.hpp"

namespace oracle {

using isac_otfs::cplx;
using isac_otfs::DDGrid;
using isac_otfs::kPi;
using isac_otfs::TFGrid;

/// X[n,m] = 1/sqrt(NM) sum_k sum_l x[k,l] exp(j 2 pi (nk/N - ml/M)).
inline TFGrid isfft(const DDGrid& x) {
    const std::size_t N = x.rows(), M = x.cols();
    TFGrid X(N, M);
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t m = 0; m < M; ++m) {
            cplx acc{};
            for (std::size_t k = 0; k < N; ++k)
                for (std::size_t l = 0; l < M; ++l)
                    acc += x(k, l) * std::polar(1.0, 2.0 * kPi *
                                                         (static_cast<double>(n * k) / static_cast<double>(N) -
                                                          static_cast<double>(m * l) / static_cast<double>(M)));
            X(n, m) = acc / std::sqrt(static_cast<double>(N * M));
        }
    return X;
}

/// x[k,l] = 1/sqrt(NM) sum_n sum_m X[n,m] exp(-j 2 pi (nk/N - ml/M)).
inline DDGrid sfft(const TFGrid& X) {
    const std::size_t N = X.rows(), M = X.cols();
    DDGrid x(N, M);
    for (std::size_t k = 0; k < N; ++k)
        for (std::size_t l = 0; l < M; ++l) {
            cplx acc{};
            for (std::size_t n = 0; n < N; ++n)
                for (std::size_t m = 0; m < M; ++m)
                    acc += X(n, m) * std::polar(1.0, -2.0 * kPi *
                                                         (static_cast<double>(n * k) / static_cast<double>(N) -
                                                          static_cast<double>(m * l) / static_cast<double>(M)));
            x(k, l) = acc / std::sqrt(static_cast<double>(N * M));
        }
    return x;
}

/// y[a,b] = sum_{k,l} h[k,l] x[(a-k)_N, (b-l)_M] with the tap list expanded
/// into a dense kernel first.
inline DDGrid circular_convolution(const DDGrid& x, std::span<const isac_otfs::DDChannelTap> taps) {
    const std::size_t N = x.rows(), M = x.cols();
    DDGrid h(N, M);
    for (const auto& t : taps) h(t.k_shift, t.l_shift) += t.gain * t.phase;
    DDGrid y(N, M);
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < M; ++b)
            for (std::size_t k = 0; k < N; ++k)
                for (std::size_t l = 0; l < M; ++l) y(a, b) += h(k, l) * x((a + N - k) % N, (b + M - l) % M);
    return y;
}

inline double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline DDGrid random_grid(std::size_t N, std::size_t M, isac_otfs::RandomStream& rng) {
    DDGrid g(N, M);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = rng.complex_gaussian(1.0);
    return g;
}

/// Per-cell marginal MAP decisions by enumerating every frame hypothesis.
inline std::vector<std::size_t> exhaustive_map(const DDGrid& y, const isac_otfs::UplinkChannelEstimate& est,
                                               const isac_otfs::Constellation& c, double n0) {
    const std::size_t N = y.rows(), M = y.cols(), V = N * M, Q = c.size();
    std::size_t hyps = 1;
    for (std::size_t v = 0; v < V; ++v) hyps *= Q;
    std::vector<double> logp(hyps);
    double mx = -1e300;
    std::vector<std::size_t> idx(V);
    for (std::size_t h = 0; h < hyps; ++h) {
        std::size_t r = h;
        DDGrid x(N, M);
        for (std::size_t v = 0; v < V; ++v) {
            idx[v] = r % Q;
            r /= Q;
            x[v] = c.points[idx[v]];
        }
        double d = 0.0;
        for (std::size_t a = 0; a < N; ++a)
            for (std::size_t b = 0; b < M; ++b) {
                cplx pred{};
                for (const auto& p : est.paths)
                    pred += p.gain * x(isac_otfs::wrap(static_cast<long long>(a) - p.k, N),
                                       isac_otfs::wrap(static_cast<long long>(b) - p.l, M));
                d += std::norm(y(a, b) - pred);
            }
        logp[h] = -d / n0;
        mx = std::max(mx, logp[h]);
    }
    std::vector<double> marg(V * Q, 0.0);
    for (std::size_t h = 0; h < hyps; ++h) {
        const double w = std::exp(logp[h] - mx);
        std::size_t r = h;
        for (std::size_t v = 0; v < V; ++v) {
            marg[v * Q + r % Q] += w;
            r /= Q;
        }
    }
    std::vector<std::size_t> out(V);
    for (std::size_t v = 0; v < V; ++v) {
        std::size_t best = 0;
        for (std::size_t q = 1; q < Q; ++q)
            if (marg[v * Q + q] > marg[v * Q + best]) best = q;
        out[v] = best;
    }
    return out;
}

}  // namespace oracle

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "isac_otfs/random.hpp"
#include "isac_otfs/types.hpp"

namespace isac_otfs {

/// OTFS frame numerology.  The symbol duration is derived from the
/// subcarrier spacing, so T * delta_f == 1 holds by construction.
struct ModemConfig {
    std::size_t N = 30;           // Doppler bins / time slots
    std::size_t M = 128;          // delay bins / subcarriers
    double delta_f = 6.0e3;       // subcarrier spacing (Hz)
    double fc = 3.0e9;            // carrier (Hz)
    double c = kSpeedOfLight;

    double T() const noexcept { return 1.0 / delta_f; }
    double frame_duration() const noexcept { return static_cast<double>(N) * T(); }
    double sample_rate() const noexcept { return static_cast<double>(M) * delta_f; }
    std::size_t cells() const noexcept { return N * M; }

    /// Doppler and delay resolution of one grid bin.
    double doppler_resolution() const noexcept { return 1.0 / frame_duration(); }
    double delay_resolution() const noexcept { return 1.0 / sample_rate(); }

    void validate() const {
        if (N < 1 || M < 1) throw ConfigError("modem: N and M must be >= 1");
        if (!(delta_f > 0.0) || !(fc > 0.0)) throw ConfigError("modem: delta_f and fc must be positive");
    }
};

/// Integer Doppler tap k = round(nu * N * T).
inline long long doppler_index(double doppler_hz, const ModemConfig& cfg) {
    return round_half_up(doppler_hz * static_cast<double>(cfg.N) * cfg.T());
}

/// Integer delay tap l = round(tau * M * delta_f).
inline long long delay_index(double delay_s, const ModemConfig& cfg) {
    return round_half_up(delay_s * static_cast<double>(cfg.M) * cfg.delta_f);
}

/// One path of a DD-domain channel with integer shifts.
struct DDChannelTap {
    cplx gain{1.0, 0.0};
    std::size_t k_shift = 0;
    std::size_t l_shift = 0;
    cplx phase{1.0, 0.0};

    /// Builds a tap from signed shifts, wrapping them onto the grid, with
    /// phase exp(-j 2 pi tau nu).
    static DDChannelTap make(cplx gain, long long k, long long l, const ModemConfig& cfg, double tau = 0.0,
                             double nu = 0.0) {
        return {gain, wrap(k, cfg.N), wrap(l, cfg.M), std::polar(1.0, -2.0 * kPi * tau * nu)};
    }
};

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Unnormalized in-place DFT, X[u] = sum_t x[t] exp(sign * j 2 pi u t / n).
/// Radix-2 for power-of-two lengths, direct otherwise.
inline void dft(std::span<cplx> x, int sign) {
    const std::size_t n = x.size();
    if (n <= 1) return;
    if (is_power_of_two(n)) {
        for (std::size_t i = 1, j = 0; i < n; ++i) {
            std::size_t bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(x[i], x[j]);
        }
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const double ang = sign * 2.0 * kPi / static_cast<double>(len);
            for (std::size_t i = 0; i < n; i += len) {
                for (std::size_t j = 0; j < len / 2; ++j) {
                    const cplx w = std::polar(1.0, ang * static_cast<double>(j));
                    const cplx u = x[i + j];
                    const cplx v = x[i + j + len / 2] * w;
                    x[i + j] = u + v;
                    x[i + j + len / 2] = u - v;
                }
            }
        }
        return;
    }
    std::vector<cplx> twiddle(n);
    for (std::size_t i = 0; i < n; ++i)
        twiddle[i] = std::polar(1.0, sign * 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n));
    std::vector<cplx> out(n);
    for (std::size_t u = 0; u < n; ++u) {
        cplx acc{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t) acc += x[t] * twiddle[(u * t) % n];
        out[u] = acc;
    }
    std::copy(out.begin(), out.end(), x.begin());
}

/// Applies dft along rows (row_sign) and columns (col_sign), then scales.
template <Domain Out, Domain In>
Grid<Out> transform_2d(const Grid<In>& in, int row_sign, int col_sign) {
    const std::size_t R = in.rows();
    const std::size_t C = in.cols();
    Grid<Out> out(R, C);
    std::vector<cplx> buf(std::max(R, C));
    for (std::size_t r = 0; r < R; ++r) {
        for (std::size_t c = 0; c < C; ++c) buf[c] = in(r, c);
        dft(std::span<cplx>(buf.data(), C), col_sign);
        for (std::size_t c = 0; c < C; ++c) out(r, c) = buf[c];
    }
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t r = 0; r < R; ++r) buf[r] = out(r, c);
        dft(std::span<cplx>(buf.data(), R), row_sign);
        for (std::size_t r = 0; r < R; ++r) out(r, c) = buf[r];
    }
    out *= cplx(1.0 / std::sqrt(static_cast<double>(R * C)), 0.0);
    return out;
}

template <Domain D>
void check_shape(const Grid<D>& g, const ModemConfig& cfg) {
    if (g.rows() != cfg.N || g.cols() != cfg.M)
        throw ConfigError("grid is " + std::to_string(g.rows()) + "x" + std::to_string(g.cols()) +
                          ", modem expects " + std::to_string(cfg.N) + "x" + std::to_string(cfg.M));
}

}  // namespace detail

/// Inverse symplectic finite Fourier transform, DD -> TF:
/// X[n,m] = 1/sqrt(MN) sum_k sum_l x[k,l] exp(j 2 pi (nk/N - ml/M)).
inline TFGrid isfft(const DDGrid& grid, const ModemConfig& cfg) {
    detail::check_shape(grid, cfg);
    return detail::transform_2d<Domain::TimeFrequency>(grid, +1, -1);
}

/// Symplectic finite Fourier transform, TF -> DD; the exact inverse of isfft.
inline DDGrid sfft(const TFGrid& grid, const ModemConfig& cfg) {
    detail::check_shape(grid, cfg);
    return detail::transform_2d<Domain::DelayDoppler>(grid, -1, +1);
}

/// DD-domain sampling filter phi(dk, dl) for ideal rectangular pulses,
/// evaluated as the literal double sum.  For integer arguments this is the
/// Kronecker delta on the torus Z_N x Z_M.
inline cplx dd_filter_phi(long long dk, long long dl, const ModemConfig& cfg) {
    const double N = static_cast<double>(cfg.N);
    const double M = static_cast<double>(cfg.M);
    cplx acc{0.0, 0.0};
    for (std::size_t n = 0; n < cfg.N; ++n)
        for (std::size_t m = 0; m < cfg.M; ++m)
            acc += std::polar(1.0, -2.0 * kPi * (static_cast<double>(n) * static_cast<double>(dk) / N +
                                                   static_cast<double>(m) * static_cast<double>(dl) / M));
    return acc / (N * M);
}

/// Effective DD kernel h[k,l] = sum_p gain_p phi(k - k_p, l - l_p) phase_p.
inline DDGrid effective_dd_kernel(std::span<const DDChannelTap> taps, const ModemConfig& cfg) {
    DDGrid h(cfg.N, cfg.M);
    for (const auto& t : taps)
        for (std::size_t k = 0; k < cfg.N; ++k)
            for (std::size_t l = 0; l < cfg.M; ++l)
                h(k, l) += t.gain * t.phase *
                           dd_filter_phi(static_cast<long long>(k) - static_cast<long long>(t.k_shift),
                                         static_cast<long long>(l) - static_cast<long long>(t.l_shift), cfg);
    return h;
}

/// y[k,l] = sum_taps gain * phase * x[(k - k_shift)_N, (l - l_shift)_M] + w[k,l],
/// w ~ CN(0, noise_psd) i.i.d.  No variates are drawn when noise_psd == 0.
inline DDGrid apply_dd_channel(const DDGrid& tx, std::span<const DDChannelTap> taps, double noise_psd,
                               RandomStream& rng) {
    if (taps.empty()) throw InvalidChannelError("apply_dd_channel: empty tap list");
    if (!(noise_psd >= 0.0)) throw ConfigError("apply_dd_channel: noise_psd must be >= 0");
    const std::size_t N = tx.rows();
    const std::size_t M = tx.cols();
    DDGrid y(N, M);
    for (const auto& t : taps) {
        if (t.k_shift >= N || t.l_shift >= M) throw InvalidChannelError("apply_dd_channel: tap shift out of range");
        if (std::abs(std::abs(t.phase) - 1.0) > 1e-12) throw InvalidChannelError("apply_dd_channel: |phase| != 1");
        const cplx g = t.gain * t.phase;
        for (std::size_t k = 0; k < N; ++k) {
            const std::size_t ks = (k + N - t.k_shift) % N;
            for (std::size_t l = 0; l < M; ++l) y(k, l) += g * tx(ks, (l + M - t.l_shift) % M);
        }
    }
    if (noise_psd > 0.0)
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += rng.complex_gaussian(noise_psd);
    return y;
}

/// Discrete samples of the rectangular-pulse Heisenberg transform at rate
/// oversample * M * delta_f.  Slot n occupies samples [n*L*M, (n+1)*L*M) with
/// L = oversample, and sample i of slot n is
///   s = 1/sqrt(L*M) * sum_m X[n,m] exp(j 2 pi m i / (L*M)),
/// i.e. s(t) at t = nT + i/(L*M*delta_f) scaled by sqrt(dt/T) so the total
/// sample energy equals sum |X[n,m]|^2.
inline std::vector<cplx> generate_time_samples(const TFGrid& tf, const ModemConfig& cfg, std::size_t oversample) {
    detail::check_shape(tf, cfg);
    if (oversample < 1) throw ConfigError("generate_time_samples: oversample must be >= 1");
    const std::size_t per_slot = oversample * cfg.M;
    const double scale = 1.0 / std::sqrt(static_cast<double>(per_slot));
    std::vector<cplx> out(cfg.N * per_slot);
    std::vector<cplx> slot(per_slot);
    for (std::size_t n = 0; n < cfg.N; ++n) {
        std::fill(slot.begin(), slot.end(), cplx{});
        for (std::size_t m = 0; m < cfg.M; ++m) slot[m] = tf(n, m);
        detail::dft(slot, +1);
        for (std::size_t i = 0; i < per_slot; ++i) out[n * per_slot + i] = slot[i] * scale;
    }
    return out;
}

}  // namespace isac_otfs

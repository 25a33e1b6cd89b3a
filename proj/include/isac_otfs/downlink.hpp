#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "isac_otfs/array_geometry.hpp"
#include "isac_otfs/dd_modem.hpp"
#include "isac_otfs/random.hpp"
#include "isac_otfs/scenario.hpp"
#include "isac_otfs/sensing.hpp"
#include "isac_otfs/types.hpp"

namespace isac_otfs {

/// Symbol alphabet.  Point q carries the bit label given by the binary
/// representation of q (MSB first).
struct Constellation {
    std::vector<cplx> points;
    double symbol_energy = 1.0;

    static Constellation bpsk(double es = 1.0) { return {{cplx(std::sqrt(es), 0), cplx(-std::sqrt(es), 0)}, es}; }

    /// Gray-labelled QPSK.
    static Constellation qpsk(double es = 1.0) {
        const double a = std::sqrt(es / 2.0);
        return {{cplx(a, a), cplx(a, -a), cplx(-a, a), cplx(-a, -a)}, es};
    }

    std::size_t size() const noexcept { return points.size(); }

    std::size_t bits_per_symbol() const noexcept {
        std::size_t b = 0;
        while ((std::size_t{1} << b) < points.size()) ++b;
        return b;
    }

    /// Index of the point closest to v (smallest index on ties).
    std::size_t nearest(cplx v) const {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t q = 0; q < points.size(); ++q) {
            const double d = std::norm(v - points[q]);
            if (d < bd) {
                bd = d;
                best = q;
            }
        }
        return best;
    }
};

/// Appends the bit label of symbol index q.
inline void append_bits(std::vector<std::uint8_t>& bits, std::size_t q, std::size_t bits_per_symbol) {
    for (std::size_t b = bits_per_symbol; b-- > 0;) bits.push_back(static_cast<std::uint8_t>((q >> b) & 1u));
}

inline std::size_t count_bit_errors(std::size_t a, std::size_t b) {
    return static_cast<std::size_t>(__builtin_popcountll(static_cast<unsigned long long>(a ^ b)));
}

struct DownlinkFrameResult {
    std::vector<std::uint8_t> tx_bits;
    std::vector<std::uint8_t> rx_bits;
    double receive_snr = 0.0;
    std::size_t bit_errors = 0;
};

/// Scalar the pre-equalized link applies to every DD symbol:
/// (h / h_bar) sqrt(p N_t) a^H(theta) a(theta_bar) / N_t.
inline cplx downlink_effective_gain(const TruthKinematics& truth, const PredictedState& pred, const ArrayConfig& array) {
    if (!(pred.dl_gain > 0.0)) throw InvalidPredictionError("downlink: predicted channel gain is zero");
    const double nt = static_cast<double>(array.n_tx);
    return (truth.path_gain / pred.dl_gain) * std::sqrt(array.per_vehicle_power * nt) *
           steering_inner(truth.angle, pred.angle, array.n_tx) / nt;
}

/// Residual Doppler tap after pre-compensating the predicted Doppler.
inline long long residual_doppler_index(const TruthKinematics& truth, const PredictedState& pred,
                                        const ModemConfig& cfg) {
    return doppler_index(truth.doppler_ow - pred.dl_doppler, cfg);
}

/// Received DD frame after beamforming toward pred.angle with
/// pre-equalization by the predicted gain and Doppler:
///   y[k,l] = g x[(k - dk)_N, l] + w[k,l],  w ~ CN(0, n0).
inline DDGrid transmit_downlink(const DDGrid& frame, const TruthKinematics& truth, const PredictedState& pred,
                                const RsuState& rsu, double n0, RandomStream& rng) {
    const cplx g = downlink_effective_gain(truth, pred, rsu.array);
    const DDChannelTap tap = DDChannelTap::make(g, residual_doppler_index(truth, pred, rsu.modem), 0, rsu.modem);
    return apply_dd_channel(frame, std::span(&tap, 1), n0, rng);
}

/// Per-cell ML decision argmin_q |y - g chi_q|^2.  Returns symbol indices,
/// row-major over the grid.
inline std::vector<std::size_t> detect_single_tap(const DDGrid& rx, cplx gain, const Constellation& constellation) {
    if (std::abs(gain) == 0.0) throw DetectionError("detect_single_tap: zero gain");
    std::vector<std::size_t> out(rx.size());
    for (std::size_t i = 0; i < rx.size(); ++i) {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t q = 0; q < constellation.size(); ++q) {
            const double d = std::norm(rx[i] - gain * constellation.points[q]);
            if (d < bd) {
                bd = d;
                best = q;
            }
        }
        out[i] = best;
    }
    return out;
}

/// SNR at the vehicle: |h/h_bar|^2 p E_s |a^H(theta) a(theta_bar)|^2 / (N_t N_0).
inline double receive_snr(const TruthKinematics& truth, const PredictedState& pred, const ArrayConfig& array,
                          const Constellation& constellation, double n0) {
    return std::norm(downlink_effective_gain(truth, pred, array)) * constellation.symbol_energy / n0;
}

/// How the vehicle obtains the detector gain.
enum class DownlinkGainKnowledge {
    /// Known constant sqrt(p N_t) with phase from one reference cell.
    PhaseReference,
    /// Exact effective gain (reference curve).
    Perfect,
};

struct DownlinkFrameOptions {
    double reference_boost_db = 20.0;  // energy of the reference cell relative to E_s
    DownlinkGainKnowledge knowledge = DownlinkGainKnowledge::PhaseReference;
};

/// One downlink frame: random symbols everywhere except cell (0,0), which
/// carries the phase reference sqrt(E_s * boost) and is excluded from the
/// bit count.
inline DownlinkFrameResult simulate_downlink_frame(const TruthKinematics& truth, const PredictedState& pred,
                                                   const RsuState& rsu, const Constellation& constellation, double n0,
                                                   const DownlinkFrameOptions& opt, RandomStream& bits_rng,
                                                   RandomStream& noise_rng) {
    const ModemConfig& cfg = rsu.modem;
    const std::size_t bps = constellation.bits_per_symbol();
    DDGrid frame(cfg.N, cfg.M);
    std::vector<std::size_t> tx(frame.size());
    const cplx ref = std::sqrt(constellation.symbol_energy * db_to_linear(opt.reference_boost_db));
    frame[0] = ref;
    for (std::size_t i = 1; i < frame.size(); ++i) {
        tx[i] = bits_rng.index(constellation.size());
        frame[i] = constellation.points[tx[i]];
    }
    const DDGrid rx = transmit_downlink(frame, truth, pred, rsu, n0, noise_rng);

    cplx gain;
    if (opt.knowledge == DownlinkGainKnowledge::Perfect) {
        gain = downlink_effective_gain(truth, pred, rsu.array);
    } else {
        const double mag = std::sqrt(rsu.array.per_vehicle_power * static_cast<double>(rsu.array.n_tx));
        const cplx r = rx[0] / ref;
        gain = std::abs(r) > 0.0 ? mag * r / std::abs(r) : cplx(mag, 0.0);
    }
    const auto det = detect_single_tap(rx, gain, constellation);

    DownlinkFrameResult res;
    res.receive_snr = receive_snr(truth, pred, rsu.array, constellation, n0);
    res.tx_bits.reserve((frame.size() - 1) * bps);
    res.rx_bits.reserve((frame.size() - 1) * bps);
    for (std::size_t i = 1; i < frame.size(); ++i) {
        append_bits(res.tx_bits, tx[i], bps);
        append_bits(res.rx_bits, det[i], bps);
        res.bit_errors += count_bit_errors(tx[i], det[i]);
    }
    return res;
}

}  // namespace isac_otfs

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "isac_otfs/dd_modem.hpp"
#include "isac_otfs/downlink.hpp"
#include "isac_otfs/random.hpp"
#include "isac_otfs/types.hpp"

namespace isac_otfs {

// ---------------------------------------------------------------------------
// Symbol placement
// ---------------------------------------------------------------------------

enum class PlacementScheme { Superimposed, GuardSpace };

enum class CellRole : std::uint8_t { Data, Pilot, Guard };

/// Pilot layout of an uplink frame.
///
/// Superimposed: one pilot replaces the data symbol at (k_pilot, l_pilot);
/// every other cell carries data and no cell is reserved.
///
/// GuardSpace: the pilot sits inside a zeroed guard region of 4 k_max rows
/// by 2 l_max columns, rows [k_p - 2 k_max, k_p + 2 k_max) and columns
/// [l_p - l_max, l_p + l_max) on the torus.  The estimation window is rows
/// [k_p - k_max, k_p + k_max) by columns [l_p, l_p + l_max), which stays
/// free of data for taps with k in [-k_max, k_max) and l in [0, l_max).
struct PilotPlacement {
    PlacementScheme scheme = PlacementScheme::Superimposed;
    std::size_t k_pilot = 0;
    std::size_t l_pilot = 0;
    cplx pilot_symbol{10.0, 0.0};
    std::size_t k_max = 0;
    std::size_t l_max = 0;

    double pilot_energy() const { return std::norm(pilot_symbol); }

    static PilotPlacement superimposed(const ModemConfig& cfg, double pilot_energy) {
        return {PlacementScheme::Superimposed, cfg.N / 2, cfg.M / 2, cplx(std::sqrt(pilot_energy), 0.0), 0, 0};
    }

    static PilotPlacement guard_space(const ModemConfig& cfg, double pilot_energy, std::size_t k_max,
                                      std::size_t l_max) {
        PilotPlacement p{PlacementScheme::GuardSpace, cfg.N / 2, cfg.M / 2, cplx(std::sqrt(pilot_energy), 0.0),
                         k_max, l_max};
        p.validate(cfg);
        return p;
    }

    void validate(const ModemConfig& cfg) const {
        if (k_pilot >= cfg.N || l_pilot >= cfg.M) throw PlacementError("pilot cell outside the grid");
        if (scheme == PlacementScheme::GuardSpace) {
            if (k_max < 1 || l_max < 1) throw PlacementError("guard space needs k_max, l_max >= 1");
            if (4 * k_max > cfg.N || 2 * l_max > cfg.M) throw PlacementError("guard region larger than the frame");
        }
    }

    /// Signed offset of r from c on a ring of size n, in [-n/2, n/2).
    static long long ring_offset(std::size_t r, std::size_t c, std::size_t n) {
        long long d = static_cast<long long>(wrap(static_cast<long long>(r) - static_cast<long long>(c), n));
        if (d >= static_cast<long long>((n + 1) / 2)) d -= static_cast<long long>(n);
        return d;
    }

    CellRole role(std::size_t k, std::size_t l, const ModemConfig& cfg) const {
        if (k == k_pilot && l == l_pilot) return CellRole::Pilot;
        if (scheme == PlacementScheme::Superimposed) return CellRole::Data;
        const long long dk = ring_offset(k, k_pilot, cfg.N);
        const long long dl = ring_offset(l, l_pilot, cfg.M);
        const long long km = static_cast<long long>(k_max), lm = static_cast<long long>(l_max);
        const bool in_rows = (4 * k_max == cfg.N) || (dk >= -2 * km && dk < 2 * km);
        const bool in_cols = (2 * l_max == cfg.M) || (dl >= -lm && dl < lm);
        return in_rows && in_cols ? CellRole::Guard : CellRole::Data;
    }

    /// Cells reserved for channel estimation (guard region including the
    /// pilot position); zero for the superimposed layout.
    std::size_t reserved_cells(const ModemConfig&) const {
        return scheme == PlacementScheme::Superimposed ? 0 : 8 * k_max * l_max;
    }

    std::size_t data_cells(const ModemConfig& cfg) const {
        std::size_t n = 0;
        for (std::size_t k = 0; k < cfg.N; ++k)
            for (std::size_t l = 0; l < cfg.M; ++l) n += role(k, l, cfg) == CellRole::Data;
        return n;
    }

    /// Fraction of the frame reserved for training.
    double overhead(const ModemConfig& cfg) const {
        return static_cast<double>(reserved_cells(cfg)) / static_cast<double>(cfg.cells());
    }
};

/// Maps data symbols (row-major over the data cells) onto the DD frame.
inline DDGrid place_symbols(std::span<const cplx> data, const PilotPlacement& placement, const ModemConfig& cfg) {
    placement.validate(cfg);
    const std::size_t need = placement.data_cells(cfg);
    if (data.size() != need)
        throw PlacementError("place_symbols: got " + std::to_string(data.size()) + " data symbols, layout has " +
                             std::to_string(need) + " data cells");
    DDGrid out(cfg.N, cfg.M);
    std::size_t d = 0;
    for (std::size_t k = 0; k < cfg.N; ++k)
        for (std::size_t l = 0; l < cfg.M; ++l) {
            switch (placement.role(k, l, cfg)) {
                case CellRole::Data: out(k, l) = data[d++]; break;
                case CellRole::Pilot: out(k, l) = placement.pilot_symbol; break;
                case CellRole::Guard: break;
            }
        }
    return out;
}

/// Cells whose transmitted value the receiver knows (pilot and guard zeros).
struct KnownCells {
    std::vector<std::size_t> index;  // row-major cell index
    std::vector<cplx> value;
};

inline KnownCells known_cells(const PilotPlacement& placement, const ModemConfig& cfg) {
    KnownCells kc;
    for (std::size_t k = 0; k < cfg.N; ++k)
        for (std::size_t l = 0; l < cfg.M; ++l) {
            const CellRole r = placement.role(k, l, cfg);
            if (r == CellRole::Data) continue;
            kc.index.push_back(k * cfg.M + l);
            kc.value.push_back(r == CellRole::Pilot ? placement.pilot_symbol : cplx{});
        }
    return kc;
}

// ---------------------------------------------------------------------------
// Channel taps and estimation
// ---------------------------------------------------------------------------

/// Ground-truth effective tap: y[k,l] += gain * x[k - k_shift, l - l_shift].
/// The gain already contains the receive-beam gain kappa and the
/// exp(-j 2 pi tau nu) phase.
struct UplinkTap {
    long long k = 0;
    long long l = 0;
    cplx gain{0.0, 0.0};
    double mean_power = 1.0;
};

/// Tap location known at the receiver from prediction, with the prior mean
/// power of its effective gain.
struct PredictedTap {
    long long k = 0;
    long long l = 0;
    cplx kappa{1.0, 0.0};
    double mean_power = 1.0;
};

struct PathEstimate {
    long long k = 0;
    long long l = 0;
    cplx gain{0.0, 0.0};  // kappa * h_hat, estimated jointly
    cplx kappa{1.0, 0.0};
    double variance = 0.0;  // sigma^2 of gain
};

struct UplinkChannelEstimate {
    std::vector<PathEstimate> paths;
    /// (E_s sum_p mean_power_p + N_0) / E_p, which is (P E_s + N_0) / E_p
    /// for unit-power paths.
    double uncertainty_bound = 0.0;
    bool tap_collision = false;
};

inline std::vector<DDChannelTap> to_dd_taps(std::span<const UplinkTap> taps, const ModemConfig& cfg) {
    std::vector<DDChannelTap> out;
    out.reserve(taps.size());
    for (const auto& t : taps) out.push_back(DDChannelTap::make(t.gain, t.k, t.l, cfg));
    return out;
}

/// Sums taps that land on the same grid shift.  Returns true if any merged.
template <class Tap>
bool merge_colliding(std::vector<Tap>& taps, const ModemConfig& cfg) {
    std::vector<Tap> out;
    bool merged = false;
    for (const auto& t : taps) {
        auto it = std::find_if(out.begin(), out.end(), [&](const Tap& o) {
            return wrap(o.k, cfg.N) == wrap(t.k, cfg.N) && wrap(o.l, cfg.M) == wrap(t.l, cfg.M);
        });
        if (it == out.end()) {
            out.push_back(t);
            continue;
        }
        merged = true;
        if constexpr (requires { t.gain; }) it->gain += t.gain;
        it->mean_power += t.mean_power;
    }
    taps = std::move(out);
    return merged;
}

/// Pilot-ratio gain estimate from the predicted taps:
///   g_hat_p = y[(k_pl + k_p)_N, (l_pl + l_p)_M] / x_pl,
/// with uncertainty sigma_p^2 = (E_s sum_{p' != p} mean_power_p' + N_0) / E_p,
/// the interference power of the other paths' data symbols plus noise.
inline UplinkChannelEstimate estimate_gains(const DDGrid& rx, const PilotPlacement& placement,
                                            std::vector<PredictedTap> predicted, double es, double n0,
                                            const ModemConfig& cfg) {
    if (std::abs(placement.pilot_symbol) == 0.0) throw InvalidPilotError("estimate_gains: zero pilot symbol");
    if (predicted.empty()) throw InvalidChannelError("estimate_gains: no predicted taps");
    UplinkChannelEstimate est;
    est.tap_collision = merge_colliding(predicted, cfg);
    const double ep = placement.pilot_energy();
    double total_power = 0.0;
    for (const auto& t : predicted) total_power += t.mean_power;
    est.uncertainty_bound = (es * total_power + n0) / ep;
    for (const auto& t : predicted) {
        PathEstimate pe;
        pe.k = t.k;
        pe.l = t.l;
        pe.kappa = t.kappa;
        pe.gain = rx(wrap(static_cast<long long>(placement.k_pilot) + t.k, cfg.N),
                     wrap(static_cast<long long>(placement.l_pilot) + t.l, cfg.M)) /
                  placement.pilot_symbol;
        pe.variance = (es * (total_power - t.mean_power) + n0) / ep;
        est.paths.push_back(pe);
    }
    return est;
}

/// Threshold detector over the guard-space estimation window: every cell
/// with |y| > 3 sqrt(N_0) is declared a path with gain y / x_pl.
inline UplinkChannelEstimate detect_conventional_threshold(const DDGrid& rx, const PilotPlacement& placement,
                                                           double n0, const ModemConfig& cfg) {
    if (placement.scheme != PlacementScheme::GuardSpace)
        throw PlacementError("detect_conventional_threshold: needs guard-space placement");
    if (std::abs(placement.pilot_symbol) == 0.0) throw InvalidPilotError("zero pilot symbol");
    const double threshold = 3.0 * std::sqrt(n0);
    const long long km = static_cast<long long>(placement.k_max);
    const long long lm = static_cast<long long>(placement.l_max);
    UplinkChannelEstimate est;
    for (long long dk = -km; dk < km; ++dk)
        for (long long dl = 0; dl < lm; ++dl) {
            const cplx v = rx(wrap(static_cast<long long>(placement.k_pilot) + dk, cfg.N),
                              wrap(static_cast<long long>(placement.l_pilot) + dl, cfg.M));
            if (std::abs(v) > threshold)
                est.paths.push_back({dk, dl, v / placement.pilot_symbol, cplx(1.0, 0.0), n0 / placement.pilot_energy()});
        }
    est.uncertainty_bound = n0 / placement.pilot_energy();
    return est;
}

/// Estimate built from the true taps (perfect CSI).
inline UplinkChannelEstimate perfect_estimate(std::span<const UplinkTap> taps) {
    UplinkChannelEstimate est;
    for (const auto& t : taps) est.paths.push_back({t.k, t.l, t.gain, cplx(1.0, 0.0), 0.0});
    return est;
}

/// sum |g_hat - g|^2 / sum |g|^2 over the union of estimated and true taps
/// (a tap missing on either side counts as zero gain).
inline double channel_nmse(const UplinkChannelEstimate& est, std::span<const UplinkTap> truth, const ModemConfig& cfg) {
    double num = 0.0, den = 0.0;
    std::vector<bool> used(est.paths.size(), false);
    for (const auto& t : truth) {
        den += std::norm(t.gain);
        cplx g{0.0, 0.0};
        for (std::size_t i = 0; i < est.paths.size(); ++i) {
            if (!used[i] && wrap(est.paths[i].k, cfg.N) == wrap(t.k, cfg.N) &&
                wrap(est.paths[i].l, cfg.M) == wrap(t.l, cfg.M)) {
                g = est.paths[i].gain;
                used[i] = true;
                break;
            }
        }
        num += std::norm(g - t.gain);
    }
    for (std::size_t i = 0; i < est.paths.size(); ++i)
        if (!used[i]) num += std::norm(est.paths[i].gain);
    return num / den;
}

/// P distinct taps with k in [-k_max, k_max) and l in [0, l_max); the first
/// is the direct path (l = 0).  Mean powers follow exp(-l) and sum to one;
/// gains are CN(0, mean_power).
inline std::vector<UplinkTap> draw_synthetic_channel(std::size_t paths, std::size_t k_max, std::size_t l_max,
                                                     RandomStream& rng) {
    if (paths < 1) throw ConfigError("synthetic channel: paths must be >= 1");
    if (paths > 2 * k_max * l_max) throw ConfigError("synthetic channel: more paths than tap positions");
    const long long km = static_cast<long long>(k_max);
    std::vector<UplinkTap> taps;
    std::set<std::pair<long long, long long>> seen;
    while (taps.size() < paths) {
        const long long k = static_cast<long long>(rng.index(2 * k_max)) - km;
        const long long l = taps.empty() ? 0 : static_cast<long long>(rng.index(l_max));
        if (!seen.insert({k, l}).second) continue;
        taps.push_back({k, l, {}, std::exp(-static_cast<double>(l))});
    }
    double total = 0.0;
    for (const auto& t : taps) total += t.mean_power;
    for (auto& t : taps) {
        t.mean_power /= total;
        t.gain = rng.complex_gaussian(t.mean_power);
    }
    return taps;
}

// ---------------------------------------------------------------------------
// Factor graph and sum-product detection
// ---------------------------------------------------------------------------

/// Bipartite graph between the N*M symbol variables and the N*M received
/// samples.  Edge (v, p) joins variable v = (k, l) to the function node
/// ((k + k_p)_N, (l + l_p)_M); equivalently function f's p-th neighbour is
/// ((k_f - k_p)_N, (l_f - l_p)_M).
struct FactorGraph {
    std::size_t N = 0;
    std::size_t M = 0;
    std::size_t P = 0;
    std::vector<std::size_t> fn_of_var;  // [v * P + p]
    std::vector<std::size_t> var_of_fn;  // [f * P + p]

    std::size_t nodes() const { return N * M; }
};

inline FactorGraph build_factor_graph(std::span<const std::pair<long long, long long>> taps, const ModemConfig& cfg) {
    if (taps.empty()) throw InvalidChannelError("build_factor_graph: no paths");
    std::set<std::pair<std::size_t, std::size_t>> distinct;
    for (const auto& [k, l] : taps)
        if (!distinct.insert({wrap(k, cfg.N), wrap(l, cfg.M)}).second)
            throw InvalidChannelError("build_factor_graph: colliding taps");
    FactorGraph g{cfg.N, cfg.M, taps.size(), {}, {}};
    g.fn_of_var.resize(g.nodes() * g.P);
    g.var_of_fn.resize(g.nodes() * g.P);
    for (std::size_t k = 0; k < cfg.N; ++k)
        for (std::size_t l = 0; l < cfg.M; ++l)
            for (std::size_t p = 0; p < g.P; ++p) {
                const auto [kp, lp] = taps[p];
                const std::size_t v = k * cfg.M + l;
                g.fn_of_var[v * g.P + p] =
                    wrap(static_cast<long long>(k) + kp, cfg.N) * cfg.M + wrap(static_cast<long long>(l) + lp, cfg.M);
                g.var_of_fn[v * g.P + p] =
                    wrap(static_cast<long long>(k) - kp, cfg.N) * cfg.M + wrap(static_cast<long long>(l) - lp, cfg.M);
            }
    return g;
}

inline FactorGraph build_factor_graph(const UplinkChannelEstimate& est, const ModemConfig& cfg) {
    std::vector<std::pair<long long, long long>> taps;
    for (const auto& p : est.paths) taps.emplace_back(p.k, p.l);
    return build_factor_graph(taps, cfg);
}

/// Per-cell posterior approximations over the constellation.
struct SymbolBeliefs {
    std::size_t cells = 0;
    std::size_t Q = 0;
    std::vector<double> prob;  // [v * Q + q]
    std::size_t iterations_run = 0;

    std::span<const double> at(std::size_t v) const { return {prob.data() + v * Q, Q}; }
};

struct SpaOptions {
    std::size_t iterations = 10;
    bool use_uncertainty = true;
    double damping = 0.0;
    double tolerance = 1e-6;
    double variance_floor = 1e-12;
};

/// Variance of a function-to-variable Gaussian message toward path p.
///
/// Without uncertainty: (N_0 + sum_{p'!=p} |g_p'|^2 V_p') / |g_p|^2.
/// With uncertainty each interferer contributes
///   E_s sigma_p'^2 + (|g_p'|^2 + sigma_p'^2) V_p'
/// (product-variance identity with the channel estimate as a random
/// variable; sigma^2 = 0 recovers the first form).  The numerator is
/// floored at `floor`.
inline double spa_message_variance(std::size_t p, std::span<const cplx> gains, std::span<const double> sym_var,
                                   std::span<const double> gain_var, double n0, double es, bool use_uncertainty,
                                   double floor) {
    double acc = n0;
    for (std::size_t q = 0; q < gains.size(); ++q) {
        if (q == p) continue;
        if (use_uncertainty)
            acc += es * gain_var[q] + (std::norm(gains[q]) + gain_var[q]) * sym_var[q];
        else
            acc += std::norm(gains[q]) * sym_var[q];
    }
    // Floor the noise-plus-interference power, not the ratio, so every
    // message toward a node shares one effective noise level.
    return std::max(acc, floor) / std::norm(gains[p]);
}

/// Sum-product detection on the DD factor graph with Gaussian
/// function-to-variable messages.  Flooding schedule: all function nodes,
/// then all variable nodes, for up to opt.iterations rounds, stopping early
/// once no belief moves by more than opt.tolerance.  Known cells (pilot,
/// guard zeros) enter as fixed symbols and keep uniform beliefs.
inline SymbolBeliefs spa_detect(const DDGrid& rx, const UplinkChannelEstimate& estimate,
                                const Constellation& constellation, double n0, const SpaOptions& opt,
                                const KnownCells& known = {}) {
    if (opt.iterations < 1) throw ConfigError("spa_detect: iterations must be >= 1");
    if (!(opt.damping >= 0.0 && opt.damping < 1.0)) throw ConfigError("spa_detect: damping must be in [0, 1)");
    const ModemConfig cfg{rx.rows(), rx.cols()};
    const FactorGraph graph = build_factor_graph(estimate, cfg);
    const std::size_t V = graph.nodes();
    const std::size_t P = graph.P;
    const std::size_t Q = constellation.size();
    const auto& chi = constellation.points;

    std::vector<cplx> gains(P);
    std::vector<double> gain_var(P);
    for (std::size_t p = 0; p < P; ++p) {
        gains[p] = estimate.paths[p].gain;
        gain_var[p] = estimate.paths[p].variance;
        if (std::abs(gains[p]) == 0.0) throw DetectionError("spa_detect: zero path gain");
    }

    std::vector<std::int8_t> is_known(V, 0);
    std::vector<cplx> known_val(V);
    for (std::size_t i = 0; i < known.index.size(); ++i) {
        is_known[known.index[i]] = 1;
        known_val[known.index[i]] = known.value[i];
    }

    // Edge e = v * P + p.
    std::vector<double> mu(V * P * Q, 1.0 / static_cast<double>(Q));  // variable -> function
    std::vector<double> log_psi(V * P * Q, 0.0);                      // function -> variable
    std::vector<cplx> edge_mean(V * P);
    std::vector<double> edge_var(V * P);
    SymbolBeliefs beliefs{V, Q, std::vector<double>(V * Q, 1.0 / static_cast<double>(Q)), 0};
    std::vector<double> next_belief(V * Q);

    std::vector<cplx> m_loc(P);
    std::vector<double> v_loc(P);
    std::vector<double> work(Q);

    for (std::size_t it = 0; it < opt.iterations; ++it) {
        // Means and variances of the variable-to-function messages.
        for (std::size_t v = 0; v < V; ++v)
            for (std::size_t p = 0; p < P; ++p) {
                const std::size_t e = v * P + p;
                if (is_known[v]) {
                    edge_mean[e] = known_val[v];
                    edge_var[e] = 0.0;
                    continue;
                }
                cplx m{0.0, 0.0};
                double s2 = 0.0;
                for (std::size_t q = 0; q < Q; ++q) {
                    m += mu[e * Q + q] * chi[q];
                    s2 += mu[e * Q + q] * std::norm(chi[q]);
                }
                edge_mean[e] = m;
                edge_var[e] = std::max(s2 - std::norm(m), 0.0);
            }

        // Function nodes: Gaussian message toward each neighbour.
        for (std::size_t f = 0; f < V; ++f) {
            for (std::size_t p = 0; p < P; ++p) {
                const std::size_t e = graph.var_of_fn[f * P + p] * P + p;
                m_loc[p] = edge_mean[e];
                v_loc[p] = edge_var[e];
            }
            for (std::size_t p = 0; p < P; ++p) {
                const std::size_t v = graph.var_of_fn[f * P + p];
                if (is_known[v]) continue;
                cplx interference{0.0, 0.0};
                for (std::size_t q = 0; q < P; ++q)
                    if (q != p) interference += gains[q] * m_loc[q];
                const cplx mean = (rx[f] - interference) / gains[p];
                const double var = spa_message_variance(p, gains, v_loc, gain_var, n0, constellation.symbol_energy,
                                                        opt.use_uncertainty, opt.variance_floor);
                double mx = -std::numeric_limits<double>::infinity();
                for (std::size_t q = 0; q < Q; ++q) {
                    work[q] = -std::norm(chi[q] - mean) / var;
                    mx = std::max(mx, work[q]);
                }
                double z = 0.0;
                for (std::size_t q = 0; q < Q; ++q) z += std::exp(work[q] - mx);
                const double lz = mx + std::log(z);
                const std::size_t e = v * P + p;
                for (std::size_t q = 0; q < Q; ++q) log_psi[e * Q + q] = work[q] - lz;
            }
        }

        // Variable nodes: extrinsic products and beliefs.
        double max_change = 0.0;
        for (std::size_t v = 0; v < V; ++v) {
            if (is_known[v]) {
                for (std::size_t q = 0; q < Q; ++q) next_belief[v * Q + q] = 1.0 / static_cast<double>(Q);
                continue;
            }
            for (std::size_t q = 0; q < Q; ++q) {
                double s = 0.0;
                for (std::size_t p = 0; p < P; ++p) s += log_psi[(v * P + p) * Q + q];
                work[q] = s;
            }
            const double mx = *std::max_element(work.begin(), work.begin() + static_cast<long>(Q));
            double z = 0.0;
            for (std::size_t q = 0; q < Q; ++q) z += std::exp(work[q] - mx);
            for (std::size_t q = 0; q < Q; ++q) {
                next_belief[v * Q + q] = std::exp(work[q] - mx) / z;
                max_change = std::max(max_change, std::abs(next_belief[v * Q + q] - beliefs.prob[v * Q + q]));
            }
            for (std::size_t p = 0; p < P; ++p) {
                const std::size_t e = v * P + p;
                double emx = -std::numeric_limits<double>::infinity();
                for (std::size_t q = 0; q < Q; ++q) emx = std::max(emx, work[q] - log_psi[e * Q + q]);
                double ez = 0.0;
                for (std::size_t q = 0; q < Q; ++q) ez += std::exp(work[q] - log_psi[e * Q + q] - emx);
                for (std::size_t q = 0; q < Q; ++q) {
                    const double fresh = std::exp(work[q] - log_psi[e * Q + q] - emx) / ez;
                    mu[e * Q + q] = (1.0 - opt.damping) * fresh + opt.damping * mu[e * Q + q];
                }
            }
        }
        beliefs.prob.swap(next_belief);
        beliefs.iterations_run = it + 1;
        if (max_change < opt.tolerance) break;
    }
    return beliefs;
}

/// Per-cell argmax; the smallest index wins ties.
inline std::vector<std::size_t> decide(const SymbolBeliefs& beliefs) {
    std::vector<std::size_t> out(beliefs.cells);
    for (std::size_t v = 0; v < beliefs.cells; ++v) {
        const auto b = beliefs.at(v);
        out[v] = static_cast<std::size_t>(std::max_element(b.begin(), b.end()) - b.begin());
    }
    return out;
}

}  // namespace isac_otfs

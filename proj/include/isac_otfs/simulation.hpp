#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "isac_otfs/array_geometry.hpp"
#include "isac_otfs/config.hpp"
#include "isac_otfs/dd_modem.hpp"
#include "isac_otfs/downlink.hpp"
#include "isac_otfs/random.hpp"
#include "isac_otfs/scenario.hpp"
#include "isac_otfs/sensing.hpp"
#include "isac_otfs/types.hpp"
#include "isac_otfs/uplink.hpp"

#ifndef ISAC_OTFS_VERSION
#define ISAC_OTFS_VERSION "0.0.0"
#endif

namespace isac_otfs {

/// One output row.  vehicle == -1 and seed == -1 mark aggregates.
struct MetricRecord {
    std::string metric;
    double index = 0.0;  // instant or SNR (dB)
    long long vehicle = -1;
    long long seed = -1;
    double value = 0.0;
};

using Records = std::vector<MetricRecord>;

/// Runs fn(i) for i in [0, n) on up to `threads` workers.  Callers write
/// into per-index slots so the result never depends on scheduling.
inline void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < n; i = next++) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
                next = n;
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

inline Constellation make_constellation(const std::string& name, double es) {
    return name == "qpsk" ? Constellation::qpsk(es) : Constellation::bpsk(es);
}

inline std::uint64_t trial_seed(const SimulationConfig& cfg, std::size_t trial) { return cfg.run.seed + trial; }

// ---------------------------------------------------------------------------
// Tracking loop (sensing, prediction, truth evolution)
// ---------------------------------------------------------------------------

struct InstantSnapshot {
    std::vector<VehicleState> truth;        // at this instant
    std::vector<TruthKinematics> kin;
    std::vector<EstimatedState> est;
    std::vector<PredictedState> pred;       // for the next instant
    std::vector<VehicleState> next_truth;
    std::vector<TruthKinematics> next_kin;
};

using TrackingTrace = std::vector<InstantSnapshot>;

inline std::vector<VehicleState> initial_vehicles(const SimulationConfig& cfg, std::uint64_t seed) {
    std::vector<VehicleState> v;
    for (std::size_t i = 0; i < cfg.scenario.vehicles.size(); ++i) {
        RandomStream rng(seed, StreamTag::Speeds, 0, static_cast<std::int64_t>(i), 0);
        const auto& vc = cfg.scenario.vehicles[i];
        v.push_back({vc.position, draw_speed(rng, cfg.scenario.speed_min, cfg.scenario.speed_max), vc.rcs});
    }
    return v;
}

/// One Monte Carlo trial of the sense-predict loop.  At instant 0 the beam
/// points at the true initial angle (initial acquisition) and the angle
/// search covers the full grid; afterwards beam and search follow the
/// previous prediction.
inline TrackingTrace run_tracking_trial(const SimulationConfig& cfg, std::uint64_t seed) {
    const RsuState rsu = cfg.rsu();
    const SensingOptions opt{cfg.sensing.symbol_energy, cfg.sensing.noise_var, cfg.sensing.search_halfwidth,
                             RadarSearchGrid::refined(cfg.modem, cfg.sensing.delay_refine, cfg.sensing.doppler_refine),
                             cfg.sensing.angle_refine};
    const std::size_t V = cfg.scenario.vehicles.size();
    std::vector<VehicleState> truth = initial_vehicles(cfg, seed);
    std::vector<PredictedState> prev_pred;
    std::vector<double> prev_speed(V, 0.0);
    TrackingTrace trace;
    trace.reserve(cfg.scenario.instants);
    for (std::size_t eta = 0; eta < cfg.scenario.instants; ++eta) {
        InstantSnapshot snap;
        snap.truth = truth;
        for (std::size_t i = 0; i < V; ++i) {
            const auto kin = truth_kinematics(truth[i], rsu);
            std::optional<double> predicted;
            double beam_angle = kin.angle;
            if (eta > 0) {
                predicted = prev_pred[i].angle;
                beam_angle = prev_pred[i].angle;
            }
            const Beamformer beam = tx_beamformer(beam_angle, rsu.array);
            RandomStream rng(seed, StreamTag::RadarNoise, 0, static_cast<std::int64_t>(i),
                             static_cast<std::int64_t>(eta));
            auto est = estimate_state(kin, beam, rsu, opt, truth[i].rcs, predicted, prev_speed[i], rng);
            prev_speed[i] = est.speed;
            snap.kin.push_back(kin);
            snap.est.push_back(est);
            snap.pred.push_back(predict_state(est, cfg.scenario.dt, rsu));
        }
        predict_uplink_paths(snap.pred, rsu);
        for (auto& v : truth) v = evolve(v, cfg.scenario.dt);
        snap.next_truth = truth;
        for (const auto& v : truth) snap.next_kin.push_back(truth_kinematics(v, rsu));
        prev_pred = snap.pred;
        trace.push_back(std::move(snap));
    }
    return trace;
}

inline PredictedState exact_prediction(const TruthKinematics& t) {
    PredictedState p;
    p.angle = t.angle;
    p.dl_gain = t.path_gain;
    p.dl_doppler = t.doppler_ow;
    return p;
}

inline Records tracking_records(const SimulationConfig& cfg, const TrackingTrace& trace, std::uint64_t seed) {
    Records out;
    const auto rsu = cfg.rsu();
    const auto c = make_constellation(cfg.downlink.modulation, cfg.sensing.symbol_energy);
    const long long s = static_cast<long long>(seed);
    for (std::size_t eta = 0; eta < trace.size(); ++eta) {
        const auto& snap = trace[eta];
        const double idx = static_cast<double>(eta);
        for (std::size_t i = 0; i < snap.est.size(); ++i) {
            const long long v = static_cast<long long>(i);
            out.push_back({"angle_error", idx, v, s, std::abs(snap.est[i].angle - snap.kin[i].angle)});
            out.push_back({"localization_error", idx, v, s, norm(snap.est[i].position - snap.truth[i].position)});
            out.push_back({"speed_error", idx, v, s, std::abs(snap.est[i].speed - snap.truth[i].speed)});
            // The prediction made now serves the next instant's downlink.
            const double snr = receive_snr(snap.next_kin[i], snap.pred[i], rsu.array, c, cfg.downlink.trace_noise_psd);
            out.push_back({"receive_snr_db", idx + 1.0, v, s, linear_to_db(snr)});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Downlink BER
// ---------------------------------------------------------------------------

inline Records downlink_records(const SimulationConfig& cfg, const TrackingTrace& trace, std::uint64_t seed) {
    Records out;
    const auto rsu = cfg.rsu();
    const auto c = make_constellation(cfg.downlink.modulation, cfg.sensing.symbol_energy);
    const std::size_t V = cfg.scenario.vehicles.size();
    const double nominal = rsu.array.per_vehicle_power * static_cast<double>(rsu.array.n_tx) * c.symbol_energy;
    const bool want_proposed = cfg.has_scheme(Scheme::Proposed);
    const bool want_perfect = cfg.has_scheme(Scheme::PerfectCsi);
    for (std::size_t si = 0; si < cfg.downlink.snr_db.size(); ++si) {
        const double snr_db = cfg.downlink.snr_db[si];
        const double n0 = nominal / db_to_linear(snr_db);
        for (std::size_t i = 0; i < V; ++i) {
            std::size_t bits = 0, err_prop = 0, err_perf = 0;
            for (std::size_t eta = cfg.sensing.burn_in; eta < trace.size(); eta += cfg.downlink.instant_stride) {
                const auto& snap = trace[eta];
                const auto tag = [&](StreamTag t) {
                    return RandomStream(seed, t, static_cast<std::int64_t>(si), static_cast<std::int64_t>(i),
                                        static_cast<std::int64_t>(eta));
                };
                DownlinkFrameOptions opt;
                opt.reference_boost_db = cfg.downlink.reference_boost_db;
                if (want_proposed) {
                    auto b = tag(StreamTag::DownlinkBits), w = tag(StreamTag::DownlinkNoise);
                    opt.knowledge = DownlinkGainKnowledge::PhaseReference;
                    const auto r = simulate_downlink_frame(snap.next_kin[i], snap.pred[i], rsu, c, n0, opt, b, w);
                    err_prop += r.bit_errors;
                }
                if (want_perfect) {
                    auto b = tag(StreamTag::DownlinkBits), w = tag(StreamTag::DownlinkNoise);
                    opt.knowledge = DownlinkGainKnowledge::Perfect;
                    const auto r = simulate_downlink_frame(snap.next_kin[i], exact_prediction(snap.next_kin[i]), rsu,
                                                           c, n0, opt, b, w);
                    err_perf += r.bit_errors;
                }
                bits += (cfg.modem.cells() - 1) * c.bits_per_symbol();
            }
            const long long v = static_cast<long long>(i), s = static_cast<long long>(seed);
            if (bits == 0) continue;
            if (want_proposed)
                out.push_back({"downlink_ber_proposed", snr_db, v, s, static_cast<double>(err_prop) / static_cast<double>(bits)});
            if (want_perfect)
                out.push_back(
                    {"downlink_ber_perfect_csi", snr_db, v, s, static_cast<double>(err_perf) / static_cast<double>(bits)});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Uplink
// ---------------------------------------------------------------------------

/// One uplink channel realization: truth taps and what the receiver
/// predicts about their positions and mean powers.
struct UplinkChannelDraw {
    std::vector<UplinkTap> truth;
    std::vector<PredictedTap> predicted;
    double mean_power = 0.0;  // sum of predicted mean powers
};

inline UplinkChannelDraw synthetic_draw(const SimulationConfig& cfg, RandomStream& rng) {
    UplinkChannelDraw d;
    d.truth = draw_synthetic_channel(cfg.uplink.paths, cfg.uplink.guard_kmax, cfg.uplink.guard_lmax, rng);
    for (const auto& t : d.truth) {
        d.predicted.push_back({t.k, t.l, cplx(1.0, 0.0), t.mean_power});
        d.mean_power += t.mean_power;
    }
    return d;
}

/// Taps from the road geometry.  The RSU receive beam points at the
/// vehicle's predicted direction; kappa_p = b^H(theta_bar) b(theta_p) / N_r.
/// The exp(-j 2 pi tau nu) phase is assumed compensated from predictions.
inline UplinkChannelDraw geometric_draw(const SimulationConfig& cfg, const InstantSnapshot& snap, std::size_t vehicle,
                                        RandomStream& rng) {
    const RsuState rsu = cfg.rsu();
    const auto paths = uplink_paths(vehicle, snap.next_truth, rsu, rng);
    const double beam = snap.pred[vehicle].angle;
    const double nr = static_cast<double>(rsu.array.n_rx);
    UplinkChannelDraw d;
    for (const auto& p : paths) {
        const cplx kappa = steering_inner(beam, p.angle, rsu.array.n_rx) / nr;
        d.truth.push_back({doppler_index(p.doppler, rsu.modem), delay_index(p.delay, rsu.modem), kappa * p.gain,
                           std::norm(kappa) * p.mean_power});
    }
    merge_colliding(d.truth, rsu.modem);
    const auto& pred = snap.pred[vehicle];
    const double direct = std::pow(free_space_amplitude(norm(pred.position - rsu.position), rsu.modem), 2.0);
    for (const auto& g : pred.uplink) {
        const cplx kappa = steering_inner(beam, g.angle, rsu.array.n_rx) / nr;
        const double power = std::norm(kappa) * direct * pdp_scale(g.delay, rsu.modem);
        d.predicted.push_back({doppler_index(g.doppler, rsu.modem), delay_index(g.delay, rsu.modem), kappa, power});
    }
    merge_colliding(d.predicted, rsu.modem);
    for (const auto& p : d.predicted) d.mean_power += p.mean_power;
    return d;
}

struct UplinkTally {
    std::size_t bits = 0;
    std::size_t guard_bits = 0;
    std::map<Scheme, std::size_t> errors;
    double nmse_superimposed = 0.0;
    double nmse_guard = 0.0;
    std::size_t frames = 0;
    std::size_t collisions = 0;
    std::size_t missed_detections = 0;
};

inline std::size_t count_errors(const std::vector<std::size_t>& decided, const std::vector<std::size_t>& sent,
                                const std::vector<std::uint8_t>& is_data) {
    std::size_t e = 0;
    for (std::size_t i = 0; i < sent.size(); ++i)
        if (is_data[i]) e += count_bit_errors(decided[i], sent[i]);
    return e;
}

/// Draws data symbols for every data cell of a layout.
inline DDGrid draw_frame(const PilotPlacement& placement, const Constellation& c, const ModemConfig& m,
                         RandomStream& rng, std::vector<std::size_t>& sent, std::vector<std::uint8_t>& is_data) {
    sent.assign(m.cells(), 0);
    is_data.assign(m.cells(), 0);
    std::vector<cplx> data;
    data.reserve(m.cells());
    for (std::size_t k = 0; k < m.N; ++k)
        for (std::size_t l = 0; l < m.M; ++l)
            if (placement.role(k, l, m) == CellRole::Data) {
                const std::size_t v = k * m.M + l;
                sent[v] = rng.index(c.size());
                is_data[v] = 1;
                data.push_back(c.points[sent[v]]);
            }
    return place_symbols(data, placement, m);
}

/// Runs every selected uplink scheme on one channel draw at one SNR.
inline void uplink_frame(const SimulationConfig& cfg, const UplinkChannelDraw& ch, double snr_db, RandomStream& bits_rng,
                         RandomStream& noise_rng, UplinkTally& tally) {
    const ModemConfig& m = cfg.modem;
    const auto c = make_constellation(cfg.uplink.modulation, 1.0);
    const double es = c.symbol_energy;
    const double ep = es * db_to_linear(cfg.uplink.pilot_ratio_db);
    const double n0 = es * ch.mean_power / db_to_linear(snr_db);
    const auto dd = to_dd_taps(ch.truth, m);
    SpaOptions opt;
    opt.iterations = cfg.uplink.spa_iterations;
    opt.damping = cfg.uplink.spa_damping;
    opt.tolerance = cfg.uplink.spa_tolerance;

    auto superimposed = PilotPlacement::superimposed(m, ep);
    auto guard = PilotPlacement::guard_space(m, ep, cfg.uplink.guard_kmax, cfg.uplink.guard_lmax);
    if (cfg.uplink.pilot_cell) {
        superimposed.k_pilot = guard.k_pilot = cfg.uplink.pilot_cell->first;
        superimposed.l_pilot = guard.l_pilot = cfg.uplink.pilot_cell->second;
    }

    std::vector<std::size_t> sent;
    std::vector<std::uint8_t> is_data;
    {
        const DDGrid x = draw_frame(superimposed, c, m, bits_rng, sent, is_data);
        const DDGrid y = apply_dd_channel(x, dd, n0, noise_rng);
        const auto known = known_cells(superimposed, m);
        const auto est = estimate_gains(y, superimposed, ch.predicted, es, n0, m);
        tally.nmse_superimposed += channel_nmse(est, ch.truth, m);
        tally.collisions += est.tap_collision;
        tally.bits += superimposed.data_cells(m) * c.bits_per_symbol();
        if (cfg.has_scheme(Scheme::Proposed)) {
            opt.use_uncertainty = true;
            tally.errors[Scheme::Proposed] += count_errors(decide(spa_detect(y, est, c, n0, opt, known)), sent, is_data);
        }
        if (cfg.has_scheme(Scheme::SpaNoUncertainty)) {
            opt.use_uncertainty = false;
            tally.errors[Scheme::SpaNoUncertainty] +=
                count_errors(decide(spa_detect(y, est, c, n0, opt, known)), sent, is_data);
        }
        if (cfg.has_scheme(Scheme::PerfectCsi)) {
            opt.use_uncertainty = false;
            tally.errors[Scheme::PerfectCsi] +=
                count_errors(decide(spa_detect(y, perfect_estimate(ch.truth), c, n0, opt, known)), sent, is_data);
        }
    }
    if (cfg.has_scheme(Scheme::GuardSpaceBaseline)) {
        const DDGrid x = draw_frame(guard, c, m, bits_rng, sent, is_data);
        const DDGrid y = apply_dd_channel(x, dd, n0, noise_rng);
        const auto est = detect_conventional_threshold(y, guard, n0, m);
        tally.nmse_guard += channel_nmse(est, ch.truth, m);
        tally.guard_bits += guard.data_cells(m) * c.bits_per_symbol();
        if (est.paths.empty()) {
            ++tally.missed_detections;
            tally.errors[Scheme::GuardSpaceBaseline] += count_errors(std::vector<std::size_t>(m.cells(), 0), sent, is_data);
        } else {
            opt.use_uncertainty = false;
            tally.errors[Scheme::GuardSpaceBaseline] +=
                count_errors(decide(spa_detect(y, est, c, n0, opt, known_cells(guard, m))), sent, is_data);
        }
    }
    ++tally.frames;
}

/// Uplink records of one trial at one SNR point.  Frame f is sent by
/// vehicle f mod V; geometric channels take instants from the trial's
/// tracking trace after burn-in.
inline Records uplink_records(const SimulationConfig& cfg, const TrackingTrace* trace, std::uint64_t seed,
                              std::size_t snr_index) {
    const double snr_db = cfg.uplink.snr_db[snr_index];
    const std::size_t V = cfg.scenario.vehicles.size();
    std::vector<UplinkTally> tally(V);
    for (std::size_t f = 0; f < cfg.uplink.frames_per_point; ++f) {
        const std::size_t v = f % V;
        const auto key = [&](StreamTag t, std::int64_t extra) {
            return RandomStream(seed, t, static_cast<std::int64_t>(f), static_cast<std::int64_t>(v), extra);
        };
        RandomStream ch_rng = key(StreamTag::UplinkChannel, 0);
        UplinkChannelDraw ch;
        if (cfg.uplink.channel == UplinkChannelMode::Synthetic) {
            ch = synthetic_draw(cfg, ch_rng);
        } else {
            const std::size_t span = trace->size() - cfg.sensing.burn_in;
            ch = geometric_draw(cfg, (*trace)[cfg.sensing.burn_in + (f / V) % span], v, ch_rng);
        }
        RandomStream bits = key(StreamTag::UplinkBits, 0);
        RandomStream noise = key(StreamTag::UplinkNoise, static_cast<std::int64_t>(snr_index));
        uplink_frame(cfg, ch, snr_db, bits, noise, tally[v]);
    }
    Records out;
    const long long s = static_cast<long long>(seed);
    for (std::size_t v = 0; v < V; ++v) {
        const auto& t = tally[v];
        if (t.frames == 0) continue;
        const long long vi = static_cast<long long>(v);
        const double fr = static_cast<double>(t.frames);
        out.push_back({"uplink_nmse_superimposed", snr_db, vi, s, t.nmse_superimposed / fr});
        out.push_back({"uplink_tap_collisions", snr_db, vi, s, static_cast<double>(t.collisions)});
        for (Scheme sc : cfg.schemes) {
            const std::size_t bits = sc == Scheme::GuardSpaceBaseline ? t.guard_bits : t.bits;
            const auto it = t.errors.find(sc);
            const double e = it == t.errors.end() ? 0.0 : static_cast<double>(it->second);
            out.push_back({std::string("uplink_ber_") + scheme_name(sc), snr_db, vi, s, e / static_cast<double>(bits)});
        }
        if (cfg.has_scheme(Scheme::GuardSpaceBaseline)) {
            out.push_back({"uplink_nmse_guard_space", snr_db, vi, s, t.nmse_guard / fr});
            out.push_back({"uplink_missed_detections", snr_db, vi, s, static_cast<double>(t.missed_detections)});
        }
    }
    return out;
}

inline Records overhead_records(const SimulationConfig& cfg) {
    const auto g = PilotPlacement::guard_space(cfg.modem, 1.0, cfg.uplink.guard_kmax, cfg.uplink.guard_lmax);
    const auto s = PilotPlacement::superimposed(cfg.modem, 1.0);
    return {{"reserved_cells_guard_space", 0.0, -1, -1, static_cast<double>(g.reserved_cells(cfg.modem))},
            {"reserved_cells_superimposed", 0.0, -1, -1, static_cast<double>(s.reserved_cells(cfg.modem))},
            {"training_overhead_guard_space", 0.0, -1, -1, g.overhead(cfg.modem)},
            {"training_overhead_superimposed", 0.0, -1, -1, s.overhead(cfg.modem)}};
}

/// Per-index aggregates over vehicles and seeds: RMSE for angle errors, mean
/// otherwise.
inline Records aggregate(const Records& in, const std::string& metric, const std::string& out_name, bool rms) {
    std::map<double, std::pair<double, std::size_t>> acc;
    for (const auto& r : in)
        if (r.metric == metric) {
            auto& a = acc[r.index];
            a.first += rms ? r.value * r.value : r.value;
            ++a.second;
        }
    Records out;
    for (const auto& [idx, a] : acc) {
        const double mean = a.first / static_cast<double>(a.second);
        out.push_back({out_name, idx, -1, -1, rms ? std::sqrt(mean) : mean});
    }
    return out;
}

/// Runs every selected metric.  Trials (and SNR points) are independent
/// tasks; records are gathered per task and merged in task order.
inline Records run_simulation(const SimulationConfig& cfg) {
    cfg.validate();
    const std::size_t T = cfg.run.seeds;
    const bool need_trace = cfg.has_metric(Metric::Tracking) || cfg.has_metric(Metric::Downlink) ||
                            (cfg.has_metric(Metric::Uplink) && cfg.uplink.channel == UplinkChannelMode::Geometric);
    std::vector<TrackingTrace> traces(T);
    std::vector<Records> per_trial(T);
    if (need_trace)
        parallel_for(T, cfg.run.threads, [&](std::size_t t) {
            const auto seed = trial_seed(cfg, t);
            traces[t] = run_tracking_trial(cfg, seed);
            if (cfg.has_metric(Metric::Tracking)) {
                auto r = tracking_records(cfg, traces[t], seed);
                per_trial[t].insert(per_trial[t].end(), r.begin(), r.end());
            }
            if (cfg.has_metric(Metric::Downlink)) {
                auto r = downlink_records(cfg, traces[t], seed);
                per_trial[t].insert(per_trial[t].end(), r.begin(), r.end());
            }
        });
    const std::size_t S = cfg.uplink.snr_db.size();
    std::vector<Records> per_uplink(cfg.has_metric(Metric::Uplink) ? T * S : 0);
    parallel_for(per_uplink.size(), cfg.run.threads, [&](std::size_t task) {
        const std::size_t t = task / S, si = task % S;
        per_uplink[task] = uplink_records(cfg, need_trace ? &traces[t] : nullptr, trial_seed(cfg, t), si);
    });

    Records all;
    for (auto& r : per_trial) all.insert(all.end(), r.begin(), r.end());
    for (auto& r : per_uplink) all.insert(all.end(), r.begin(), r.end());
    if (cfg.has_metric(Metric::Tracking)) {
        auto rmse = aggregate(all, "angle_error", "angle_rmse", true);
        Records steady;
        for (const auto& r : all)
            if (r.metric == "angle_error" && r.index >= static_cast<double>(cfg.sensing.burn_in)) steady.push_back(r);
        for (auto& r : steady) r.index = 0.0;
        auto ss = aggregate(steady, "angle_error", "angle_rmse_steady_state", true);
        all.insert(all.end(), rmse.begin(), rmse.end());
        all.insert(all.end(), ss.begin(), ss.end());
    }
    if (cfg.has_metric(Metric::Downlink)) {
        for (const char* s : {"proposed", "perfect_csi"}) {
            auto a = aggregate(all, std::string("downlink_ber_") + s, std::string("downlink_ber_mean_") + s, false);
            all.insert(all.end(), a.begin(), a.end());
        }
    }
    if (cfg.has_metric(Metric::Uplink)) {
        auto o = overhead_records(cfg);
        all.insert(all.end(), o.begin(), o.end());
        Records agg;
        for (const auto& r : all)
            if (r.metric.rfind("uplink_ber_", 0) == 0 || r.metric.rfind("uplink_nmse_", 0) == 0) agg.push_back(r);
        std::set<std::string> names;
        for (const auto& r : agg) names.insert(r.metric);
        for (const auto& n : names) {
            auto a = aggregate(agg, n, n + "_mean", false);
            all.insert(all.end(), a.begin(), a.end());
        }
    }
    return all;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline std::string csv_text(const Records& records) {
    Records sorted = records;
    std::stable_sort(sorted.begin(), sorted.end(), [](const MetricRecord& a, const MetricRecord& b) {
        return std::tie(a.index, a.vehicle, a.seed) < std::tie(b.index, b.vehicle, b.seed);
    });
    std::string out = "metric,instant_or_snr,vehicle,seed,value\n";
    for (const auto& r : sorted) {
        out += r.metric + ',' + format_number(r.index) + ',' + std::to_string(r.vehicle) + ',' +
               std::to_string(r.seed) + ',' + format_number(r.value) + '\n';
    }
    return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f) throw Error("write failed for '" + path.string() + "'");
}

/// One CSV per metric, <dir>/<metric>.csv.  Returns the files written.
inline std::vector<std::filesystem::path> emit_csv(const Records& records, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
    std::map<std::string, Records> by_metric;
    for (const auto& r : records) by_metric[r.metric].push_back(r);
    std::vector<std::filesystem::path> files;
    for (const auto& [name, recs] : by_metric) {
        const auto path = dir / (name + ".csv");
        write_file(path, csv_text(recs));
        files.push_back(path);
    }
    return files;
}

inline void write_manifest(const std::filesystem::path& dir, const std::string& config_text, const SimulationConfig& cfg,
                           const std::vector<std::filesystem::path>& files) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(config_text)));
    std::string text;
    text += "config_hash_fnv1a64=" + std::string(hash) + "\n";
    text += "seed=" + std::to_string(cfg.run.seed) + "\n";
    text += "trials=" + std::to_string(cfg.run.seeds) + "\n";
    text += std::string("simulator_version=") + ISAC_OTFS_VERSION + "\n";
    text += "nlohmann_json_version=" + std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
            std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH) + "\n";
    text += "cxx_standard=" + std::to_string(__cplusplus) + "\n";
    text += "schemes=";
    for (std::size_t i = 0; i < cfg.schemes.size(); ++i) text += (i ? "," : "") + std::string(scheme_name(cfg.schemes[i]));
    text += "\nfiles=";
    for (std::size_t i = 0; i < files.size(); ++i) text += (i ? "," : "") + files[i].filename().string();
    text += "\n";
    write_file(dir / "manifest", text);
}

}  // namespace isac_otfs

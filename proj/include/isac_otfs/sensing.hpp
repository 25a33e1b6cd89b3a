#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "isac_otfs/array_geometry.hpp"
#include "isac_otfs/random.hpp"
#include "isac_otfs/scenario.hpp"
#include "isac_otfs/types.hpp"

namespace isac_otfs {

/// Post-matched-filter echo of one vehicle on the receive array.
struct EchoObservation {
    std::vector<cplx> vector;  // length N_r
    double mf_gain = 1.0;      // G_m
    double noise_var = 1.0;    // sigma^2 per element
};

struct EstimatedState {
    double delay = 0.0;       // round-trip (s)
    double doppler_rt = 0.0;  // round-trip (Hz)
    double angle = 0.0;
    double reflection = 0.0;
    Vec2 position;
    double speed = 0.0;
    bool speed_reliable = true;
};

struct PredictedState {
    Vec2 position;
    double speed = 0.0;
    double angle = 0.0;
    double dl_gain = 0.0;     // predicted free-space amplitude
    double dl_doppler = 0.0;  // predicted one-way Doppler (Hz)
    std::vector<PathGeometry> uplink;  // filled by predict_uplink_paths
};

struct MatchedFilterResult {
    double delay = 0.0;
    double doppler = 0.0;
    double peak_gain = 0.0;
};

/// Discrete ambiguity-function search
///   A(gamma, omega) = sum_t r[t] conj(s[t - d]) exp(-j 2 pi omega t / fs),
/// d = round(gamma * fs), with s zero outside its support.  Returns the grid
/// point of largest |A|; ties keep the first (delay-major) grid point.
inline MatchedFilterResult matched_filter(std::span<const cplx> rx, std::span<const cplx> ref,
                                          std::span<const double> delay_grid, std::span<const double> doppler_grid,
                                          double sample_rate) {
    if (delay_grid.empty() || doppler_grid.empty()) throw ConfigError("matched_filter: empty search grid");
    if (!(sample_rate > 0.0)) throw ConfigError("matched_filter: sample_rate must be > 0");
    MatchedFilterResult best{delay_grid[0], doppler_grid[0], -1.0};
    std::vector<cplx> prod(rx.size());
    for (double gamma : delay_grid) {
        const long long d = round_half_up(gamma * sample_rate);
        for (std::size_t t = 0; t < rx.size(); ++t) {
            const long long s = static_cast<long long>(t) - d;
            prod[t] = (s >= 0 && s < static_cast<long long>(ref.size())) ? rx[t] * std::conj(ref[s]) : cplx{};
        }
        for (double omega : doppler_grid) {
            const double step = -2.0 * kPi * omega / sample_rate;
            cplx acc{0.0, 0.0};
            for (std::size_t t = 0; t < rx.size(); ++t) acc += prod[t] * std::polar(1.0, step * static_cast<double>(t));
            const double mag = std::abs(acc);
            if (mag > best.peak_gain) best = {gamma, omega, mag};
        }
    }
    return best;
}

/// Matched-filter gain equal to the frame energy, N * M * E_s.
inline double matched_filter_gain(const ModemConfig& cfg, double symbol_energy) {
    return static_cast<double>(cfg.cells()) * symbol_energy;
}

/// Noise-free echo model beta * G_m * b(theta) * (a^H(theta) f).
inline std::vector<cplx> echo_mean(double angle, double reflection, double mf_gain, const Beamformer& beam,
                                   std::size_t n_rx) {
    const auto a = steering_vector(angle, beam.weights.size());
    cplx af{0.0, 0.0};
    for (std::size_t n = 0; n < a.entries.size(); ++n) af += std::conj(a.entries[n]) * beam.weights[n];
    auto b = steering_vector(angle, n_rx).entries;
    const cplx s = reflection * mf_gain * af;
    for (auto& v : b) v *= s;
    return b;
}

/// Closed-form post-matched-filter echo with CN(0, noise_var) noise per
/// receive element.  No variates are drawn when noise_var == 0.
inline EchoObservation synthesize_echo(const TruthKinematics& truth, const Beamformer& beam, const ArrayConfig& array,
                                       double mf_gain, double noise_var, RandomStream& rng) {
    EchoObservation obs{echo_mean(truth.angle, truth.reflection, mf_gain, beam, array.n_rx), mf_gain, noise_var};
    if (noise_var > 0.0)
        for (auto& v : obs.vector) v += rng.complex_gaussian(noise_var);
    return obs;
}

/// Maximum-likelihood angle on the grid, i.e. the grid angle that minimizes
/// ||r - beta_hat G_m b(theta) a^H(theta) f||^2.  The grid has
/// N_t * refine bins; with refine = 1 the bin width pi / N_t exceeds the
/// beam's main lobe, and an off-grid target then fits a beam-null bin
/// better than its neighbours, so the tracking loop uses refine > 1.
/// With a predicted angle the search covers +-search_halfwidth coarse
/// bins (N_t grid) around it; without one the full grid is searched.
/// Ties go to the candidate nearest the predicted bin, then to the smaller
/// index.
inline double estimate_angle(const EchoObservation& obs, double reflection_hat, const Beamformer& beam,
                             const ArrayConfig& cfg, std::optional<double> predicted_angle,
                             std::size_t search_halfwidth, std::size_t refine = 1) {
    if (refine < 1) throw ConfigError("estimate_angle: refine must be >= 1");
    const auto grid = angle_grid(cfg.n_tx * refine);
    const std::size_t halfwidth = search_halfwidth * refine;
    std::size_t lo = 0;
    std::size_t hi = grid.size() - 1;
    std::size_t center = 0;
    if (predicted_angle) {
        center = angle_grid_index(*predicted_angle, grid.size());
        lo = center > halfwidth ? center - halfwidth : 0;
        hi = std::min(grid.size() - 1, center + halfwidth);
    }
    double best_cost = std::numeric_limits<double>::infinity();
    std::size_t best = lo;
    for (std::size_t g = lo; g <= hi; ++g) {
        const auto mu = echo_mean(grid[g], reflection_hat, obs.mf_gain, beam, obs.vector.size());
        double cost = 0.0;
        for (std::size_t n = 0; n < mu.size(); ++n) cost += std::norm(obs.vector[n] - mu[n]);
        const auto dist = [&](std::size_t i) { return i > center ? i - center : center - i; };
        if (cost < best_cost || (cost == best_cost && predicted_angle && dist(g) < dist(best))) {
            best_cost = cost;
            best = g;
        }
    }
    return grid[best];
}

/// q = q_rsu + c * gamma / 2 * [sin(theta), cos(theta)].
inline Vec2 estimate_position(double delay_hat, double angle_hat, const RsuState& rsu) {
    if (!(delay_hat > 0.0)) throw InvalidMeasurementError("estimate_position: delay must be > 0");
    const double range = rsu.modem.c * delay_hat / 2.0;
    return {rsu.position.x + range * std::sin(angle_hat), rsu.position.y + range * std::cos(angle_hat)};
}

/// s = c * omega / (2 fc cos(theta)) for the round-trip Doppler omega.
inline double estimate_speed(double doppler_rt_hat, double angle_hat, double fc, double c = kSpeedOfLight) {
    const double ct = std::cos(angle_hat);
    if (std::abs(ct) <= 1e-6) throw IllConditionedGeometryError("estimate_speed: cos(angle) ~ 0");
    return c * doppler_rt_hat / (2.0 * fc * ct);
}

/// Nearest point of a uniform grid with the given step.
inline double quantize_to_grid(double value, double step) { return step * static_cast<double>(round_half_up(value / step)); }

/// Radar search grid used by the tracking loop.  The matched-filter stage
/// of one instant is represented by its noise-free single-target peak,
/// which is the true (delay, Doppler) rounded to this grid.
struct RadarSearchGrid {
    double delay_step = 0.0;
    double doppler_step = 0.0;

    /// Grid refined by the given factors relative to the frame resolution.
    static RadarSearchGrid refined(const ModemConfig& cfg, double delay_refine, double doppler_refine) {
        return {cfg.delay_resolution() / delay_refine, cfg.doppler_resolution() / doppler_refine};
    }
};

struct SensingOptions {
    double symbol_energy = 1.0;
    double noise_var = 1.0;
    std::size_t search_halfwidth = 4;
    RadarSearchGrid grid;
    std::size_t angle_refine = 1;
};

/// One instant of state estimation for one vehicle: echo synthesis, delay and
/// Doppler peak, ML angle, then position and speed.  If the speed inversion
/// is ill-conditioned, previous_speed is kept and the estimate is flagged.
/// The RCS xi is known to the RSU, giving beta_hat = xi / (c gamma_hat).
inline EstimatedState estimate_state(const TruthKinematics& truth, const Beamformer& beam, const RsuState& rsu,
                                     const SensingOptions& opt, double rcs, std::optional<double> predicted_angle,
                                     double previous_speed, RandomStream& rng) {
    const double gm = matched_filter_gain(rsu.modem, opt.symbol_energy);
    const auto obs = synthesize_echo(truth, beam, rsu.array, gm, opt.noise_var, rng);
    EstimatedState est;
    est.delay = quantize_to_grid(truth.delay, opt.grid.delay_step);
    est.doppler_rt = quantize_to_grid(truth.doppler_rt, opt.grid.doppler_step);
    if (!(est.delay > 0.0)) throw InvalidMeasurementError("estimate_state: delay peak at zero lag");
    est.reflection = rcs / (rsu.modem.c * est.delay);
    est.angle = estimate_angle(obs, est.reflection, beam, rsu.array, predicted_angle, opt.search_halfwidth,
                               opt.angle_refine);
    est.position = estimate_position(est.delay, est.angle, rsu);
    try {
        est.speed = estimate_speed(est.doppler_rt, est.angle, rsu.modem.fc, rsu.modem.c);
    } catch (const IllConditionedGeometryError&) {
        est.speed = previous_speed;
        est.speed_reliable = false;
    }
    return est;
}

/// Constant-velocity one-step prediction of position, angle, downlink gain
/// and Doppler.
inline PredictedState predict_state(const EstimatedState& est, double dt, const RsuState& rsu) {
    if (!(dt > 0.0)) throw ConfigError("predict_state: dt must be > 0");
    PredictedState p;
    p.position = est.position + dt * Vec2{est.speed, 0.0};
    p.speed = est.speed;
    const double d = norm(p.position - rsu.position);
    if (d == 0.0) throw DegenerateGeometryError("predict_state: predicted position at the RSU");
    p.angle = angle_from(p.position, rsu.position);
    p.dl_gain = free_space_amplitude(d, rsu.modem);
    p.dl_doppler = one_way_doppler(p.speed, p.angle, rsu.modem);
    return p;
}

/// Predicted uplink delays, Dopplers and receive-beam angles for every
/// vehicle, written into each PredictedState::uplink (direct path first).
inline void predict_uplink_paths(std::span<PredictedState> predicted, const RsuState& rsu) {
    if (predicted.empty()) throw ConfigError("predict_uplink_paths: no vehicles");
    std::vector<PathNode> nodes;
    nodes.reserve(predicted.size());
    for (const auto& p : predicted) nodes.push_back({p.position, p.speed, p.angle});
    for (std::size_t i = 0; i < predicted.size(); ++i)
        predicted[i].uplink = uplink_path_geometry(i, nodes, rsu.position, rsu.modem);
}

}  // namespace isac_otfs

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "isac_otfs/types.hpp"

namespace isac_otfs {

/// RSU antenna arrays.  Both ULAs use half-wavelength spacing.
struct ArrayConfig {
    std::size_t n_tx = 64;
    std::size_t n_rx = 64;
    double per_vehicle_power = 1.0;  // p_i (W)

    void validate() const {
        if (n_tx < 1 || n_rx < 1) throw ConfigError("array: n_tx and n_rx must be >= 1");
        if (!(per_vehicle_power > 0.0)) throw ConfigError("array: per_vehicle_power must be > 0");
    }
};

struct SteeringVector {
    std::vector<cplx> entries;
    double angle = 0.0;
};

enum class BeamKind { Transmit, Receive };

struct Beamformer {
    std::vector<cplx> weights;
    double target_angle = 0.0;
    BeamKind kind = BeamKind::Transmit;
};

/// a_n(theta) = exp(j (n-1) pi sin(theta)), n = 1..n_antennas.
inline SteeringVector steering_vector(double angle, std::size_t n_antennas) {
    if (n_antennas < 1) throw ConfigError("steering_vector: n_antennas must be >= 1");
    SteeringVector sv{std::vector<cplx>(n_antennas), angle};
    const double step = kPi * std::sin(angle);
    for (std::size_t n = 0; n < n_antennas; ++n) sv.entries[n] = std::polar(1.0, step * static_cast<double>(n));
    return sv;
}

/// f = sqrt(p / N_t) * a(angle).
inline Beamformer tx_beamformer(double predicted_angle, const ArrayConfig& cfg) {
    Beamformer bf{steering_vector(predicted_angle, cfg.n_tx).entries, predicted_angle, BeamKind::Transmit};
    const double s = std::sqrt(cfg.per_vehicle_power / static_cast<double>(cfg.n_tx));
    for (auto& w : bf.weights) w *= s;
    return bf;
}

/// g = b(angle), unnormalized so that g^H b(angle) = N_r.
inline Beamformer rx_beamformer(double predicted_angle, const ArrayConfig& cfg) {
    return {steering_vector(predicted_angle, cfg.n_rx).entries, predicted_angle, BeamKind::Receive};
}

/// a^H(first) a(second) in closed form: sum_n exp(j n pi (sin(second) - sin(first))).
inline cplx steering_inner(double first, double second, std::size_t n_antennas) {
    const double step = kPi * (std::sin(second) - std::sin(first));
    cplx acc{0.0, 0.0};
    for (std::size_t n = 0; n < n_antennas; ++n) acc += std::polar(1.0, step * static_cast<double>(n));
    return acc;
}

/// |a^H(true) a(steered)|^2, at most n_antennas^2.
inline double array_gain(double true_angle, double steered_angle, std::size_t n_antennas) {
    if (n_antennas < 1) throw ConfigError("array_gain: n_antennas must be >= 1");
    return std::norm(steering_inner(true_angle, steered_angle, n_antennas));
}

/// N-point angle grid over the field of view [-pi/2, pi/2], bin midpoints
/// -pi/2 + (g + 1/2) pi / N.
inline std::vector<double> angle_grid(std::size_t n) {
    std::vector<double> g(n);
    const double step = kPi / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = -kPi / 2.0 + (static_cast<double>(i) + 0.5) * step;
    return g;
}

/// Index of the grid bin containing angle (clamped to the grid).
inline std::size_t angle_grid_index(double angle, std::size_t n) {
    const double step = kPi / static_cast<double>(n);
    const double pos = std::floor((angle + kPi / 2.0) / step);
    if (pos < 0.0) return 0;
    if (pos >= static_cast<double>(n)) return n - 1;
    return static_cast<std::size_t>(pos);
}

}  // namespace isac_otfs

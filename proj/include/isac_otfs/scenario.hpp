#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "isac_otfs/array_geometry.hpp"
#include "isac_otfs/dd_modem.hpp"
#include "isac_otfs/random.hpp"
#include "isac_otfs/types.hpp"

namespace isac_otfs {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    bool operator==(const Vec2&) const = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

/// A vehicle on the road.  Motion is along the x-axis only; speed is signed.
struct VehicleState {
    Vec2 position;
    double speed = 0.0;
    double rcs = 0.01;  // xi
};

struct RsuState {
    Vec2 position;
    ArrayConfig array;
    ModemConfig modem;
};

/// Downlink/radar parameters of one vehicle as seen from the RSU.
struct TruthKinematics {
    double angle = 0.0;       // theta (rad)
    double distance = 0.0;    // d (m)
    double delay = 0.0;       // gamma = 2d/c, round trip (s)
    double doppler_rt = 0.0;  // omega = 2 nu, round trip (Hz)
    double doppler_ow = 0.0;  // nu, one way (Hz)
    double reflection = 0.0;  // beta = xi / (2d)
    double path_gain = 0.0;   // h = sqrt(c / (4 pi fc d^2))
};

struct UplinkPathTruth {
    std::size_t path_index = 0;
    std::size_t via_vehicle = 0;  // == transmitting vehicle for the direct path
    double delay = 0.0;           // relative to the direct path (s)
    double doppler = 0.0;         // Hz
    double angle = 0.0;           // arrival angle at the RSU (rad)
    double mean_power = 0.0;      // PDP mean of |gain|^2
    cplx gain{0.0, 0.0};
};

/// Constant-velocity step along x.
inline VehicleState evolve(const VehicleState& state, double dt) {
    if (!(dt > 0.0)) throw ConfigError("evolve: dt must be > 0");
    VehicleState next = state;
    next.position.x += state.speed * dt;
    return next;
}

/// Angle of a point relative to the RSU, sin(theta) = (x - x_rsu) / distance.
inline double angle_from(Vec2 point, Vec2 rsu) {
    const Vec2 d = point - rsu;
    const double r = norm(d);
    if (r == 0.0) throw DegenerateGeometryError("point is colocated with the RSU");
    return std::asin(std::clamp(d.x / r, -1.0, 1.0));
}

/// Free-space amplitude sqrt(c / (4 pi fc d^2)).
inline double free_space_amplitude(double distance, const ModemConfig& cfg) {
    return std::sqrt(cfg.c / (4.0 * kPi * cfg.fc * distance * distance));
}

/// One-way Doppler of a radial projection: speed * cos(theta) * fc / c.
inline double one_way_doppler(double speed, double angle, const ModemConfig& cfg) {
    return speed * std::cos(angle) * cfg.fc / cfg.c;
}

inline TruthKinematics truth_kinematics(const VehicleState& vehicle, const RsuState& rsu) {
    const ModemConfig& cfg = rsu.modem;
    const double d = norm(vehicle.position - rsu.position);
    if (d == 0.0) throw DegenerateGeometryError("truth_kinematics: vehicle colocated with RSU");
    TruthKinematics t;
    t.distance = d;
    t.angle = angle_from(vehicle.position, rsu.position);
    t.delay = 2.0 * d / cfg.c;
    t.doppler_ow = one_way_doppler(vehicle.speed, t.angle, cfg);
    t.doppler_rt = 2.0 * t.doppler_ow;
    t.reflection = vehicle.rcs / (2.0 * d);
    t.path_gain = free_space_amplitude(d, cfg);
    return t;
}

/// Kinematic snapshot used by the uplink path geometry, either ground truth
/// or one-step predictions.
struct PathNode {
    Vec2 position;
    double speed = 0.0;
    double angle = 0.0;
};

/// Path p of vehicle i's uplink.  p == i is the direct path, otherwise the
/// signal is scattered by vehicle p.
struct PathGeometry {
    std::size_t via = 0;
    double delay = 0.0;
    double doppler = 0.0;
    double angle = 0.0;
};

/// Direct path first, then scatterers in index order.
inline std::vector<PathGeometry> uplink_path_geometry(std::size_t tx, std::span<const PathNode> nodes, Vec2 rsu,
                                                      const ModemConfig& cfg) {
    const PathNode& me = nodes[tx];
    const double direct = norm(me.position - rsu);
    std::vector<PathGeometry> out;
    out.reserve(nodes.size());
    out.push_back({tx, 0.0, -one_way_doppler(me.speed, me.angle, cfg), me.angle});
    for (std::size_t j = 0; j < nodes.size(); ++j) {
        if (j == tx) continue;
        const PathNode& sc = nodes[j];
        const double excess = norm(me.position - sc.position) + norm(sc.position - rsu) - direct;
        out.push_back({j, excess / cfg.c, std::cos(sc.angle) * cfg.fc / cfg.c * (me.speed - sc.speed), sc.angle});
    }
    return out;
}

/// Exponential power-delay profile relative to the direct path; the decay
/// constant is one delay bin, 1 / (M delta_f).
inline double pdp_scale(double excess_delay, const ModemConfig& cfg) {
    return std::exp(-excess_delay * static_cast<double>(cfg.M) * cfg.delta_f);
}

/// Ground-truth uplink paths for vehicle tx; one path per vehicle in the
/// network, gains drawn CN(0, mean_power).
inline std::vector<UplinkPathTruth> uplink_paths(std::size_t tx, std::span<const VehicleState> vehicles,
                                                 const RsuState& rsu, RandomStream& rng) {
    if (vehicles.empty() || tx >= vehicles.size()) throw ConfigError("uplink_paths: bad vehicle index");
    std::vector<PathNode> nodes;
    nodes.reserve(vehicles.size());
    for (const auto& v : vehicles) nodes.push_back({v.position, v.speed, angle_from(v.position, rsu.position)});
    const auto geo = uplink_path_geometry(tx, nodes, rsu.position, rsu.modem);
    const double direct_power =
        std::pow(free_space_amplitude(norm(vehicles[tx].position - rsu.position), rsu.modem), 2.0);
    std::vector<UplinkPathTruth> out;
    out.reserve(geo.size());
    for (std::size_t p = 0; p < geo.size(); ++p) {
        UplinkPathTruth u;
        u.path_index = p;
        u.via_vehicle = geo[p].via;
        u.delay = geo[p].delay;
        u.doppler = geo[p].doppler;
        u.angle = geo[p].angle;
        u.mean_power = direct_power * pdp_scale(u.delay, rsu.modem);
        u.gain = rng.complex_gaussian(u.mean_power);
        out.push_back(u);
    }
    return out;
}

/// The default road layout: RSU at the origin, four vehicles on two lanes.
inline std::vector<Vec2> default_vehicle_positions() { return {{-30, 50}, {20, 50}, {5, 20}, {40, 20}}; }

/// Speed with magnitude uniform in [lo, hi] and a random sign.
inline double draw_speed(RandomStream& rng, double lo, double hi) {
    const double mag = rng.uniform(lo, hi);
    return rng.coin() ? mag : -mag;
}

}  // namespace isac_otfs

#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "isac_otfs/array_geometry.hpp"
#include "isac_otfs/dd_modem.hpp"
#include "isac_otfs/scenario.hpp"
#include "isac_otfs/types.hpp"

namespace isac_otfs {

enum class Scheme { Proposed, PerfectCsi, SpaNoUncertainty, GuardSpaceBaseline };

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Proposed: return "proposed";
        case Scheme::PerfectCsi: return "perfect_csi";
        case Scheme::SpaNoUncertainty: return "spa_no_uncertainty";
        case Scheme::GuardSpaceBaseline: return "guard_space_baseline";
    }
    return "?";
}

inline Scheme parse_scheme(const std::string& s) {
    for (Scheme v : {Scheme::Proposed, Scheme::PerfectCsi, Scheme::SpaNoUncertainty, Scheme::GuardSpaceBaseline})
        if (s == scheme_name(v)) return v;
    throw ConfigError("unknown scheme '" + s + "'");
}

enum class Metric { Tracking, Downlink, Uplink };

enum class UplinkChannelMode { Synthetic, Geometric };

struct VehicleConfig {
    Vec2 position;
    double rcs = 0.01;
};

struct ScenarioConfig {
    Vec2 rsu_position{0.0, 0.0};
    std::vector<VehicleConfig> vehicles;
    double speed_min = 10.0;
    double speed_max = 15.0;
    std::size_t instants = 200;
    double dt = 0.02;
};

struct SensingConfig {
    double noise_var = 1.0;
    double symbol_energy = 1.0;
    std::size_t search_halfwidth = 4;
    double delay_refine = 64.0;
    double doppler_refine = 16.0;
    std::size_t angle_refine = 4;
    std::size_t burn_in = 50;
};

struct DownlinkConfig {
    std::string modulation = "bpsk";
    std::vector<double> snr_db{0, 2, 4, 6, 8, 10, 12};
    double trace_noise_psd = 1.0;
    double reference_boost_db = 20.0;
    std::size_t instant_stride = 10;
};

struct UplinkConfig {
    std::string modulation = "qpsk";
    UplinkChannelMode channel = UplinkChannelMode::Synthetic;
    std::size_t paths = 4;
    double pilot_ratio_db = 20.0;
    std::size_t guard_kmax = 6;
    std::size_t guard_lmax = 10;
    std::optional<std::pair<std::size_t, std::size_t>> pilot_cell;
    std::size_t spa_iterations = 10;
    double spa_damping = 0.0;
    double spa_tolerance = 1e-6;
    std::vector<double> snr_db{0, 4, 8, 12, 16, 20, 25, 30};
    std::size_t frames_per_point = 4;
};

struct RunConfig {
    std::uint64_t seed = 1;
    std::size_t seeds = 20;
    std::size_t threads = 1;
    std::vector<Metric> metrics{Metric::Tracking, Metric::Downlink, Metric::Uplink};
};

struct SimulationConfig {
    ScenarioConfig scenario;
    ModemConfig modem;
    ArrayConfig array;
    SensingConfig sensing;
    DownlinkConfig downlink;
    UplinkConfig uplink;
    RunConfig run;
    std::vector<Scheme> schemes{Scheme::Proposed, Scheme::PerfectCsi, Scheme::SpaNoUncertainty,
                                Scheme::GuardSpaceBaseline};

    RsuState rsu() const { return RsuState{scenario.rsu_position, array, modem}; }

    bool has_scheme(Scheme s) const {
        for (Scheme v : schemes)
            if (v == s) return true;
        return false;
    }

    bool has_metric(Metric m) const {
        for (Metric v : run.metrics)
            if (v == m) return true;
        return false;
    }

    void validate() const {
        modem.validate();
        array.validate();
        if (scenario.vehicles.empty()) throw ConfigError("scenario.vehicles: need at least one vehicle");
        if (scenario.instants < 1) throw ConfigError("scenario.instants must be >= 1");
        if (!(scenario.dt > 0.0)) throw ConfigError("scenario.dt must be > 0");
        if (!(scenario.speed_min >= 0.0 && scenario.speed_max >= scenario.speed_min))
            throw ConfigError("scenario.speed_min/speed_max: need 0 <= min <= max");
        for (const auto& v : scenario.vehicles)
            if (v.position == scenario.rsu_position) throw ConfigError("scenario.vehicles: vehicle at the RSU");
        if (!(sensing.noise_var >= 0.0)) throw ConfigError("sensing.noise_var must be >= 0");
        if (!(sensing.symbol_energy > 0.0)) throw ConfigError("sensing.symbol_energy must be > 0");
        if (!(sensing.delay_refine >= 1.0) || !(sensing.doppler_refine >= 1.0))
            throw ConfigError("sensing.delay_refine/doppler_refine must be >= 1");
        if (sensing.angle_refine < 1) throw ConfigError("sensing.angle_refine must be >= 1");
        if (sensing.burn_in >= scenario.instants) throw ConfigError("sensing.burn_in must be < scenario.instants");
        if (downlink.snr_db.empty()) throw ConfigError("downlink.snr_db must be non-empty");
        if (downlink.instant_stride < 1) throw ConfigError("downlink.instant_stride must be >= 1");
        if (!(downlink.trace_noise_psd > 0.0)) throw ConfigError("downlink.trace_noise_psd must be > 0");
        if (uplink.snr_db.empty()) throw ConfigError("uplink.snr_db must be non-empty");
        if (uplink.paths < 1) throw ConfigError("uplink.paths must be >= 1");
        if (uplink.frames_per_point < 1) throw ConfigError("uplink.frames_per_point must be >= 1");
        if (uplink.spa_iterations < 1) throw ConfigError("uplink.spa_iterations must be >= 1");
        if (!(uplink.spa_damping >= 0.0 && uplink.spa_damping < 1.0))
            throw ConfigError("uplink.spa_damping must be in [0, 1)");
        if (4 * uplink.guard_kmax > modem.N || 2 * uplink.guard_lmax > modem.M || uplink.guard_kmax < 1 ||
            uplink.guard_lmax < 1)
            throw ConfigError("uplink.guard_kmax/guard_lmax: guard region must fit the frame");
        if (uplink.pilot_cell && (uplink.pilot_cell->first >= modem.N || uplink.pilot_cell->second >= modem.M))
            throw ConfigError("uplink.pilot_cell outside the frame");
        if (run.seeds < 1) throw ConfigError("run.seeds must be >= 1");
        if (run.threads < 1) throw ConfigError("run.threads must be >= 1");
        if (schemes.empty()) throw ConfigError("schemes must be non-empty");
        for (const auto& m : {downlink.modulation, uplink.modulation})
            if (m != "bpsk" && m != "qpsk") throw ConfigError("modulation must be bpsk or qpsk, got '" + m + "'");
    }
};

namespace detail {

using nlohmann::json;

/// Reads fields from one JSON object and rejects keys nobody asked for.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    /// Call after reading every field.
    void done() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError("unknown key '" + where(it.key()) + "'");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    template <class T>
    void get(const std::string& key, T& out) {
        if (!has(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(where(key) + ": " + e.what());
        }
    }

    void get_count(const std::string& key, std::size_t& out) {
        if (!has(key)) return;
        const json& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ConfigError(where(key) + ": expected a non-negative integer");
        out = v.get<std::size_t>();
    }

    void get_vec2(const std::string& key, Vec2& out) {
        if (!has(key)) return;
        const json& v = j_.at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw ConfigError(where(key) + ": expected [x, y]");
        out = {v[0].get<double>(), v[1].get<double>()};
    }

    const json& raw(const std::string& key) { return (has(key), j_.at(key)); }

    std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

}  // namespace detail

/// Parses a JSON configuration.  Missing keys keep their defaults; unknown
/// keys and wrongly typed values raise ConfigError naming the field.
inline SimulationConfig parse_config(const std::string& text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    SimulationConfig cfg;
    for (auto p : default_vehicle_positions()) cfg.scenario.vehicles.push_back({p, 0.01});
    {
        detail::Section root(j, "");
        if (root.has("scenario")) {
            detail::Section s(root.raw("scenario"), "scenario");
            s.get_vec2("rsu_position", cfg.scenario.rsu_position);
            if (s.has("vehicles")) {
                const json& arr = s.raw("vehicles");
                if (!arr.is_array()) throw ConfigError("scenario.vehicles: expected an array");
                cfg.scenario.vehicles.clear();
                for (std::size_t i = 0; i < arr.size(); ++i) {
                    detail::Section v(arr[i], "scenario.vehicles[" + std::to_string(i) + "]");
                    VehicleConfig vc;
                    if (!v.has("position")) throw ConfigError(v.where("position") + ": required");
                    v.get_vec2("position", vc.position);
                    v.get("rcs", vc.rcs);
                    v.done();
                    cfg.scenario.vehicles.push_back(vc);
                }
            }
            s.get("speed_min", cfg.scenario.speed_min);
            s.get("speed_max", cfg.scenario.speed_max);
            s.get_count("instants", cfg.scenario.instants);
            s.get("dt", cfg.scenario.dt);
            s.done();
        }
        if (root.has("modem")) {
            detail::Section s(root.raw("modem"), "modem");
            s.get_count("N", cfg.modem.N);
            s.get_count("M", cfg.modem.M);
            s.get("delta_f", cfg.modem.delta_f);
            s.get("fc", cfg.modem.fc);
            s.done();
        }
        if (root.has("array")) {
            detail::Section s(root.raw("array"), "array");
            s.get_count("n_tx", cfg.array.n_tx);
            s.get_count("n_rx", cfg.array.n_rx);
            s.get("per_vehicle_power", cfg.array.per_vehicle_power);
            s.done();
        }
        if (root.has("sensing")) {
            detail::Section s(root.raw("sensing"), "sensing");
            s.get("noise_var", cfg.sensing.noise_var);
            s.get("symbol_energy", cfg.sensing.symbol_energy);
            s.get_count("search_halfwidth", cfg.sensing.search_halfwidth);
            s.get("delay_refine", cfg.sensing.delay_refine);
            s.get("doppler_refine", cfg.sensing.doppler_refine);
            s.get_count("angle_refine", cfg.sensing.angle_refine);
            s.get_count("burn_in", cfg.sensing.burn_in);
            s.done();
        }
        if (root.has("downlink")) {
            detail::Section s(root.raw("downlink"), "downlink");
            s.get("modulation", cfg.downlink.modulation);
            s.get("snr_db", cfg.downlink.snr_db);
            s.get("trace_noise_psd", cfg.downlink.trace_noise_psd);
            s.get("reference_boost_db", cfg.downlink.reference_boost_db);
            s.get_count("instant_stride", cfg.downlink.instant_stride);
            s.done();
        }
        if (root.has("uplink")) {
            detail::Section s(root.raw("uplink"), "uplink");
            s.get("modulation", cfg.uplink.modulation);
            if (s.has("channel")) {
                std::string mode;
                s.get("channel", mode);
                if (mode == "synthetic")
                    cfg.uplink.channel = UplinkChannelMode::Synthetic;
                else if (mode == "geometric")
                    cfg.uplink.channel = UplinkChannelMode::Geometric;
                else
                    throw ConfigError("uplink.channel must be synthetic or geometric, got '" + mode + "'");
            }
            s.get_count("paths", cfg.uplink.paths);
            s.get("pilot_ratio_db", cfg.uplink.pilot_ratio_db);
            s.get_count("guard_kmax", cfg.uplink.guard_kmax);
            s.get_count("guard_lmax", cfg.uplink.guard_lmax);
            if (s.has("pilot_cell")) {
                const json& v = s.raw("pilot_cell");
                if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() || !v[1].is_number_unsigned())
                    throw ConfigError("uplink.pilot_cell: expected [k, l]");
                cfg.uplink.pilot_cell = std::pair{v[0].get<std::size_t>(), v[1].get<std::size_t>()};
            }
            s.get_count("spa_iterations", cfg.uplink.spa_iterations);
            s.get("spa_damping", cfg.uplink.spa_damping);
            s.get("spa_tolerance", cfg.uplink.spa_tolerance);
            s.get("snr_db", cfg.uplink.snr_db);
            s.get_count("frames_per_point", cfg.uplink.frames_per_point);
            s.done();
        }
        if (root.has("run")) {
            detail::Section s(root.raw("run"), "run");
            s.get("seed", cfg.run.seed);
            s.get_count("seeds", cfg.run.seeds);
            s.get_count("threads", cfg.run.threads);
            if (s.has("metrics")) {
                std::vector<std::string> names;
                s.get("metrics", names);
                cfg.run.metrics.clear();
                for (const auto& n : names) {
                    if (n == "tracking")
                        cfg.run.metrics.push_back(Metric::Tracking);
                    else if (n == "downlink")
                        cfg.run.metrics.push_back(Metric::Downlink);
                    else if (n == "uplink")
                        cfg.run.metrics.push_back(Metric::Uplink);
                    else
                        throw ConfigError("run.metrics: unknown metric '" + n + "'");
                }
            }
            s.done();
        }
        if (root.has("schemes")) {
            std::vector<std::string> names;
            root.get("schemes", names);
            cfg.schemes.clear();
            for (const auto& n : names) cfg.schemes.push_back(parse_scheme(n));
        }
        root.done();
    }
    cfg.validate();
    return cfg;
}

inline SimulationConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// FNV-1a 64-bit hash, used to fingerprint the configuration text.
inline std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace isac_otfs

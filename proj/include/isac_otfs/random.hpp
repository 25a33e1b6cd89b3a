#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "isac_otfs/types.hpp"

namespace isac_otfs {

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Stream identifier for an independent random stream.  Fields are folded in
/// order through SplitMix64, so stream_id(seed, a, b, c) differs from
/// stream_id(seed, b, a, c).  Negative components are reinterpreted as their
/// two's-complement bit pattern.
inline std::uint64_t stream_id(std::initializer_list<std::int64_t> parts) noexcept {
    std::uint64_t h = 0x6A09E667F3BCC908ull;
    for (auto p : parts) h = splitmix64(h ^ static_cast<std::uint64_t>(p));
    return h;
}

/// Purpose tags that keep streams for different draws apart.
enum class StreamTag : std::int64_t {
    Speeds = 1,
    RadarNoise = 2,
    DownlinkBits = 3,
    DownlinkNoise = 4,
    UplinkChannel = 5,
    UplinkBits = 6,
    UplinkNoise = 7,
    Test = 99,
};

/// Deterministic random stream.  Uniform and Gaussian variates are derived
/// from raw 64-bit engine output with fixed formulas so results do not
/// depend on the standard library's distribution implementations.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Stream keyed by (master seed, tag, trial, vehicle, instant).
    RandomStream(std::uint64_t master_seed, StreamTag tag, std::int64_t trial, std::int64_t vehicle,
                 std::int64_t instant)
        : RandomStream(stream_id({static_cast<std::int64_t>(master_seed), static_cast<std::int64_t>(tag),
                                  trial, vehicle, instant})) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

    bool coin() { return (engine_() >> 63) != 0; }

    /// Standard normal via Box-Muller; the second variate is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * kPi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * kPi * u2);
    }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    cplx complex_gaussian(double variance) {
        const double s = std::sqrt(variance / 2.0);
        const double re = gaussian();
        const double im = gaussian();
        return {s * re, s * im};
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace isac_otfs

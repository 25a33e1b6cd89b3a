#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace isac_otfs {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 2.99792458e8;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed configuration or mismatched dimensions.
class ConfigError : public Error {
public:
    using Error::Error;
};

class InvalidChannelError : public Error {
public:
    using Error::Error;
};

/// Vehicle colocated with the RSU, or a similarly singular geometry.
class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

class InvalidMeasurementError : public Error {
public:
    using Error::Error;
};

/// cos(theta) too close to zero for the Doppler-to-speed inversion.
class IllConditionedGeometryError : public Error {
public:
    using Error::Error;
};

class InvalidPredictionError : public Error {
public:
    using Error::Error;
};

class DetectionError : public Error {
public:
    using Error::Error;
};

class PlacementError : public Error {
public:
    using Error::Error;
};

class InvalidPilotError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

enum class Domain { DelayDoppler, TimeFrequency };

/// Dense complex N x M grid.  Row index is Doppler (DD) or time (TF), column
/// index is delay (DD) or frequency (TF).  Storage is row-major.
template <Domain D>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return cells_.size(); }

    cplx& operator()(std::size_t r, std::size_t c) { return cells_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c]; }

    cplx& operator[](std::size_t i) { return cells_[i]; }
    const cplx& operator[](std::size_t i) const { return cells_[i]; }

    std::span<cplx> data() noexcept { return cells_; }
    std::span<const cplx> data() const noexcept { return cells_; }

    double energy() const {
        double e = 0.0;
        for (const auto& v : cells_) e += std::norm(v);
        return e;
    }

    bool all_finite() const {
        for (const auto& v : cells_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    Grid& operator+=(const Grid& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] += o.cells_[i];
        return *this;
    }

    Grid& operator*=(cplx s) {
        for (auto& v : cells_) v *= s;
        return *this;
    }

    friend Grid operator+(Grid a, const Grid& b) { return a += b; }
    friend Grid operator*(cplx s, Grid a) { return a *= s; }

    bool operator==(const Grid&) const = default;

private:
    void check_same_shape(const Grid& o) const {
        if (o.rows_ != rows_ || o.cols_ != cols_) throw ConfigError("grid shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> cells_;
};

using DDGrid = Grid<Domain::DelayDoppler>;
using TFGrid = Grid<Domain::TimeFrequency>;

/// Largest absolute cell difference between two grids of equal shape.
template <Domain D>
double max_abs_diff(const Grid<D>& a, const Grid<D>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ConfigError("grid shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Non-negative modulo for signed indices.
constexpr std::size_t wrap(long long i, std::size_t n) noexcept {
    const long long m = static_cast<long long>(n);
    long long r = i % m;
    return static_cast<std::size_t>(r < 0 ? r + m : r);
}

/// Rounds half-up toward +infinity, the quantization rule for delay/Doppler taps.
inline long long round_half_up(double v) { return static_cast<long long>(std::floor(v + 0.5)); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace isac_otfs

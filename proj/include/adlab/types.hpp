// types.hpp — shared aliases, constants, and error categories

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace adlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr Complex kI{0.0, 1.0};

// Largest dense dimension accepted by the spectral machinery.
inline constexpr int kMaxDenseDim = 64;

// Bad inputs: malformed matrices, configs, incompatible shapes.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Instantaneous spectrum collapsed below the degeneracy tolerance.
struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Level continuation by maximal overlap became ambiguous.
struct TrackingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Oscillation or scan undersampled for the requested accuracy.
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed-step integration drifted beyond its norm budget.
struct StepSizeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive integration exceeded its step budget.
struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Uniform time grid t_k = t0 + k*dt, k = 0..steps.
struct TimeGrid {
    double t0 = 0.0;
    double t1 = 1.0;
    int steps = 1000;

    double dt() const { return (t1 - t0) / static_cast<double>(steps); }
    int nodes() const { return steps + 1; }
    double time(int k) const { return t0 + static_cast<double>(k) * dt(); }

    void validate() const {
        if (!(t1 > t0))
            throw ValidationError("TimeGrid: t1 must exceed t0");
        if (steps < 2)
            throw ValidationError("TimeGrid: need at least 2 steps");
    }
};

inline double wrap_two_pi(double phase) {
    double w = std::fmod(phase, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w;
}

inline double wrap_pi(double phase) {
    double w = std::fmod(phase + kPi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w - kPi;
}

} // namespace adlab

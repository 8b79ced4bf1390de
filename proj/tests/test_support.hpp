// test_support.hpp — shared fixtures and independent oracles for the tests
//
// Oracles here must stay independent of the implementation paths they check:
// the solid angle comes from fan triangulation of the parameter path, the
// oscillatory-integral references from closed forms.

#pragma once

#include <adlab/models.hpp>
#include <adlab/types.hpp>

#include <array>
#include <cmath>
#include <random>

namespace adlab::test {

// Signed solid angle subtended by a closed path of unit vectors, by summing
// the spherical excess of the fan triangles (p0, p_k, p_{k+1}).
inline double solid_angle_of_loop(const std::vector<std::array<double, 3>>& path) {
    auto dot = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    };
    auto triple = [](const std::array<double, 3>& a, const std::array<double, 3>& b,
                     const std::array<double, 3>& c) {
        return a[0] * (b[1] * c[2] - b[2] * c[1]) -
               a[1] * (b[0] * c[2] - b[2] * c[0]) +
               a[2] * (b[0] * c[1] - b[1] * c[0]);
    };
    double omega = 0.0;
    const auto& p0 = path.front();
    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
        const auto& p1 = path[k];
        const auto& p2 = path[k + 1];
        // Van Oosterom-Strackee for the spherical triangle (p0, p1, p2).
        const double denom = 1.0 + dot(p0, p1) + dot(p1, p2) + dot(p2, p0);
        omega += 2.0 * std::atan2(triple(p0, p1, p2), denom);
    }
    return omega;
}

// Solid angle for the latitude circle at polar angle theta: 2π(1−cos θ).
inline double cap_solid_angle(double theta) {
    return 2.0 * kPi * (1.0 - std::cos(theta));
}

// Unit-vector path of a two-level schedule H = ½ n·σ, sampled on the cycle.
inline std::vector<std::array<double, 3>> bloch_path(const HamiltonianSchedule& s,
                                                     double t0, double t1,
                                                     int samples) {
    std::vector<std::array<double, 3>> path;
    path.reserve(static_cast<std::size_t>(samples) + 1);
    for (int k = 0; k <= samples; ++k) {
        const double t =
            t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(samples);
        const Matrix h = s.evaluate(t);
        const double x = 2.0 * h(1, 0).real();
        const double y = 2.0 * h(1, 0).imag();
        const double z = 2.0 * h(0, 0).real();
        const double r = std::sqrt(x * x + y * y + z * z);
        path.push_back({x / r, y / r, z / r});
    }
    return path;
}

inline Matrix random_hermitian(int dim, unsigned seed, double scale = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-scale, scale);
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Complex(dist(rng), dist(rng));
    return 0.5 * (a + a.adjoint()).eval();
}

// Smooth gapped schedule: well-separated static diagonal plus a small smooth
// Hermitian modulation, so levels never approach each other.
inline HamiltonianSchedule random_gapped_schedule(int dim, unsigned seed) {
    const Matrix b = random_hermitian(dim, seed, 0.15);
    const Matrix c = random_hermitian(dim, seed + 1, 0.15);
    HamiltonianSchedule s;
    s.dim = dim;
    s.kind = "test-random-gapped";
    s.evaluate_into = [dim, b, c](double t, Matrix& h) {
        h = b * std::cos(1.3 * t) + c * std::sin(0.7 * t);
        for (int i = 0; i < dim; ++i) h(i, i) += Complex(2.0 * i, 0.0);
    };
    return s;
}

inline Vector unit_amplitudes(int dim, int level) {
    Vector c = Vector::Zero(dim);
    c(level) = 1.0;
    return c;
}

} // namespace adlab::test

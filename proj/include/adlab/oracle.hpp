// oracle.hpp — ground-truth propagators and comparison metrics
//
// propagate_dense: adaptive fourth-order integrator (step halving with a
// Richardson error estimate) for i dψ/dt = λ H(t) ψ at dense few-level scale.
// propagate_grid: symmetric split-operator stepping for a particle on a
// periodic segment, kinetic part applied in Fourier modes.
// Everything else in the repository is validated against this module.

#pragma once

#include <adlab/models.hpp>
#include <adlab/parallel.hpp>
#include <adlab/types.hpp>

#include <vector>

namespace adlab {

struct DenseOptions {
    double tol = 1e-10;                  // accepted range [1e-12, 1e-6]
    std::size_t max_steps = 400000000;   // accepted-step budget
};

struct DenseResult {
    std::vector<double> times;    // sample times, final time always last
    std::vector<Vector> states;   // states at those times, not renormalized
    double max_norm_drift = 0.0;  // max |‖ψ‖ − ‖ψ0‖| over accepted steps
    std::size_t steps = 0;        // accepted steps

    const Vector& final_state() const { return states.back(); }
};

DenseResult propagate_dense(const HamiltonianSchedule& schedule, double lambda,
                            const Vector& psi0, double t0, double t1,
                            const DenseOptions& options = {},
                            const std::vector<double>& sample_times = {});

struct GridState {
    Vector psi;
    double length = 1.0;
    double mass = 1.0;

    int nx() const { return static_cast<int>(psi.size()); }
    double dx() const { return length / static_cast<double>(nx()); }
    double norm() const;
};

// The flat initial state ψ(x) = 1/√L.
GridState constant_state(const GridModel& model);

GridState sampled_state(const GridModel& model,
                        const std::function<Complex(double)>& psi);

GridState propagate_grid(const GridModel& model, const GridState& psi0, double t,
                         int steps, Exec exec = kDefaultExec);

// ⟨T + V⟩ for diagnostics (conservation checks on static potentials).
double grid_energy(const GridModel& model, const GridState& state);

Complex state_overlap(const Vector& a, const Vector& b);
Complex state_overlap(const GridState& a, const GridState& b);

// |⟨a|b⟩|² for normalized states; grid overload uses the L/N measure.
double fidelity(const Vector& a, const Vector& b);
double fidelity(const GridState& a, const GridState& b);

} // namespace adlab

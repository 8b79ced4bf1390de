// models.hpp — the catalog of Hamiltonian schedules and 1D grid models
//
// Two-level schedules:
//   berry-full   ½(X σx + Y σy + Z σz), (X,Y,Z) a latitude circle on a sphere
//   berry-xz     ½(X σx + Z σz), (X,Z) a circle in the x-z plane
//   gapped-lz    ½(v t σz + δ σx), avoided crossing of width δ
//   rotating-xy  ½(cos ωt σx + sin ωt σy), equatorial rotation
//
// Grid models: a particle of mass m on a periodic segment of length L with
// potential V(x), sampled on a power-of-two grid.

#pragma once

#include <adlab/types.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adlab {

struct HamiltonianSchedule {
    int dim = 0;
    std::string kind;
    std::map<std::string, double> params;
    std::function<void(double, Matrix&)> evaluate_into;
    std::optional<double> period;

    Matrix evaluate(double t) const {
        Matrix h(dim, dim);
        evaluate_into(t, h);
        return h;
    }
};

// Known model kinds, in the order reported by error messages.
const std::vector<std::string>& schedule_kinds();

// One matrix at one time; validates kind and parameters.
Matrix model_hamiltonian(const std::string& kind,
                         const std::map<std::string, double>& params, double t);

// Full schedule with defaults resolved; the returned params echo every value
// actually used. Unknown parameter names are rejected.
HamiltonianSchedule make_schedule(const std::string& kind,
                                  const std::map<std::string, double>& params = {});

// Time axis compression t -> scale*t, for the rescaling-equivalence checks:
// running (lambda, horizon T) matches (lambda/scale, compressed schedule,
// horizon scale*T).
HamiltonianSchedule time_compressed(const HamiltonianSchedule& s, double scale);

struct GridModel {
    double length = 1.0;
    double mass = 1.0;
    int nx = 0;
    RealVector x;              // x_k = k L / nx
    RealVector v_samples;      // V(x_k)
    RealVector kinetic_modes;  // (2π j / L)² / 2m in FFT index order

    double dx() const { return length / static_cast<double>(nx); }
};

GridModel grid_model(double length, double mass,
                     const std::function<double(double)>& potential, int nx);

} // namespace adlab

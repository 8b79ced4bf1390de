// wk.hpp — first-order short-time wavefunction and its β-image
//
// For a particle on a periodic segment with static potential V(x) and flat
// initial state 1/√L, the first-order short-time factorization is
//   ψ(x,t) = (1/√L) {1 − i t³[V′(x)]²/(6m) + t² V″(x)/(4m)} e^{−itV(x)},
// deliberately left unnormalized so the truncation's norm defect stays
// visible. Under t → −iβ the curly bracket becomes the real factor
//   1 + β³[V′]²/(6m) − β²V″/(4m),
// which wk_beta_check compares against the operator product e^{βV̂}e^{−βĤ}
// applied to the flat state. small_time_scan measures the truncation error
// against the grid oracle and its large-t breakdown.
//
// The kinetic term is the spatial Laplacian −(1/2m)∂²/∂x²; potential
// derivatives come from spectral differentiation on the periodic grid.

#pragma once

#include <adlab/fit.hpp>
#include <adlab/oracle.hpp>

namespace adlab {

struct WkFactor {
    Vector factor;     // curly-bracket factor per grid point
    Vector phase;      // e^{−itV(x)} (t-mode) or e^{−βV(x)} (β-mode)
    double t = 0.0;    // time, or β when beta_mode
    bool beta_mode = false;
};

// V′ and V″ sampled on the grid via Fourier modes.
struct PotentialDerivatives {
    RealVector first;
    RealVector second;
};
PotentialDerivatives potential_derivatives(const GridModel& model);

WkFactor wk_factor(const GridModel& model, double t);
WkFactor wk_factor_beta(const GridModel& model, double beta);

struct WkWavefunction {
    GridState state;  // NOT renormalized
    WkFactor factor;
    bool smoothness_warning = false;
    double high_mode_fraction = 0.0;
};

WkWavefunction wk_wavefunction(const GridModel& model, double t);

struct WkBetaReport {
    RealVector series_factor;   // 1 + β³[V′]²/6m − β²V″/4m
    RealVector oracle_factor;   // √L e^{βV̂} e^{−β(T̂+V̂)} 1/√L, pointwise
    double max_abs_residual = 0.0;
    bool smoothness_warning = false;
};

// Dense operator oracle; rejects nx > 256.
WkBetaReport wk_beta_check(const GridModel& model, double beta);

struct ScanOptions {
    int min_steps = 1024;        // oracle substeps floor
    double max_substep = 2e-5;   // oracle substep ceiling
    Exec exec = kDefaultExec;
};

struct SmallTimeScan {
    SweepResult sweep;            // abscissa = t ascending, error per t
    double error_large_t = 0.0;   // truncation error at t = 1
    double error_small_t = 0.0;   // truncation error at t = 0.01
    double breakdown_ratio = 0.0; // error(1) / error(0.01)
};

// times must be strictly decreasing, positive, spanning at least a decade.
// Errors must shrink monotonically along the list, else ResolutionError.
SmallTimeScan small_time_scan(const GridModel& model, std::vector<double> times,
                              const ScanOptions& options = {});

} // namespace adlab

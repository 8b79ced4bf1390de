// spectral.hpp — instantaneous eigenframes with gauge continuation
//
// A SpectralFrame holds the eigensystem of H(t) at one grid time. Frames are
// chained by gauge_align: levels are tracked by maximal overlap (continuity,
// not energy order) and each eigenvector is rotated by a unit phase so the
// overlap with its predecessor is real and nonnegative. In that transported
// gauge the per-link overlap arguments accumulate the geometric phase, and
// the closing overlap of a parameter loop carries its holonomy.

#pragma once

#include <adlab/models.hpp>
#include <adlab/parallel.hpp>
#include <adlab/types.hpp>

#include <vector>

namespace adlab {

struct SpectralFrame {
    double t = 0.0;
    RealVector energies;  // E_n(t); ascending only before alignment reorders
    Matrix basis;         // columns |n;t>
    bool gauge_aligned = false;

    int dim() const { return static_cast<int>(energies.size()); }
};

inline constexpr double kDefaultDegeneracyTol = 1e-9;
inline constexpr double kOverlapAmbiguityTol = 1e-6;

// Dense Hermitian eigendecomposition at time t. Energies ascending,
// residual ‖H|n> − E_n|n>‖ ≤ 1e-10 per level, gauge_aligned = false.
SpectralFrame eigen_frame(const Matrix& h, double t);

// Canonical per-vector phase fix (largest-magnitude component made real
// positive); marks the frame aligned so it can anchor a sequence.
SpectralFrame anchor_gauge(SpectralFrame frame);

// Phase- and order-continuation of curr against prev (see header comment).
// Throws DegeneracyError when either spectrum has a gap below degeneracy_tol
// and TrackingError when the overlap assignment is ambiguous.
SpectralFrame gauge_align(const SpectralFrame& prev, const SpectralFrame& curr,
                          double degeneracy_tol = kDefaultDegeneracyTol);

struct CouplingFrame {
    double t = 0.0;
    Matrix d;          // D_mn = <m;t| d/dt |n;t>
    RealMatrix gaps;   // Ω_nm = E_n − E_m, indexed (n, m)

    int dim() const { return static_cast<int>(d.rows()); }
};

// Centered-difference coupling matrix from three consecutive aligned frames.
CouplingFrame coupling_matrix(const SpectralFrame& before, const SpectralFrame& center,
                              const SpectralFrame& after, double dt);

// Aligned frames on a uniform grid.
struct FrameSequence {
    std::vector<SpectralFrame> frames;
    double dt = 0.0;

    int nodes() const { return static_cast<int>(frames.size()); }
    int dim() const { return frames.empty() ? 0 : frames.front().dim(); }
};

// Eigensolves at every grid node (parallel kernel), then sequential gauge
// continuation anchored at the first node.
FrameSequence build_frames(const HamiltonianSchedule& schedule, const TimeGrid& grid,
                           double degeneracy_tol = kDefaultDegeneracyTol,
                           Exec exec = kDefaultExec);

// As build_frames, for an explicit list of times (must be uniformly spaced
// when later fed to coupling/quadrature routines).
FrameSequence build_frames_at(const HamiltonianSchedule& schedule,
                              const std::vector<double>& times,
                              double degeneracy_tol = kDefaultDegeneracyTol,
                              Exec exec = kDefaultExec);

// Cumulative geometric phase γ_n(t_k) = −Σ_{j<k} arg<n;t_j|n;t_{j+1}>,
// row k = grid node, column n = level. γ_n(t_0) = 0.
RealMatrix geometric_phase(const std::vector<SpectralFrame>& frames);

// Loop phase including the closing overlap <n;t_K|n;t_0>; gauge invariant
// for closed parameter paths (H(t_K) = H(t_0)).
RealVector closed_loop_geometric_phase(const std::vector<SpectralFrame>& frames);

} // namespace adlab

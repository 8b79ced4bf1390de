// interaction.hpp — strong-perturbation dynamics in the interaction picture
//
// For H(t) = H0 + λV(t) with time-independent H0 and free propagator
// U(t) = exp(−iH0 t), the dressed operator U†V(t)U shares V's spectrum and
// its eigenvectors map to V's up to a phase α_n with α̇_n = −⟨n;t|H0|n;t⟩.
// assemble_ip_solution builds the resulting large-λ state
//   ψ(t) = Σ_n c_n(t0) e^{iγ_n} e^{−i∫[⟨n|H0|n⟩ + λ v_n]dt′} |n;t⟩
// from V's spectral frames alone.

#pragma once

#include <adlab/adiabatic.hpp>
#include <adlab/spectral.hpp>

namespace adlab {

struct SplitHamiltonian {
    Matrix h0;               // time-independent part
    HamiltonianSchedule v;   // the strong perturbation V(t)
    double lambda = 1.0;

    void validate() const;
};

// exp(−iH0 t) with the eigendecomposition cached across times.
class FreePropagator {
public:
    explicit FreePropagator(const Matrix& h0);
    Matrix at(double t) const;

private:
    RealVector evals_;
    Matrix evecs_;
};

Matrix free_propagator(const Matrix& h0, double t);

struct DressedFrameReport {
    double max_spectrum_mismatch = 0.0;  // sorted spectra of V vs U†VU
    RealVector overlap_magnitudes;       // |⟨n;t|U|n;t⟩_I| per level
    RealVector phases;                   // arg⟨n;t|U|n;t⟩_I per level
};

// Numerical check of the dressed-frame identities at one time.
DressedFrameReport dressed_frame_check(const SplitHamiltonian& split, double t,
                                       double degeneracy_tol = kDefaultDegeneracyTol);

// α_n(t_k) = −∫⟨n;t|H0|n;t⟩dt′ by composite trapezoid along aligned frames.
RealMatrix alpha_phase(const Matrix& h0, const FrameSequence& vframes);

// The dressed eigenvector family e^{iα_n(t)} U†(t−t0) |n;t⟩ as frames, for
// transporting phases in the interaction picture.
std::vector<SpectralFrame> ip_frames(const SplitHamiltonian& split,
                                     const FrameSequence& vframes);

struct InteractionLedger {
    RealMatrix alpha;     // α_n(t_k)
    RealMatrix gamma;     // γ_n(t_k) from V's frames
    RealMatrix gamma_ip;  // γ_n^I(t_k) accumulated along the dressed frames
    RealMatrix vn;        // v_n(t_k) eigenvalue tracks of V
};

struct IpSolution {
    FrameSequence vframes;
    InteractionLedger ledger;
    std::vector<Vector> states;
    double lambda = 0.0;

    const Vector& final_state() const { return states.back(); }
};

IpSolution assemble_ip_solution(const SplitHamiltonian& split, const Vector& c0,
                                const TimeGrid& grid,
                                const EngineOptions& options = {});

struct NeglectReport {
    double max_ratio = 0.0;  // max |⟨n|H0|n⟩| / (λ|v_n|) over finite points
    int max_level = 0;
    double max_time = 0.0;
    bool has_infinite = false;  // some v_n(t*) vanished
    int infinite_level = 0;
    double infinite_time = 0.0;
};

// Diagnostic for the validity of dropping ⟨n|H0|n⟩ against λ v_n.
NeglectReport neglect_ratio(const SplitHamiltonian& split, const TimeGrid& grid,
                            const EngineOptions& options = {});

// The full Hamiltonian H0 + λV(t) as a schedule (for oracle propagation;
// drive it with coupling strength 1).
HamiltonianSchedule combined_schedule(const SplitHamiltonian& split);

// Independent check of α̇_n = −⟨n;t|H0|n;t⟩: the dressed-frame phases
// arg⟨n;t|U|n;t⟩_I are extracted from a freshly aligned eigenvector family
// of U†V U and differentiated by centered differences. Returns the max
// deviation over interior nodes and levels.
double alpha_rate_mismatch(const SplitHamiltonian& split, const TimeGrid& grid,
                           const EngineOptions& options = {});

} // namespace adlab

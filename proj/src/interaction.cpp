#include <adlab/interaction.hpp>

#include <adlab/hermitian.hpp>

#include <cmath>
#include <sstream>

namespace adlab {

void SplitHamiltonian::validate() const {
    require_hermitian(h0, 1e-12, "SplitHamiltonian::h0");
    if (h0.rows() != v.dim)
        throw ValidationError("SplitHamiltonian: H0 and V dimensions differ");
    if (!(lambda > 0.0))
        throw ValidationError("SplitHamiltonian: lambda must be positive");
}

FreePropagator::FreePropagator(const Matrix& h0) {
    require_hermitian(h0, 1e-12, "free_propagator");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h0);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("free_propagator: eigendecomposition failed");
    evals_ = solver.eigenvalues();
    evecs_ = solver.eigenvectors();
}

Matrix FreePropagator::at(double t) const {
    const int n = static_cast<int>(evals_.size());
    Vector phases(n);
    for (int k = 0; k < n; ++k) phases(k) = std::polar(1.0, -evals_(k) * t);
    return evecs_ * phases.asDiagonal() * evecs_.adjoint();
}

Matrix free_propagator(const Matrix& h0, double t) {
    return FreePropagator(h0).at(t);
}

DressedFrameReport dressed_frame_check(const SplitHamiltonian& split, double t,
                                       double degeneracy_tol) {
    split.validate();
    const Matrix u = free_propagator(split.h0, t);
    const Matrix v = split.v.evaluate(t);
    const Matrix dressed = u.adjoint() * v * u;

    Eigen::SelfAdjointEigenSolver<Matrix> sv(v);
    Eigen::SelfAdjointEigenSolver<Matrix> sw(dressed);
    if (sv.info() != Eigen::Success || sw.info() != Eigen::Success)
        throw std::runtime_error("dressed_frame_check: eigendecomposition failed");

    const int n = static_cast<int>(sv.eigenvalues().size());
    for (int i = 0; i + 1 < n; ++i) {
        const double gap = sv.eigenvalues()(i + 1) - sv.eigenvalues()(i);
        if (gap < degeneracy_tol) {
            std::ostringstream msg;
            msg << "dressed_frame_check: V(t) degenerate at t = " << t
                << " (levels " << i << "," << i + 1 << ", gap " << gap << ")";
            throw DegeneracyError(msg.str());
        }
    }

    DressedFrameReport report;
    report.max_spectrum_mismatch =
        (sv.eigenvalues() - sw.eigenvalues()).cwiseAbs().maxCoeff();
    report.overlap_magnitudes.resize(n);
    report.phases.resize(n);
    for (int level = 0; level < n; ++level) {
        // Both solvers sort ascending and the spectra agree, so eigenvectors
        // pair by position.
        const Complex o = sv.eigenvectors().col(level).dot(
            u * sw.eigenvectors().col(level));
        report.overlap_magnitudes(level) = std::abs(o);
        report.phases(level) = std::arg(o);
    }
    return report;
}

RealMatrix alpha_phase(const Matrix& h0, const FrameSequence& vframes) {
    require_hermitian(h0, 1e-12, "alpha_phase");
    const int nodes = vframes.nodes();
    const int dim = vframes.dim();
    if (h0.rows() != dim)
        throw ValidationError("alpha_phase: dimension mismatch");
    if (nodes < 2)
        throw ValidationError("alpha_phase: need at least 2 frames");

    RealMatrix expect(nodes, dim);
    for (int k = 0; k < nodes; ++k) {
        const auto& frame = vframes.frames[static_cast<std::size_t>(k)];
        if (!frame.gauge_aligned)
            throw ValidationError("alpha_phase: frames must be gauge aligned");
        for (int level = 0; level < dim; ++level)
            expect(k, level) =
                frame.basis.col(level).dot(h0 * frame.basis.col(level)).real();
    }

    RealMatrix alpha = RealMatrix::Zero(nodes, dim);
    for (int k = 1; k < nodes; ++k) {
        const double h = vframes.frames[static_cast<std::size_t>(k)].t -
                         vframes.frames[static_cast<std::size_t>(k - 1)].t;
        alpha.row(k) =
            alpha.row(k - 1) - 0.5 * h * (expect.row(k - 1) + expect.row(k));
    }
    return alpha;
}

std::vector<SpectralFrame> ip_frames(const SplitHamiltonian& split,
                                     const FrameSequence& vframes) {
    split.validate();
    const RealMatrix alpha = alpha_phase(split.h0, vframes);
    const FreePropagator u(split.h0);
    const double t0 = vframes.frames.front().t;

    std::vector<SpectralFrame> out(vframes.frames.size());
    for (std::size_t k = 0; k < vframes.frames.size(); ++k) {
        const auto& vf = vframes.frames[k];
        SpectralFrame f;
        f.t = vf.t;
        f.energies = vf.energies;
        f.gauge_aligned = true;
        const Matrix u_dag = u.at(vf.t - t0).adjoint();
        f.basis.resize(vf.basis.rows(), vf.basis.cols());
        for (int level = 0; level < vf.dim(); ++level)
            f.basis.col(level) =
                std::polar(1.0, alpha(static_cast<int>(k), level)) *
                (u_dag * vf.basis.col(level));
        out[k] = std::move(f);
    }
    return out;
}

IpSolution assemble_ip_solution(const SplitHamiltonian& split, const Vector& c0,
                                const TimeGrid& grid, const EngineOptions& options) {
    split.validate();
    if (c0.size() != split.v.dim)
        throw ValidationError("assemble_ip_solution: amplitude dimension mismatch");
    if (std::abs(c0.norm() - 1.0) > 1e-9)
        throw ValidationError("assemble_ip_solution: amplitudes must be normalized");

    IpSolution sol;
    sol.lambda = split.lambda;
    sol.vframes = build_frames(split.v, grid, options.degeneracy_tol, options.exec);

    const int nodes = sol.vframes.nodes();
    const int dim = sol.vframes.dim();

    sol.ledger.vn.resize(nodes, dim);
    for (int k = 0; k < nodes; ++k)
        sol.ledger.vn.row(k) =
            sol.vframes.frames[static_cast<std::size_t>(k)].energies.transpose();

    sol.ledger.alpha = alpha_phase(split.h0, sol.vframes);
    sol.ledger.gamma = geometric_phase(sol.vframes.frames);
    sol.ledger.gamma_ip = geometric_phase(ip_frames(split, sol.vframes));

    // Phase of Eq-style assembly: γ_n − ∫[⟨n|H0|n⟩ + λ v_n] = γ_n + α_n − Θ_n
    // with Θ_n = λ∫v_n; feed Θ_n − α_n as the dynamical column.
    RealMatrix theta = RealMatrix::Zero(nodes, dim);
    for (int k = 1; k < nodes; ++k) {
        const double h = sol.vframes.frames[static_cast<std::size_t>(k)].t -
                         sol.vframes.frames[static_cast<std::size_t>(k - 1)].t;
        theta.row(k) = theta.row(k - 1) +
                       0.5 * h * split.lambda *
                           (sol.ledger.vn.row(k - 1) + sol.ledger.vn.row(k));
    }
    const RealMatrix dynamical = theta - sol.ledger.alpha;

    Matrix amplitudes(nodes, dim);
    for (int k = 0; k < nodes; ++k) amplitudes.row(k) = c0.transpose();

    sol.states.reserve(static_cast<std::size_t>(nodes));
    for (int k = 0; k < nodes; ++k)
        sol.states.push_back(
            assemble_state(sol.vframes.frames[static_cast<std::size_t>(k)],
                           sol.ledger.gamma, dynamical, amplitudes, k));
    return sol;
}

HamiltonianSchedule combined_schedule(const SplitHamiltonian& split) {
    split.validate();
    HamiltonianSchedule full;
    full.dim = split.v.dim;
    full.kind = split.v.kind + "+h0";
    full.params = split.v.params;
    full.period = split.v.period;
    const Matrix h0 = split.h0;
    const double lambda = split.lambda;
    auto inner = split.v.evaluate_into;
    full.evaluate_into = [h0, lambda, inner](double t, Matrix& h) {
        inner(t, h);
        h *= lambda;
        h += h0;
    };
    return full;
}

double alpha_rate_mismatch(const SplitHamiltonian& split, const TimeGrid& grid,
                           const EngineOptions& options) {
    split.validate();
    const FrameSequence vframes =
        build_frames(split.v, grid, options.degeneracy_tol, options.exec);
    const int nodes = vframes.nodes();
    const int dim = vframes.dim();
    const FreePropagator u(split.h0);

    // Dressed family from scratch: eigenvectors of U†VU, anchored and aligned
    // independently of the α construction.
    std::vector<SpectralFrame> dressed(static_cast<std::size_t>(nodes));
    parallel_for(options.exec, nodes, [&](std::ptrdiff_t k) {
        const double t = vframes.frames[static_cast<std::size_t>(k)].t;
        const Matrix uk = u.at(t - grid.t0);
        const Matrix w = uk.adjoint() * split.v.evaluate(t) * uk;
        dressed[static_cast<std::size_t>(k)] = eigen_frame(w, t);
    });
    dressed[0] = anchor_gauge(std::move(dressed[0]));
    for (std::size_t k = 1; k < dressed.size(); ++k)
        dressed[k] = gauge_align(dressed[k - 1], dressed[k], options.degeneracy_tol);

    // Unwrapped phases φ_n(t_k) = arg⟨n;t_k|U(t_k)|n;t_k⟩_I.
    RealMatrix phases(nodes, dim);
    for (int k = 0; k < nodes; ++k) {
        const auto& vf = vframes.frames[static_cast<std::size_t>(k)];
        const Matrix uk = u.at(vf.t - grid.t0);
        for (int level = 0; level < dim; ++level) {
            const Complex o = vf.basis.col(level).dot(
                uk * dressed[static_cast<std::size_t>(k)].basis.col(level));
            double phi = std::arg(o);
            if (k > 0) {
                while (phi - phases(k - 1, level) > kPi) phi -= 2.0 * kPi;
                while (phi - phases(k - 1, level) < -kPi) phi += 2.0 * kPi;
            }
            phases(k, level) = phi;
        }
    }

    double worst = 0.0;
    const double dt = grid.dt();
    for (int k = 1; k + 1 < nodes; ++k) {
        const auto& vf = vframes.frames[static_cast<std::size_t>(k)];
        for (int level = 0; level < dim; ++level) {
            const double rate = (phases(k + 1, level) - phases(k - 1, level)) /
                                (2.0 * dt);
            const double expected = -vf.basis.col(level)
                                         .dot(split.h0 * vf.basis.col(level))
                                         .real();
            worst = std::max(worst, std::abs(rate - expected));
        }
    }
    return worst;
}

NeglectReport neglect_ratio(const SplitHamiltonian& split, const TimeGrid& grid,
                            const EngineOptions& options) {
    split.validate();
    const FrameSequence vframes =
        build_frames(split.v, grid, options.degeneracy_tol, options.exec);
    const int nodes = vframes.nodes();
    const int dim = vframes.dim();

    double vscale = 0.0;
    for (int k = 0; k < nodes; ++k)
        vscale = std::max(
            vscale,
            vframes.frames[static_cast<std::size_t>(k)].energies.cwiseAbs().maxCoeff());

    NeglectReport report;
    for (int k = 0; k < nodes; ++k) {
        const auto& frame = vframes.frames[static_cast<std::size_t>(k)];
        for (int level = 0; level < dim; ++level) {
            const double num = std::abs(
                frame.basis.col(level).dot(split.h0 * frame.basis.col(level)).real());
            const double den = split.lambda * std::abs(frame.energies(level));
            if (den <= 1e-12 * split.lambda * vscale) {
                if (!report.has_infinite) {
                    report.has_infinite = true;
                    report.infinite_level = level;
                    report.infinite_time = frame.t;
                }
                continue;
            }
            const double ratio = num / den;
            if (ratio > report.max_ratio) {
                report.max_ratio = ratio;
                report.max_level = level;
                report.max_time = frame.t;
            }
        }
    }
    return report;
}

} // namespace adlab

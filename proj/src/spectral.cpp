#include <adlab/spectral.hpp>

#include <adlab/hermitian.hpp>

#include <cmath>
#include <sstream>

namespace adlab {

namespace {

void check_min_gap(const SpectralFrame& frame, double degeneracy_tol) {
    const int n = frame.dim();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double gap = std::abs(frame.energies(i) - frame.energies(j));
            if (gap < degeneracy_tol) {
                std::ostringstream msg;
                msg << "degenerate levels (" << i << "," << j << ") at t = "
                    << frame.t << ": gap " << gap << " below tolerance "
                    << degeneracy_tol;
                throw DegeneracyError(msg.str());
            }
        }
    }
}

} // namespace

SpectralFrame eigen_frame(const Matrix& h, double t) {
    require_hermitian(h, 1e-12, "eigen_frame");
    if (h.rows() > kMaxDenseDim)
        throw ValidationError("eigen_frame: dimension exceeds dense limit");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigen_frame: eigendecomposition failed");

    SpectralFrame frame;
    frame.t = t;
    frame.energies = solver.eigenvalues();
    frame.basis = solver.eigenvectors();
    frame.gauge_aligned = false;
    return frame;
}

SpectralFrame anchor_gauge(SpectralFrame frame) {
    for (int n = 0; n < frame.dim(); ++n) {
        Eigen::Index imax = 0;
        frame.basis.col(n).cwiseAbs().maxCoeff(&imax);
        const Complex c = frame.basis(imax, n);
        const double mag = std::abs(c);
        if (mag > 0.0) frame.basis.col(n) *= std::conj(c) / mag;
    }
    frame.gauge_aligned = true;
    return frame;
}

SpectralFrame gauge_align(const SpectralFrame& prev, const SpectralFrame& curr,
                          double degeneracy_tol) {
    if (prev.dim() != curr.dim())
        throw ValidationError("gauge_align: frame dimensions differ");
    if (!prev.gauge_aligned)
        throw ValidationError("gauge_align: previous frame is not gauge aligned");

    check_min_gap(prev, degeneracy_tol);
    check_min_gap(curr, degeneracy_tol);

    const int n = prev.dim();
    const Matrix overlaps = prev.basis.adjoint() * curr.basis;

    SpectralFrame out;
    out.t = curr.t;
    out.energies.resize(n);
    out.basis.resize(n, n);
    out.gauge_aligned = true;

    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (int level = 0; level < n; ++level) {
        int best = -1;
        double best_mag = -1.0, second_mag = -1.0;
        for (int j = 0; j < n; ++j) {
            if (taken[static_cast<std::size_t>(j)]) continue;
            const double mag = std::abs(overlaps(level, j));
            if (mag > best_mag) {
                second_mag = best_mag;
                best_mag = mag;
                best = j;
            } else if (mag > second_mag) {
                second_mag = mag;
            }
        }
        if (best < 0 || best_mag == 0.0) {
            std::ostringstream msg;
            msg << "level tracking lost for level " << level << " at t = " << curr.t;
            throw TrackingError(msg.str());
        }
        if (second_mag >= 0.0 && best_mag - second_mag < kOverlapAmbiguityTol) {
            std::ostringstream msg;
            msg << "ambiguous level tracking at t = " << curr.t << ": level "
                << level << " overlaps " << best_mag << " and " << second_mag
                << " differ by less than " << kOverlapAmbiguityTol;
            throw TrackingError(msg.str());
        }
        taken[static_cast<std::size_t>(best)] = true;
        const Complex phase = std::conj(overlaps(level, best)) / best_mag;
        out.basis.col(level) = curr.basis.col(best) * phase;
        out.energies(level) = curr.energies(best);
    }
    return out;
}

CouplingFrame coupling_matrix(const SpectralFrame& before, const SpectralFrame& center,
                              const SpectralFrame& after, double dt) {
    if (!(dt > 0.0))
        throw ValidationError("coupling_matrix: dt must be positive");
    if (before.dim() != center.dim() || center.dim() != after.dim())
        throw ValidationError("coupling_matrix: frame dimensions differ");
    if (!before.gauge_aligned || !center.gauge_aligned || !after.gauge_aligned)
        throw ValidationError("coupling_matrix: frames must be gauge aligned");

    const double spacing_dev =
        std::abs((after.t - center.t) - (center.t - before.t));
    const double scale = std::max({std::abs(before.t), std::abs(after.t), 1.0});
    if (spacing_dev > 1e-9 * scale)
        throw ValidationError("coupling_matrix: non-uniform frame spacing");

    CouplingFrame cf;
    cf.t = center.t;
    cf.d = center.basis.adjoint() * ((after.basis - before.basis) / (2.0 * dt));
    const int n = center.dim();
    cf.gaps.resize(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            cf.gaps(a, b) = center.energies(a) - center.energies(b);
    return cf;
}

FrameSequence build_frames_at(const HamiltonianSchedule& schedule,
                              const std::vector<double>& times,
                              double degeneracy_tol, Exec exec) {
    if (times.size() < 2)
        throw ValidationError("build_frames_at: need at least 2 times");

    FrameSequence seq;
    seq.frames.resize(times.size());
    seq.dt = times[1] - times[0];

    // Eigensolves are independent per node; continuity fixing below is
    // order-dependent and stays sequential.
    parallel_for(exec, static_cast<std::ptrdiff_t>(times.size()),
                 [&](std::ptrdiff_t k) {
                     Matrix h(schedule.dim, schedule.dim);
                     schedule.evaluate_into(times[static_cast<std::size_t>(k)], h);
                     seq.frames[static_cast<std::size_t>(k)] =
                         eigen_frame(h, times[static_cast<std::size_t>(k)]);
                 });

    seq.frames[0] = anchor_gauge(std::move(seq.frames[0]));
    for (std::size_t k = 1; k < seq.frames.size(); ++k)
        seq.frames[k] = gauge_align(seq.frames[k - 1], seq.frames[k], degeneracy_tol);
    return seq;
}

FrameSequence build_frames(const HamiltonianSchedule& schedule, const TimeGrid& grid,
                           double degeneracy_tol, Exec exec) {
    grid.validate();
    std::vector<double> times(static_cast<std::size_t>(grid.nodes()));
    for (int k = 0; k < grid.nodes(); ++k)
        times[static_cast<std::size_t>(k)] = grid.time(k);
    return build_frames_at(schedule, times, degeneracy_tol, exec);
}

RealMatrix geometric_phase(const std::vector<SpectralFrame>& frames) {
    if (frames.size() < 3)
        throw ValidationError("geometric_phase: need at least 3 frames");
    const int n = frames.front().dim();
    const int k_nodes = static_cast<int>(frames.size());

    RealMatrix gamma = RealMatrix::Zero(k_nodes, n);
    for (int k = 1; k < k_nodes; ++k) {
        for (int level = 0; level < n; ++level) {
            const Complex link =
                frames[static_cast<std::size_t>(k - 1)].basis.col(level).dot(
                    frames[static_cast<std::size_t>(k)].basis.col(level));
            gamma(k, level) = gamma(k - 1, level) - std::arg(link);
        }
    }
    return gamma;
}

RealVector closed_loop_geometric_phase(const std::vector<SpectralFrame>& frames) {
    const RealMatrix gamma = geometric_phase(frames);
    const int n = frames.front().dim();
    RealVector loop(n);
    for (int level = 0; level < n; ++level) {
        const Complex closing = frames.back().basis.col(level).dot(
            frames.front().basis.col(level));
        loop(level) = gamma(gamma.rows() - 1, level) - std::arg(closing);
    }
    return loop;
}

} // namespace adlab

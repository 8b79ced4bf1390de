#include <adlab/adiabatic.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace adlab {

namespace {

void require_unit_amplitudes(const Vector& c0, int dim) {
    if (c0.size() != dim)
        throw ValidationError("amplitude vector dimension mismatch");
    if (std::abs(c0.norm() - 1.0) > 1e-9)
        throw ValidationError("initial amplitudes must be normalized");
}

// Cumulative composite trapezoid of per-level values along the frame times.
RealMatrix cumulative_trapezoid(const std::vector<double>& times,
                                const RealMatrix& values) {
    const int nodes = static_cast<int>(times.size());
    RealMatrix out = RealMatrix::Zero(nodes, values.cols());
    for (int k = 1; k < nodes; ++k) {
        const double h = times[static_cast<std::size_t>(k)] -
                         times[static_cast<std::size_t>(k - 1)];
        out.row(k) = out.row(k - 1) + 0.5 * h * (values.row(k - 1) + values.row(k));
    }
    return out;
}

RealMatrix energy_table(const std::vector<SpectralFrame>& frames) {
    const int nodes = static_cast<int>(frames.size());
    const int dim = frames.front().dim();
    RealMatrix e(nodes, dim);
    for (int k = 0; k < nodes; ++k)
        e.row(k) = frames[static_cast<std::size_t>(k)].energies.transpose();
    return e;
}

PhaseLedger make_ledger(const std::vector<SpectralFrame>& frames, double lambda) {
    PhaseLedger ledger;
    ledger.lambda = lambda;
    ledger.times.reserve(frames.size());
    for (const auto& f : frames) ledger.times.push_back(f.t);
    ledger.dynamical = lambda * cumulative_trapezoid(ledger.times, energy_table(frames));
    ledger.geometric = geometric_phase(frames);
    return ledger;
}

template <class Fn>
auto with_lambda_context(double lambda, Fn&& fn) {
    auto rethrow = [lambda](const auto& e) {
        std::ostringstream msg;
        msg << "lambda = " << lambda << ": " << e.what();
        throw std::decay_t<decltype(e)>(msg.str());
    };
    try {
        return fn();
    } catch (const DegeneracyError& e) {
        rethrow(e);
    } catch (const TrackingError& e) {
        rethrow(e);
    } catch (const ResolutionError& e) {
        rethrow(e);
    } catch (const StepSizeError& e) {
        rethrow(e);
    } catch (const BudgetError& e) {
        rethrow(e);
    } catch (const ValidationError& e) {
        rethrow(e);
    } catch (const std::runtime_error& e) {
        std::ostringstream msg;
        msg << "lambda = " << lambda << ": " << e.what();
        throw std::runtime_error(msg.str());
    }
    throw std::logic_error("unreachable");
}

} // namespace

Vector assemble_state(const SpectralFrame& frame, const RealMatrix& geometric,
                      const RealMatrix& dynamical, const Matrix& amplitudes,
                      int node) {
    const int dim = frame.dim();
    Vector psi = Vector::Zero(dim);
    for (int n = 0; n < dim; ++n) {
        const Complex phase =
            std::polar(1.0, geometric(node, n) - dynamical(node, n));
        psi += amplitudes(node, n) * phase * frame.basis.col(n);
    }
    return psi;
}

AdiabaticTrajectory propagate_leading(const HamiltonianSchedule& schedule,
                                      double lambda, const Vector& c0,
                                      const TimeGrid& grid,
                                      const EngineOptions& options) {
    if (!(lambda > 0.0))
        throw ValidationError("propagate_leading: lambda must be positive");
    require_unit_amplitudes(c0, schedule.dim);

    AdiabaticTrajectory traj;
    traj.frames = build_frames(schedule, grid, options.degeneracy_tol, options.exec);
    traj.ledger = make_ledger(traj.frames.frames, lambda);

    const int nodes = traj.frames.nodes();
    traj.amplitudes.resize(nodes, schedule.dim);
    for (int k = 0; k < nodes; ++k) traj.amplitudes.row(k) = c0.transpose();

    traj.assembled.reserve(static_cast<std::size_t>(nodes));
    for (int k = 0; k < nodes; ++k)
        traj.assembled.push_back(assemble_state(
            traj.frames.frames[static_cast<std::size_t>(k)], traj.ledger.geometric,
            traj.ledger.dynamical, traj.amplitudes, k));
    return traj;
}

AdiabaticTrajectory propagate_amplitudes(const HamiltonianSchedule& schedule,
                                         double lambda, const Vector& c0,
                                         const TimeGrid& grid,
                                         const EngineOptions& options) {
    if (!(lambda > 0.0))
        throw ValidationError("propagate_amplitudes: lambda must be positive");
    require_unit_amplitudes(c0, schedule.dim);
    grid.validate();

    // Refined frame grid at half the step, padded by one node on each side so
    // centered differences exist at every RK4 stage time. The anchor sits on
    // the t0 node so initial amplitudes refer to a canonical gauge there.
    const int coarse_nodes = grid.nodes();
    const double h = 0.5 * grid.dt();
    const int fine_nodes = 2 * grid.steps + 3;
    std::vector<double> fine_times(static_cast<std::size_t>(fine_nodes));
    for (int f = 0; f < fine_nodes; ++f)
        fine_times[static_cast<std::size_t>(f)] =
            grid.t0 + (static_cast<double>(f) - 1.0) * h;

    std::vector<SpectralFrame> fine(static_cast<std::size_t>(fine_nodes));
    parallel_for(options.exec, fine_nodes, [&](std::ptrdiff_t f) {
        Matrix hm(schedule.dim, schedule.dim);
        schedule.evaluate_into(fine_times[static_cast<std::size_t>(f)], hm);
        fine[static_cast<std::size_t>(f)] =
            eigen_frame(hm, fine_times[static_cast<std::size_t>(f)]);
    });
    fine[1] = anchor_gauge(std::move(fine[1]));
    for (std::size_t f = 2; f < fine.size(); ++f)
        fine[f] = gauge_align(fine[f - 1], fine[f], options.degeneracy_tol);
    fine[0] = gauge_align(fine[1], fine[0], options.degeneracy_tol);

    const int dim = schedule.dim;

    // Stage tables on the interior fine nodes (f = 1 .. fine_nodes-2): the
    // coupling matrix D, and phases relative to t0.
    std::vector<SpectralFrame> interior(fine.begin() + 1, fine.end() - 1);
    PhaseLedger stage_ledger = make_ledger(interior, lambda);

    std::vector<Matrix> d_at(interior.size());
    parallel_for(options.exec, static_cast<std::ptrdiff_t>(interior.size()),
                 [&](std::ptrdiff_t i) {
                     const std::size_t f = static_cast<std::size_t>(i) + 1;
                     d_at[static_cast<std::size_t>(i)] =
                         coupling_matrix(fine[f - 1], fine[f], fine[f + 1], h).d;
                 });

    // ċ_m = −Σ_{n≠m} e^{i(γ_n−γ_m)} e^{−i(Θ_n−Θ_m)} D_mn c_n at stage index s.
    Matrix coef(dim, dim);
    auto rhs = [&](int s, const Vector& c, Vector& dc) {
        const Matrix& d = d_at[static_cast<std::size_t>(s)];
        for (int m = 0; m < dim; ++m) {
            Complex acc(0.0, 0.0);
            for (int n = 0; n < dim; ++n) {
                if (n == m) continue;
                const double phase = (stage_ledger.geometric(s, n) -
                                      stage_ledger.geometric(s, m)) -
                                     (stage_ledger.dynamical(s, n) -
                                      stage_ledger.dynamical(s, m));
                acc -= std::polar(1.0, phase) * d(m, n) * c(n);
            }
            dc(m) = acc;
        }
    };

    Matrix amplitudes(coarse_nodes, dim);
    amplitudes.row(0) = c0.transpose();
    Vector c = c0, k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), dc(dim);
    const double dt = grid.dt();

    for (int k = 0; k < grid.steps; ++k) {
        const int s0 = 2 * k, s1 = 2 * k + 1, s2 = 2 * k + 2;
        rhs(s0, c, k1);
        tmp = c + (0.5 * dt) * k1;
        rhs(s1, tmp, k2);
        tmp = c + (0.5 * dt) * k2;
        rhs(s1, tmp, k3);
        tmp = c + dt * k3;
        rhs(s2, tmp, k4);
        c += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double drift = std::abs(c.norm() - 1.0);
        if (drift > 1e-6) {
            std::ostringstream msg;
            msg << "propagate_amplitudes: norm drift " << drift << " at t = "
                << grid.time(k + 1) << "; use a finer time grid";
            throw StepSizeError(msg.str());
        }
        amplitudes.row(k + 1) = c.transpose();
    }

    AdiabaticTrajectory traj;
    traj.frames.dt = dt;
    traj.frames.frames.reserve(static_cast<std::size_t>(coarse_nodes));
    for (int k = 0; k < coarse_nodes; ++k)
        traj.frames.frames.push_back(interior[static_cast<std::size_t>(2 * k)]);

    traj.ledger.lambda = lambda;
    traj.ledger.times.resize(static_cast<std::size_t>(coarse_nodes));
    traj.ledger.dynamical.resize(coarse_nodes, dim);
    traj.ledger.geometric.resize(coarse_nodes, dim);
    for (int k = 0; k < coarse_nodes; ++k) {
        traj.ledger.times[static_cast<std::size_t>(k)] = stage_ledger.times[2 * k];
        traj.ledger.dynamical.row(k) = stage_ledger.dynamical.row(2 * k);
        traj.ledger.geometric.row(k) = stage_ledger.geometric.row(2 * k);
    }
    traj.amplitudes = std::move(amplitudes);

    traj.assembled.reserve(static_cast<std::size_t>(coarse_nodes));
    for (int k = 0; k < coarse_nodes; ++k)
        traj.assembled.push_back(assemble_state(
            traj.frames.frames[static_cast<std::size_t>(k)], traj.ledger.geometric,
            traj.ledger.dynamical, traj.amplitudes, k));
    return traj;
}

Complex correction_integral(const std::vector<CouplingFrame>& couplings,
                            const PhaseLedger& ledger, int n, int m, double t) {
    if (n == m)
        throw ValidationError("correction_integral: levels must differ");
    if (couplings.size() != ledger.times.size() || couplings.size() < 2)
        throw ValidationError("correction_integral: couplings/ledger mismatch");
    const int dim = couplings.front().dim();
    if (n < 0 || m < 0 || n >= dim || m >= dim)
        throw ValidationError("correction_integral: level index out of range");

    const double dt = ledger.times[1] - ledger.times[0];
    for (std::size_t k = 1; k + 1 < ledger.times.size(); ++k) {
        const double step = ledger.times[k + 1] - ledger.times[k];
        if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
            throw ValidationError("correction_integral: non-uniform grid");
    }

    const double offset = (t - ledger.times.front()) / dt;
    const int kt = static_cast<int>(std::lround(offset));
    if (kt < 0 || kt >= static_cast<int>(ledger.times.size()) ||
        std::abs(offset - static_cast<double>(kt)) > 1e-6)
        throw ValidationError("correction_integral: t must be a grid node");
    if (kt == 0) return Complex(0.0, 0.0);

    // Sampling rule: at least 20 nodes per local oscillation period.
    for (int k = 0; k <= kt; ++k) {
        const double omega =
            std::abs(couplings[static_cast<std::size_t>(k)].gaps(n, m));
        const double per_period = 2.0 * kPi / std::max(ledger.lambda * omega, 1e-300);
        if (dt > per_period / 20.0) {
            std::ostringstream msg;
            msg << "correction_integral: oscillation undersampled at t = "
                << ledger.times[static_cast<std::size_t>(k)] << " (need dt <= "
                << per_period / 20.0 << ", have " << dt << ")";
            throw ResolutionError(msg.str());
        }
    }

    auto integrand = [&](int k) {
        const double phase =
            (ledger.geometric(k, n) - ledger.geometric(k, m)) -
            (ledger.dynamical(k, n) - ledger.dynamical(k, m));
        return std::polar(1.0, phase) * couplings[static_cast<std::size_t>(k)].d(m, n);
    };

    // Composite Simpson; a 3/8 block absorbs an odd interval count.
    Complex total(0.0, 0.0);
    int start = 0;
    if (kt % 2 == 1) {
        if (kt < 3) return (dt / 2.0) * (integrand(0) + integrand(1));
        total += (3.0 * dt / 8.0) * (integrand(0) + 3.0 * integrand(1) +
                                     3.0 * integrand(2) + integrand(3));
        start = 3;
    }
    for (int k = start; k + 2 <= kt; k += 2)
        total += (dt / 3.0) *
                 (integrand(k) + 4.0 * integrand(k + 1) + integrand(k + 2));
    return total;
}

CorrectionTables correction_tables(const HamiltonianSchedule& schedule,
                                   double lambda, const TimeGrid& grid,
                                   const EngineOptions& options) {
    if (!(lambda > 0.0))
        throw ValidationError("correction_tables: lambda must be positive");
    grid.validate();

    const double dt = grid.dt();
    const int padded = grid.nodes() + 2;
    std::vector<double> times(static_cast<std::size_t>(padded));
    for (int f = 0; f < padded; ++f)
        times[static_cast<std::size_t>(f)] =
            grid.t0 + (static_cast<double>(f) - 1.0) * dt;

    std::vector<SpectralFrame> frames(static_cast<std::size_t>(padded));
    parallel_for(options.exec, padded, [&](std::ptrdiff_t f) {
        Matrix h(schedule.dim, schedule.dim);
        schedule.evaluate_into(times[static_cast<std::size_t>(f)], h);
        frames[static_cast<std::size_t>(f)] =
            eigen_frame(h, times[static_cast<std::size_t>(f)]);
    });
    frames[1] = anchor_gauge(std::move(frames[1]));
    for (std::size_t f = 2; f < frames.size(); ++f)
        frames[f] = gauge_align(frames[f - 1], frames[f], options.degeneracy_tol);
    frames[0] = gauge_align(frames[1], frames[0], options.degeneracy_tol);

    CorrectionTables tables;
    std::vector<SpectralFrame> interior(frames.begin() + 1, frames.end() - 1);
    tables.ledger = make_ledger(interior, lambda);
    tables.couplings.reserve(interior.size());
    for (std::size_t k = 1; k + 1 < frames.size(); ++k)
        tables.couplings.push_back(
            coupling_matrix(frames[k - 1], frames[k], frames[k + 1], dt));
    return tables;
}

SweepResult oscillatory_decay_probe(const std::function<double(double)>& gap_profile,
                                    const std::function<double(double)>& envelope,
                                    const std::vector<double>& lambdas,
                                    const ProbeOptions& options) {
    if (lambdas.size() < 4)
        throw ValidationError("oscillatory_decay_probe: need at least 4 lambdas");
    for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
        if (!(lambdas[i] < lambdas[i + 1]))
            throw ValidationError("oscillatory_decay_probe: lambdas must increase");
    if (!(lambdas.front() > 0.0))
        throw ValidationError("oscillatory_decay_probe: lambdas must be positive");
    if (lambdas.back() / lambdas.front() < 100.0 * (1.0 - 1e-12))
        throw ValidationError("oscillatory_decay_probe: lambdas must span >= 2 decades");
    const double a = options.window_a, b = options.window_b;
    if (!(b > a))
        throw ValidationError("oscillatory_decay_probe: empty window");

    double max_gap = 0.0;
    for (int i = 0; i <= 4096; ++i) {
        const double t = a + (b - a) * static_cast<double>(i) / 4096.0;
        max_gap = std::max(max_gap, std::abs(gap_profile(t)));
    }

    std::vector<double> magnitudes(lambdas.size(), 0.0);
    parallel_for(options.exec, static_cast<std::ptrdiff_t>(lambdas.size()),
                 [&](std::ptrdiff_t i) {
                     const double lambda = lambdas[static_cast<std::size_t>(i)];
                     std::ptrdiff_t m = std::max<std::ptrdiff_t>(
                         options.min_intervals,
                         static_cast<std::ptrdiff_t>(std::ceil(
                             options.points_per_period * lambda * max_gap *
                             (b - a) / (2.0 * kPi))));
                     if (m % 2 == 1) ++m;
                     const double h = (b - a) / static_cast<double>(m);

                     // Phase Φ(t) = ∫_a^t Ω by running trapezoid; Simpson on
                     // the integrand e^{−iλΦ} D.
                     double phi = 0.0;
                     double gap_prev = gap_profile(a);
                     Complex sum(0.0, 0.0);
                     Complex f_prev = envelope(a); // Φ(a) = 0
                     Complex f_mid(0.0, 0.0);
                     for (std::ptrdiff_t k = 1; k <= m; ++k) {
                         const double t = a + h * static_cast<double>(k);
                         const double gap_here = gap_profile(t);
                         phi += 0.5 * h * (gap_prev + gap_here);
                         gap_prev = gap_here;
                         const Complex f =
                             std::polar(envelope(t), -lambda * phi);
                         if (k % 2 == 1) {
                             f_mid = f;
                         } else {
                             sum += (h / 3.0) * (f_prev + 4.0 * f_mid + f);
                             f_prev = f;
                         }
                     }
                     magnitudes[static_cast<std::size_t>(i)] = std::abs(sum);
                 });

    bool all_zero = true;
    for (double v : magnitudes)
        if (v != 0.0) all_zero = false;
    if (all_zero)
        throw ValidationError(
            "oscillatory_decay_probe: all integrals vanished (zero data)");

    SweepResult result;
    result.lambdas = lambdas;
    result.errors = magnitudes;
    result.validate();
    const LogLogFit fit = loglog_fit(result.lambdas, result.errors);
    result.slope = fit.slope;
    result.intercept = fit.intercept;
    result.slope_stderr = fit.slope_stderr;
    return result;
}

SweepResult lambda_sweep_fit(const HamiltonianSchedule& schedule,
                             const std::vector<double>& lambdas,
                             const TimeGrid& grid, const SweepOptions& options) {
    if (lambdas.size() < 2)
        throw ValidationError("lambda_sweep_fit: need at least 2 lambdas");
    for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
        if (!(lambdas[i] < lambdas[i + 1]))
            throw ValidationError("lambda_sweep_fit: lambdas must increase");
    if (lambdas.front() < 10.0 || lambdas.back() > 1e4)
        throw ValidationError("lambda_sweep_fit: lambdas must lie in [10, 1e4]");
    if (options.level < 0 || options.level >= schedule.dim)
        throw ValidationError("lambda_sweep_fit: level out of range");

    std::vector<double> errors(lambdas.size(), 0.0);
    parallel_for(options.exec, static_cast<std::ptrdiff_t>(lambdas.size()),
                 [&](std::ptrdiff_t i) {
                     const double lambda = lambdas[static_cast<std::size_t>(i)];
                     with_lambda_context(lambda, [&] {
                         Vector c0 = Vector::Zero(schedule.dim);
                         c0(options.level) = 1.0;
                         EngineOptions eng{options.degeneracy_tol, Exec::Serial};
                         const AdiabaticTrajectory leading =
                             propagate_leading(schedule, lambda, c0, grid, eng);
                         DenseOptions dense;
                         dense.tol = options.oracle_tol;
                         const DenseResult oracle = propagate_dense(
                             schedule, lambda, leading.assembled.front(), grid.t0,
                             grid.t1, dense);
                         const double fid =
                             fidelity(leading.final_state(), oracle.final_state());
                         // 1 − fidelity measured in doubles bottoms out at
                         // rounding noise; floor keeps the log fit defined.
                         errors[static_cast<std::size_t>(i)] =
                             std::max(1.0 - fid, 1e-16);
                         return 0;
                     });
                 });

    SweepResult result;
    result.lambdas = lambdas;
    result.errors = errors;
    result.validate();
    const LogLogFit fit = loglog_fit(result.lambdas, result.errors);
    result.slope = fit.slope;
    result.intercept = fit.intercept;
    result.slope_stderr = fit.slope_stderr;
    return result;
}

BerryCycleResult berry_cycle_phase(const HamiltonianSchedule& schedule,
                                   double lambda, const TimeGrid& grid, int level,
                                   const EngineOptions& options) {
    if (!schedule.period)
        throw ValidationError("berry_cycle_phase: schedule is not periodic");
    const double period = *schedule.period;
    if (std::abs((grid.t1 - grid.t0) - period) > 1e-9 * period)
        throw ValidationError("berry_cycle_phase: grid must span exactly one cycle");
    if (level < 0 || level >= schedule.dim)
        throw ValidationError("berry_cycle_phase: level out of range");

    Vector c0 = Vector::Zero(schedule.dim);
    c0(level) = 1.0;

    BerryCycleResult result;
    result.level = level;
    result.trajectory = propagate_leading(schedule, lambda, c0, grid, options);

    const RealVector loop =
        closed_loop_geometric_phase(result.trajectory.frames.frames);
    result.loop_phase.resize(loop.size());
    for (int n = 0; n < loop.size(); ++n)
        result.loop_phase(n) = wrap_two_pi(loop(n));

    result.final_overlap = state_overlap(result.trajectory.assembled.front(),
                                         result.trajectory.final_state());
    return result;
}

} // namespace adlab

#include <adlab/wk.hpp>

#include <adlab/fft.hpp>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <sstream>

namespace adlab {

namespace {
constexpr double kSmoothFractionLimit = 1e-3;
} // namespace

PotentialDerivatives potential_derivatives(const GridModel& model) {
    PotentialDerivatives d;
    d.first = spectral_derivative(model.v_samples, model.length, 1);
    d.second = spectral_derivative(model.v_samples, model.length, 2);
    return d;
}

WkFactor wk_factor(const GridModel& model, double t) {
    const PotentialDerivatives d = potential_derivatives(model);
    WkFactor f;
    f.t = t;
    f.beta_mode = false;
    f.factor.resize(model.nx);
    f.phase.resize(model.nx);
    const double c3 = t * t * t / (6.0 * model.mass);
    const double c2 = t * t / (4.0 * model.mass);
    for (int k = 0; k < model.nx; ++k) {
        const double vp2 = d.first(k) * d.first(k);
        f.factor(k) = Complex(1.0 + c2 * d.second(k), -c3 * vp2);
        f.phase(k) = std::polar(1.0, -t * model.v_samples(k));
    }
    return f;
}

WkFactor wk_factor_beta(const GridModel& model, double beta) {
    const PotentialDerivatives d = potential_derivatives(model);
    WkFactor f;
    f.t = beta;
    f.beta_mode = true;
    f.factor.resize(model.nx);
    f.phase.resize(model.nx);
    const double c3 = beta * beta * beta / (6.0 * model.mass);
    const double c2 = beta * beta / (4.0 * model.mass);
    for (int k = 0; k < model.nx; ++k) {
        const double vp2 = d.first(k) * d.first(k);
        f.factor(k) = Complex(1.0 + c3 * vp2 - c2 * d.second(k), 0.0);
        f.phase(k) = Complex(std::exp(-beta * model.v_samples(k)), 0.0);
    }
    return f;
}

WkWavefunction wk_wavefunction(const GridModel& model, double t) {
    WkWavefunction w;
    w.high_mode_fraction = high_mode_energy_fraction(model.v_samples);
    w.smoothness_warning = w.high_mode_fraction > kSmoothFractionLimit;
    w.factor = wk_factor(model, t);
    w.state.length = model.length;
    w.state.mass = model.mass;
    w.state.psi.resize(model.nx);
    const double amp = 1.0 / std::sqrt(model.length);
    for (int k = 0; k < model.nx; ++k)
        w.state.psi(k) = amp * w.factor.factor(k) * w.factor.phase(k);
    return w;
}

WkBetaReport wk_beta_check(const GridModel& model, double beta) {
    if (model.nx > 256)
        throw ValidationError("wk_beta_check: dense operator oracle limited to nx <= 256");
    if (!(beta > 0.0) || beta > 0.1)
        throw ValidationError("wk_beta_check: beta must lie in (0, 0.1]");

    WkBetaReport report;
    report.smoothness_warning =
        high_mode_energy_fraction(model.v_samples) > kSmoothFractionLimit;

    const WkFactor f = wk_factor_beta(model, beta);
    report.series_factor.resize(model.nx);
    for (int k = 0; k < model.nx; ++k)
        report.series_factor(k) = f.factor(k).real();

    // Dense kinetic operator: apply the Fourier-mode multiplier to each unit
    // vector, then symmetrize away rounding.
    const int n = model.nx;
    Fft fft(n);
    RealMatrix kinetic(n, n);
    Vector column(n);
    for (int j = 0; j < n; ++j) {
        column.setZero();
        column(j) = 1.0;
        fft.forward(column);
        for (int q = 0; q < n; ++q) column(q) *= model.kinetic_modes(q);
        fft.inverse(column);
        for (int i = 0; i < n; ++i) kinetic(i, j) = column(i).real();
    }
    kinetic = 0.5 * (kinetic + kinetic.transpose()).eval();

    RealMatrix hamiltonian = kinetic;
    hamiltonian.diagonal() += model.v_samples;

    // e^{−βH} by scaling-and-squaring, applied to the flat state.
    const RealMatrix propagated = (-beta * hamiltonian).exp();
    const double amp = 1.0 / std::sqrt(model.length);
    RealVector evolved = propagated * RealVector::Constant(n, amp);

    report.oracle_factor.resize(n);
    for (int k = 0; k < n; ++k)
        report.oracle_factor(k) =
            std::sqrt(model.length) * std::exp(beta * model.v_samples(k)) * evolved(k);

    report.max_abs_residual =
        (report.series_factor - report.oracle_factor).cwiseAbs().maxCoeff();
    return report;
}

namespace {

double truncation_error(const GridModel& model, double t, const ScanOptions& options) {
    const WkWavefunction w = wk_wavefunction(model, t);
    const int steps =
        std::max(options.min_steps,
                 static_cast<int>(std::ceil(t / options.max_substep)));
    const GridState oracle =
        propagate_grid(model, constant_state(model), t, steps, options.exec);
    return (w.state.psi - oracle.psi).cwiseAbs().maxCoeff();
}

} // namespace

SmallTimeScan small_time_scan(const GridModel& model, std::vector<double> times,
                              const ScanOptions& options) {
    if (times.size() < 4)
        throw ValidationError("small_time_scan: need at least 4 times");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i] > times[i + 1]))
            throw ValidationError("small_time_scan: times must strictly decrease");
    if (!(times.back() > 0.0))
        throw ValidationError("small_time_scan: times must be positive");
    if (times.front() / times.back() < 10.0 * (1.0 - 1e-12))
        throw ValidationError("small_time_scan: times must span at least a decade");

    std::vector<double> errors(times.size(), 0.0);
    parallel_for(options.exec, static_cast<std::ptrdiff_t>(times.size()),
                 [&](std::ptrdiff_t i) {
                     errors[static_cast<std::size_t>(i)] = truncation_error(
                         model, times[static_cast<std::size_t>(i)], options);
                 });

    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        if (!(errors[i] > errors[i + 1])) {
            std::ostringstream msg;
            msg << "small_time_scan: error not decreasing between t = "
                << times[i] << " and t = " << times[i + 1]
                << "; oracle substeps too coarse for these times";
            throw ResolutionError(msg.str());
        }
    }

    SmallTimeScan scan;
    scan.sweep.lambdas.assign(times.rbegin(), times.rend());
    scan.sweep.errors.assign(errors.rbegin(), errors.rend());
    scan.sweep.validate();
    const LogLogFit fit = loglog_fit(scan.sweep.lambdas, scan.sweep.errors);
    scan.sweep.slope = fit.slope;
    scan.sweep.intercept = fit.intercept;
    scan.sweep.slope_stderr = fit.slope_stderr;

    scan.error_large_t = truncation_error(model, 1.0, options);
    scan.error_small_t = truncation_error(model, 0.01, options);
    scan.breakdown_ratio = scan.error_large_t / scan.error_small_t;
    return scan;
}

} // namespace adlab

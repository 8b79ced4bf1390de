#include <adlab/runner.hpp>

#include <adlab/adiabatic.hpp>
#include <adlab/fit.hpp>
#include <adlab/hermitian.hpp>
#include <adlab/interaction.hpp>
#include <adlab/wk.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace adlab {

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Flat-file series writer: comma-separated, header row, 17 significant
// digits, written before the summary.
class SeriesWriter {
public:
    explicit SeriesWriter(const std::filesystem::path& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open " + path.string());
    }

    void header(const std::vector<std::string>& columns) {
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out_ << ",";
            out_ << columns[i];
        }
        out_ << "\n";
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ",";
            out_ << format_double(values[i]);
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

std::map<std::string, std::string> echo_config(const RunConfig& cfg) {
    std::map<std::string, std::string> echo;
    echo["experiment"] = cfg.experiment;
    echo["output"] = cfg.output_dir;
    echo["seed"] = std::to_string(cfg.seed);

    const bool two_level = cfg.experiment == "leading" || cfg.experiment == "sweep" ||
                           cfg.experiment == "berry" || cfg.experiment == "ip-check";
    if (two_level) {
        echo["model.kind"] = cfg.model_kind;
        // Echo resolved parameters, including defaults the user omitted.
        const HamiltonianSchedule s = make_schedule(cfg.model_kind, cfg.model_params);
        for (const auto& [key, value] : s.params)
            echo["model.params." + key] = format_double(value);
        echo["grid.t0"] = format_double(cfg.t0);
        echo["grid.t1"] = format_double(cfg.t1);
        echo["grid.steps"] = std::to_string(cfg.steps);
        echo["degeneracy_tol"] = format_double(cfg.degeneracy_tol);
    }
    if (cfg.experiment == "leading" || cfg.experiment == "berry" ||
        cfg.experiment == "ip-check") {
        echo["lambda"] = format_double(cfg.lambda.value());
        echo["level"] = std::to_string(cfg.level);
    }
    if (cfg.experiment == "leading" || cfg.experiment == "sweep" ||
        cfg.experiment == "ip-check")
        echo["oracle_tol"] = format_double(cfg.oracle_tol);
    if (cfg.experiment == "sweep" || cfg.experiment == "oscillatory-probe") {
        std::string joined;
        for (std::size_t i = 0; i < cfg.lambdas.size(); ++i) {
            if (i) joined += " ";
            joined += format_double(cfg.lambdas[i]);
        }
        echo["lambdas"] = joined;
    }
    if (cfg.experiment == "oscillatory-probe") {
        echo["probe.gap"] = cfg.probe_gap;
        echo["probe.envelope_sigma"] = format_double(cfg.envelope_sigma);
        echo["probe.envelope_center"] = format_double(cfg.envelope_center);
        echo["probe.window"] =
            format_double(cfg.window_a) + " " + format_double(cfg.window_b);
    }
    if (cfg.experiment == "ip-check") {
        echo["h0.sx"] = format_double(cfg.h0_sx);
        echo["h0.sy"] = format_double(cfg.h0_sy);
        echo["h0.sz"] = format_double(cfg.h0_sz);
        echo["h0.id"] = format_double(cfg.h0_id);
    }
    if (cfg.experiment == "wk-scan" || cfg.experiment == "wk-beta") {
        echo["grid_model.L"] = format_double(cfg.grid_length);
        echo["grid_model.m"] = format_double(cfg.grid_mass);
        echo["grid_model.nx"] = std::to_string(cfg.grid_nx);
        echo["grid_model.potential.kind"] = cfg.potential_kind;
        if (cfg.potential_kind == "sin" || cfg.potential_kind == "cos") {
            echo["grid_model.potential.amplitude"] =
                format_double(cfg.potential_amplitude);
            echo["grid_model.potential.mode"] = std::to_string(cfg.potential_mode);
        }
        if (cfg.potential_kind == "const")
            echo["grid_model.potential.value"] = format_double(cfg.potential_value);
    }
    if (cfg.experiment == "wk-scan") {
        std::string joined;
        for (std::size_t i = 0; i < cfg.times.size(); ++i) {
            if (i) joined += " ";
            joined += format_double(cfg.times[i]);
        }
        echo["times"] = joined;
    }
    if (cfg.experiment == "wk-beta") {
        std::string joined;
        for (std::size_t i = 0; i < cfg.betas.size(); ++i) {
            if (i) joined += " ";
            joined += format_double(cfg.betas[i]);
        }
        echo["betas"] = joined;
    }
    return echo;
}

GridModel grid_model_from(const RunConfig& cfg) {
    const double amp = cfg.potential_amplitude;
    const double value = cfg.potential_value;
    const double length = cfg.grid_length;
    const int mode = cfg.potential_mode;
    std::function<double(double)> v;
    if (cfg.potential_kind == "zero")
        v = [](double) { return 0.0; };
    else if (cfg.potential_kind == "const")
        v = [value](double) { return value; };
    else if (cfg.potential_kind == "sin")
        v = [amp, mode, length](double x) {
            return amp * std::sin(2.0 * kPi * mode * x / length);
        };
    else
        v = [amp, mode, length](double x) {
            return amp * std::cos(2.0 * kPi * mode * x / length);
        };
    return grid_model(cfg.grid_length, cfg.grid_mass, v, cfg.grid_nx);
}

Matrix h0_from(const RunConfig& cfg) {
    return cfg.h0_sx * pauli_x() + cfg.h0_sy * pauli_y() + cfg.h0_sz * pauli_z() +
           cfg.h0_id * identity2();
}

Vector basis_amplitudes(int dim, int level) {
    Vector c = Vector::Zero(dim);
    c(level) = 1.0;
    return c;
}

// Gauge invariance of the closed-loop phase under injected random frame
// phases; returns the max deviation across levels.
double gauge_invariance_delta(const FrameSequence& frames, std::uint64_t seed) {
    const RealVector reference = closed_loop_geometric_phase(frames.frames);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 2.0 * kPi);

    std::vector<SpectralFrame> jittered = frames.frames;
    for (auto& frame : jittered)
        for (int n = 0; n < frame.dim(); ++n)
            frame.basis.col(n) *= std::polar(1.0, dist(rng));
    const RealVector perturbed = closed_loop_geometric_phase(jittered);

    double worst = 0.0;
    for (int n = 0; n < reference.size(); ++n) {
        const double delta =
            std::abs(std::remainder(perturbed(n) - reference(n), 2.0 * kPi));
        worst = std::max(worst, delta);
    }
    return worst;
}

void run_leading(const RunConfig& cfg, SeriesWriter& series,
                 std::map<std::string, double>& scalars) {
    const HamiltonianSchedule schedule = make_schedule(cfg.model_kind, cfg.model_params);
    const TimeGrid grid{cfg.t0, cfg.t1, cfg.steps};
    const double lambda = cfg.lambda.value();
    const Vector c0 = basis_amplitudes(schedule.dim, cfg.level);
    EngineOptions options;
    options.degeneracy_tol = cfg.degeneracy_tol;

    const AdiabaticTrajectory traj =
        propagate_leading(schedule, lambda, c0, grid, options);

    const int dim = schedule.dim;
    std::vector<std::string> cols = {"t"};
    for (int n = 0; n < dim; ++n) cols.push_back("energy_" + std::to_string(n));
    for (int n = 0; n < dim; ++n) cols.push_back("gamma_" + std::to_string(n));
    for (int n = 0; n < dim; ++n) cols.push_back("theta_" + std::to_string(n));
    for (int n = 0; n < dim; ++n) cols.push_back("population_" + std::to_string(n));
    cols.push_back("norm");
    series.header(cols);

    for (int k = 0; k < traj.frames.nodes(); ++k) {
        std::vector<double> row = {traj.ledger.times[static_cast<std::size_t>(k)]};
        const auto& frame = traj.frames.frames[static_cast<std::size_t>(k)];
        for (int n = 0; n < dim; ++n) row.push_back(frame.energies(n));
        for (int n = 0; n < dim; ++n) row.push_back(traj.ledger.geometric(k, n));
        for (int n = 0; n < dim; ++n) row.push_back(traj.ledger.dynamical(k, n));
        for (int n = 0; n < dim; ++n)
            row.push_back(std::norm(traj.amplitudes(k, n)));
        row.push_back(traj.assembled[static_cast<std::size_t>(k)].norm());
        series.row(row);
    }

    DenseOptions dense;
    dense.tol = cfg.oracle_tol;
    const DenseResult oracle = propagate_dense(schedule, lambda,
                                               traj.assembled.front(), cfg.t0,
                                               cfg.t1, dense);
    scalars["fidelity_vs_oracle"] =
        fidelity(traj.final_state(), oracle.final_state());
    scalars["final_norm"] = traj.final_state().norm();
    scalars["oracle_norm_drift"] = oracle.max_norm_drift;
    for (int n = 0; n < dim; ++n)
        scalars["final_population_" + std::to_string(n)] =
            std::norm(traj.amplitudes(traj.frames.nodes() - 1, n));
}

void run_sweep(const RunConfig& cfg, SeriesWriter& series,
               std::map<std::string, double>& scalars) {
    const HamiltonianSchedule schedule = make_schedule(cfg.model_kind, cfg.model_params);
    const TimeGrid grid{cfg.t0, cfg.t1, cfg.steps};
    SweepOptions options;
    options.level = cfg.level;
    options.oracle_tol = cfg.oracle_tol;
    options.degeneracy_tol = cfg.degeneracy_tol;

    const SweepResult result = lambda_sweep_fit(schedule, cfg.lambdas, grid, options);

    series.header({"lambda", "error"});
    for (std::size_t i = 0; i < result.lambdas.size(); ++i)
        series.row({result.lambdas[i], result.errors[i]});

    scalars["slope"] = result.slope;
    scalars["slope_stderr"] = result.slope_stderr;
    scalars["intercept"] = result.intercept;
}

void run_probe(const RunConfig& cfg, SeriesWriter& series,
               std::map<std::string, double>& scalars) {
    ProbeOptions options;
    options.window_a = cfg.window_a;
    options.window_b = cfg.window_b;

    std::function<double(double)> gap;
    if (cfg.probe_gap == "constant")
        gap = [](double) { return 1.0; };
    else
        gap = [](double t) { return t; };
    const double sigma = cfg.envelope_sigma;
    const double center = cfg.envelope_center;
    auto envelope = [sigma, center](double t) {
        const double u = (t - center) / sigma;
        return std::exp(-0.5 * u * u);
    };

    const SweepResult result =
        oscillatory_decay_probe(gap, envelope, cfg.lambdas, options);

    series.header({"lambda", "integral_abs"});
    for (std::size_t i = 0; i < result.lambdas.size(); ++i)
        series.row({result.lambdas[i], result.errors[i]});

    scalars["slope"] = result.slope;
    scalars["slope_stderr"] = result.slope_stderr;
    scalars["intercept"] = result.intercept;
}

void run_berry(const RunConfig& cfg, SeriesWriter& series,
               std::map<std::string, double>& scalars) {
    const HamiltonianSchedule schedule = make_schedule(cfg.model_kind, cfg.model_params);
    const TimeGrid grid{cfg.t0, cfg.t1, cfg.steps};
    EngineOptions options;
    options.degeneracy_tol = cfg.degeneracy_tol;

    const BerryCycleResult result =
        berry_cycle_phase(schedule, cfg.lambda.value(), grid, cfg.level, options);

    const int dim = schedule.dim;
    std::vector<std::string> cols = {"t"};
    for (int n = 0; n < dim; ++n) cols.push_back("energy_" + std::to_string(n));
    for (int n = 0; n < dim; ++n) cols.push_back("gamma_" + std::to_string(n));
    cols.push_back("norm");
    series.header(cols);
    const auto& traj = result.trajectory;
    for (int k = 0; k < traj.frames.nodes(); ++k) {
        std::vector<double> row = {traj.ledger.times[static_cast<std::size_t>(k)]};
        const auto& frame = traj.frames.frames[static_cast<std::size_t>(k)];
        for (int n = 0; n < dim; ++n) row.push_back(frame.energies(n));
        for (int n = 0; n < dim; ++n) row.push_back(traj.ledger.geometric(k, n));
        row.push_back(traj.assembled[static_cast<std::size_t>(k)].norm());
        series.row(row);
    }

    for (int n = 0; n < dim; ++n)
        scalars["geometric_phase_level" + std::to_string(n)] = result.loop_phase(n);
    scalars["final_overlap_re"] = result.final_overlap.real();
    scalars["final_overlap_im"] = result.final_overlap.imag();
    scalars["gauge_invariance_delta"] =
        gauge_invariance_delta(traj.frames, cfg.seed);
}

void run_ip_check(const RunConfig& cfg, SeriesWriter& series,
                  std::map<std::string, double>& scalars) {
    SplitHamiltonian split;
    split.h0 = h0_from(cfg);
    split.v = make_schedule(cfg.model_kind, cfg.model_params);
    split.lambda = cfg.lambda.value();

    const TimeGrid grid{cfg.t0, cfg.t1, cfg.steps};
    EngineOptions options;
    options.degeneracy_tol = cfg.degeneracy_tol;

    const Vector c0 = basis_amplitudes(split.v.dim, cfg.level);
    const IpSolution sol = assemble_ip_solution(split, c0, grid, options);

    const int dim = split.v.dim;
    std::vector<std::string> cols = {"t"};
    for (int n = 0; n < dim; ++n) cols.push_back("v_" + std::to_string(n));
    for (int n = 0; n < dim; ++n) cols.push_back("alpha_" + std::to_string(n));
    for (int n = 0; n < dim; ++n)
        cols.push_back("gamma_ip_gap_" + std::to_string(n));
    series.header(cols);
    for (int k = 0; k < sol.vframes.nodes(); ++k) {
        std::vector<double> row = {
            sol.vframes.frames[static_cast<std::size_t>(k)].t};
        for (int n = 0; n < dim; ++n) row.push_back(sol.ledger.vn(k, n));
        for (int n = 0; n < dim; ++n) row.push_back(sol.ledger.alpha(k, n));
        for (int n = 0; n < dim; ++n)
            row.push_back(sol.ledger.gamma_ip(k, n) - sol.ledger.gamma(k, n));
        series.row(row);
    }

    const DressedFrameReport dressed =
        dressed_frame_check(split, 0.5 * (cfg.t0 + cfg.t1), cfg.degeneracy_tol);
    scalars["dressed_spectrum_mismatch"] = dressed.max_spectrum_mismatch;
    scalars["dressed_min_overlap"] = dressed.overlap_magnitudes.minCoeff();

    scalars["alpha_rate_mismatch"] = alpha_rate_mismatch(split, grid, options);
    scalars["gamma_ip_max_gap"] =
        (sol.ledger.gamma_ip - sol.ledger.gamma).cwiseAbs().maxCoeff();

    const NeglectReport neglect = neglect_ratio(split, grid, options);
    scalars["neglect_max_ratio"] = neglect.max_ratio;
    scalars["neglect_infinite"] = neglect.has_infinite ? 1.0 : 0.0;

    DenseOptions dense;
    dense.tol = cfg.oracle_tol;
    const DenseResult oracle =
        propagate_dense(combined_schedule(split), 1.0, sol.states.front(), cfg.t0,
                        cfg.t1, dense);
    scalars["fidelity_vs_oracle"] = fidelity(sol.final_state(), oracle.final_state());
}

void run_wk_scan(const RunConfig& cfg, SeriesWriter& series,
                 std::map<std::string, double>& scalars) {
    const GridModel model = grid_model_from(cfg);
    const SmallTimeScan scan = small_time_scan(model, cfg.times);

    series.header({"t", "error"});
    for (std::size_t i = 0; i < scan.sweep.lambdas.size(); ++i)
        series.row({scan.sweep.lambdas[i], scan.sweep.errors[i]});

    scalars["exponent"] = scan.sweep.slope;
    scalars["exponent_stderr"] = scan.sweep.slope_stderr;
    scalars["error_t1"] = scan.error_large_t;
    scalars["error_t001"] = scan.error_small_t;
    scalars["breakdown_ratio"] = scan.breakdown_ratio;
}

void run_wk_beta(const RunConfig& cfg, SeriesWriter& series,
                 std::map<std::string, double>& scalars) {
    const GridModel model = grid_model_from(cfg);

    std::vector<double> residuals;
    for (double beta : cfg.betas)
        residuals.push_back(wk_beta_check(model, beta).max_abs_residual);

    series.header({"beta", "residual_max"});
    for (std::size_t i = 0; i < cfg.betas.size(); ++i)
        series.row({cfg.betas[i], residuals[i]});

    const LogLogFit fit = loglog_fit(cfg.betas, residuals);
    scalars["residual_exponent"] = fit.slope;
    scalars["residual_exponent_stderr"] = fit.slope_stderr;

    // Least-squares coefficient of residual = C·β⁴ through the origin.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < cfg.betas.size(); ++i) {
        const double b4 = std::pow(cfg.betas[i], 4);
        num += residuals[i] * b4;
        den += b4 * b4;
    }
    scalars["beta4_coefficient"] = den > 0.0 ? num / den : 0.0;
}

} // namespace

RunOutput execute(const RunConfig& cfg) {
    const std::vector<Finding> findings = validate(cfg);
    if (has_errors(findings)) {
        std::ostringstream msg;
        msg << "config invalid:";
        for (const auto& f : findings)
            if (f.severity == Finding::Severity::Error) msg << "\n  " << f.message;
        throw ValidationError(msg.str());
    }

    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);

    const std::string stem = cfg.experiment;
    RunOutput out;
    out.series_path = dir / (stem + "_series.csv");
    out.summary_path = dir / (stem + "_summary.txt");

    {
        SeriesWriter series(out.series_path);
        if (cfg.experiment == "leading")
            run_leading(cfg, series, out.scalars);
        else if (cfg.experiment == "sweep")
            run_sweep(cfg, series, out.scalars);
        else if (cfg.experiment == "oscillatory-probe")
            run_probe(cfg, series, out.scalars);
        else if (cfg.experiment == "berry")
            run_berry(cfg, series, out.scalars);
        else if (cfg.experiment == "ip-check")
            run_ip_check(cfg, series, out.scalars);
        else if (cfg.experiment == "wk-scan")
            run_wk_scan(cfg, series, out.scalars);
        else
            run_wk_beta(cfg, series, out.scalars);
    }

    // Summary last: its presence marks a completed run.
    std::ofstream summary(out.summary_path);
    if (!summary)
        throw std::runtime_error("cannot open " + out.summary_path.string());
    summary << "# adlab run summary\n";
    summary << "version = " << kVersionString << "\n";
    summary << "experiment = " << cfg.experiment << "\n\n";
    summary << "[config]\n";
    for (const auto& [key, value] : echo_config(cfg))
        summary << key << " = " << value << "\n";
    summary << "\n[results]\n";
    for (const auto& [key, value] : out.scalars)
        summary << key << " = " << format_double(value) << "\n";
    return out;
}

} // namespace adlab

#include <adlab/config.hpp>

#include <adlab/models.hpp>
#include <adlab/spectral.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace adlab {

using nlohmann::json;

namespace {

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), curr(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        curr[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, sub});
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

[[noreturn]] void reject_key(const std::string& where, const std::string& key,
                             const std::vector<std::string>& accepted) {
    std::string best;
    std::size_t best_dist = std::string::npos;
    for (const auto& cand : accepted) {
        const std::size_t d = edit_distance(key, cand);
        if (d < best_dist) {
            best_dist = d;
            best = cand;
        }
    }
    std::ostringstream msg;
    msg << where << ": unknown key '" << key << "'";
    if (!best.empty() && best_dist <= std::max<std::size_t>(2, key.size() / 2))
        msg << "; did you mean '" << best << "'?";
    else {
        msg << "; accepted keys:";
        for (const auto& cand : accepted) msg << " " << cand;
    }
    throw ValidationError(msg.str());
}

void check_keys(const json& obj, const std::string& where,
                const std::vector<std::string>& accepted) {
    for (const auto& item : obj.items()) {
        if (std::find(accepted.begin(), accepted.end(), item.key()) == accepted.end())
            reject_key(where, item.key(), accepted);
    }
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number())
        throw ValidationError(where + ": expected a number");
    return v.get<double>();
}

std::vector<double> as_number_list(const json& v, const std::string& where) {
    if (!v.is_array())
        throw ValidationError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& item : v) out.push_back(as_number(item, where));
    return out;
}

} // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "leading", "sweep", "oscillatory-probe", "berry",
        "ip-check", "wk-scan", "wk-beta"};
    return names;
}

RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!root.is_object())
        throw ValidationError("config: top level must be an object");

    check_keys(root, "config",
               {"experiment", "model", "lambda", "lambdas", "grid", "level",
                "oracle_tol", "degeneracy_tol", "probe", "h0", "grid_model",
                "times", "betas", "output", "seed"});

    RunConfig cfg;
    if (root.contains("experiment")) {
        if (!root["experiment"].is_string())
            throw ValidationError("config: 'experiment' must be a string");
        cfg.experiment = root["experiment"].get<std::string>();
    }

    if (root.contains("model")) {
        const json& model = root["model"];
        check_keys(model, "config.model", {"kind", "params"});
        if (!model.contains("kind") || !model["kind"].is_string())
            throw ValidationError("config.model: 'kind' (string) is required");
        cfg.model_kind = model["kind"].get<std::string>();
        if (model.contains("params")) {
            if (!model["params"].is_object())
                throw ValidationError("config.model: 'params' must be an object");
            for (const auto& item : model["params"].items())
                cfg.model_params[item.key()] =
                    as_number(item.value(), "config.model.params." + item.key());
        }
    }

    if (root.contains("lambda"))
        cfg.lambda = as_number(root["lambda"], "config.lambda");
    if (root.contains("lambdas"))
        cfg.lambdas = as_number_list(root["lambdas"], "config.lambdas");

    if (root.contains("grid")) {
        const json& grid = root["grid"];
        check_keys(grid, "config.grid", {"t0", "t1", "steps"});
        if (grid.contains("t0")) cfg.t0 = as_number(grid["t0"], "config.grid.t0");
        if (grid.contains("t1")) cfg.t1 = as_number(grid["t1"], "config.grid.t1");
        if (grid.contains("steps"))
            cfg.steps = static_cast<int>(as_number(grid["steps"], "config.grid.steps"));
    }

    if (root.contains("level"))
        cfg.level = static_cast<int>(as_number(root["level"], "config.level"));
    if (root.contains("oracle_tol"))
        cfg.oracle_tol = as_number(root["oracle_tol"], "config.oracle_tol");
    if (root.contains("degeneracy_tol"))
        cfg.degeneracy_tol = as_number(root["degeneracy_tol"], "config.degeneracy_tol");

    if (root.contains("probe")) {
        const json& probe = root["probe"];
        check_keys(probe, "config.probe",
                   {"gap", "envelope_sigma", "envelope_center", "window"});
        if (probe.contains("gap")) {
            if (!probe["gap"].is_string())
                throw ValidationError("config.probe: 'gap' must be a string");
            cfg.probe_gap = probe["gap"].get<std::string>();
        }
        if (probe.contains("envelope_sigma"))
            cfg.envelope_sigma =
                as_number(probe["envelope_sigma"], "config.probe.envelope_sigma");
        if (probe.contains("envelope_center"))
            cfg.envelope_center =
                as_number(probe["envelope_center"], "config.probe.envelope_center");
        if (probe.contains("window")) {
            const auto w = as_number_list(probe["window"], "config.probe.window");
            if (w.size() != 2)
                throw ValidationError("config.probe.window: expected [a, b]");
            cfg.window_a = w[0];
            cfg.window_b = w[1];
        }
    }

    if (root.contains("h0")) {
        const json& h0 = root["h0"];
        check_keys(h0, "config.h0", {"sx", "sy", "sz", "id"});
        if (h0.contains("sx")) cfg.h0_sx = as_number(h0["sx"], "config.h0.sx");
        if (h0.contains("sy")) cfg.h0_sy = as_number(h0["sy"], "config.h0.sy");
        if (h0.contains("sz")) cfg.h0_sz = as_number(h0["sz"], "config.h0.sz");
        if (h0.contains("id")) cfg.h0_id = as_number(h0["id"], "config.h0.id");
    }

    if (root.contains("grid_model")) {
        const json& gm = root["grid_model"];
        check_keys(gm, "config.grid_model", {"L", "m", "nx", "potential"});
        if (gm.contains("L")) cfg.grid_length = as_number(gm["L"], "config.grid_model.L");
        if (gm.contains("m")) cfg.grid_mass = as_number(gm["m"], "config.grid_model.m");
        if (gm.contains("nx"))
            cfg.grid_nx = static_cast<int>(as_number(gm["nx"], "config.grid_model.nx"));
        if (gm.contains("potential")) {
            const json& pot = gm["potential"];
            check_keys(pot, "config.grid_model.potential",
                       {"kind", "amplitude", "mode", "value"});
            if (pot.contains("kind")) {
                if (!pot["kind"].is_string())
                    throw ValidationError(
                        "config.grid_model.potential: 'kind' must be a string");
                cfg.potential_kind = pot["kind"].get<std::string>();
            }
            if (pot.contains("amplitude"))
                cfg.potential_amplitude = as_number(
                    pot["amplitude"], "config.grid_model.potential.amplitude");
            if (pot.contains("mode"))
                cfg.potential_mode = static_cast<int>(
                    as_number(pot["mode"], "config.grid_model.potential.mode"));
            if (pot.contains("value"))
                cfg.potential_value =
                    as_number(pot["value"], "config.grid_model.potential.value");
        }
    }

    if (root.contains("times"))
        cfg.times = as_number_list(root["times"], "config.times");
    if (root.contains("betas"))
        cfg.betas = as_number_list(root["betas"], "config.betas");

    if (root.contains("output")) {
        if (!root["output"].is_string())
            throw ValidationError("config: 'output' must be a string");
        cfg.output_dir = root["output"].get<std::string>();
    }
    if (root.contains("seed"))
        cfg.seed = static_cast<std::uint64_t>(
            as_number(root["seed"], "config.seed"));

    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

namespace {

void append(std::vector<Finding>& findings, Finding::Severity sev,
            const std::string& message) {
    findings.push_back({sev, message});
}

bool needs_two_level_model(const std::string& exp) {
    return exp == "leading" || exp == "sweep" || exp == "berry" || exp == "ip-check";
}

bool needs_grid_model(const std::string& exp) {
    return exp == "wk-scan" || exp == "wk-beta";
}

// Largest instantaneous gap sampled over the grid, for the oscillation
// sampling rule.
double estimate_max_gap(const RunConfig& cfg) {
    try {
        const HamiltonianSchedule schedule =
            make_schedule(cfg.model_kind, cfg.model_params);
        double max_gap = 0.0;
        for (int i = 0; i <= 64; ++i) {
            const double t =
                cfg.t0 + (cfg.t1 - cfg.t0) * static_cast<double>(i) / 64.0;
            const SpectralFrame frame = eigen_frame(schedule.evaluate(t), t);
            max_gap = std::max(
                max_gap, frame.energies(frame.dim() - 1) - frame.energies(0));
        }
        return max_gap;
    } catch (const std::exception&) {
        return 0.0;
    }
}

} // namespace

std::vector<Finding> validate(const RunConfig& cfg) {
    std::vector<Finding> findings;
    const auto error = [&](const std::string& m) {
        append(findings, Finding::Severity::Error, m);
    };
    const auto warning = [&](const std::string& m) {
        append(findings, Finding::Severity::Warning, m);
    };

    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), cfg.experiment) == names.end()) {
        std::ostringstream msg;
        msg << "unknown experiment '" << cfg.experiment << "'; valid experiments:";
        for (const auto& n : names) msg << " " << n;
        error(msg.str());
        return findings;
    }

    if (cfg.steps < 16) error("grid.steps must be at least 16");
    if (!(cfg.t1 > cfg.t0)) error("grid: t1 must exceed t0");

    for (std::size_t i = 0; i + 1 < cfg.lambdas.size(); ++i)
        if (!(cfg.lambdas[i] < cfg.lambdas[i + 1])) {
            error("lambdas must be strictly increasing");
            break;
        }

    if (needs_two_level_model(cfg.experiment)) {
        if (!cfg.has_model()) {
            error(cfg.experiment + ": a model is required");
        } else {
            try {
                make_schedule(cfg.model_kind, cfg.model_params);
            } catch (const std::exception& e) {
                error(e.what());
            }
        }
    }

    if (cfg.experiment == "leading" || cfg.experiment == "berry" ||
        cfg.experiment == "ip-check") {
        if (!cfg.lambda)
            error(cfg.experiment + ": 'lambda' is required");
        else if (!(*cfg.lambda > 0.0))
            error("lambda must be positive");
    }
    if (cfg.experiment == "sweep" || cfg.experiment == "oscillatory-probe") {
        if (cfg.lambdas.size() < 4)
            error(cfg.experiment + ": at least 4 lambdas are required");
    }
    if (cfg.experiment == "berry" && cfg.has_model()) {
        try {
            const HamiltonianSchedule s = make_schedule(cfg.model_kind, cfg.model_params);
            if (!s.period)
                error("berry: model '" + cfg.model_kind + "' is not periodic");
            else if (std::abs((cfg.t1 - cfg.t0) - *s.period) > 1e-9 * *s.period)
                error("berry: grid must span exactly one model period");
        } catch (const std::exception&) {
            // already reported above
        }
    }
    if (cfg.experiment == "oscillatory-probe") {
        if (cfg.probe_gap != "constant" && cfg.probe_gap != "linear")
            error("probe.gap must be 'constant' or 'linear'");
        if (!(cfg.window_b > cfg.window_a)) error("probe.window must be nonempty");
        if (!(cfg.envelope_sigma > 0.0)) error("probe.envelope_sigma must be positive");
    }

    if (needs_grid_model(cfg.experiment)) {
        if (cfg.grid_nx < 16 || (cfg.grid_nx & (cfg.grid_nx - 1)) != 0)
            error("grid_model.nx must be a power of two >= 16");
        if (!(cfg.grid_length > 0.0)) error("grid_model.L must be positive");
        if (!(cfg.grid_mass > 0.0)) error("grid_model.m must be positive");
        if (cfg.potential_kind != "zero" && cfg.potential_kind != "const" &&
            cfg.potential_kind != "sin" && cfg.potential_kind != "cos")
            error("potential.kind must be one of: zero const sin cos");
    }
    if (cfg.experiment == "wk-beta" && cfg.grid_nx > 256)
        error("wk-beta: nx must not exceed 256 (dense operator oracle)");
    if (cfg.experiment == "wk-scan") {
        if (cfg.times.size() < 4)
            error("wk-scan: at least 4 times are required");
        for (std::size_t i = 0; i + 1 < cfg.times.size(); ++i)
            if (!(cfg.times[i] > cfg.times[i + 1])) {
                error("wk-scan: times must be strictly decreasing");
                break;
            }
        if (!cfg.times.empty() && !(cfg.times.back() > 0.0))
            error("wk-scan: times must be positive");
    }
    if (cfg.experiment == "wk-beta") {
        if (cfg.betas.size() < 2)
            error("wk-beta: at least 2 betas are required");
        for (double b : cfg.betas)
            if (!(b > 0.0) || b > 0.1) {
                error("wk-beta: betas must lie in (0, 0.1]");
                break;
            }
    }

    // Oscillation sampling rule: the propagation grid should resolve the
    // fastest dynamical phase with ~20 nodes per period.
    if (needs_two_level_model(cfg.experiment) && cfg.has_model() &&
        cfg.experiment != "oscillatory-probe") {
        double lambda_max = 0.0;
        if (cfg.lambda) lambda_max = *cfg.lambda;
        for (double l : cfg.lambdas) lambda_max = std::max(lambda_max, l);
        if (lambda_max > 0.0 && cfg.t1 > cfg.t0) {
            const double max_gap = estimate_max_gap(cfg);
            const double needed =
                20.0 * lambda_max * max_gap * (cfg.t1 - cfg.t0) / (2.0 * kPi);
            if (max_gap > 0.0 && static_cast<double>(cfg.steps) < needed) {
                std::ostringstream msg;
                msg << "oscillation undersampled: lambda = " << lambda_max
                    << " with max gap " << max_gap << " needs about "
                    << static_cast<long long>(std::ceil(needed))
                    << " steps over this grid, configured " << cfg.steps;
                warning(msg.str());
            }
        }
    }

    return findings;
}

} // namespace adlab

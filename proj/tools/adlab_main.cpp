// adlab — batch front door for the propagation experiments
//
// Each subcommand mirrors an experiment name, takes a JSON config, and
// writes a series CSV plus a plain-text summary into the output directory.
// Exit codes: 0 success, 2 validation failure, 3 numerical failure.

#include <adlab/config.hpp>
#include <adlab/runner.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct CommonArgs {
    std::string config_path;
    std::string output_dir;
    long long seed = -1;
    bool validate_only = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "path to a JSON run config")
        ->required();
    cmd->add_option("--output", args.output_dir, "output directory override");
    cmd->add_option("--seed", args.seed, "seed override for randomized checks");
    cmd->add_flag("--validate-only", args.validate_only,
                  "check the config and exit without running");
}

int run_experiment(const std::string& experiment, const CommonArgs& args) {
    adlab::RunConfig cfg;
    try {
        cfg = adlab::parse_config_file(args.config_path);
    } catch (const adlab::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    if (cfg.experiment.empty()) {
        cfg.experiment = experiment;
    } else if (cfg.experiment != experiment) {
        std::cerr << "error: config declares experiment '" << cfg.experiment
                  << "' but subcommand is '" << experiment << "'\n";
        return kExitValidation;
    }
    if (!args.output_dir.empty()) cfg.output_dir = args.output_dir;
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);

    const std::vector<adlab::Finding> findings = adlab::validate(cfg);
    for (const auto& f : findings) {
        const char* tag =
            f.severity == adlab::Finding::Severity::Error ? "error" : "warning";
        std::cerr << tag << ": " << f.message << "\n";
    }
    if (adlab::has_errors(findings)) return kExitValidation;
    if (args.validate_only) {
        std::cout << "config ok (" << findings.size() << " findings)\n";
        return 0;
    }

    try {
        const adlab::RunOutput out = adlab::execute(cfg);
        std::cout << "wrote " << out.series_path.string() << "\n";
        std::cout << "wrote " << out.summary_path.string() << "\n";
        for (const auto& [key, value] : out.scalars) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.17g", value);
            std::cout << key << " = " << buf << "\n";
        }
        return 0;
    } catch (const adlab::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adlab: strong-perturbation propagation experiments"};
    app.require_subcommand(1);

    std::vector<std::pair<std::string, CommonArgs>> commands;
    commands.reserve(adlab::experiment_names().size());
    for (const std::string& name : adlab::experiment_names()) {
        commands.emplace_back(name, CommonArgs{});
        CLI::App* cmd = app.add_subcommand(name, "run the '" + name + "' experiment");
        add_common(cmd, commands.back().second);
    }

    CLI11_PARSE(app, argc, argv);

    for (const auto& [name, args] : commands)
        if (app.get_subcommand(name)->parsed()) return run_experiment(name, args);
    return 1;
}

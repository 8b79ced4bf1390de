// config.hpp — declarative run configurations for the batch front door

#pragma once

#include <adlab/types.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adlab {

const std::vector<std::string>& experiment_names();

struct RunConfig {
    std::string experiment;

    // two-level experiments
    std::string model_kind;
    std::map<std::string, double> model_params;
    std::optional<double> lambda;
    std::vector<double> lambdas;
    double t0 = 0.0, t1 = 1.0;
    int steps = 1000;
    int level = 0;
    double oracle_tol = 1e-9;
    double degeneracy_tol = 1e-9;

    // oscillatory probe
    std::string probe_gap = "linear";  // constant | linear
    double envelope_sigma = 0.25;
    double envelope_center = 0.0;
    double window_a = -1.0;
    double window_b = 1.0;

    // interaction picture: H0 = sx σx + sy σy + sz σz + id 1
    double h0_sx = 0.0, h0_sy = 0.0, h0_sz = 0.0, h0_id = 0.0;

    // grid models
    double grid_length = 1.0;
    double grid_mass = 1.0;
    int grid_nx = 128;
    std::string potential_kind = "sin";  // zero | const | sin | cos
    double potential_amplitude = 1.0;
    int potential_mode = 1;
    double potential_value = 0.0;
    std::vector<double> times;
    std::vector<double> betas;

    std::string output_dir = "runs/out";
    std::uint64_t seed = 0;

    bool has_model() const { return !model_kind.empty(); }
};

// Parses a JSON config file. Unknown keys are rejected with a suggestion for
// the closest accepted key.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

struct Finding {
    enum class Severity { Error, Warning };
    Severity severity;
    std::string message;
};

// Pure check, no side effects. Errors block execution; warnings do not.
std::vector<Finding> validate(const RunConfig& config);

inline bool has_errors(const std::vector<Finding>& findings) {
    for (const auto& f : findings)
        if (f.severity == Finding::Severity::Error) return true;
    return false;
}

} // namespace adlab

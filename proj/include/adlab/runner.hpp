// runner.hpp — experiment execution and deterministic artifacts

#pragma once

#include <adlab/config.hpp>

#include <filesystem>
#include <map>

namespace adlab {

inline constexpr const char* kVersionString = "adlab 0.1.0";

struct RunOutput {
    std::filesystem::path summary_path;
    std::filesystem::path series_path;
    std::map<std::string, double> scalars;  // results echoed into the summary
};

// Validates, runs the experiment, writes the series file then the summary
// (the summary acts as the commit marker). Identical (config, seed) produce
// byte-identical files.
RunOutput execute(const RunConfig& config);

} // namespace adlab

// fit.hpp — least-squares power-law fitting on log-log axes

#pragma once

#include <adlab/types.hpp>

#include <span>
#include <vector>

namespace adlab {

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;     // log-space intercept
    double slope_stderr = 0.0;  // OLS standard error of the slope
};

// Ordinary least squares of log(y) on log(x). Requires all x, y > 0.
LogLogFit loglog_fit(std::span<const double> x, std::span<const double> y);

// Result of a decay-exponent sweep: per-abscissa error metric plus the
// fitted log-log slope and its uncertainty.
struct SweepResult {
    std::vector<double> lambdas;
    std::vector<double> errors;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;

    // lambdas strictly increasing, errors positive
    void validate() const;
};

} // namespace adlab

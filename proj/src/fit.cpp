#include <adlab/fit.hpp>

#include <cmath>

namespace adlab {

LogLogFit loglog_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ValidationError("loglog_fit: size mismatch");
    const std::size_t n = x.size();
    if (n < 2)
        throw ValidationError("loglog_fit: need at least 2 samples");

    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw ValidationError("loglog_fit: samples must be positive");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0)
        throw ValidationError("loglog_fit: abscissae are all equal");

    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    if (n > 2) {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
            ss_res += r * r;
        }
        fit.slope_stderr = std::sqrt(ss_res / static_cast<double>(n - 2) / sxx);
    }
    return fit;
}

void SweepResult::validate() const {
    if (lambdas.size() != errors.size())
        throw ValidationError("SweepResult: size mismatch");
    for (std::size_t i = 0; i + 1 < lambdas.size(); ++i)
        if (!(lambdas[i] < lambdas[i + 1]))
            throw ValidationError("SweepResult: lambdas must be strictly increasing");
    for (double e : errors)
        if (!(e > 0.0))
            throw ValidationError("SweepResult: errors must be positive");
}

} // namespace adlab

// fft.hpp — thin RAII wrapper over FFTW complex transforms

#pragma once

#include <adlab/types.hpp>

namespace adlab {

// Fixed-size 1D complex transform. Forward is unnormalized, inverse carries
// the 1/n factor. Plans are created with FFTW_ESTIMATE, so planning is
// deterministic; execution on distinct arrays is thread-safe.
class Fft {
public:
    explicit Fft(int n);
    ~Fft();

    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    int size() const { return n_; }

    void forward(Complex* data) const;
    void inverse(Complex* data) const;

    void forward(Vector& data) const { forward(data.data()); }
    void inverse(Vector& data) const { inverse(data.data()); }

private:
    int n_;
    void* plan_fwd_;
    void* plan_inv_;
};

// d^order/dx^order of periodic samples over a segment of length L, computed
// in Fourier modes. Exact for band-limited inputs.
RealVector spectral_derivative(const RealVector& samples, double length, int order);

// Fraction of spectral energy in the top third of the mode band; the
// smoothness heuristic for sampled potentials.
double high_mode_energy_fraction(const RealVector& samples);

} // namespace adlab

#include <adlab/oracle.hpp>

#include <adlab/fft.hpp>
#include <adlab/hermitian.hpp>

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace adlab {

// ---------------------------------------------------------------- FFT wrapper

namespace {
// FFTW plan creation is not thread-safe; execution is.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}
} // namespace

Fft::Fft(int n) : n_(n) {
    if (n < 1) throw ValidationError("Fft: size must be positive");
    std::vector<Complex> scratch(static_cast<std::size_t>(n));
    auto* raw = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan_fwd_ = fftw_plan_dft_1d(n, raw, raw, FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_inv_ = fftw_plan_dft_1d(n, raw, raw, FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_fwd_ || !plan_inv_)
        throw std::runtime_error("Fft: plan creation failed");
}

Fft::~Fft() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
}

void Fft::forward(Complex* data) const {
    auto* raw = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), raw, raw);
}

void Fft::inverse(Complex* data) const {
    auto* raw = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_inv_), raw, raw);
    const double scale = 1.0 / static_cast<double>(n_);
    for (int i = 0; i < n_; ++i) data[i] *= scale;
}

RealVector spectral_derivative(const RealVector& samples, double length, int order) {
    const int n = static_cast<int>(samples.size());
    if (n < 2) throw ValidationError("spectral_derivative: too few samples");
    if (!(length > 0.0)) throw ValidationError("spectral_derivative: bad length");

    Fft fft(n);
    Vector work(n);
    for (int i = 0; i < n; ++i) work(i) = Complex(samples(i), 0.0);
    fft.forward(work);
    for (int j = 0; j < n; ++j) {
        const int mode = (j <= n / 2) ? j : j - n;
        // The unmatched Nyquist mode has no well-defined odd derivative.
        const bool nyquist = (n % 2 == 0) && (j == n / 2);
        const double kj = 2.0 * kPi * static_cast<double>(mode) / length;
        Complex factor = std::pow(Complex(0.0, kj), order);
        if (nyquist && (order % 2 == 1)) factor = 0.0;
        work(j) *= factor;
    }
    fft.inverse(work);
    RealVector out(n);
    for (int i = 0; i < n; ++i) out(i) = work(i).real();
    return out;
}

double high_mode_energy_fraction(const RealVector& samples) {
    const int n = static_cast<int>(samples.size());
    Fft fft(n);
    Vector work(n);
    const double mean = samples.mean();
    for (int i = 0; i < n; ++i) work(i) = Complex(samples(i) - mean, 0.0);
    fft.forward(work);
    double total = 0.0, high = 0.0;
    for (int j = 1; j < n; ++j) {
        const int mode = std::abs((j <= n / 2) ? j : j - n);
        const double e = std::norm(work(j));
        total += e;
        if (mode > n / 3) high += e;
    }
    return total > 0.0 ? high / total : 0.0;
}

// ------------------------------------------------------------ dense integrator

namespace {

class DenseRhs {
public:
    DenseRhs(const HamiltonianSchedule& schedule, double lambda)
        : schedule_(schedule), lambda_(lambda), h_(schedule.dim, schedule.dim) {}

    void operator()(double t, const Vector& y, Vector& dy) {
        schedule_.evaluate_into(t, h_);
        dy.noalias() = h_ * y;
        dy *= Complex(0.0, -lambda_);
    }

private:
    const HamiltonianSchedule& schedule_;
    double lambda_;
    Matrix h_;
};

struct Rk4Work {
    Vector k1, k2, k3, k4, tmp;

    explicit Rk4Work(int n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
};

void rk4_step(DenseRhs& rhs, double t, double h, const Vector& y, Vector& out,
              Rk4Work& w) {
    rhs(t, y, w.k1);
    w.tmp = y + (0.5 * h) * w.k1;
    rhs(t + 0.5 * h, w.tmp, w.k2);
    w.tmp = y + (0.5 * h) * w.k2;
    rhs(t + 0.5 * h, w.tmp, w.k3);
    w.tmp = y + h * w.k3;
    rhs(t + h, w.tmp, w.k4);
    out = y + (h / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);
}

} // namespace

DenseResult propagate_dense(const HamiltonianSchedule& schedule, double lambda,
                            const Vector& psi0, double t0, double t1,
                            const DenseOptions& options,
                            const std::vector<double>& sample_times) {
    if (options.tol < 1e-12 || options.tol > 1e-6)
        throw ValidationError("propagate_dense: tol must lie in [1e-12, 1e-6]");
    if (!(t1 > t0))
        throw ValidationError("propagate_dense: t1 must exceed t0");
    if (psi0.size() != schedule.dim)
        throw ValidationError("propagate_dense: state dimension mismatch");

    std::vector<double> marks = sample_times;
    for (double s : marks)
        if (s <= t0 || s > t1)
            throw ValidationError("propagate_dense: sample time outside (t0, t1]");
    marks.push_back(t1);
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());

    const double horizon = t1 - t0;
    const double norm0 = psi0.norm();

    DenseRhs rhs(schedule, lambda);
    Rk4Work work(static_cast<int>(psi0.size()));
    Vector y = psi0, y_full(psi0.size()), y_half(psi0.size()), y_two(psi0.size());

    DenseResult result;
    result.times.reserve(marks.size());
    result.states.reserve(marks.size());

    double t = t0;
    double h_cruise = horizon / 256.0;
    std::size_t accepted = 0;

    for (double mark : marks) {
        while (t < mark) {
            const bool clamped = h_cruise > mark - t;
            const double h = clamped ? mark - t : h_cruise;

            // One full step vs two half steps; the Richardson gap of a
            // fourth-order scheme is 15x the extrapolated error.
            rk4_step(rhs, t, h, y, y_full, work);
            rk4_step(rhs, t, 0.5 * h, y, y_half, work);
            rk4_step(rhs, t + 0.5 * h, 0.5 * h, y_half, y_two, work);

            const double err = (y_two - y_full).norm() / 15.0;
            const double allowed = options.tol * (h / horizon);

            const double ratio = err > 0.0 ? allowed / err : 10.0;
            const double next = h * std::clamp(0.9 * std::pow(ratio, 0.2), 0.2, 5.0);

            if (err <= allowed || h <= horizon * 1e-14) {
                y = y_two + (y_two - y_full) / 15.0;
                t = clamped ? mark : t + h;
                ++accepted;
                if (accepted > options.max_steps)
                    throw BudgetError("propagate_dense: step budget exceeded");
                result.max_norm_drift =
                    std::max(result.max_norm_drift, std::abs(y.norm() - norm0));
                // A boundary-clamped step must not shrink the cruise step.
                h_cruise = clamped ? std::max(h_cruise, next) : next;
            } else {
                h_cruise = next;
            }
            h_cruise = std::min(h_cruise, horizon);
        }
        result.times.push_back(mark);
        result.states.push_back(y);
    }
    result.steps = accepted;
    return result;
}

// ------------------------------------------------------------- grid propagator

double GridState::norm() const { return psi.norm() * std::sqrt(dx()); }

GridState constant_state(const GridModel& model) {
    GridState s;
    s.length = model.length;
    s.mass = model.mass;
    s.psi = Vector::Constant(model.nx, Complex(1.0 / std::sqrt(model.length), 0.0));
    return s;
}

GridState sampled_state(const GridModel& model,
                        const std::function<Complex(double)>& psi) {
    GridState s;
    s.length = model.length;
    s.mass = model.mass;
    s.psi.resize(model.nx);
    for (int k = 0; k < model.nx; ++k) s.psi(k) = psi(model.x(k));
    return s;
}

GridState propagate_grid(const GridModel& model, const GridState& psi0, double t,
                         int steps, Exec exec) {
    if (steps < 1) throw ValidationError("propagate_grid: steps must be >= 1");
    if (t < 0.0) throw ValidationError("propagate_grid: time must be nonnegative");
    if (psi0.nx() != model.nx)
        throw ValidationError("propagate_grid: state/model grid size mismatch");

    GridState state = psi0;
    if (t == 0.0) return state;

    const int n = model.nx;
    const double dt = t / static_cast<double>(steps);

    Vector half_v(n), full_t(n);
    for (int k = 0; k < n; ++k)
        half_v(k) = std::polar(1.0, -0.5 * dt * model.v_samples(k));
    for (int j = 0; j < n; ++j)
        full_t(j) = std::polar(1.0, -dt * model.kinetic_modes(j));

    Fft fft(n);
    Complex* psi = state.psi.data();

    // Strang splitting: half potential, full kinetic in Fourier modes, half
    // potential. Pointwise phase loops are the parallel kernel.
    for (int s = 0; s < steps; ++s) {
        parallel_for(exec, n, [&](std::ptrdiff_t k) { psi[k] *= half_v(k); });
        fft.forward(psi);
        parallel_for(exec, n, [&](std::ptrdiff_t j) { psi[j] *= full_t(j); });
        fft.inverse(psi);
        parallel_for(exec, n, [&](std::ptrdiff_t k) { psi[k] *= half_v(k); });
    }
    return state;
}

double grid_energy(const GridModel& model, const GridState& state) {
    if (state.nx() != model.nx)
        throw ValidationError("grid_energy: grid size mismatch");
    const int n = model.nx;
    const double dx = state.dx();

    double potential = 0.0;
    for (int k = 0; k < n; ++k)
        potential += model.v_samples(k) * std::norm(state.psi(k));
    potential *= dx;

    Vector modes = state.psi;
    Fft fft(n);
    fft.forward(modes);
    double kinetic = 0.0;
    for (int j = 0; j < n; ++j)
        kinetic += model.kinetic_modes(j) * std::norm(modes(j));
    kinetic *= dx / static_cast<double>(n);

    return potential + kinetic;
}

// ----------------------------------------------------------------- comparison

Complex state_overlap(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw ValidationError("state_overlap: size mismatch");
    return a.dot(b);
}

Complex state_overlap(const GridState& a, const GridState& b) {
    if (a.nx() != b.nx())
        throw ValidationError("state_overlap: grid size mismatch");
    return a.psi.dot(b.psi) * a.dx();
}

namespace {
void require_normalized(double norm, const char* what) {
    if (std::abs(norm - 1.0) > 1e-6) {
        std::ostringstream msg;
        msg << what << ": state not normalized (norm " << norm << ")";
        throw ValidationError(msg.str());
    }
}
} // namespace

double fidelity(const Vector& a, const Vector& b) {
    require_normalized(a.norm(), "fidelity");
    require_normalized(b.norm(), "fidelity");
    return std::norm(state_overlap(a, b));
}

double fidelity(const GridState& a, const GridState& b) {
    require_normalized(a.norm(), "fidelity");
    require_normalized(b.norm(), "fidelity");
    return std::norm(state_overlap(a, b));
}

} // namespace adlab

// bench_kernels — serial reference vs OpenMP kernels
//
// Times the three data-parallel hot paths (batch eigenframes, split-operator
// grid stepping, oscillatory-probe sweep) under both execution policies and
// reports speedups. The parallel kernels are slot-parallel maps, so the
// result columns must agree bitwise.

#include <adlab/adiabatic.hpp>
#include <adlab/models.hpp>
#include <adlab/oracle.hpp>
#include <adlab/spectral.hpp>

#include <chrono>
#include <cstdio>
#include <random>

using namespace adlab;

namespace {

double seconds(std::chrono::steady_clock::time_point a,
               std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

template <class F>
double timed(F&& f) {
    const auto a = std::chrono::steady_clock::now();
    f();
    const auto b = std::chrono::steady_clock::now();
    return seconds(a, b);
}

HamiltonianSchedule random_smooth_schedule(int dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    Matrix a(dim, dim), b(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            a(i, j) = Complex(dist(rng), dist(rng));
            b(i, j) = Complex(dist(rng), dist(rng));
        }
    }
    a = (a + a.adjoint()).eval();
    b = (b + b.adjoint()).eval();
    // Well separated diagonal keeps the spectrum gapped along the sweep.
    for (int i = 0; i < dim; ++i) a(i, i) = Complex(4.0 * i, 0.0);

    HamiltonianSchedule s;
    s.dim = dim;
    s.kind = "bench-random";
    s.evaluate_into = [a, b](double t, Matrix& h) {
        h = a + 0.2 * std::cos(t) * b;
    };
    return s;
}

void bench_frames() {
    const HamiltonianSchedule schedule = random_smooth_schedule(32, 1234);
    const TimeGrid grid{0.0, 2.0, 2000};

    FrameSequence serial, parallel;
    const double t_serial =
        timed([&] { serial = build_frames(schedule, grid, 1e-9, Exec::Serial); });
    const double t_parallel =
        timed([&] { parallel = build_frames(schedule, grid, 1e-9, Exec::Parallel); });

    double max_dev = 0.0;
    for (int k = 0; k < serial.nodes(); ++k)
        max_dev = std::max(max_dev,
                           (serial.frames[k].basis - parallel.frames[k].basis)
                               .cwiseAbs()
                               .maxCoeff());
    std::printf("%-28s %10.3f %10.3f %8.2fx   %.1e\n", "batch eigenframes (N=32)",
                t_serial * 1e3, t_parallel * 1e3, t_serial / t_parallel, max_dev);
}

void bench_grid() {
    const GridModel model = grid_model(
        1.0, 1.0, [](double x) { return std::sin(2.0 * kPi * x); }, 8192);
    const GridState psi0 = constant_state(model);

    GridState serial, parallel;
    const double t_serial =
        timed([&] { serial = propagate_grid(model, psi0, 0.5, 2000, Exec::Serial); });
    const double t_parallel = timed(
        [&] { parallel = propagate_grid(model, psi0, 0.5, 2000, Exec::Parallel); });

    const double max_dev = (serial.psi - parallel.psi).cwiseAbs().maxCoeff();
    std::printf("%-28s %10.3f %10.3f %8.2fx   %.1e\n",
                "split-operator (nx=8192)", t_serial * 1e3, t_parallel * 1e3,
                t_serial / t_parallel, max_dev);
}

void bench_probe() {
    std::vector<double> lambdas;
    for (int i = 0; i < 16; ++i)
        lambdas.push_back(100.0 * std::pow(10.0, 2.0 * i / 15.0));
    auto gap = [](double t) { return t; };
    auto envelope = [](double t) { return std::exp(-8.0 * t * t); };

    SweepResult serial, parallel;
    ProbeOptions opt_serial;
    opt_serial.exec = Exec::Serial;
    ProbeOptions opt_parallel;
    opt_parallel.exec = Exec::Parallel;

    const double t_serial = timed(
        [&] { serial = oscillatory_decay_probe(gap, envelope, lambdas, opt_serial); });
    const double t_parallel = timed([&] {
        parallel = oscillatory_decay_probe(gap, envelope, lambdas, opt_parallel);
    });

    double max_dev = 0.0;
    for (std::size_t i = 0; i < serial.errors.size(); ++i)
        max_dev = std::max(max_dev,
                           std::abs(serial.errors[i] - parallel.errors[i]));
    std::printf("%-28s %10.3f %10.3f %8.2fx   %.1e\n",
                "oscillatory probe (16 pts)", t_serial * 1e3, t_parallel * 1e3,
                t_serial / t_parallel, max_dev);
}

} // namespace

int main() {
    std::printf("threads available: %d\n\n", max_threads());
    std::printf("%-28s %10s %10s %9s   %s\n", "kernel", "serial/ms", "openmp/ms",
                "speedup", "max|diff|");
    bench_frames();
    bench_grid();
    bench_probe();
    return 0;
}

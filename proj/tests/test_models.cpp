#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <adlab/hermitian.hpp>
#include <adlab/models.hpp>
#include <adlab/spectral.hpp>

#include "test_support.hpp"

#include <random>

using namespace adlab;

TEST_CASE("berry-full at the north pole is half sigma_z") {
    // theta = 0 puts the parameter vector at (0,0,1) for every t
    const Matrix h = model_hamiltonian("berry-full", {{"theta", 0.0}}, 0.37);
    CHECK(std::abs(h(0, 0) - Complex(0.5, 0.0)) < 1e-15);
    CHECK(std::abs(h(1, 1) - Complex(-0.5, 0.0)) < 1e-15);
    CHECK(std::abs(h(0, 1)) < 1e-15);
}

TEST_CASE("berry-xz matrices are real everywhere") {
    const HamiltonianSchedule s = make_schedule("berry-xz", {{"radius", 1.7}});
    for (double t : {0.0, 0.13, 0.49, 0.77, 0.99}) {
        const Matrix h = s.evaluate(t);
        CHECK(h.imag().cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("gapped-lz at t=0 is half delta sigma_x") {
    const Matrix h = model_hamiltonian("gapped-lz", {{"v", 1.0}, {"delta", 0.5}}, 0.0);
    CHECK(std::abs(h(0, 1) - Complex(0.25, 0.0)) < 1e-15);
    CHECK(std::abs(h(0, 0)) < 1e-15);
    const SpectralFrame frame = eigen_frame(h, 0.0);
    CHECK(frame.energies(1) - frame.energies(0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("unknown kind and unknown parameter are rejected") {
    CHECK_THROWS_AS(make_schedule("berry"), ValidationError);
    CHECK_THROWS_AS(make_schedule("gapped-lz", {{"detla", 0.1}}), ValidationError);
    CHECK_THROWS_WITH_AS(make_schedule("nope"), doctest::Contains("valid kinds"),
                         ValidationError);
}

TEST_CASE("every kind is Hermitian at 1000 random times") {
    std::mt19937 rng(20260810);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (const std::string& kind : schedule_kinds()) {
        const HamiltonianSchedule s = make_schedule(kind);
        for (int i = 0; i < 1000; ++i) {
            const Matrix h = s.evaluate(dist(rng));
            CHECK_NOTHROW(require_hermitian(h, 1e-12, kind.c_str()));
        }
    }
}

TEST_CASE("cyclic kinds repeat exactly after one period") {
    for (const char* kind : {"berry-full", "berry-xz", "rotating-xy"}) {
        const HamiltonianSchedule s = make_schedule(kind);
        REQUIRE(s.period.has_value());
        for (double t : {0.0, 0.31, 0.62}) {
            const Matrix a = s.evaluate(t);
            const Matrix b = s.evaluate(t + *s.period);
            CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("gapped-lz instantaneous gap matches the closed form") {
    const double v = 1.0, delta = 0.25;
    const HamiltonianSchedule s = make_schedule("gapped-lz");
    for (double t : {-2.0, -0.5, 0.0, 0.4, 1.7}) {
        const SpectralFrame frame = eigen_frame(s.evaluate(t), t);
        const double gap = frame.energies(1) - frame.energies(0);
        CHECK(std::abs(gap - std::sqrt(v * v * t * t + delta * delta)) < 1e-10);
    }
}

TEST_CASE("time compression rescales the schedule argument") {
    const HamiltonianSchedule s = make_schedule("gapped-lz");
    const HamiltonianSchedule c = time_compressed(s, 10.0);
    CHECK((c.evaluate(0.1) - s.evaluate(1.0)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grid model samples and kinetic spectrum") {
    SUBCASE("zero potential") {
        const GridModel g = grid_model(1.0, 1.0, [](double) { return 0.0; }, 16);
        CHECK(g.v_samples.cwiseAbs().maxCoeff() == 0.0);
        CHECK(g.kinetic_modes(0) == 0.0);
    }
    SUBCASE("first mode kinetic energy is 2 pi^2 for L=m=1") {
        const GridModel g = grid_model(1.0, 1.0, [](double) { return 0.0; }, 32);
        CHECK(g.kinetic_modes(1) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));
    }
    SUBCASE("sampled sine reproduces the closed form at each node") {
        const GridModel g = grid_model(
            2.0, 1.0, [](double x) { return std::sin(2.0 * kPi * x / 2.0); }, 64);
        for (int k = 0; k < g.nx; ++k)
            CHECK(g.v_samples(k) ==
                  doctest::Approx(std::sin(kPi * g.x(k))).epsilon(1e-15));
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(grid_model(1.0, 1.0, [](double) { return 0.0; }, 48),
                        ValidationError);
        CHECK_THROWS_AS(grid_model(1.0, 1.0, [](double) { return 0.0; }, 8),
                        ValidationError);
        CHECK_THROWS_AS(grid_model(-1.0, 1.0, [](double) { return 0.0; }, 32),
                        ValidationError);
        const double big = 1e308;
        CHECK_THROWS_AS(grid_model(1.0, 1.0,
                                   [big](double x) {
                                       return x > 0.1 ? big * 10.0 : 0.0;
                                   },
                                   32),
                        ValidationError);
    }
}

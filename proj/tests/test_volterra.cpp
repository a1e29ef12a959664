// test_volterra.cpp — Direct integration of the memory equations against the closed forms

#include <doctest.h>

#include "memkernel/errors.hpp"
#include "memkernel/map_engine.hpp"
#include "memkernel/ode.hpp"
#include "memkernel/volterra.hpp"

#include <array>
#include <cmath>
#include <vector>

using namespace memkernel;

namespace {

constexpr auto MK = EquationKind::MemoryKernel;
constexpr auto PM = EquationKind::PostMarkovian;

const QubitState kPlus{0.5, 0.5};

} // namespace

TEST_CASE("dense output of the Runge-Kutta pair") {
    using Vec = Eigen::Matrix<double, 2, 1>;
    // harmonic oscillator, sampled off the step sequence
    auto rhs = [](double, const Vec& y) { return Vec{y(1), -y(0)}; };
    std::vector<double> times;
    for (int i = 0; i <= 137; ++i) times.push_back(0.073 * i);
    ode::Options opt;
    opt.rtol = opt.atol = 1e-11;
    const auto sol = ode::integrate<2>(rhs, 0.0, Vec{1.0, 0.0}, times, opt);
    REQUIRE(sol.values.size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(std::abs(sol.values[i](0) - std::cos(times[i])) < 1e-9);
        CHECK(std::abs(sol.values[i](1) + std::sin(times[i])) < 1e-9);
    }
    // the step sequence does not depend on where output is requested
    const std::array<double, 2> ends{0.0, times.back()};
    CHECK(ode::integrate<2>(rhs, 0.0, Vec{1.0, 0.0}, ends, opt).stats.accepted == sol.stats.accepted);
}

TEST_CASE("integrator reports blow-up as divergence") {
    using Vec = Eigen::Matrix<double, 1, 1>;
    auto rhs = [](double, const Vec& y) { return Vec{y(0) * y(0)}; };
    const std::array<double, 2> times{0.0, 2.0};
    try {
        ode::integrate<1>(rhs, 0.0, Vec{1.0}, times, {});
        FAIL("expected IntegrationDivergence");
    } catch (const IntegrationDivergence& e) {
        CHECK(e.last_good_time() < 1.0);
        CHECK(e.last_good_time() > 0.9);
    }
}

TEST_CASE("generator matrix") {
    const GeneratorMatrix g(MapParams(0.3, 1.0, 2.0));
    const auto& L = g.matrix();
    CHECK(L.row(3).isZero());
    CHECK(L(0, 0) == doctest::Approx(-1.5));
    CHECK(L(0, 3) == doctest::Approx(0.6));
    CHECK(L(1, 1) == doctest::Approx(-0.75));
    // fixed point is the thermal state
    const CoherenceVector thermal{2.0 / 5.0, 0.0, 0.0, 1.0};
    CHECK(g(thermal).norm() < 1e-15);

    const GeneratorMatrix cold(MapParams(0.3, 1.0, 0.0));
    CHECK(cold.matrix()(0, 0) == doctest::Approx(-0.3));
    CHECK(cold.matrix()(0, 3) == 0.0);
}

TEST_CASE("augmented memory-kernel integration reproduces the reference xi value") {
    // R = 0.1, N = 1, from |1⟩: pₑ = (1 + T₃ + λ₃)/2 with T₃ = (λ₃ − 1)/3.
    const auto p = MapParams::from_ratio(0.1, 1.0);
    const auto traj = integrate_memory_kernel(GeneratorMatrix(p), p, QubitState::excited(), 1.0, 1e-12);
    const double pe = traj.states.back().population_e();
    const double lambda3 = (3.0 * (2.0 * pe - 1.0) + 1.0) / 4.0;
    CHECK(std::abs(lambda3 - 0.96349596128041) <= 1e-9);
    CHECK(std::abs(pe - snapshot(MK, p, 1.0).u()) <= 1e-6);
}

TEST_CASE("augmented systems agree with the closed forms") {
    for (const auto kind : {MK, PM}) {
        for (const double R : {0.02, 0.1, 0.2, 0.24}) {
            for (const double N : {0.0, 1.0, 5.0}) {
                const auto p = MapParams::from_ratio(R, N);
                for (const QubitState& s0 : {QubitState::excited(), kPlus, QubitState{0.3, cdouble{0.1, -0.2}}}) {
                    const auto traj = integrate_augmented(kind, GeneratorMatrix(p), p, s0, 10.0, 1e-10);
                    CHECK(max_deviation_from_closed_form(kind, p, s0, traj) <= 1e-6);
                    CHECK(traj.meta.max_trace_residual <= 1e-10);
                }
            }
        }
    }
}

TEST_CASE("physical units: gamma rescales time") {
    const MapParams p(0.05, 4.0, 1.0);
    for (const auto kind : {MK, PM}) {
        const auto traj = integrate_augmented(kind, GeneratorMatrix(p), p, kPlus, 3.0, 1e-10);
        CHECK(max_deviation_from_closed_form(kind, p, kPlus, traj) <= 1e-6);
    }
}

TEST_CASE("oscillatory memory kernel agrees beyond the first zero") {
    const auto p = MapParams::from_ratio(1.0, 0.5);
    const auto traj = integrate_memory_kernel(GeneratorMatrix(p), p, kPlus, 20.0, 1e-10);
    CHECK(max_deviation_from_closed_form(MK, p, kPlus, traj) <= 1e-6);
}

TEST_CASE("zero coupling is the identity evolution") {
    const MapParams p(0.0, 1.0, 3.0);
    const QubitState s0{0.3, cdouble{0.1, -0.2}};
    for (const auto kind : {MK, PM}) {
        const auto traj = integrate_augmented(kind, GeneratorMatrix(p), p, s0, 5.0, 1e-10);
        for (const auto& s : traj.states) CHECK(s == s0);
        const auto quad = integrate_quadrature(kind, GeneratorMatrix(p), p, s0, 5.0, 200);
        for (const auto& s : quad.states) {
            CHECK(std::abs(s.population_e() - s0.population_e()) < 1e-15);
            CHECK(std::abs(s.coherence() - s0.coherence()) < 1e-15);
        }
    }
}

TEST_CASE("memory kernel approaches the Markovian semigroup for short memory") {
    const double R = 1e-3;
    const double N = 1.0;
    const auto p = MapParams::from_ratio(R, N);
    const double t_end = 1000.0;
    const auto traj = integrate_memory_kernel(GeneratorMatrix(p), p, QubitState::excited(), t_end, 1e-10);
    const double total = p.gamma0 * (2 * N + 1);
    const double thermal = N / (2 * N + 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double markov = thermal + (1.0 - thermal) * std::exp(-total * traj.times[i]);
        worst = std::max(worst, std::abs(traj.states[i].population_e() - markov));
    }
    CHECK(worst <= 1e-2);
}

TEST_CASE("post-Markovian coherence follows xi at R/2") {
    const auto p = MapParams::from_ratio(0.1, 1.0);
    const auto traj = integrate_post_markovian(GeneratorMatrix(p), p, kPlus, 8.0, 1e-11);
    CHECK(traj.states.front() == kPlus);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        CHECK(std::abs(traj.states[i].coherence().real() - 0.5 * xi(PM, 0.05, traj.times[i])) <= 1e-6);
    }
}

TEST_CASE("post-Markovian and memory-kernel trajectories coincide at small R") {
    const auto p = MapParams::from_ratio(0.01, 1.0);
    const GeneratorMatrix g(p);
    const auto mk = integrate_memory_kernel(g, p, QubitState::excited(), 5.0, 1e-10);
    const auto pm = integrate_post_markovian(g, p, QubitState::excited(), 5.0, 1e-10);
    for (std::size_t i = 0; i < mk.times.size(); ++i) {
        CHECK(std::abs(mk.states[i].population_e() - pm.states[i].population_e()) <= 5e-2);
    }
}

TEST_CASE("quadrature is second order") {
    const auto p = MapParams::from_ratio(0.1, 1.0);
    const GeneratorMatrix g(p);
    for (const auto kind : {MK, PM}) {
        const double e1 = max_deviation_from_closed_form(
            kind, p, QubitState::excited(), integrate_quadrature(kind, g, p, QubitState::excited(), 2.0, 100));
        const double e2 = max_deviation_from_closed_form(
            kind, p, QubitState::excited(), integrate_quadrature(kind, g, p, QubitState::excited(), 2.0, 200));
        const double ratio = e1 / e2;
        INFO("ratio = " << ratio);
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
    }
}

TEST_CASE("quadrature agrees with the augmented integration") {
    const auto p = MapParams::from_ratio(0.2, 1.0);
    const GeneratorMatrix g(p);
    for (const auto kind : {MK, PM}) {
        const auto quad = integrate_quadrature(kind, g, p, kPlus, 10.0, 4000);
        CHECK(max_deviation_from_closed_form(kind, p, kPlus, quad) <= 1e-5);
        CHECK(quad.meta.max_trace_residual <= 1e-12);
    }
}

TEST_CASE("quadrature rejects a coarse grid") {
    const auto p = MapParams::from_ratio(0.2, 1.0);
    CHECK_THROWS_AS(integrate_quadrature(MK, GeneratorMatrix(p), p, kPlus, 1.0, 50), std::invalid_argument);
}

TEST_CASE("time-local equation agrees with the closed forms") {
    const auto p = MapParams::from_ratio(0.2, 1.0);
    for (const auto kind : {MK, PM}) {
        for (const QubitState& s0 : {QubitState::excited(), kPlus, QubitState::ground()}) {
            const auto traj = integrate_tcl(kind, p, s0, 10.0, 1e-10);
            CHECK(max_deviation_from_closed_form(kind, p, s0, traj) <= 1e-6);
        }
    }
}

TEST_CASE("time-local equation edge cases") {
    const auto p = MapParams::from_ratio(0.2, 0.0);
    SUBCASE("t_end = 0 returns the initial state") {
        const auto traj = integrate_tcl(MK, p, kPlus, 0.0, 1e-8);
        REQUIRE(traj.states.size() == 1);
        CHECK(traj.states[0] == kPlus);
    }
    SUBCASE("zero temperature relaxes monotonically to the ground state") {
        const auto traj = integrate_tcl(MK, p, QubitState::excited(), 60.0, 1e-10);
        for (std::size_t i = 1; i < traj.states.size(); ++i) {
            CHECK(traj.states[i].population_e() <= traj.states[i - 1].population_e() + 1e-12);
        }
        CHECK(traj.states.back().population_e() < 1e-3);
    }
    SUBCASE("a zero of xi inside the window is reported") {
        const auto q = MapParams::from_ratio(1.0, 0.5);
        try {
            integrate_tcl(MK, q, kPlus, 20.0, 1e-8);
            FAIL("expected SingularRate");
        } catch (const SingularRate& e) {
            CHECK(e.crossing_time() == doctest::Approx(*xi_first_zero(MK, 1.0)));
        }
    }
}

TEST_CASE("trajectories stay inside the state space in the physical regime") {
    const auto p = MapParams::from_ratio(0.24, 0.5);
    for (const auto kind : {MK, PM}) {
        const auto traj = integrate_augmented(kind, GeneratorMatrix(p), p, kPlus, 20.0, 1e-10);
        for (const auto& s : traj.states) {
            CHECK(s.population_e() * (1 - s.population_e()) - std::norm(s.coherence()) >= -1e-9);
        }
    }
}

TEST_CASE("integrator inputs are validated") {
    const auto p = MapParams::from_ratio(0.2, 1.0);
    const GeneratorMatrix g(p);
    CHECK_THROWS_AS(integrate_memory_kernel(g, p, kPlus, 1.0, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(integrate_memory_kernel(g, p, kPlus, 1.0, 1e-13), std::invalid_argument);
    CHECK_THROWS_AS(integrate_post_markovian(g, p, kPlus, -1.0, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(integrate_memory_kernel(g, p, QubitState{0.1, 0.5}, 1.0, 1e-8), InvalidState);
}

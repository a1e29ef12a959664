// volterra.cpp — Augmented-ODE, trapezoidal-quadrature and time-local integrators

#include "memkernel/volterra.hpp"

#include "memkernel/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace memkernel {

CoherenceVector to_coherence_vector(const QubitState& s) noexcept {
    return {s.population_e(), s.coherence().real(), s.coherence().imag(), 1.0};
}

QubitState from_coherence_vector(const CoherenceVector& v) noexcept {
    return {v(0), cdouble{v(1), v(2)}};
}

GeneratorMatrix::GeneratorMatrix(const MapParams& p) {
    const double total = p.gamma0 * (2.0 * p.n_occ + 1.0);
    m_.setZero();
    m_(0, 0) = -total;
    m_(0, 3) = p.gamma0 * p.n_occ;
    m_(1, 1) = -0.5 * total;
    m_(2, 2) = -0.5 * total;
}

namespace {

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Vec3 = Eigen::Vector3d;

void check_common(const QubitState& s0, double t_end, const char* who) {
    require_valid(s0, who);
    if (!std::isfinite(t_end) || t_end <= 0.0) {
        throw std::invalid_argument(std::string(who) + ": t_end must be finite and > 0");
    }
}

void check_tol(double tol, const char* who) {
    if (!(tol >= 1e-12 && tol <= 1e-4)) {
        throw std::invalid_argument(std::string(who) + ": tol must lie in [1e-12, 1e-4]");
    }
}

std::vector<double> uniform_grid(double t_end, std::size_t points) {
    if (points < 2) throw std::invalid_argument("output grid needs at least 2 points");
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = t_end * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    grid.back() = t_end;
    return grid;
}

template <class Rhs>
AugmentedTrajectory run_augmented(Rhs&& rhs, const QubitState& s0, double t_end, double tol,
                                  std::size_t output_points) {
    Vec8 y0 = Vec8::Zero();
    y0.head<4>() = to_coherence_vector(s0);

    AugmentedTrajectory traj;
    traj.times = uniform_grid(t_end, output_points);
    ode::Options opt;
    opt.rtol = tol;
    opt.atol = tol;
    const auto sol = ode::integrate<8>(rhs, 0.0, y0, traj.times, opt);

    traj.states.reserve(sol.values.size());
    traj.auxiliary.reserve(sol.values.size());
    for (const auto& y : sol.values) {
        const CoherenceVector rho = y.template head<4>();
        traj.states.push_back(from_coherence_vector(rho));
        traj.auxiliary.push_back(y.template tail<4>());
        traj.meta.max_trace_residual =
            std::max(traj.meta.max_trace_residual, std::abs(rho(3) - 1.0));
    }
    traj.meta.steps = sol.stats.accepted;
    traj.meta.rejected = sol.stats.rejected;
    return traj;
}

} // namespace

AugmentedTrajectory integrate_memory_kernel(const GeneratorMatrix& g, const MapParams& p,
                                            const QubitState& s0, double t_end, double tol,
                                            std::size_t output_points) {
    check_common(s0, t_end, "integrate_memory_kernel");
    check_tol(tol, "integrate_memory_kernel");
    const Eigen::Matrix4d L = g.matrix();
    const double gamma = p.gamma;
    auto rhs = [&](double, const Vec8& y) {
        Vec8 dy;
        dy.head<4>() = y.tail<4>();
        dy.tail<4>() = gamma * (L * y.head<4>() - y.tail<4>());
        return dy;
    };
    return run_augmented(rhs, s0, t_end, tol, output_points);
}

AugmentedTrajectory integrate_post_markovian(const GeneratorMatrix& g, const MapParams& p,
                                             const QubitState& s0, double t_end, double tol,
                                             std::size_t output_points) {
    check_common(s0, t_end, "integrate_post_markovian");
    check_tol(tol, "integrate_post_markovian");
    const Eigen::Matrix4d L = g.matrix();
    const double gamma = p.gamma;
    auto rhs = [&](double, const Vec8& y) {
        Vec8 dy;
        dy.head<4>() = L * y.tail<4>();
        dy.tail<4>() = gamma * y.head<4>() + L * y.tail<4>() - gamma * y.tail<4>();
        return dy;
    };
    return run_augmented(rhs, s0, t_end, tol, output_points);
}

AugmentedTrajectory integrate_augmented(EquationKind kind, const GeneratorMatrix& g,
                                        const MapParams& p, const QubitState& s0,
                                        double t_end, double tol, std::size_t output_points) {
    return kind == EquationKind::MemoryKernel
               ? integrate_memory_kernel(g, p, s0, t_end, tol, output_points)
               : integrate_post_markovian(g, p, s0, t_end, tol, output_points);
}

AugmentedTrajectory integrate_quadrature(EquationKind kind, const GeneratorMatrix& g,
                                         const MapParams& p, const QubitState& s0,
                                         double t_end, std::size_t steps) {
    check_common(s0, t_end, "integrate_quadrature");
    if (steps < 100) throw std::invalid_argument("integrate_quadrature: steps must be >= 100");

    const Eigen::Matrix4d L = g.matrix();
    const double h = t_end / static_cast<double>(steps);
    const double gamma = p.gamma;
    const bool post = kind == EquationKind::PostMarkovian;

    // Kernel weights W_m = k(mh) (memory kernel, scalar) or k(mh)e^{𝓛mh} (post-Markovian).
    Eigen::VectorXd scalar_w(steps + 1);
    std::vector<Eigen::Matrix4d> matrix_w;
    for (std::size_t m = 0; m <= steps; ++m) {
        scalar_w(static_cast<Eigen::Index>(m)) = gamma * std::exp(-gamma * h * static_cast<double>(m));
    }
    if (post) {
        const Eigen::Matrix4d step_prop = (L * h).exp();
        matrix_w.resize(steps + 1);
        Eigen::Matrix4d power = Eigen::Matrix4d::Identity();
        for (std::size_t m = 0; m <= steps; ++m) {
            matrix_w[m] = scalar_w(static_cast<Eigen::Index>(m)) * power;
            power = power * step_prop;
        }
    }

    Eigen::Matrix<double, 4, Eigen::Dynamic> rho(4, static_cast<Eigen::Index>(steps + 1));
    rho.col(0) = to_coherence_vector(s0);

    // (1 − h²γ𝓛/4) ρ_{n+1} = ρ_n + (h/2)𝓛(I_n + J_{n+1}),  I_{n+1} = J_{n+1} + (hγ/2)ρ_{n+1}
    const Eigen::Matrix4d implicit = Eigen::Matrix4d::Identity() - (0.25 * h * h * gamma) * L;
    const Eigen::PartialPivLU<Eigen::Matrix4d> solver(implicit);

    AugmentedTrajectory traj;
    traj.times.resize(steps + 1);
    traj.states.resize(steps + 1);
    traj.auxiliary.resize(steps + 1);
    traj.times[0] = 0.0;
    traj.states[0] = s0;
    traj.auxiliary[0].setZero();

    CoherenceVector integral = CoherenceVector::Zero();  // I_n
    for (std::size_t n = 0; n < steps; ++n) {
        const auto next = static_cast<Eigen::Index>(n + 1);
        CoherenceVector partial;  // J_{n+1}: every term but the one with ρ_{n+1}
        if (post) {
            partial = 0.5 * (matrix_w[n + 1] * rho.col(0));
            for (std::size_t j = 1; j <= n; ++j) {
                partial.noalias() += matrix_w[n + 1 - j] * rho.col(static_cast<Eigen::Index>(j));
            }
        } else {
            partial = 0.5 * scalar_w(next) * rho.col(0);
            if (n >= 1) {
                const auto len = static_cast<Eigen::Index>(n);
                partial.noalias() +=
                    rho.middleCols(1, len) * scalar_w.segment(1, len).reverse();
            }
        }
        partial *= h;

        const CoherenceVector rhs = rho.col(static_cast<Eigen::Index>(n)) + 0.5 * h * (L * (integral + partial));
        rho.col(next) = solver.solve(rhs);
        integral = partial + 0.5 * h * gamma * rho.col(next);

        if (!rho.col(next).allFinite()) {
            throw IntegrationDivergence("integrate_quadrature: non-finite state", h * static_cast<double>(n));
        }
        traj.times[n + 1] = h * static_cast<double>(n + 1);
        traj.states[n + 1] = from_coherence_vector(rho.col(next));
        // memory state in the same convention as the augmented systems
        traj.auxiliary[n + 1] = post ? integral : CoherenceVector(L * integral);
        traj.meta.max_trace_residual =
            std::max(traj.meta.max_trace_residual, std::abs(rho(3, next) - 1.0));
    }
    traj.times.back() = t_end;
    traj.meta.steps = steps;
    return traj;
}

AugmentedTrajectory integrate_tcl(EquationKind kind, const MapParams& p, const QubitState& s0,
                                  double t_end, double tol, std::size_t output_points) {
    require_valid(s0, "integrate_tcl");
    check_tol(tol, "integrate_tcl");
    if (!std::isfinite(t_end) || t_end < 0.0) {
        throw std::invalid_argument("integrate_tcl: t_end must be finite and >= 0");
    }

    AugmentedTrajectory traj;
    if (t_end == 0.0) {
        traj.times = {0.0};
        traj.states = {s0};
        traj.auxiliary = {CoherenceVector::Zero()};
        return traj;
    }

    const double R = p.ratio();
    for (const double r : {R, 0.5 * R}) {
        if (const auto zero = xi_first_zero(kind, r); zero && *zero <= p.to_tau(t_end)) {
            throw SingularRate("integrate_tcl: singular rate, xi crosses zero at t = " +
                                   std::to_string(p.to_time(*zero)),
                               p.to_time(*zero));
        }
    }

    auto rhs = [&](double t, const Vec3& y) {
        const TclRates k = tcl_rates(kind, p, p.to_tau(t));
        const double coherence_rate = 0.5 * (k.gamma1 + k.gamma2) + 2.0 * k.gamma3;
        return Vec3{-k.gamma1 * y(0) + k.gamma2 * (1.0 - y(0)), -coherence_rate * y(1),
                    -coherence_rate * y(2)};
    };

    traj.times = uniform_grid(t_end, output_points);
    ode::Options opt;
    opt.rtol = tol;
    opt.atol = tol;
    const Vec3 y0{s0.population_e(), s0.coherence().real(), s0.coherence().imag()};
    const auto sol = ode::integrate<3>(rhs, 0.0, y0, traj.times, opt);
    for (const auto& y : sol.values) {
        traj.states.emplace_back(y(0), cdouble{y(1), y(2)});
        traj.auxiliary.push_back(CoherenceVector::Zero());
    }
    traj.meta.steps = sol.stats.accepted;
    traj.meta.rejected = sol.stats.rejected;
    return traj;
}

double max_deviation_from_closed_form(EquationKind kind, const MapParams& p,
                                      const QubitState& s0, const AugmentedTrajectory& traj) {
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const QubitState exact = apply(snapshot(kind, p, p.to_tau(traj.times[i])), s0).state;
        const QubitState& got = traj.states[i];
        worst = std::max({worst, std::abs(got.population_e() - exact.population_e()),
                          std::abs(got.coherence().real() - exact.coherence().real()),
                          std::abs(got.coherence().imag() - exact.coherence().imag())});
    }
    return worst;
}

} // namespace memkernel

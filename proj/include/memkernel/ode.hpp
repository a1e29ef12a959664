// ode.hpp — Dormand–Prince 5(4) integrator with local error control and dense output
//
// Header-only; the state is a fixed-size Eigen vector. Output is produced at a
// caller-supplied sorted list of times by the continuous extension of the
// accepted steps, so the step sequence is independent of the output grid.

#pragma once

#include "memkernel/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace memkernel::ode {

struct Options {
    double rtol{1e-10};
    double atol{1e-10};
    double initial_step{0.0};   // 0: derived from the span
    double max_step{0.0};       // 0: unlimited
    std::size_t max_steps{5'000'000};
};

struct Stats {
    std::size_t accepted{0};
    std::size_t rejected{0};
    std::size_t evaluations{0};
};

template <int Dim>
struct Solution {
    using Vec = Eigen::Matrix<double, Dim, 1>;
    std::vector<Vec> values;  // one per requested output time
    Stats stats;
};

namespace tableau {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// 5th minus embedded 4th order weights
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous extension
inline constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                        d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                        d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
} // namespace tableau

// Integrates y' = f(t, y) from (t0, y0) and samples the solution at `out_times`
// (sorted, all ≥ t0). Throws IntegrationDivergence on step underflow, step
// budget exhaustion or a non-finite state.
template <int Dim, class Rhs>
Solution<Dim> integrate(Rhs&& f, double t0, const Eigen::Matrix<double, Dim, 1>& y0,
                        std::span<const double> out_times, const Options& opt = {}) {
    using Vec = Eigen::Matrix<double, Dim, 1>;
    using namespace tableau;

    if (!std::is_sorted(out_times.begin(), out_times.end())) {
        throw std::invalid_argument("ode::integrate: output times must be sorted");
    }
    if (!out_times.empty() && out_times.front() < t0) {
        throw std::invalid_argument("ode::integrate: output time before t0");
    }

    Solution<Dim> sol;
    sol.values.reserve(out_times.size());
    std::size_t next = 0;
    while (next < out_times.size() && out_times[next] == t0) {
        sol.values.push_back(y0);
        ++next;
    }
    if (next == out_times.size()) return sol;

    const double t_end = out_times.back();
    const double span = t_end - t0;
    double h = opt.initial_step > 0.0 ? opt.initial_step : 1e-4 * span;
    const double h_max = opt.max_step > 0.0 ? opt.max_step : span;

    double t = t0;
    Vec y = y0;
    Vec k1 = f(t, y);
    ++sol.stats.evaluations;

    while (next < out_times.size()) {
        if (sol.stats.accepted + sol.stats.rejected >= opt.max_steps) {
            throw IntegrationDivergence("ode::integrate: step budget exhausted at t = " +
                                            std::to_string(t), t);
        }
        h = std::min({h, h_max, t_end - t});
        if (h <= 1e-14 * std::max(1.0, std::abs(t))) {
            throw IntegrationDivergence("ode::integrate: step size underflow at t = " +
                                            std::to_string(t), t);
        }

        const Vec k2 = f(t + c2 * h, y + h * (a21 * k1));
        const Vec k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        const Vec k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vec k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vec k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Vec y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const Vec k7 = f(t + h, y1);
        sol.stats.evaluations += 6;

        const Vec err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const Vec scale = (opt.atol + opt.rtol * y.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
        const double err = std::sqrt((err_vec.cwiseQuotient(scale)).squaredNorm() /
                                     static_cast<double>(err_vec.size()));

        if (!std::isfinite(err) || !y1.allFinite()) {
            throw IntegrationDivergence("ode::integrate: non-finite state after t = " +
                                            std::to_string(t), t);
        }

        if (err <= 1.0) {
            const double t1 = (t_end - (t + h) < 1e-12 * span) ? t_end : t + h;
            // dense output on [t, t1]
            const Vec r2 = y1 - y;
            const Vec r3 = h * k1 - r2;
            const Vec r4 = r2 - h * k7 - r3;
            const Vec r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            while (next < out_times.size() && out_times[next] <= t1) {
                if (out_times[next] == t1) {
                    sol.values.push_back(y1);
                } else {
                    const double th = (out_times[next] - t) / h;
                    const double th1 = 1.0 - th;
                    sol.values.push_back(y + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5))));
                }
                ++next;
            }
            t = t1;
            y = y1;
            k1 = k7;  // first-same-as-last
            ++sol.stats.accepted;
        } else {
            ++sol.stats.rejected;
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= err <= 1.0 ? factor : std::min(factor, 1.0);
    }
    return sol;
}

} // namespace memkernel::ode

// blp.cpp — σ, flow reports and the maximization over initial pairs

#include "memkernel/blp.hpp"

#include "memkernel/errors.hpp"
#include "memkernel/sphere.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace memkernel {

std::string_view to_string(SigmaMethod m) noexcept {
    return m == SigmaMethod::Analytic ? "analytic-sigma" : "finite-difference-sigma";
}

double sigma_analytic(EquationKind kind, const MapParams& p, const StatePair& pair, double tau) {
    require_valid(pair.first, "sigma_analytic");
    require_valid(pair.second, "sigma_analytic");
    if (pair.identical()) {
        throw DegeneratePair("sigma_analytic: identical states, sigma is 0/0");
    }
    const double R = p.ratio();
    const double a2 = pair.a0() * pair.a0();
    const double b2 = std::norm(pair.b0());
    const double x3 = xi(kind, R, tau);
    const double x1 = xi(kind, 0.5 * R, tau);
    const double denom = std::sqrt(a2 * x3 * x3 + b2 * x1 * x1);
    if (denom == 0.0) return 0.0;
    const double num = a2 * x3 * xi_derivative(kind, R, tau) +
                       b2 * x1 * xi_derivative(kind, 0.5 * R, tau);
    return p.gamma * num / denom;
}

double evolved_distance(EquationKind kind, const MapParams& p, const StatePair& pair, double tau) {
    const MapSnapshot snap = snapshot(kind, p, tau);
    return raw_trace_distance(apply(snap, pair.first).state, apply(snap, pair.second).state);
}

namespace {

constexpr double kFdStep = 1e-5;

std::vector<double> uniform_taus(double tau_end, std::size_t n) {
    std::vector<double> taus(n);
    for (std::size_t i = 0; i < n; ++i) {
        taus[i] = tau_end * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    taus.back() = tau_end;
    return taus;
}

// Zero of σ between lo (σ ≤ 0 side or > 0 side) and hi, by bisection on the sign.
double bracket_sign_change(EquationKind kind, const MapParams& p, const StatePair& pair,
                           double lo, double hi) {
    const bool lo_positive = sigma_analytic(kind, p, pair, lo) > 0.0;
    for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((sigma_analytic(kind, p, pair, mid) > 0.0) == lo_positive) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

bool smooth_at(EquationKind kind, double R, double tau) {
    const double lo = std::max(0.0, tau - kFdStep);
    const double hi = tau + kFdStep;
    for (const double r : {R, 0.5 * R}) {
        const double a = xi(kind, r, lo);
        const double b = xi(kind, r, hi);
        if (a * b <= 0.0) return false;
    }
    return true;
}

} // namespace

FlowReport flow_report(EquationKind kind, const MapParams& p, const StatePair& pair,
                       double tau_end, std::size_t grid_points) {
    if (grid_points < 100) throw std::invalid_argument("flow_report: grid_points must be >= 100");
    if (!std::isfinite(tau_end) || tau_end <= 0.0) {
        throw std::invalid_argument("flow_report: tau_end must be finite and > 0");
    }
    require_valid(pair.first, "flow_report");
    require_valid(pair.second, "flow_report");

    FlowReport rep;
    rep.pair = pair;
    rep.taus = uniform_taus(tau_end, grid_points);
    rep.distance.assign(grid_points, 0.0);
    rep.sigma.assign(grid_points, 0.0);
    rep.sigma_fd.assign(grid_points, 0.0);
    if (pair.identical()) return rep;

    const double R = p.ratio();
    auto dist = [&](double tau) { return evolved_distance(kind, p, pair, tau); };

    for (std::size_t i = 0; i < grid_points; ++i) {
        const double tau = rep.taus[i];
        rep.distance[i] = dist(tau);
        rep.sigma[i] = sigma_analytic(kind, p, pair, tau);
        double slope;
        if (tau < kFdStep) {
            slope = (-3.0 * dist(tau) + 4.0 * dist(tau + kFdStep) - dist(tau + 2.0 * kFdStep)) /
                    (2.0 * kFdStep);
        } else {
            slope = (dist(tau + kFdStep) - dist(tau - kFdStep)) / (2.0 * kFdStep);
        }
        rep.sigma_fd[i] = p.gamma * slope;
        if (rep.distance[i] > 1e-6 && smooth_at(kind, R, tau)) {
            rep.fd_max_deviation =
                std::max(rep.fd_max_deviation, std::abs(rep.sigma[i] - rep.sigma_fd[i]));
        }
    }

    // Maximal runs of σ > 0, endpoints refined to the sign change of σ;
    // gains telescope as differences of D.
    std::size_t i = 0;
    while (i < grid_points) {
        if (!(rep.sigma[i] > 0.0)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < grid_points && rep.sigma[j + 1] > 0.0) ++j;
        const double start = i == 0 ? rep.taus[0]
                                    : bracket_sign_change(kind, p, pair, rep.taus[i - 1], rep.taus[i]);
        const double end = j + 1 == grid_points
                               ? rep.taus[j]
                               : bracket_sign_change(kind, p, pair, rep.taus[j], rep.taus[j + 1]);
        const double gain = dist(end) - dist(start);
        rep.positive_intervals.push_back({start, end, gain});
        rep.total_gain += gain;
        i = j + 1;
    }
    return rep;
}

namespace {

using PairCoords = std::array<double, 6>;  // Bloch vectors (x₁, y₁, z₁, x₂, y₂, z₂)

StatePair pair_of(const PairCoords& c) {
    return {QubitState::from_bloch({c[0], c[1], c[2]}), QubitState::from_bloch({c[3], c[4], c[5]})};
}

void project_to_ball(PairCoords& c) {
    for (int k = 0; k < 6; k += 3) {
        const double n = std::sqrt(c[k] * c[k] + c[k + 1] * c[k + 1] + c[k + 2] * c[k + 2]);
        if (n > 1.0) {
            c[k] /= n;
            c[k + 1] /= n;
            c[k + 2] /= n;
        }
    }
}

// Grid objective: total positive variation of D on the precomputed snapshot grid.
class GainEvaluator {
public:
    GainEvaluator(EquationKind kind, const MapParams& p, double tau_end, std::size_t points) {
        const auto taus = uniform_taus(tau_end, points);
        l1_.reserve(points);
        l3_.reserve(points);
        for (const double tau : taus) {
            const MapSnapshot s = snapshot(kind, p, tau);
            l1_.push_back(s.lambda1 * s.lambda1);
            l3_.push_back(s.lambda3 * s.lambda3);
        }
    }

    double operator()(const PairCoords& c) {
        ++evaluations;
        const double a = 0.5 * (c[2] - c[5]);
        const double bx = 0.5 * (c[0] - c[3]);
        const double by = 0.5 * (c[1] - c[4]);
        const double a2 = a * a;
        const double b2 = bx * bx + by * by;
        double gain = 0.0;
        double prev = std::sqrt(a2 * l3_[0] + b2 * l1_[0]);
        for (std::size_t i = 1; i < l1_.size(); ++i) {
            const double d = std::sqrt(a2 * l3_[i] + b2 * l1_[i]);
            if (d > prev) gain += d - prev;
            prev = d;
        }
        return gain;
    }

    std::size_t evaluations{0};

private:
    std::vector<double> l1_;  // λ₁²
    std::vector<double> l3_;  // λ₃²
};

PairCoords random_pair(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PairCoords c{};
    for (int k = 0; k < 6; k += 3) {
        double x, y, z;
        do {
            x = u(rng);
            y = u(rng);
            z = u(rng);
        } while (x * x + y * y + z * z > 1.0);
        c[k] = x;
        c[k + 1] = y;
        c[k + 2] = z;
    }
    return c;
}

struct Candidate {
    PairCoords coords{};
    double gain{-1.0};
};

void coordinate_ascent(GainEvaluator& eval, Candidate& cand, std::size_t max_evals) {
    const std::size_t stop = eval.evaluations + max_evals;
    double step = 0.25;
    while (step > 1e-4 && eval.evaluations + 2 <= stop) {
        bool improved = false;
        for (int k = 0; k < 6 && eval.evaluations + 2 <= stop; ++k) {
            for (const double dir : {1.0, -1.0}) {
                PairCoords trial = cand.coords;
                trial[static_cast<std::size_t>(k)] += dir * step;
                project_to_ball(trial);
                const double g = eval(trial);
                if (g > cand.gain) {
                    cand = {trial, g};
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
}

bool monotone_regime(EquationKind kind, const MapParams& p) {
    return p.physical(kind);
}

} // namespace

MeasureResult measure(EquationKind kind, const MapParams& p, double tau_end, std::size_t budget) {
    MeasureOptions opt;
    opt.tau_end = tau_end;
    opt.budget = budget;
    return measure(kind, p, opt);
}

MeasureResult measure(EquationKind kind, const MapParams& p, const MeasureOptions& opt) {
    if (opt.budget < 100) throw std::invalid_argument("measure: budget must be >= 100");
    if (!std::isfinite(opt.tau_end) || opt.tau_end <= 0.0) {
        throw std::invalid_argument("measure: tau_end must be finite and > 0");
    }
    if (opt.grid_points < 100) throw std::invalid_argument("measure: grid_points must be >= 100");

    GainEvaluator eval(kind, p, opt.tau_end, opt.grid_points);
    Candidate best;

    // Stage 1: antipodal pure pairs (n, −n); the upper hemisphere covers every pair once.
    const std::size_t stage1_cap = opt.budget / 2;
    std::vector<BlochVector> dirs;
    for (int level = 0;; ++level) {
        auto verts = sphere::icosphere(level);
        std::erase_if(verts, [](const BlochVector& v) { return v.z < -1e-12; });
        if (verts.size() > stage1_cap && !dirs.empty()) break;
        dirs = std::move(verts);
        if (level == 6) break;
    }
    for (const auto& n : dirs) {
        if (eval.evaluations >= stage1_cap) break;
        const PairCoords c{n.x, n.y, n.z, -n.x, -n.y, -n.z};
        const double g = eval(c);
        if (g > best.gain) best = {c, g};
    }

    // Stage 2: general-pair refinement from the stage-1 winner and random pairs.
    std::mt19937_64 rng(opt.seed);
    const std::size_t random_starts = opt.budget / 10;
    std::vector<Candidate> starts{best};
    for (std::size_t s = 0; s < random_starts && eval.evaluations < opt.budget; ++s) {
        const PairCoords c = random_pair(rng);
        starts.push_back({c, eval(c)});
    }
    for (std::size_t s = 0; s < starts.size(); ++s) {
        if (eval.evaluations >= opt.budget) break;
        const std::size_t remaining = opt.budget - eval.evaluations;
        const std::size_t share = remaining / (starts.size() - s);
        Candidate cand = starts[s];
        coordinate_ascent(eval, cand, share);
        if (cand.gain > best.gain) best = cand;
    }
    for (const auto& c : starts) {
        if (c.gain > best.gain) best = c;
    }

    MeasureResult res;
    res.argmax_pair = pair_of(best.coords);
    res.evaluations = eval.evaluations;
    res.method = SigmaMethod::Analytic;
    const FlowReport rep = flow_report(kind, p, res.argmax_pair, opt.tau_end, opt.grid_points);
    res.value = std::max(0.0, rep.total_gain);
    res.argmax_intervals = rep.positive_intervals;

    const double R = p.ratio();
    const double tail = std::max(std::abs(xi(kind, R, opt.tau_end)),
                                 std::abs(xi(kind, 0.5 * R, opt.tau_end)));
    res.tail_certified = monotone_regime(kind, p) || tail < 1e-6;
    return res;
}

} // namespace memkernel

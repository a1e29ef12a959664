// map_analysis.cpp — Choi construction, positivity/CP/divisibility scans, classification

#include "memkernel/map_analysis.hpp"

#include "memkernel/errors.hpp"
#include "memkernel/sphere.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace memkernel {

ChoiMatrix::ChoiMatrix(const Eigen::Matrix4cd& m) : m_(m) {
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::invalid_argument("ChoiMatrix: matrix is not Hermitian");
    }
}

Eigen::Matrix2cd ChoiMatrix::partial_trace_output() const {
    Eigen::Matrix2cd r;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            r(i, j) = m_(2 * i, 2 * j) + m_(2 * i + 1, 2 * j + 1);
        }
    }
    return r;
}

Eigen::Vector4d ChoiMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(m_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("ChoiMatrix: eigenvalue decomposition failed");
    }
    return solver.eigenvalues();
}

ChoiMatrix choi_of(const MapSnapshot& snap) {
    // Φ(|0⟩⟨0|) = diag(1 − v, v), Φ(|1⟩⟨1|) = diag(1 − u, u), Φ(|1⟩⟨0|) = z|1⟩⟨0|
    Eigen::Matrix4cd c = Eigen::Matrix4cd::Zero();
    c(0, 0) = 1.0 - snap.v();
    c(1, 1) = snap.v();
    c(2, 2) = 1.0 - snap.u();
    c(3, 3) = snap.u();
    c(3, 0) = snap.z();
    c(0, 3) = snap.z();
    return ChoiMatrix(c);
}

CpVerdict is_completely_positive(const ChoiMatrix& c, double tol) {
    const double lo = c.eigenvalues()(0);
    return {lo >= -tol, lo};
}

namespace {

double image_norm(const MapSnapshot& s, const BlochVector& n) {
    const BlochVector out{s.lambda1 * n.x, s.lambda1 * n.y, s.lambda3 * n.z + s.t3};
    return out.norm();
}

struct AngleSearch {
    double theta;
    double phi;
    double value;
};

void refine(const MapSnapshot& s, AngleSearch& best, double step) {
    while (step > 1e-10) {
        bool improved = false;
        for (const auto& [dt, dp] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
            const double th = std::clamp(best.theta + dt * step, 0.0, std::numbers::pi);
            const double ph = best.phi + dp * step;
            const double v = image_norm(s, sphere::from_angles(th, ph));
            if (v > best.value) {
                best = {th, ph, v};
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
}

} // namespace

PositivityVerdict is_positive(const MapSnapshot& snap, std::size_t samples, std::uint64_t seed) {
    if (samples < 1000) throw std::invalid_argument("is_positive: samples must be >= 1000");
    static thread_local std::size_t cached_samples = 0;
    static thread_local std::vector<BlochVector> grid;
    if (cached_samples != samples) {
        grid = sphere::icosphere_at_least(samples);
        cached_samples = samples;
    }

    AngleSearch best{0.0, 0.0, -1.0};
    for (const auto& n : grid) {
        const double v = image_norm(snap, n);
        if (v > best.value) {
            best = {std::acos(std::clamp(n.z, -1.0, 1.0)), std::atan2(n.y, n.x), v};
        }
    }
    const double spacing = std::sqrt(4.0 * std::numbers::pi / static_cast<double>(grid.size()));
    refine(snap, best, spacing);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int r = 0; r < 4; ++r) {
        AngleSearch start{std::acos(1.0 - 2.0 * u(rng)), 2.0 * std::numbers::pi * u(rng), 0.0};
        start.value = image_norm(snap, sphere::from_angles(start.theta, start.phi));
        refine(snap, start, 0.5);
        if (start.value > best.value) best = start;
    }

    PositivityVerdict out;
    out.max_bloch_norm = best.value;
    out.positive = best.value <= 1.0 + 1e-10;
    out.witness = QubitState::from_bloch(sphere::from_angles(best.theta, best.phi));
    return out;
}

IntermediateMap intermediate_map(EquationKind kind, const MapParams& p, double tau1, double tau2) {
    if (!(tau1 >= 0.0) || !(tau2 >= tau1) || !std::isfinite(tau2)) {
        throw std::invalid_argument("intermediate_map: requires 0 <= tau1 <= tau2");
    }
    const MapSnapshot first = snapshot(kind, p, tau1);
    const MapSnapshot second = snapshot(kind, p, tau2);
    if (std::abs(first.lambda1) < 1e-14) {
        throw NonInvertibleMap("intermediate_map: lambda1 vanishes at tau1 = " + std::to_string(tau1));
    }
    if (std::abs(first.lambda3) < 1e-14) {
        throw NonInvertibleMap("intermediate_map: lambda3 vanishes at tau1 = " + std::to_string(tau1));
    }
    IntermediateMap im;
    im.tau1 = tau1;
    im.tau2 = tau2;
    im.map.lambda1 = second.lambda1 / first.lambda1;
    im.map.lambda3 = second.lambda3 / first.lambda3;
    im.map.t3 = second.t3 - im.map.lambda3 * first.t3;
    return im;
}

namespace {

std::vector<double> uniform_taus(double tau_max, std::size_t n) {
    if (n < 2) throw std::invalid_argument("scan: need at least 2 grid points");
    if (!std::isfinite(tau_max) || tau_max <= 0.0) {
        throw std::invalid_argument("scan: tau_max must be finite and > 0");
    }
    std::vector<double> taus(n);
    for (std::size_t i = 0; i < n; ++i) {
        taus[i] = tau_max * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    taus.back() = tau_max;
    return taus;
}

double intermediate_min_eigenvalue(const MapSnapshot& a, const MapSnapshot& b) {
    MapSnapshot m;
    m.lambda1 = b.lambda1 / a.lambda1;
    m.lambda3 = b.lambda3 / a.lambda3;
    m.t3 = b.t3 - m.lambda3 * a.t3;
    return choi_of(m).eigenvalues()(0);
}

bool invertible(const MapSnapshot& s) {
    return std::abs(s.lambda1) >= 1e-12 && std::abs(s.lambda3) >= 1e-12;
}

} // namespace

CpScan scan_complete_positivity(EquationKind kind, const MapParams& p, double tau_max,
                                std::size_t points, double tol) {
    CpScan scan;
    scan.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const double tau : uniform_taus(tau_max, points)) {
        const double lo = choi_of(snapshot(kind, p, tau)).eigenvalues()(0);
        if (lo < scan.min_eigenvalue) {
            scan.min_eigenvalue = lo;
            scan.tau_at_min = tau;
        }
    }
    scan.completely_positive = scan.min_eigenvalue >= -tol;
    return scan;
}

PositivityScan scan_positivity(EquationKind kind, const MapParams& p, double tau_max,
                               std::size_t points, std::size_t samples) {
    PositivityScan scan;
    scan.max_bloch_norm = -1.0;
    for (const double tau : uniform_taus(tau_max, points)) {
        const PositivityVerdict v = is_positive(snapshot(kind, p, tau), samples);
        if (v.max_bloch_norm > scan.max_bloch_norm) {
            scan.max_bloch_norm = v.max_bloch_norm;
            scan.tau_at_max = tau;
            scan.witness = v.witness;
        }
    }
    scan.positive = scan.max_bloch_norm <= 1.0 + 1e-10;
    return scan;
}

DivisibilityScan scan_divisibility(EquationKind kind, const MapParams& p, double tau_max,
                                   std::size_t grid, double tol) {
    const auto taus = uniform_taus(tau_max, grid);
    std::vector<MapSnapshot> snaps;
    snaps.reserve(grid);
    for (const double tau : taus) snaps.push_back(snapshot(kind, p, tau));

    DivisibilityScan scan;
    scan.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid; ++i) {
        if (!invertible(snaps[i])) continue;
        for (std::size_t j = i + 1; j < grid; ++j) {
            const double lo = intermediate_min_eigenvalue(snaps[i], snaps[j]);
            if (lo < scan.min_eigenvalue) {
                scan.min_eigenvalue = lo;
                scan.tau1 = taus[i];
                scan.tau2 = taus[j];
            }
        }
    }
    if (!std::isfinite(scan.min_eigenvalue)) {
        scan.min_eigenvalue = 0.0;
        return scan;
    }

    // local refinement around the most negative cell
    double step = tau_max / static_cast<double>(grid - 1);
    auto value_at = [&](double t1, double t2) {
        const MapSnapshot a = snapshot(kind, p, t1);
        if (!invertible(a)) return std::numeric_limits<double>::infinity();
        return intermediate_min_eigenvalue(a, snapshot(kind, p, t2));
    };
    while (step > 1e-6) {
        bool improved = false;
        for (const auto& [d1, d2] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
            const double t1 = std::clamp(scan.tau1 + d1 * step, 0.0, tau_max);
            const double t2 = std::clamp(scan.tau2 + d2 * step, 0.0, tau_max);
            if (t2 < t1) continue;
            const double v = value_at(t1, t2);
            if (v < scan.min_eigenvalue) {
                scan = {v, t1, t2, true};
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    scan.divisible = scan.min_eigenvalue >= -tol;
    return scan;
}

double cp_temperature_threshold(EquationKind kind, double R, double tau_max, std::size_t points,
                                double n_max, double n_tol) {
    auto cp_at = [&](double n) {
        return scan_complete_positivity(kind, MapParams::from_ratio(R, n), tau_max, points)
            .completely_positive;
    };
    if (cp_at(0.0)) return 0.0;
    if (!cp_at(n_max)) return n_max;
    double lo = 0.0;
    double hi = n_max;
    while (hi - lo > n_tol) {
        const double mid = 0.5 * (lo + hi);
        (cp_at(mid) ? hi : lo) = mid;
    }
    return hi;
}

std::string_view to_string(Regime r) noexcept {
    switch (r) {
    case Regime::TimeDependentMarkovianDivisible: return "TimeDependentMarkovian-Divisible";
    case Regime::TimeDependentMarkovianNondivisible: return "TimeDependentMarkovian-Nondivisible";
    case Regime::NonMarkovian: return "NonMarkovian";
    case Regime::Unphysical: return "Unphysical";
    }
    return "Unknown";
}

RegimeReport classify(EquationKind kind, const MapParams& p, const ClassifyOptions& opt) {
    RegimeReport rep;
    rep.physical_flag = p.physical(kind);
    rep.positivity = scan_positivity(kind, p, opt.tau_max, opt.tau_points, opt.positivity_samples);
    rep.cp = scan_complete_positivity(kind, p, opt.tau_max, opt.tau_points, opt.cp_tol);
    rep.divisibility =
        scan_divisibility(kind, p, opt.tau_max, opt.divisibility_grid, opt.divisibility_tol);

    MeasureOptions mo;
    mo.tau_end = opt.tau_max;
    mo.budget = opt.measure_budget;
    mo.seed = opt.seed;
    rep.measure = measure(kind, p, mo);
    rep.backflow_intervals = rep.measure.argmax_intervals;

    if (!rep.physical_flag || !rep.positivity.positive) {
        rep.regime = Regime::Unphysical;
    } else if (rep.measure.value > opt.measure_threshold) {
        rep.regime = Regime::NonMarkovian;
    } else if (!rep.divisibility.divisible) {
        rep.regime = Regime::TimeDependentMarkovianNondivisible;
    } else {
        rep.regime = Regime::TimeDependentMarkovianDivisible;
    }
    return rep;
}

} // namespace memkernel

// map_engine.cpp — Closed-form ξ functions, snapshots, map application and TCL rates

#include "memkernel/map_engine.hpp"

#include "memkernel/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace memkernel {

std::string_view to_string(EquationKind kind) noexcept {
    return kind == EquationKind::MemoryKernel ? "memory-kernel" : "post-markovian";
}

std::optional<EquationKind> parse_kind(std::string_view text) noexcept {
    if (text == "mem" || text == "memory-kernel" || text == "memory_kernel") {
        return EquationKind::MemoryKernel;
    }
    if (text == "post" || text == "post-markovian" || text == "post_markovian") {
        return EquationKind::PostMarkovian;
    }
    return std::nullopt;
}

MapParams::MapParams(double gamma0_, double gamma_, double n_occ_)
    : gamma0(gamma0_), gamma(gamma_), n_occ(n_occ_) {
    if (!std::isfinite(gamma0) || !std::isfinite(gamma) || !std::isfinite(n_occ)) {
        throw std::invalid_argument("MapParams: parameters must be finite");
    }
    if (gamma0 < 0.0) throw std::invalid_argument("MapParams: gamma0 must be >= 0");
    if (gamma <= 0.0) throw std::invalid_argument("MapParams: gamma must be > 0");
    if (n_occ < 0.0) throw std::invalid_argument("MapParams: N must be >= 0");
}

MapParams MapParams::from_ratio(double R, double n_occ) {
    if (!std::isfinite(R) || R < 0.0) {
        throw std::invalid_argument("MapParams: R must be finite and >= 0");
    }
    if (!std::isfinite(n_occ) || n_occ < 0.0) {
        throw std::invalid_argument("MapParams: N must be finite and >= 0");
    }
    return MapParams(R / (2.0 * n_occ + 1.0), 1.0, n_occ);
}

bool MapParams::physical(EquationKind kind) const noexcept {
    return kind == EquationKind::PostMarkovian || 4.0 * ratio() <= 1.0;
}

namespace {

constexpr double kBranchTolerance = 1e-12;
constexpr double kTaylorCutoff = 1e-4;

double sinhc(double x) {
    if (std::abs(x) < kTaylorCutoff) {
        const double x2 = x * x;
        return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sinh(x) / x;
}

double sinc(double x) {
    if (std::abs(x) < kTaylorCutoff) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

enum class Branch { Hyperbolic, Degenerate, Trigonometric };

// ξ solves ξ'' + 2aξ' + Rξ = 0 with ξ(0) = 1, ξ'(0) = 0, where a = ½ for the
// memory kernel and a = (1 + R)/2 for the post-Markovian kernel. Characteristic
// roots −a ± d with d² = a² − R.
struct Shape {
    double a{0.0};
    double d2{0.0};
    Branch branch{Branch::Hyperbolic};
};

Shape shape_of(EquationKind kind, double R) {
    Shape s;
    if (kind == EquationKind::MemoryKernel) {
        s.a = 0.5;
        s.d2 = 0.25 - R;
        if (std::abs(4.0 * R - 1.0) <= kBranchTolerance) s.branch = Branch::Degenerate;
    } else {
        s.a = 0.5 * (1.0 + R);
        s.d2 = 0.25 * (1.0 - R) * (1.0 - R);
        if (std::abs(R - 1.0) <= kBranchTolerance) s.branch = Branch::Degenerate;
    }
    if (s.branch != Branch::Degenerate) {
        s.branch = s.d2 > 0.0 ? Branch::Hyperbolic
                 : s.d2 < 0.0 ? Branch::Trigonometric
                              : Branch::Degenerate;
    }
    return s;
}

void check_domain(double R, double tau) {
    if (!std::isfinite(R) || !std::isfinite(tau)) {
        throw std::invalid_argument("xi: non-finite argument");
    }
    if (R < 0.0) throw std::invalid_argument("xi: R must be >= 0");
    if (tau < 0.0) throw std::invalid_argument("xi: tau must be >= 0");
}

struct XiPair {
    double value;
    double slope;  // dξ/dτ
};

XiPair evaluate(EquationKind kind, double R, double tau) {
    check_domain(R, tau);
    if (R == 0.0) return {1.0, 0.0};

    const Shape s = shape_of(kind, R);
    const double a = s.a;
    switch (s.branch) {
    case Branch::Degenerate: {
        const double e = std::exp(-a * tau);
        return {e * (1.0 + a * tau), -R * tau * e};
    }
    case Branch::Trigonometric: {
        const double q = std::sqrt(-s.d2);
        const double e = std::exp(-a * tau);
        const double sc = sinc(q * tau);
        return {e * (std::cos(q * tau) + a * tau * sc), -R * tau * e * sc};
    }
    case Branch::Hyperbolic:
        break;
    }

    const double d = std::sqrt(s.d2);
    const double x = d * tau;
    if (x <= 1.0) {
        const double e = std::exp(-a * tau);
        const double sh = sinhc(x);
        return {e * (std::cosh(x) + a * tau * sh), -R * tau * e * sh};
    }
    // e^{-aτ}cosh(dτ) and e^{-aτ}sinh(dτ) split into the two decaying modes;
    // a − d = R/(a + d) keeps the slow rate accurate for small R.
    const double slow = std::exp(-(R / (a + d)) * tau);
    const double fast = std::exp(-(a + d) * tau);
    const double half_diff = 0.5 * (slow - fast) / d;
    return {0.5 * (slow + fast) + a * half_diff, -R * half_diff};
}

} // namespace

double xi(EquationKind kind, double R, double tau) {
    return evaluate(kind, R, tau).value;
}

double xi_derivative(EquationKind kind, double R, double tau) {
    return evaluate(kind, R, tau).slope;
}

std::optional<double> xi_first_zero(EquationKind kind, double R) {
    check_domain(R, 0.0);
    if (R == 0.0) return std::nullopt;
    const Shape s = shape_of(kind, R);
    if (s.branch != Branch::Trigonometric) return std::nullopt;
    // cos(qτ) + (a/q) sin(qτ) = 0  ⇒  qτ = π − atan(q/a)
    const double q = std::sqrt(-s.d2);
    return (std::numbers::pi - std::atan(q / s.a)) / q;
}

MapSnapshot snapshot(EquationKind kind, const MapParams& p, double tau) {
    const double R = p.ratio();
    const double l3 = xi(kind, R, tau);
    return {xi(kind, 0.5 * R, tau), l3, (l3 - 1.0) / (2.0 * p.n_occ + 1.0)};
}

AppliedState apply(const MapSnapshot& snap, const QubitState& s) {
    require_valid(s, "apply");
    const double pe = snap.u() * s.population_e() + snap.v() * s.population_g();
    const QubitState out{pe, snap.z() * s.coherence()};
    return {out, validate_state(out)};
}

TclRates tcl_rates(EquationKind kind, const MapParams& p, double tau) {
    const double R = p.ratio();
    check_domain(R, tau);
    for (const double r : {R, 0.5 * R}) {
        if (const auto zero = xi_first_zero(kind, r); zero && tau >= *zero) {
            throw SingularRate("tcl_rates: xi(" + std::to_string(r) +
                                   ") crosses zero at t = " + std::to_string(p.to_time(*zero)),
                               p.to_time(*zero));
        }
    }
    const XiPair full = evaluate(kind, R, tau);
    const XiPair half = evaluate(kind, 0.5 * R, tau);
    // logarithmic derivatives in physical time
    const double log_full = p.gamma * full.slope / full.value;
    const double log_half = p.gamma * half.slope / half.value;

    const double common = -log_full / (2.0 * p.n_occ + 1.0);
    TclRates rates;
    rates.gamma1 = (p.n_occ + 1.0) * common;
    rates.gamma2 = p.n_occ * common;
    rates.gamma3 = 0.5 * (0.5 * log_full - log_half);
    return rates;
}

} // namespace memkernel

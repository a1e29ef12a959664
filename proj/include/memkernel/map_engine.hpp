// map_engine.hpp — Closed-form dynamical maps of the two memory-kernel equations
//
// Both equations share the damping-basis structure
//     λ₁ = λ₂ = ξ(R/2, τ),  λ₃ = ξ(R, τ),  T₁ = T₂ = 0,  T₃ = (ξ(R, τ) − 1)/(2N + 1)
// with R = γ₀(2N + 1)/γ and the dimensionless time τ = γt. Only the scalar decay
// profile ξ differs between the memory-kernel and the post-Markovian equation.

#pragma once

#include "memkernel/qubit.hpp"

#include <optional>
#include <string_view>

namespace memkernel {

enum class EquationKind { MemoryKernel, PostMarkovian };

std::string_view to_string(EquationKind kind) noexcept;
// Accepts "mem"/"memory-kernel" and "post"/"post-markovian".
std::optional<EquationKind> parse_kind(std::string_view text) noexcept;

// Physical parameters: γ₀ (dissipation constant), γ (kernel rate), N (thermal occupation).
struct MapParams {
    double gamma0{0.0};
    double gamma{1.0};
    double n_occ{0.0};

    MapParams() = default;
    // Throws std::invalid_argument unless γ₀ ≥ 0, γ > 0, N ≥ 0, all finite.
    MapParams(double gamma0, double gamma, double n_occ);

    // γ is the time unit: γ = 1, γ₀ = R/(2N + 1).
    static MapParams from_ratio(double R, double n_occ);

    // R = γ₀(2N + 1)/γ
    double ratio() const noexcept { return gamma0 * (2.0 * n_occ + 1.0) / gamma; }
    // 4R ≤ 1 for the memory kernel; the post-Markovian map has no restriction.
    bool physical(EquationKind kind) const noexcept;
    // τ = γt
    double to_tau(double t) const noexcept { return gamma * t; }
    double to_time(double tau) const noexcept { return tau / gamma; }
};

// Affine Bloch map at a fixed time: (x, y, z) ↦ (λ₁x, λ₁y, λ₃z + T₃).
struct MapSnapshot {
    double lambda1{1.0};
    double lambda3{1.0};
    double t3{0.0};

    static constexpr MapSnapshot identity() { return {}; }

    double u() const noexcept { return 0.5 * (1.0 + t3 + lambda3); }
    double v() const noexcept { return 0.5 * (1.0 + t3 - lambda3); }
    double z() const noexcept { return lambda1; }
};

// Rates of the equivalent time-local (TCL) master equation, physical units.
struct TclRates {
    double gamma1{0.0};  // emission
    double gamma2{0.0};  // absorption
    double gamma3{0.0};  // dephasing
};

struct AppliedState {
    QubitState state;
    bool valid{true};
};

// ξ(R, τ). Throws std::invalid_argument for R < 0, τ < 0 or non-finite input.
double xi(EquationKind kind, double R, double tau);

// dξ/dτ in closed form, same domain as xi().
double xi_derivative(EquationKind kind, double R, double tau);

// First τ > 0 with ξ(R, τ) = 0; only the oscillatory memory-kernel branch (4R > 1) has one.
std::optional<double> xi_first_zero(EquationKind kind, double R);

MapSnapshot snapshot(EquationKind kind, const MapParams& p, double tau);

// ρ₁₁′ = uρ₁₁ + vρ₀₀, ρ₁₀′ = zρ₁₀. The image is never clamped; `valid` reports
// whether it is still a density matrix. Throws InvalidState for an invalid input.
AppliedState apply(const MapSnapshot& snap, const QubitState& s);

// Throws SingularRate if τ is at or past the first zero of ξ(R) or ξ(R/2).
TclRates tcl_rates(EquationKind kind, const MapParams& p, double tau);

} // namespace memkernel

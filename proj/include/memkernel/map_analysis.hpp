// map_analysis.hpp — Choi matrices, positivity, divisibility and regime classification
//
// Choi convention (fixed project-wide): C = Σᵢⱼ |i⟩⟨j| ⊗ Φ(|i⟩⟨j|), input index on
// the first tensor factor, basis index 2i + k, unnormalized so Tr C = 2.

#pragma once

#include "memkernel/blp.hpp"
#include "memkernel/map_engine.hpp"
#include "memkernel/qubit.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace memkernel {

class ChoiMatrix {
public:
    // Throws std::invalid_argument unless Hermitian within 1e−12.
    explicit ChoiMatrix(const Eigen::Matrix4cd& m);

    const Eigen::Matrix4cd& matrix() const noexcept { return m_; }
    // Tr over the output factor; the identity for trace-preserving maps.
    Eigen::Matrix2cd partial_trace_output() const;
    Eigen::Vector4d eigenvalues() const;  // ascending

private:
    Eigen::Matrix4cd m_;
};

// Φ(τ₂, τ₁) = Φ(τ₂)∘Φ(τ₁)⁻¹, stored as an affine Bloch map.
struct IntermediateMap {
    double tau1{0.0};
    double tau2{0.0};
    MapSnapshot map;
};

struct CpVerdict {
    bool completely_positive{true};
    double min_eigenvalue{0.0};
};

struct PositivityVerdict {
    bool positive{true};
    double max_bloch_norm{0.0};
    QubitState witness;  // pure input with the largest image norm
};

ChoiMatrix choi_of(const MapSnapshot& snap);

CpVerdict is_completely_positive(const ChoiMatrix& c, double tol);

// Largest output Bloch norm over pure inputs: icosphere with ≥ samples vertices,
// then seeded coordinate refinement in (θ, φ). samples ≥ 1000.
PositivityVerdict is_positive(const MapSnapshot& snap, std::size_t samples,
                              std::uint64_t seed = 7);

// Requires 0 ≤ τ₁ ≤ τ₂; throws NonInvertibleMap if λ₁(τ₁) or λ₃(τ₁) vanishes.
IntermediateMap intermediate_map(EquationKind kind, const MapParams& p, double tau1, double tau2);

// ---- scans over τ -----------------------------------------------------------

struct CpScan {
    double min_eigenvalue{0.0};
    double tau_at_min{0.0};
    bool completely_positive{true};
};

struct PositivityScan {
    bool positive{true};
    double max_bloch_norm{0.0};
    double tau_at_max{0.0};
    QubitState witness;
};

struct DivisibilityScan {
    double min_eigenvalue{0.0};
    double tau1{0.0};
    double tau2{0.0};
    bool divisible{true};
};

// CP of Φ(τ) on a uniform grid of `points` over [0, tau_max].
CpScan scan_complete_positivity(EquationKind kind, const MapParams& p, double tau_max,
                                std::size_t points, double tol = 1e-10);

PositivityScan scan_positivity(EquationKind kind, const MapParams& p, double tau_max,
                               std::size_t points, std::size_t samples = 1000);

// Min Choi eigenvalue of Φ(τ₂, τ₁) over a grid×grid scan of [0, tau_max]², refined
// locally around the most negative cell. Grid points past a zero of ξ are skipped.
DivisibilityScan scan_divisibility(EquationKind kind, const MapParams& p, double tau_max = 20.0,
                                   std::size_t grid = 200, double tol = 1e-9);

// Smallest N in [0, n_max] for which the map with ratio R is CP on [0, tau_max]
// (bisection to n_tol, assuming CP is monotone in N). Returns n_max if none is found.
double cp_temperature_threshold(EquationKind kind, double R, double tau_max, std::size_t points,
                                double n_max = 100.0, double n_tol = 1e-4);

// ---- classification ---------------------------------------------------------

enum class Regime {
    TimeDependentMarkovianDivisible,
    TimeDependentMarkovianNondivisible,
    NonMarkovian,
    Unphysical,
};

std::string_view to_string(Regime r) noexcept;

struct ClassifyOptions {
    double tau_max{20.0};
    std::size_t tau_points{200};
    std::size_t positivity_samples{1000};
    std::size_t divisibility_grid{200};
    std::size_t measure_budget{200};
    double cp_tol{1e-10};
    double divisibility_tol{1e-9};
    double measure_threshold{1e-8};
    std::uint64_t seed{MeasureOptions{}.seed};
};

struct RegimeReport {
    Regime regime{Regime::TimeDependentMarkovianDivisible};
    bool physical_flag{true};  // 4R ≤ 1 for the memory kernel
    PositivityScan positivity;
    CpScan cp;
    DivisibilityScan divisibility;
    MeasureResult measure;
    // σ > 0 intervals of the measure's argmax pair (diagnostic when Unphysical)
    std::vector<PositiveInterval> backflow_intervals;
};

RegimeReport classify(EquationKind kind, const MapParams& p, const ClassifyOptions& opt = {});

} // namespace memkernel

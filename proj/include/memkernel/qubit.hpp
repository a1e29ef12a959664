// qubit.hpp — Spin-1/2 states, validity gate, Bloch view and trace distance
//
// Basis convention: |1⟩ is the excited level, |0⟩ the ground level. A state
// stores ρ₁₁ = ⟨1|ρ|1⟩ and ρ₁₀ = ⟨1|ρ|0⟩; ρ₀₀ = 1 − ρ₁₁ and ρ₀₁ = conj(ρ₁₀)
// are implied, so trace one and Hermiticity hold by construction.

#pragma once

#include <Eigen/Core>

#include <complex>

namespace memkernel {

using cdouble = std::complex<double>;

// Tolerance of the positivity (determinant) test.
inline constexpr double kStateTolerance = 1e-12;

struct BlochVector {
    double x{0.0};
    double y{0.0};
    double z{0.0};

    double norm() const noexcept;
};

// A 2×2 density matrix. Construction does not validate: images of
// non-positive maps are representable and checked with validate_state().
class QubitState {
public:
    constexpr QubitState() = default;
    constexpr QubitState(double population_e, cdouble coherence)
        : population_e_(population_e), coherence_(coherence) {}

    static constexpr QubitState excited() { return {1.0, 0.0}; }
    static constexpr QubitState ground() { return {0.0, 0.0}; }
    static constexpr QubitState maximally_mixed() { return {0.5, 0.0}; }
    static QubitState from_bloch(const BlochVector& r);

    constexpr double population_e() const noexcept { return population_e_; }
    constexpr double population_g() const noexcept { return 1.0 - population_e_; }
    constexpr cdouble coherence() const noexcept { return coherence_; }

    // Full matrix in the {|0⟩, |1⟩} ordering.
    Eigen::Matrix2cd matrix() const;

    friend constexpr bool operator==(const QubitState&, const QubitState&) = default;

private:
    double population_e_{0.5};
    cdouble coherence_{0.0, 0.0};
};

// Two initial states with the population/coherence differences a₀, b₀
// recomputed on every access.
struct StatePair {
    QubitState first;
    QubitState second;

    double a0() const noexcept { return first.population_e() - second.population_e(); }
    cdouble b0() const noexcept { return first.coherence() - second.coherence(); }
    bool identical() const noexcept { return a0() == 0.0 && b0() == cdouble{0.0, 0.0}; }
};

// Trace one, Hermitian (structural) and positive semidefinite within kStateTolerance.
bool validate_state(const QubitState& s) noexcept;

// Throws InvalidState when validate_state() fails; `what` names the caller.
void require_valid(const QubitState& s, const char* what);

BlochVector bloch_of(const QubitState& s) noexcept;

// ½·Tr|ρ₁ − ρ₂| = √(a² + |b|²). Both inputs must be valid states.
double trace_distance(const QubitState& s1, const QubitState& s2);

// Same formula without the validity gate; used on raw images of maps that
// may violate positivity (diagnostic regimes).
double raw_trace_distance(const QubitState& s1, const QubitState& s2) noexcept;

} // namespace memkernel

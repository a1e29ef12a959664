// qubit.cpp — Spin-1/2 states, validity gate, Bloch view and trace distance

#include "memkernel/qubit.hpp"

#include "memkernel/errors.hpp"

#include <cmath>
#include <string>

namespace memkernel {

double BlochVector::norm() const noexcept {
    return std::sqrt(x * x + y * y + z * z);
}

QubitState QubitState::from_bloch(const BlochVector& r) {
    return {0.5 * (1.0 + r.z), cdouble{0.5 * r.x, 0.5 * r.y}};
}

Eigen::Matrix2cd QubitState::matrix() const {
    Eigen::Matrix2cd rho;
    rho << population_g(), std::conj(coherence_),
           coherence_,     population_e_;
    return rho;
}

bool validate_state(const QubitState& s) noexcept {
    const double pe = s.population_e();
    const cdouble b = s.coherence();
    if (!std::isfinite(pe) || !std::isfinite(b.real()) || !std::isfinite(b.imag())) {
        return false;
    }
    if (pe < -kStateTolerance || pe > 1.0 + kStateTolerance) {
        return false;
    }
    // det ρ = pₑ(1 − pₑ) − |b|² ≥ 0
    return pe * (1.0 - pe) - std::norm(b) >= -kStateTolerance;
}

void require_valid(const QubitState& s, const char* what) {
    if (!validate_state(s)) {
        throw InvalidState(std::string(what) + ": invalid density matrix (pe=" +
                           std::to_string(s.population_e()) + ", |b|^2=" +
                           std::to_string(std::norm(s.coherence())) + ")");
    }
}

BlochVector bloch_of(const QubitState& s) noexcept {
    return {2.0 * s.coherence().real(), 2.0 * s.coherence().imag(),
            2.0 * s.population_e() - 1.0};
}

double raw_trace_distance(const QubitState& s1, const QubitState& s2) noexcept {
    const double a = s1.population_e() - s2.population_e();
    const cdouble b = s1.coherence() - s2.coherence();
    return std::sqrt(a * a + std::norm(b));
}

double trace_distance(const QubitState& s1, const QubitState& s2) {
    require_valid(s1, "trace_distance");
    require_valid(s2, "trace_distance");
    return raw_trace_distance(s1, s2);
}

} // namespace memkernel

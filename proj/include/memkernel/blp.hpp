// blp.hpp — Trace-distance information flow and the non-Markovianity measure
//
// For a pair of initial states the trace distance evolves as
//     D(τ) = √(a₀²ξ(R,τ)² + |b₀|²ξ(R/2,τ)²)
// and σ = dD/dt. The measure is the largest total increase of D over all pairs.
// All time grids are dimensionless (τ = γt); σ is returned in physical units.

#pragma once

#include "memkernel/map_engine.hpp"
#include "memkernel/qubit.hpp"

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace memkernel {

struct PositiveInterval {
    double tau_start{0.0};
    double tau_end{0.0};
    double gain{0.0};  // D(tau_end) − D(tau_start)
};

struct FlowReport {
    StatePair pair;
    std::vector<double> taus;
    std::vector<double> distance;
    std::vector<double> sigma;     // analytic
    std::vector<double> sigma_fd;  // central differences of D
    double fd_max_deviation{0.0};  // max |σ − σ_fd| on smooth points
    std::vector<PositiveInterval> positive_intervals;
    double total_gain{0.0};
};

enum class SigmaMethod { Analytic, FiniteDifference };
std::string_view to_string(SigmaMethod m) noexcept;

struct MeasureResult {
    double value{0.0};
    StatePair argmax_pair;
    std::size_t evaluations{0};
    SigmaMethod method{SigmaMethod::Analytic};
    // No further gain is possible beyond tau_end (monotone regime or ξ < 1e−6 there).
    bool tail_certified{false};
    std::vector<PositiveInterval> argmax_intervals;
};

struct MeasureOptions {
    double tau_end{20.0};
    std::size_t budget{1000};
    std::size_t grid_points{2001};
    std::uint64_t seed{0x5eed2010u};
};

// σ(τ) for a pair; throws DegeneratePair for identical states and InvalidState
// for invalid ones. Returns 0 where D(τ) vanishes.
double sigma_analytic(EquationKind kind, const MapParams& p, const StatePair& pair, double tau);

// Trace distance of the evolved pair at τ via snapshot/apply (no positivity gate on the images).
double evolved_distance(EquationKind kind, const MapParams& p, const StatePair& pair, double tau);

// grid_points ≥ 100 on [0, tau_end].
FlowReport flow_report(EquationKind kind, const MapParams& p, const StatePair& pair,
                       double tau_end, std::size_t grid_points);

// Antipodal pure pairs on an icosphere, then coordinate ascent over general pairs
// from the best antipodal pair and from budget/10 seeded random pairs. budget ≥ 100.
MeasureResult measure(EquationKind kind, const MapParams& p, double tau_end, std::size_t budget);
MeasureResult measure(EquationKind kind, const MapParams& p, const MeasureOptions& opt);

} // namespace memkernel

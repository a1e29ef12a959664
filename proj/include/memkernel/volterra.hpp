// volterra.hpp — Direct numerical integration of the two integro-differential equations
//
// Independent of the closed forms in map_engine: the memory-kernel and
// post-Markovian equations are integrated either through their equivalent
// local (augmented) systems with an adaptive Runge–Kutta pair, or by direct
// trapezoidal quadrature of the memory integral. The time-local rewriting with
// map_engine's TCL rates is integrated here as well.
//
// States are carried in the coherence-vector representation
//     (ρ₁₁, Re ρ₁₀, Im ρ₁₀, Tr ρ)
// in which the Markovian superoperator is a real 4×4 matrix.

#pragma once

#include "memkernel/map_engine.hpp"
#include "memkernel/ode.hpp"
#include "memkernel/qubit.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace memkernel {

using CoherenceVector = Eigen::Vector4d;

CoherenceVector to_coherence_vector(const QubitState& s) noexcept;
// Drops the trace component (tracked separately as a residual).
QubitState from_coherence_vector(const CoherenceVector& v) noexcept;

// Markovian superoperator with emission rate γ₀(N+1) and absorption rate γ₀N.
class GeneratorMatrix {
public:
    explicit GeneratorMatrix(const MapParams& p);

    const Eigen::Matrix4d& matrix() const noexcept { return m_; }
    CoherenceVector operator()(const CoherenceVector& v) const { return m_ * v; }

private:
    Eigen::Matrix4d m_;
};

struct IntegratorMetadata {
    std::size_t steps{0};          // accepted steps (quadrature: grid steps)
    std::size_t rejected{0};
    double max_trace_residual{0};  // max |Tr ρ − 1| along the trajectory
};

// Sampled solution; `times` are physical, the auxiliary path holds the memory
// integral state (zero for the time-local equation).
struct AugmentedTrajectory {
    std::vector<double> times;
    std::vector<QubitState> states;
    std::vector<CoherenceVector> auxiliary;
    IntegratorMetadata meta;
};

inline constexpr std::size_t kDefaultOutputPoints = 201;

// dρ/dt = n, dn/dt = γ𝓛ρ − γn (exact for the kernel k(t) = γe^{−γt}).
// tol ∈ [1e−12, 1e−4]; t_end > 0 in physical time.
AugmentedTrajectory integrate_memory_kernel(const GeneratorMatrix& g, const MapParams& p,
                                            const QubitState& s0, double t_end, double tol,
                                            std::size_t output_points = kDefaultOutputPoints);

// dρ/dt = 𝓛m, dm/dt = γρ + (𝓛 − γ)m.
AugmentedTrajectory integrate_post_markovian(const GeneratorMatrix& g, const MapParams& p,
                                             const QubitState& s0, double t_end, double tol,
                                             std::size_t output_points = kDefaultOutputPoints);

AugmentedTrajectory integrate_augmented(EquationKind kind, const GeneratorMatrix& g,
                                        const MapParams& p, const QubitState& s0,
                                        double t_end, double tol,
                                        std::size_t output_points = kDefaultOutputPoints);

// Trapezoidal Volterra scheme on a uniform grid of `steps` intervals (steps ≥ 100);
// second order in the step. Returns every grid point.
AugmentedTrajectory integrate_quadrature(EquationKind kind, const GeneratorMatrix& g,
                                         const MapParams& p, const QubitState& s0,
                                         double t_end, std::size_t steps);

// Time-local equation with the rates of tcl_rates(). Throws SingularRate when ξ has a
// zero inside [0, t_end].
AugmentedTrajectory integrate_tcl(EquationKind kind, const MapParams& p, const QubitState& s0,
                                  double t_end, double tol,
                                  std::size_t output_points = kDefaultOutputPoints);

// Max over the trajectory of |Δρ₁₁|, |ΔRe ρ₁₀|, |ΔIm ρ₁₀| against snapshot/apply.
double max_deviation_from_closed_form(EquationKind kind, const MapParams& p,
                                      const QubitState& s0, const AugmentedTrajectory& traj);

} // namespace memkernel

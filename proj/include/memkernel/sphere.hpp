// sphere.hpp — Deterministic point sets on the unit sphere

#pragma once

#include "memkernel/qubit.hpp"

#include <cstddef>
#include <vector>

namespace memkernel::sphere {

// Vertices of a subdivided icosahedron, projected to the unit sphere.
// Level k has 10·4ᵏ + 2 vertices.
std::vector<BlochVector> icosphere(int level);

// Smallest icosphere with at least `min_vertices` vertices.
std::vector<BlochVector> icosphere_at_least(std::size_t min_vertices);

// Unit vector from polar angle θ ∈ [0, π] and azimuth φ.
BlochVector from_angles(double theta, double phi) noexcept;

} // namespace memkernel::sphere

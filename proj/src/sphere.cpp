// sphere.cpp — Icosphere construction by edge-midpoint subdivision

#include "memkernel/sphere.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>

namespace memkernel::sphere {

namespace {

BlochVector normalized(BlochVector v) {
    const double n = v.norm();
    return {v.x / n, v.y / n, v.z / n};
}

} // namespace

std::vector<BlochVector> icosphere(int level) {
    if (level < 0 || level > 8) throw std::invalid_argument("icosphere: level must be in [0, 8]");

    const double t = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<BlochVector> verts = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0},
        {0, -1, t}, {0, 1, t}, {0, -1, -t}, {0, 1, -t},
        {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
    };
    for (auto& v : verts) v = normalized(v);

    using Face = std::array<std::uint32_t, 3>;
    std::vector<Face> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
        {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
        {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
    };

    for (int l = 0; l < level; ++l) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
        auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
            const auto key = std::minmax(a, b);
            if (auto it = midpoints.find(key); it != midpoints.end()) return it->second;
            const BlochVector& p = verts[a];
            const BlochVector& q = verts[b];
            verts.push_back(normalized({p.x + q.x, p.y + q.y, p.z + q.z}));
            const auto idx = static_cast<std::uint32_t>(verts.size() - 1);
            midpoints.emplace(key, idx);
            return idx;
        };
        std::vector<Face> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const auto ab = midpoint(f[0], f[1]);
            const auto bc = midpoint(f[1], f[2]);
            const auto ca = midpoint(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    return verts;
}

std::vector<BlochVector> icosphere_at_least(std::size_t min_vertices) {
    int level = 0;
    while (10 * (std::size_t{1} << (2 * level)) + 2 < min_vertices) ++level;
    return icosphere(level);
}

BlochVector from_angles(double theta, double phi) noexcept {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

} // namespace memkernel::sphere

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "knotlab/braid.hpp"
#include "knotlab/diagram.hpp"
#include "knotlab/geometry.hpp"
#include "knotlab/grid.hpp"
#include "knotlab/rng.hpp"
#include "knotlab/samplers.hpp"

namespace knotlab::test {

inline std::string fixture(const std::string& name) { return std::string(KNOTLAB_FIXTURES) + "/" + name; }

inline std::vector<int> identity_perm(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    return p;
}

// Brute-force count of (vertical, horizontal) segment pairs that cross strictly inside both.
inline std::size_t grid_crossings_brute(const GridDiagram& g) {
    const int n = static_cast<int>(g.size());
    std::size_t count = 0;
    for (int i = 0; i < n; ++i) {
        const int x = g.rho[i];
        const int y0 = std::min(g.sigma[i], g.sigma[(i + 1) % n]), y1 = std::max(g.sigma[i], g.sigma[(i + 1) % n]);
        for (int j = 0; j < n; ++j) {
            const int y = g.sigma[(j + 1) % n];
            const int x0 = std::min(g.rho[j], g.rho[(j + 1) % n]), x1 = std::max(g.rho[j], g.rho[(j + 1) % n]);
            if (x0 < x && x < x1 && y0 < y && y < y1) ++count;
        }
    }
    return count;
}

// The grid curve in space: each vertical bulges up to z = 1 and each horizontal dips to z = 0, so
// viewed from +z every vertical passes over. Bend points sit at an irrational fraction of each
// segment to keep them off the integer lattice.
inline Polygon3D grid_polygon(const GridDiagram& g) {
    const int n = static_cast<int>(g.size());
    const double f = 0.3183098861837907;
    std::vector<Vec3> pts;
    for (int i = 0; i < n; ++i) {
        const double x = g.rho[i], xn = g.rho[(i + 1) % n];
        const double y = g.sigma[i], yn = g.sigma[(i + 1) % n];
        pts.push_back({x, y, 0.5});
        pts.push_back({x, y + f * (yn - y), 1.0});
        pts.push_back({x, yn, 0.5});
        pts.push_back({x + f * (xn - x), yn, 0.0});
    }
    return Polygon3D{{pts}};
}

inline DiagramCode random_petal_diagram(int petals, RandomStream& rng) {
    return grid_to_diagram(petal_to_grid(sample_petaluma(petals, rng)));
}

// One knot diagram from each knot-producing model, for property tests.
inline std::vector<DiagramCode> assorted_knots(std::uint64_t seed, int per_model) {
    std::vector<DiagramCode> out;
    for (int i = 0; i < per_model; ++i) {
        RandomStream rng(Seed{seed, static_cast<std::uint64_t>(i)});
        out.push_back(random_petal_diagram(11, rng));
        out.push_back(grid_to_diagram(sample_grid(9, rng)));
        out.push_back(sample_griddle(9, rng));
        out.push_back(project_generic(sample_jump({9}, JumpDomain::Cube, rng), rng));
        out.push_back(sample_crisscross({CrisscrossBase::Star, 3, 0}, rng));
    }
    return out;
}

}  // namespace knotlab::test

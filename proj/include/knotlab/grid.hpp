#pragma once

#include <vector>

#include "knotlab/braid.hpp"
#include "knotlab/diagram.hpp"

namespace knotlab {

// Vertical segment i sits at x = rho[i] from y = sigma[i] to sigma[i+1]; the
// horizontal segment i then runs at y = sigma[i+1] to x = rho[i+1].
struct GridDiagram {
    std::vector<int> rho;
    std::vector<int> sigma;
    std::size_t size() const { return rho.size(); }
};

struct PetalPermutation {
    std::vector<int> heights;
    int petals() const { return static_cast<int>(heights.size()); }
};

bool is_permutation(const std::vector<int>& p);
void require_valid(const GridDiagram& g);
void require_valid(const PetalPermutation& p);

DiagramCode grid_to_diagram(const GridDiagram& g);

// rho(k) = n k mod (2n+1), sigma = heights.
GridDiagram petal_to_grid(const PetalPermutation& p);

// Closed-braid form of a grid diagram: right-to-left horizontals are routed
// around the back, every column becomes a run of generators.
BraidWord grid_to_braid(const GridDiagram& g);

}  // namespace knotlab

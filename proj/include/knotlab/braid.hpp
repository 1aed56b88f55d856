#pragma once

#include <vector>

#include "knotlab/diagram.hpp"

namespace knotlab {

enum class Closure { Trace, Plat };

struct BraidWord {
    int strands = 2;
    std::vector<int> letters;
    Closure closure = Closure::Trace;
};

// How the braid ends are joined. For each end position: a cap partner on the
// same side, or kThrough to join the same position on the other side.
struct EndPairing {
    static constexpr int kThrough = -1;
    std::vector<int> left;
    std::vector<int> right;
};

void require_valid(const BraidWord& b);

DiagramCode braid_closure_to_diagram(const BraidWord& b);
DiagramCode close_braid(int strands, const std::vector<int>& letters, const EndPairing& ends);

// Strand permutation: position at the right end of the strand that starts at position i.
std::vector<int> braid_permutation(int strands, const std::vector<int>& letters);

std::vector<int> flat_torus_word(int p, int q);
DiagramCode flat_torus_diagram(int p, int q, const std::vector<int>& signs);

// Billiard curve with ratio b:a as a braid on a passes: b-1 layers alternating
// odd and even generators. Letters are all positive here; samplers flip them.
struct BilliardBase {
    int strands = 0;
    std::vector<int> letters;
    EndPairing ends;
};
BilliardBase billiard_base(int b, int a);

}  // namespace knotlab

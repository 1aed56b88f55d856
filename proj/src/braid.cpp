#include "knotlab/braid.hpp"

#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <string>

namespace knotlab {

void require_valid(const BraidWord& b) {
    if (b.strands < 2) throw std::invalid_argument("braid needs at least 2 strands");
    for (std::size_t i = 0; i < b.letters.size(); ++i) {
        const int l = b.letters[i];
        if (l == 0 || std::abs(l) >= b.strands)
            throw std::invalid_argument("braid letter " + std::to_string(i) + " = " + std::to_string(l) +
                                        " out of range");
    }
    if (b.closure == Closure::Plat && b.strands % 2 != 0)
        throw std::invalid_argument("plat closure needs an even strand count");
}

namespace {

struct StrandTrack {
    std::vector<Component> visits;  // per strand, left to right; sign field holds the letter sign
    std::vector<int> end_pos;       // right-end position of strand
    std::vector<int> strand_at_end;
};

StrandTrack track(int m, const std::vector<int>& letters) {
    StrandTrack t;
    t.visits.resize(m);
    std::vector<int> at(m);
    std::iota(at.begin(), at.end(), 0);
    for (std::size_t id = 0; id < letters.size(); ++id) {
        const int l = letters[id];
        const int i = std::abs(l) - 1;
        if (l == 0 || i + 1 >= m) throw std::invalid_argument("braid letter out of range");
        const int s = l > 0 ? 1 : -1;
        const auto cid = static_cast<std::uint32_t>(id);
        // positive generator: strand from position i goes over
        t.visits[at[i]].push_back({cid, s > 0 ? Role::Over : Role::Under, s});
        t.visits[at[i + 1]].push_back({cid, s > 0 ? Role::Under : Role::Over, s});
        std::swap(at[i], at[i + 1]);
    }
    t.end_pos.resize(m);
    t.strand_at_end = at;
    for (int p = 0; p < m; ++p) t.end_pos[at[p]] = p;
    return t;
}

}  // namespace

std::vector<int> braid_permutation(int strands, const std::vector<int>& letters) {
    return track(strands, letters).end_pos;
}

DiagramCode close_braid(int m, const std::vector<int>& letters, const EndPairing& ends) {
    if (static_cast<int>(ends.left.size()) != m || static_cast<int>(ends.right.size()) != m)
        throw std::invalid_argument("end pairing size mismatch");
    for (int side = 0; side < 2; ++side) {
        const auto& e = side == 0 ? ends.left : ends.right;
        for (int p = 0; p < m; ++p) {
            const int q = e[p];
            if (q == EndPairing::kThrough) {
                const auto& other = side == 0 ? ends.right : ends.left;
                if (other[p] != EndPairing::kThrough) throw std::invalid_argument("through end unmatched");
            } else if (q < 0 || q >= m || q == p || e[q] != p) {
                throw std::invalid_argument("cap pairing is not an involution");
            }
        }
    }
    auto t = track(m, letters);
    // orientation of each strand: +1 left to right, -1 reversed, 0 unvisited
    std::vector<int> dir(m, 0);
    std::vector<std::vector<int>> order;  // per component: signed strand list (s+1 or -(s+1))
    for (int s0 = 0; s0 < m; ++s0) {
        if (dir[s0] != 0) continue;
        std::vector<int> comp;
        int s = s0, d = 1;
        while (dir[s] == 0) {
            dir[s] = d;
            comp.push_back(d > 0 ? s + 1 : -(s + 1));
            if (d > 0) {
                const int p = t.end_pos[s];
                const int q = ends.right[p];
                if (q == EndPairing::kThrough) {
                    s = p, d = 1;  // strand starting at left position p
                } else {
                    s = t.strand_at_end[q], d = -1;
                }
            } else {
                const int p = s;  // left position of strand s
                const int q = ends.left[p];
                if (q == EndPairing::kThrough) {
                    s = t.strand_at_end[p], d = -1;
                } else {
                    s = q, d = 1;
                }
            }
        }
        if (s != s0 || d != 1) throw std::logic_error("braid closure walk did not return to its start");
        order.push_back(std::move(comp));
    }
    // crossing sign: letter sign times the orientation of both strands
    std::vector<int> sgn(letters.size());
    for (std::size_t i = 0; i < letters.size(); ++i) sgn[i] = letters[i] > 0 ? 1 : -1;
    std::vector<int> flip(letters.size(), 1);
    for (int s = 0; s < m; ++s)
        for (const auto& v : t.visits[s]) flip[v.crossing] *= dir[s];
    std::vector<Component> comps;
    for (const auto& comp : order) {
        Component c;
        for (int e : comp) {
            const int s = std::abs(e) - 1;
            const auto& vis = t.visits[s];
            auto emit = [&](const CrossingVisit& v) {
                c.push_back({v.crossing, v.role, sgn[v.crossing] * flip[v.crossing]});
            };
            if (e > 0)
                for (const auto& v : vis) emit(v);
            else
                for (auto it = vis.rbegin(); it != vis.rend(); ++it) emit(*it);
        }
        comps.push_back(std::move(c));
    }
    return relabel_by_first_visit(DiagramCode(std::move(comps), letters.size()));
}

DiagramCode braid_closure_to_diagram(const BraidWord& b) {
    require_valid(b);
    EndPairing ends;
    ends.left.assign(b.strands, EndPairing::kThrough);
    ends.right.assign(b.strands, EndPairing::kThrough);
    if (b.closure == Closure::Plat) {
        for (int p = 0; p < b.strands; ++p) ends.left[p] = ends.right[p] = p ^ 1;
    }
    return close_braid(b.strands, b.letters, ends);
}

std::vector<int> flat_torus_word(int p, int q) {
    if (p < 2 || q < 1) throw std::invalid_argument("flat torus needs p >= 2 and q >= 1");
    std::vector<int> w;
    w.reserve(static_cast<std::size_t>(p - 1) * q);
    for (int r = 0; r < q; ++r)
        for (int i = 1; i < p; ++i) w.push_back(i);
    return w;
}

DiagramCode flat_torus_diagram(int p, int q, const std::vector<int>& signs) {
    auto w = flat_torus_word(p, q);
    if (signs.size() != w.size())
        throw std::invalid_argument("flat torus T(" + std::to_string(p) + "," + std::to_string(q) + ") needs " +
                                    std::to_string(w.size()) + " signs, got " + std::to_string(signs.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (signs[i] != 1 && signs[i] != -1) throw std::invalid_argument("signs must be +1 or -1");
        w[i] *= signs[i];
    }
    return braid_closure_to_diagram({p, std::move(w), Closure::Trace});
}

BilliardBase billiard_base(int b, int a) {
    if (a < 3 || b < 2) throw std::invalid_argument("billiard needs a >= 3 and b >= 2");
    if (std::gcd(a, b) != 1) throw std::invalid_argument("billiard ratio must be coprime");
    BilliardBase out;
    const int layers = b - 1;
    for (int layer = 0; layer < layers; ++layer)
        for (int g = (layer % 2 == 0) ? 1 : 2; g < a; g += 2) out.letters.push_back(g);
    // Caps sit on the pairs the adjacent layer does not touch; the leftover
    // extreme ends are joined around the outside.
    const bool last_odd = (layers - 1) % 2 == 0;
    std::vector<int> left(a, 0), right(a, 0);
    std::vector<int> free_left, free_right;
    auto cap = [](std::vector<int>& e, int start, int n, std::vector<int>& spare) {
        for (int p = 0; p < n; ++p) e[p] = -2;
        for (int p = start; p + 1 < n; p += 2) e[p] = p + 1, e[p + 1] = p;
        for (int p = 0; p < n; ++p)
            if (e[p] == -2) spare.push_back(p);
    };
    cap(left, 1, a, free_left);
    cap(right, last_odd ? 1 : 0, a, free_right);
    int m = a;
    if (free_left.size() == 2) {
        left[free_left[0]] = free_left[1], left[free_left[1]] = free_left[0];
    }
    if (free_right.size() == 2) {
        right[free_right[0]] = free_right[1], right[free_right[1]] = free_right[0];
    }
    if (free_left.size() == 1 && free_right.size() == 1) {
        if (free_left[0] == free_right[0]) {
            left[free_left[0]] = right[free_right[0]] = EndPairing::kThrough;
        } else {
            // top-left to bottom-right: route through an extra strand below everything
            m = a + 1;
            left.push_back(free_left[0]);
            right.push_back(free_right[0]);
            left[free_left[0]] = a;
            right[free_right[0]] = a;
        }
    } else if (free_left.size() + free_right.size() != 0 && free_left.size() != 2 && free_right.size() != 2) {
        throw std::logic_error("billiard end pairing failed");
    }
    out.strands = m;
    out.ends.left = std::move(left);
    out.ends.right = std::move(right);
    return out;
}

}  // namespace knotlab

#include "knotlab/grid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace knotlab {

bool is_permutation(const std::vector<int>& p) {
    std::vector<char> seen(p.size(), 0);
    for (int v : p) {
        if (v < 0 || static_cast<std::size_t>(v) >= p.size() || seen[v]) return false;
        seen[v] = 1;
    }
    return true;
}

void require_valid(const GridDiagram& g) {
    if (g.rho.size() != g.sigma.size()) throw std::invalid_argument("grid: rho and sigma differ in size");
    if (g.rho.empty()) throw std::invalid_argument("grid: empty");
    if (!is_permutation(g.rho)) throw std::invalid_argument("grid: rho is not a permutation");
    if (!is_permutation(g.sigma)) throw std::invalid_argument("grid: sigma is not a permutation");
}

void require_valid(const PetalPermutation& p) {
    if (p.heights.size() % 2 == 0)
        throw std::invalid_argument("petal count must be odd, got " + std::to_string(p.heights.size()));
    if (!is_permutation(p.heights)) throw std::invalid_argument("petal heights are not a permutation");
}

namespace {

int sgn(int v) { return v > 0 ? 1 : -1; }

bool strictly_between(int v, int a, int b) { return a < b ? (a < v && v < b) : (b < v && v < a); }

}  // namespace

DiagramCode grid_to_diagram(const GridDiagram& g) {
    require_valid(g);
    const int n = static_cast<int>(g.size());
    const auto& rho = g.rho;
    const auto& sigma = g.sigma;
    std::vector<int> col_owner(n), row_owner(n);
    for (int i = 0; i < n; ++i) {
        col_owner[rho[i]] = i;
        row_owner[sigma[(i + 1) % n]] = i;
    }
    std::vector<int> id(static_cast<std::size_t>(n) * n, -1);
    std::uint32_t next = 0;
    Component comp;
    auto visit = [&](int vi, int hj, Role role) {
        int& slot = id[static_cast<std::size_t>(vi) * n + hj];
        if (slot < 0) slot = static_cast<int>(next++);
        const int s = -sgn(sigma[(vi + 1) % n] - sigma[vi]) * sgn(rho[(hj + 1) % n] - rho[hj]);
        comp.push_back({static_cast<std::uint32_t>(slot), role, s});
    };
    for (int i = 0; i < n; ++i) {
        const int ni = (i + 1) % n;
        // vertical i, bottom to top or top to bottom
        const int x = rho[i], y0 = sigma[i], y1 = sigma[ni];
        const int dy = y1 > y0 ? 1 : -1;
        for (int y = y0 + dy; y != y1 && y0 != y1; y += dy) {
            const int j = row_owner[y];
            if (strictly_between(x, rho[j], rho[(j + 1) % n])) visit(i, j, Role::Over);
        }
        // horizontal i
        const int yh = sigma[ni], x0 = rho[i], x1 = rho[ni];
        const int dx = x1 > x0 ? 1 : -1;
        for (int xx = x0 + dx; xx != x1 && x0 != x1; xx += dx) {
            const int v = col_owner[xx];
            if (strictly_between(yh, sigma[v], sigma[(v + 1) % n])) visit(v, i, Role::Under);
        }
    }
    return DiagramCode({std::move(comp)}, next);
}

GridDiagram petal_to_grid(const PetalPermutation& p) {
    require_valid(p);
    const int np = p.petals();
    const int n = (np - 1) / 2;
    GridDiagram g;
    g.rho.resize(np);
    for (int k = 0; k < np; ++k) g.rho[k] = static_cast<int>((static_cast<long long>(n) * k) % np);
    g.sigma = p.heights;
    return g;
}

BraidWord grid_to_braid(const GridDiagram& g) {
    require_valid(g);
    const int n = static_cast<int>(g.size());
    const auto& rho = g.rho;
    const auto& sigma = g.sigma;
    std::vector<int> col_owner(n);
    for (int i = 0; i < n; ++i) col_owner[rho[i]] = i;
    // rows of the strands present between columns, top (largest y) first
    std::vector<int> rows;
    for (int j = 0; j < n; ++j)
        if (rho[j] > rho[(j + 1) % n]) rows.push_back(sigma[(j + 1) % n]);
    std::sort(rows.begin(), rows.end(), std::greater<>());
    BraidWord b;
    b.strands = static_cast<int>(rows.size());
    for (int c = 0; c < n; ++c) {
        const int i = col_owner[c];
        const int y0 = sigma[i], y1 = sigma[(i + 1) % n];
        auto it = std::find(rows.begin(), rows.end(), y0);
        if (it == rows.end()) throw std::logic_error("grid_to_braid: lost strand");
        const int p = static_cast<int>(it - rows.begin());
        rows.erase(it);
        auto ins = std::lower_bound(rows.begin(), rows.end(), y1, std::greater<>());
        const int q = static_cast<int>(ins - rows.begin());
        rows.insert(ins, y1);
        if (q > p)
            for (int k = p + 1; k <= q; ++k) b.letters.push_back(k);
        else
            for (int k = p; k > q; --k) b.letters.push_back(-k);
    }
    if (b.strands < 2) {
        // one strand means an unknot; keep the braid group well defined
        b.strands = 2;
        b.letters = {1};
    }
    return b;
}

}  // namespace knotlab

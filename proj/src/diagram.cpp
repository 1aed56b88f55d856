#include "knotlab/diagram.hpp"

#include <algorithm>
#include <stdexcept>

namespace knotlab {

DiagramCode::DiagramCode(std::vector<Component> components) : components_(std::move(components)) {
    if (components_.empty()) components_.emplace_back();
    std::size_t top = 0;
    for (const auto& c : components_)
        for (const auto& v : c) top = std::max<std::size_t>(top, v.crossing + 1);
    crossing_count_ = top;
}

ValidityReport validate_diagram(const DiagramCode& d) {
    ValidityReport rep;
    auto& out = rep.violations;
    if (d.component_count() == 0) out.push_back("no components");
    const std::size_t c = d.crossing_count();
    std::vector<int> overs(c, 0), unders(c, 0), sign(c, 0);
    for (std::size_t k = 0; k < d.component_count(); ++k) {
        for (const auto& v : d.component(k)) {
            if (v.crossing >= c) {
                out.push_back("crossing id " + std::to_string(v.crossing) + " out of range");
                continue;
            }
            if (v.sign != 1 && v.sign != -1) {
                out.push_back("crossing " + std::to_string(v.crossing) + " has sign " + std::to_string(v.sign));
                continue;
            }
            (v.role == Role::Over ? overs : unders)[v.crossing]++;
            if (sign[v.crossing] == 0)
                sign[v.crossing] = v.sign;
            else if (sign[v.crossing] != v.sign)
                out.push_back("sign mismatch at crossing " + std::to_string(v.crossing));
        }
    }
    for (std::size_t x = 0; x < c; ++x) {
        if (overs[x] + unders[x] < 2) {
            out.push_back("missing visit at crossing " + std::to_string(x));
        } else if (overs[x] + unders[x] > 2) {
            out.push_back("crossing " + std::to_string(x) + " visited " + std::to_string(overs[x] + unders[x]) +
                          " times");
        } else if (overs[x] != 1) {
            out.push_back("role pair broken at crossing " + std::to_string(x));
        }
    }
    return rep;
}

void require_valid(const DiagramCode& d) {
    auto rep = validate_diagram(d);
    if (!rep.ok()) throw std::invalid_argument("invalid diagram: " + rep.violations.front());
}

DiagramCode mirror(const DiagramCode& d) {
    auto comps = d.components();
    for (auto& c : comps)
        for (auto& v : c) {
            v.sign = -v.sign;
            v.role = opposite(v.role);
        }
    return DiagramCode(std::move(comps), d.crossing_count());
}

DiagramCode relabel_by_first_visit(const DiagramCode& d) {
    std::vector<std::int64_t> map(d.crossing_count(), -1);
    std::uint32_t next = 0;
    auto comps = d.components();
    for (auto& c : comps)
        for (auto& v : c) {
            if (map[v.crossing] < 0) map[v.crossing] = next++;
            v.crossing = static_cast<std::uint32_t>(map[v.crossing]);
        }
    return DiagramCode(std::move(comps), d.crossing_count());
}

DiagramCode rotate_knot(const DiagramCode& d, std::size_t shift) {
    auto comps = d.components();
    auto& c = comps.at(0);
    if (!c.empty()) std::rotate(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(shift % c.size()), c.end());
    return DiagramCode(std::move(comps), d.crossing_count());
}

long long writhe(const DiagramCode& d) {
    long long w = 0;
    for (const auto& c : d.components())
        for (const auto& v : c)
            if (v.role == Role::Over) w += v.sign;
    return w;
}

long long linking_number(const DiagramCode& d, std::size_t i, std::size_t j) {
    if (i == j || i >= d.component_count() || j >= d.component_count())
        throw std::out_of_range("linking_number: bad component pair");
    std::vector<char> on_i(d.crossing_count(), 0);
    for (const auto& v : d.component(i)) on_i[v.crossing] = 1;
    long long s = 0;
    for (const auto& v : d.component(j))
        if (on_i[v.crossing]) s += v.sign;
    // every shared crossing is seen once from j
    if (s % 2 != 0) throw std::logic_error("linking_number: odd sign sum");
    return s / 2;
}

nlohmann::json to_json(const DiagramCode& d) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : d.components()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& v : c) arr.push_back({v.crossing, v.role == Role::Over ? "O" : "U", v.sign});
        comps.push_back(std::move(arr));
    }
    return {{"crossings", d.crossing_count()}, {"components", std::move(comps)}};
}

DiagramCode diagram_from_json(const nlohmann::json& j) {
    const auto& comps_j = j.is_array() ? j : j.at("components");
    std::vector<Component> comps;
    for (const auto& cj : comps_j) {
        Component c;
        for (const auto& vj : cj) {
            if (!vj.is_array() || vj.size() != 3) throw std::invalid_argument("visit must be [id, \"O\"|\"U\", sign]");
            CrossingVisit v;
            v.crossing = vj[0].get<std::uint32_t>();
            auto r = vj[1].get<std::string>();
            if (r == "O")
                v.role = Role::Over;
            else if (r == "U")
                v.role = Role::Under;
            else
                throw std::invalid_argument("role must be O or U, got " + r);
            v.sign = vj[2].get<int>();
            c.push_back(v);
        }
        comps.push_back(std::move(c));
    }
    if (j.is_object() && j.contains("crossings")) return DiagramCode(std::move(comps), j["crossings"].get<std::size_t>());
    return DiagramCode(std::move(comps));
}

}  // namespace knotlab

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace knotlab {

enum class Role : std::uint8_t { Over, Under };

inline Role opposite(Role r) { return r == Role::Over ? Role::Under : Role::Over; }

struct CrossingVisit {
    std::uint32_t crossing = 0;
    Role role = Role::Over;
    int sign = 1;

    bool operator==(const CrossingVisit&) const = default;
};

using Component = std::vector<CrossingVisit>;

// Signed oriented Gauss code. Construction does not validate; see validate_diagram.
class DiagramCode {
public:
    DiagramCode() : components_(1) {}
    explicit DiagramCode(std::vector<Component> components);
    DiagramCode(std::vector<Component> components, std::size_t crossing_count)
        : components_(std::move(components)), crossing_count_(crossing_count) {}

    const std::vector<Component>& components() const { return components_; }
    const Component& component(std::size_t i) const { return components_.at(i); }
    std::size_t component_count() const { return components_.size(); }
    std::size_t crossing_count() const { return crossing_count_; }
    bool is_knot() const { return components_.size() == 1; }

    bool operator==(const DiagramCode&) const = default;

private:
    std::vector<Component> components_;
    std::size_t crossing_count_ = 0;
};

struct ValidityReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidityReport validate_diagram(const DiagramCode& d);

// Throws std::invalid_argument listing the first violation.
void require_valid(const DiagramCode& d);

DiagramCode mirror(const DiagramCode& d);

// Renumbers crossings in order of first appearance.
DiagramCode relabel_by_first_visit(const DiagramCode& d);

// Rotates component 0 so that it starts at visit index `shift`.
DiagramCode rotate_knot(const DiagramCode& d, std::size_t shift);

long long writhe(const DiagramCode& d);
long long linking_number(const DiagramCode& d, std::size_t i, std::size_t j);

nlohmann::json to_json(const DiagramCode& d);
DiagramCode diagram_from_json(const nlohmann::json& j);

}  // namespace knotlab

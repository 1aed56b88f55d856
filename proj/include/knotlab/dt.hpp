#pragma once

#include <optional>
#include <string>
#include <vector>

#include "knotlab/diagram.hpp"

namespace knotlab {

struct TabulatedKnot {
    std::string name;
    std::vector<int> dt_code;
    std::optional<long long> determinant;
    std::optional<long long> c2;
    std::optional<long long> v3;
};

// Dowker-Thistlethwaite code, e.g. "4 6 2" or "4 8 -12 2 -14 -16 -6 -10".
// Odd label 2i-1 meets even label |dt[i]|; a negative entry puts the even visit over.
DiagramCode parse_dt(const std::string& code_text);
DiagramCode dt_to_diagram(const std::vector<int>& dt);

// Line format: "name; dt: 4 6 2; det: 3; c2: 1"
TabulatedKnot parse_fixture_line(const std::string& line);
std::vector<TabulatedKnot> load_fixture_file(const std::string& path);

}  // namespace knotlab

#include "knotlab/dt.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace knotlab {

namespace {

constexpr std::size_t kMaxSearchCrossings = 22;

std::vector<int> parse_ints(const std::string& text) {
    std::string clean = text;
    for (char& ch : clean)
        if (ch == ',' || ch == '(' || ch == ')' || ch == '[' || ch == ']') ch = ' ';
    std::istringstream in(clean);
    std::vector<int> out;
    std::string tok;
    while (in >> tok) {
        char* end = nullptr;
        long v = std::strtol(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0')
            throw std::invalid_argument("DT entry " + std::to_string(out.size()) + " is not an integer: '" + tok + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

// Counts faces of the rotation system for a chirality assignment.
std::size_t count_faces(const std::vector<int>& at, const std::vector<int>& first, const std::vector<int>& second,
                        const std::vector<int>& eta, std::vector<int>& next, std::vector<char>& seen) {
    const std::size_t len = at.size();
    auto out_he = [&](int k) { return 2 * k; };
    auto in_he = [&](int k) { return 2 * static_cast<int>((k + len - 1) % len) + 1; };
    for (std::size_t x = 0; x < first.size(); ++x) {
        const int f = first[x], s = second[x];
        int r[4];
        if (eta[x] > 0) {
            r[0] = out_he(f), r[1] = out_he(s), r[2] = in_he(f), r[3] = in_he(s);
        } else {
            r[0] = out_he(f), r[1] = in_he(s), r[2] = in_he(f), r[3] = out_he(s);
        }
        for (int t = 0; t < 4; ++t) next[r[t]] = r[(t + 1) % 4];
    }
    std::fill(seen.begin(), seen.end(), 0);
    std::size_t faces = 0;
    for (std::size_t h0 = 0; h0 < next.size(); ++h0) {
        if (seen[h0]) continue;
        ++faces;
        std::size_t h = h0;
        while (!seen[h]) {
            seen[h] = 1;
            h = static_cast<std::size_t>(next[h ^ 1]);
        }
    }
    return faces;
}

}  // namespace

DiagramCode dt_to_diagram(const std::vector<int>& dt) {
    const std::size_t c = dt.size();
    if (c == 0) return DiagramCode();
    const std::size_t len = 2 * c;
    std::vector<int> at(len, -1);
    std::vector<char> even_over(c, 0);
    for (std::size_t i = 0; i < c; ++i) {
        const int e = dt[i];
        const int a = std::abs(e);
        if (a % 2 != 0 || a < 2 || static_cast<std::size_t>(a) > len)
            throw std::invalid_argument("DT entry " + std::to_string(i) + " (" + std::to_string(e) +
                                        ") must be an even label in 2.." + std::to_string(len));
        if (at[a - 1] >= 0) throw std::invalid_argument("DT entry " + std::to_string(i) + " repeats label " + std::to_string(a));
        at[2 * i] = static_cast<int>(i);  // odd label 2i+1, 0-based position 2i
        at[a - 1] = static_cast<int>(i);
        even_over[i] = e < 0;
    }
    std::vector<int> first(c), second(c);
    for (std::size_t i = 0; i < c; ++i) {
        const int p = static_cast<int>(2 * i), q = std::abs(dt[i]) - 1;
        first[i] = std::min(p, q);
        second[i] = std::max(p, q);
    }
    if (c > kMaxSearchCrossings)
        throw std::invalid_argument("DT code with " + std::to_string(c) + " crossings exceeds the planar search limit");
    std::vector<int> eta(c, 1), next(2 * len);
    std::vector<char> seen(2 * len);
    bool found = false;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (c - 1)); ++mask) {
        for (std::size_t x = 1; x < c; ++x) eta[x] = ((mask >> (x - 1)) & 1) ? -1 : 1;
        if (count_faces(at, first, second, eta, next, seen) == c + 2) {
            found = true;
            break;
        }
    }
    if (!found) throw std::invalid_argument("DT code is not realizable by a planar curve");
    Component comp(len);
    for (std::size_t k = 0; k < len; ++k) {
        const int x = at[k];
        const bool odd_visit = k % 2 == 0;
        const bool over = even_over[x] ? !odd_visit : odd_visit;
        comp[k].crossing = static_cast<std::uint32_t>(x);
        comp[k].role = over ? Role::Over : Role::Under;
    }
    for (std::size_t k = 0; k < len; ++k) {
        const int x = at[k];
        const bool first_over = comp[first[x]].role == Role::Over;
        comp[k].sign = first_over ? eta[x] : -eta[x];
    }
    return relabel_by_first_visit(DiagramCode({std::move(comp)}, c));
}

DiagramCode parse_dt(const std::string& code_text) { return dt_to_diagram(parse_ints(code_text)); }

TabulatedKnot parse_fixture_line(const std::string& line) {
    TabulatedKnot k;
    std::istringstream in(line);
    std::string field;
    bool first = true;
    while (std::getline(in, field, ';')) {
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r\n");
            const auto e = s.find_last_not_of(" \t\r\n");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        field = trim(field);
        if (first) {
            k.name = field;
            first = false;
            continue;
        }
        const auto colon = field.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("fixture field without ':' in line: " + line);
        const auto key = trim(field.substr(0, colon));
        const auto val = trim(field.substr(colon + 1));
        if (key == "dt")
            k.dt_code = parse_ints(val);
        else if (key == "det")
            k.determinant = std::stoll(val);
        else if (key == "c2")
            k.c2 = std::stoll(val);
        else if (key == "v3")
            k.v3 = std::stoll(val);
        else
            throw std::invalid_argument("unknown fixture field '" + key + "'");
    }
    return k;
}

std::vector<TabulatedKnot> load_fixture_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open fixture file " + path);
    std::vector<TabulatedKnot> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '#') continue;
        out.push_back(parse_fixture_line(line));
    }
    return out;
}

}  // namespace knotlab

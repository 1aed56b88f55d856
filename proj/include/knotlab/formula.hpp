#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "knotlab/diagram.hpp"
#include "knotlab/poly.hpp"

namespace knotlab {

// Arrow endpoints: the tail is matched to an Under visit, the head to an Over visit.
enum class End : std::uint8_t { Tail, Head };
enum class SignConstraint : std::uint8_t { Any, Plus, Minus };

struct PatternPoint {
    int arrow = 0;
    End end = End::Tail;
    bool operator==(const PatternPoint&) const = default;
};

struct ArrowPattern {
    std::vector<PatternPoint> word;      // 2k points from the basepoint
    std::vector<SignConstraint> signs;   // per arrow
    bool based = true;                   // false: count over all rotations of the word
    int arrows() const { return static_cast<int>(signs.size()); }
};

struct FormulaTerm {
    Rational coeff;
    ArrowPattern pattern;
};

struct ArrowFormula {
    std::string name;
    int version = 1;
    int order = 0;
    std::vector<FormulaTerm> terms;
};

ArrowFormula parse_formula(const nlohmann::json& j);
ArrowFormula load_formula_file(const std::string& path);
nlohmann::json to_json(const ArrowFormula& f);

// Formulas shipped with the library: "c2", "v3", "defect".
const ArrowFormula& bundled_formula(std::string_view name);
std::string bundled_formula_text(std::string_view name);

// Relabels arrows by first appearance; the same pattern always yields the same word.
ArrowPattern canonical(const ArrowPattern& p);
// Based terms equivalent to f: unbased terms become one term per distinct rotation.
std::vector<FormulaTerm> based_terms(const ArrowFormula& f);

// Linear chord data of a knot read from a basepoint.
struct BasedChords {
    std::size_t crossings = 0;
    std::vector<std::uint32_t> at;     // crossing at position
    std::vector<std::int32_t> first;   // per crossing
    std::vector<std::int32_t> second;
    std::vector<std::uint8_t> first_over;
    std::vector<std::int8_t> sign;
};

BasedChords based_chords(const DiagramCode& d, std::size_t basepoint = 0);

// Reference evaluator: plain backtracking, O(c^order).
Rational eval_formula_naive(const ArrowFormula& f, const DiagramCode& d, std::size_t basepoint = 0);

class CompiledFormula {
public:
    // cyclic_kernels = false forces every unbased term through its based expansion.
    explicit CompiledFormula(const ArrowFormula& f, bool cyclic_kernels = true);
    Rational evaluate(const BasedChords& ch) const;
    Rational evaluate(const DiagramCode& d, std::size_t basepoint = 0) const;
    // Integer numerator over denominator() when all coefficients share it.
    __int128 evaluate_scaled(const BasedChords& ch) const;
    const BigInt& denominator() const { return denom_; }
    int order() const { return order_; }

    // Unbased 3-arrow term counted on the circle: arrow j, then u, are
    // enumerated; the third arrow v is a rectangle query in (head, tail) ranks.
    struct CyclicTerm {
        std::int64_t scaled_coeff;
        SignConstraint sign_j, sign_u, sign_v;
        bool from_u[4];  // the four endpoints of j and u in cyclic order, starting at j
        End end[4];
        int gap_head, gap_tail;  // gaps between those endpoints holding v's head and tail
        int symmetry;            // labelings of one matching
    };

private:
    struct Term {
        std::int64_t scaled_coeff;
        ArrowPattern pattern;
    };
    std::vector<Term> terms_;
    std::vector<CyclicTerm> cyclic_;
    BigInt denom_ = 1;
    int order_ = 0;
};

Rational eval_formula(const ArrowFormula& f, const DiagramCode& d, std::size_t basepoint = 0);

}  // namespace knotlab

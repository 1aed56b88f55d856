#include "knotlab/formula.hpp"

#include <fstream>
#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace knotlab {

namespace {

Rational parse_rational(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(s));
        return Rational(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational coefficient '" + s + "'");
    }
}

std::string rational_string(const Rational& r) {
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << "/" << denominator(r);
    return os.str();
}

SignConstraint parse_sign(const nlohmann::json& v) {
    if (v.is_number_integer()) {
        const int s = v.get<int>();
        if (s == 1) return SignConstraint::Plus;
        if (s == -1) return SignConstraint::Minus;
    } else if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "+" || s == "+1") return SignConstraint::Plus;
        if (s == "-" || s == "-1") return SignConstraint::Minus;
        if (s == "any" || s == "*") return SignConstraint::Any;
    }
    throw std::invalid_argument("bad sign constraint " + v.dump());
}

void check_pattern(const ArrowPattern& p) {
    const int k = p.arrows();
    if (static_cast<int>(p.word.size()) != 2 * k) throw std::invalid_argument("pattern word length must be twice the arrow count");
    std::vector<int> tails(k, 0), heads(k, 0);
    for (const auto& pt : p.word) {
        if (pt.arrow < 0 || pt.arrow >= k) throw std::invalid_argument("pattern arrow label out of range");
        (pt.end == End::Tail ? tails : heads)[pt.arrow]++;
    }
    for (int a = 0; a < k; ++a)
        if (tails[a] != 1 || heads[a] != 1) throw std::invalid_argument("each arrow needs exactly one tail and one head");
}

std::string pattern_key(const ArrowPattern& p) {
    std::string key;
    for (const auto& pt : p.word) {
        key += static_cast<char>('a' + pt.arrow);
        key += pt.end == End::Tail ? 't' : 'h';
    }
    key += '|';
    for (auto s : p.signs) key += static_cast<char>('0' + static_cast<int>(s));
    return key;
}

}  // namespace

ArrowFormula parse_formula(const nlohmann::json& j) {
    ArrowFormula f;
    f.name = j.value("name", std::string("formula"));
    f.version = j.value("version", 1);
    f.order = j.value("order", -1);
    if (j.contains("convention") && j["convention"] != "tail=under,head=over")
        throw std::invalid_argument("unsupported arrow convention " + j["convention"].dump());
    for (const auto& tj : j.at("terms")) {
        FormulaTerm t;
        t.coeff = parse_rational(tj.at("coeff").is_string() ? tj["coeff"].get<std::string>() : tj["coeff"].dump());
        std::map<std::string, int> labels;
        std::vector<std::string> names;
        for (const auto& e : tj.at("endpoints")) {
            const auto tok = e.get<std::string>();
            if (tok.size() < 2) throw std::invalid_argument("bad endpoint token '" + tok + "'");
            const char mark = tok.back();
            const auto label = tok.substr(0, tok.size() - 1);
            if (mark != 't' && mark != 'h') throw std::invalid_argument("endpoint token '" + tok + "' must end in t or h");
            auto [it, fresh] = labels.emplace(label, static_cast<int>(labels.size()));
            if (fresh) names.push_back(label);
            t.pattern.word.push_back({it->second, mark == 't' ? End::Tail : End::Head});
        }
        t.pattern.signs.assign(labels.size(), SignConstraint::Any);
        if (tj.contains("signs")) {
            for (const auto& [label, v] : tj["signs"].items()) {
                auto it = labels.find(label);
                if (it == labels.end()) throw std::invalid_argument("sign constraint for unknown arrow '" + label + "'");
                t.pattern.signs[it->second] = parse_sign(v);
            }
        }
        t.pattern.based = tj.value("based", true);
        check_pattern(t.pattern);
        if (f.order < 0) f.order = t.pattern.arrows();
        if (t.pattern.arrows() != f.order) throw std::invalid_argument("formula terms must all have order " + std::to_string(f.order));
        f.terms.push_back(std::move(t));
    }
    if (f.order < 0) f.order = 0;
    return f;
}

ArrowFormula load_formula_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open formula file " + path);
    return parse_formula(nlohmann::json::parse(in));
}

nlohmann::json to_json(const ArrowFormula& f) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : f.terms) {
        nlohmann::json ends = nlohmann::json::array();
        for (const auto& pt : t.pattern.word)
            ends.push_back(std::to_string(pt.arrow + 1) + (pt.end == End::Tail ? "t" : "h"));
        nlohmann::json signs = nlohmann::json::object();
        for (int a = 0; a < t.pattern.arrows(); ++a) {
            const auto s = t.pattern.signs[a];
            if (s != SignConstraint::Any) signs[std::to_string(a + 1)] = s == SignConstraint::Plus ? "+1" : "-1";
        }
        terms.push_back({{"coeff", rational_string(t.coeff)}, {"based", t.pattern.based}, {"endpoints", ends}, {"signs", signs}});
    }
    return {{"name", f.name}, {"version", f.version}, {"order", f.order}, {"convention", "tail=under,head=over"}, {"terms", terms}};
}

ArrowPattern canonical(const ArrowPattern& p) {
    std::vector<int> map(p.arrows(), -1);
    int next = 0;
    ArrowPattern out;
    out.based = p.based;
    out.signs.resize(p.arrows());
    for (const auto& pt : p.word) {
        if (map[pt.arrow] < 0) {
            map[pt.arrow] = next;
            out.signs[next] = p.signs[pt.arrow];
            ++next;
        }
        out.word.push_back({map[pt.arrow], pt.end});
    }
    return out;
}

std::vector<FormulaTerm> based_terms(const ArrowFormula& f) {
    std::vector<FormulaTerm> out;
    for (const auto& t : f.terms) {
        if (t.pattern.based) {
            out.push_back({t.coeff, canonical(t.pattern)});
            continue;
        }
        std::set<std::string> seen;
        const std::size_t n = t.pattern.word.size();
        for (std::size_t r = 0; r < std::max<std::size_t>(n, 1); ++r) {
            ArrowPattern rot = t.pattern;
            rot.based = true;
            for (std::size_t i = 0; i < n; ++i) rot.word[i] = t.pattern.word[(i + r) % n];
            rot = canonical(rot);
            if (seen.insert(pattern_key(rot)).second) out.push_back({t.coeff, rot});
        }
    }
    return out;
}

BasedChords based_chords(const DiagramCode& d, std::size_t basepoint) {
    if (!d.is_knot()) throw std::invalid_argument("knot formula applied to a " + std::to_string(d.component_count()) + "-component diagram");
    const auto& comp = d.component(0);
    BasedChords ch;
    const std::size_t c = d.crossing_count();
    const std::size_t len = comp.size();
    if (len != 2 * c) throw std::invalid_argument("knot code length does not match its crossing count");
    ch.crossings = c;
    ch.at.resize(len);
    ch.first.assign(c, -1);
    ch.second.assign(c, -1);
    ch.first_over.assign(c, 0);
    ch.sign.assign(c, 0);
    for (std::size_t k = 0; k < len; ++k) {
        const auto& v = comp[(k + basepoint) % len];
        if (v.crossing >= c) throw std::invalid_argument("crossing id out of range");
        ch.at[k] = v.crossing;
        const auto pos = static_cast<std::int32_t>(k);
        if (ch.first[v.crossing] < 0) {
            ch.first[v.crossing] = pos;
            ch.first_over[v.crossing] = v.role == Role::Over;
            ch.sign[v.crossing] = static_cast<std::int8_t>(v.sign);
        } else {
            if (ch.second[v.crossing] >= 0) throw std::invalid_argument("crossing visited more than twice");
            ch.second[v.crossing] = pos;
        }
    }
    for (std::size_t x = 0; x < c; ++x)
        if (ch.second[x] < 0) throw std::invalid_argument("crossing visited once");
    return ch;
}

namespace {

bool sign_ok(SignConstraint s, int sign) {
    return s == SignConstraint::Any || (s == SignConstraint::Plus ? sign > 0 : sign < 0);
}

// Weight of crossing x playing arrow a of a canonical based pattern, 0 if it cannot.
struct ArrowReq {
    bool first_is_tail;  // arrow's earlier endpoint is its tail, so the chord starts Under
    SignConstraint sign;
};

std::vector<ArrowReq> requirements(const ArrowPattern& p) {
    std::vector<ArrowReq> req(p.arrows());
    std::vector<char> seen(p.arrows(), 0);
    for (const auto& pt : p.word) {
        if (!seen[pt.arrow]) {
            req[pt.arrow].first_is_tail = pt.end == End::Tail;
            seen[pt.arrow] = 1;
        }
    }
    for (int a = 0; a < p.arrows(); ++a) req[a].sign = p.signs[a];
    return req;
}

inline int weight(const BasedChords& ch, std::size_t x, const ArrowReq& r) {
    const bool starts_under = !ch.first_over[x];
    if (starts_under != r.first_is_tail) return 0;
    return sign_ok(r.sign, ch.sign[x]) ? ch.sign[x] : 0;
}

struct Naive {
    const BasedChords& ch;
    const ArrowPattern& p;
    std::vector<ArrowReq> req;
    std::vector<int> assigned;
    std::vector<char> used;
    __int128 total = 0;

    void run(std::size_t idx, std::int32_t minpos, __int128 w) {
        if (idx == p.word.size()) {
            total += w;
            return;
        }
        const auto& pt = p.word[idx];
        if (assigned[pt.arrow] >= 0) {
            const auto x = static_cast<std::size_t>(assigned[pt.arrow]);
            const std::int32_t pos = ch.second[x];  // first endpoint already used
            if (pos >= minpos) run(idx + 1, pos + 1, w);
            return;
        }
        const auto len = static_cast<std::int32_t>(ch.at.size());
        for (std::int32_t pos = minpos; pos < len; ++pos) {
            const auto x = ch.at[pos];
            if (ch.first[x] != pos || used[x]) continue;
            const int wx = weight(ch, x, req[pt.arrow]);
            if (wx == 0) continue;
            assigned[pt.arrow] = static_cast<int>(x);
            used[x] = 1;
            run(idx + 1, pos + 1, w * wx);
            used[x] = 0;
            assigned[pt.arrow] = -1;
        }
    }
};

__int128 count_naive(const ArrowPattern& p, const BasedChords& ch) {
    Naive n{ch, p, requirements(p), std::vector<int>(p.arrows(), -1), std::vector<char>(ch.crossings, 0)};
    n.run(0, 0, 1);
    return n.total;
}

class Fenwick {
public:
    explicit Fenwick(std::size_t n) : t_(n + 1, 0) {}
    void add(std::size_t i, std::int64_t v) {
        for (++i; i < t_.size(); i += i & (~i + 1)) t_[i] += v;
    }
    std::int64_t prefix(std::size_t n) const {  // sum over [0, n)
        std::int64_t s = 0;
        for (; n > 0; n -= n & (~n + 1)) s += t_[n];
        return s;
    }

private:
    std::vector<std::int64_t> t_;
};

// Positions of the two endpoints of the first arrow bound three gaps:
// 0 = before a, 1 = between, 2 = after b.  Returns the open interval (lo, hi).
inline std::pair<std::int32_t, std::int32_t> gap_bounds(const std::int32_t* q, int nq, int g, std::int32_t len) {
    const std::int32_t lo = g == 0 ? -1 : q[g - 1];
    const std::int32_t hi = g == nq ? len : q[g];
    return {lo, hi};
}

__int128 count_one(const ArrowPattern& p, const BasedChords& ch) {
    const auto req = requirements(p);
    __int128 s = 0;
    for (std::size_t x = 0; x < ch.crossings; ++x) s += weight(ch, x, req[0]);
    return s;
}

__int128 count_two(const ArrowPattern& p, const BasedChords& ch) {
    const auto req = requirements(p);
    // gaps of arrow 1's endpoints relative to arrow 0's
    int g[2], seen0 = 0, k = 0;
    for (const auto& pt : p.word) {
        if (pt.arrow == 0)
            ++seen0;
        else
            g[k++] = seen0;
    }
    const auto len = static_cast<std::int32_t>(ch.at.size());
    const std::size_t c = ch.crossings;
    // 2D dominance sums by a sweep over the start coordinate
    struct Query {
        std::int32_t y;
        std::int64_t mult;
    };
    std::vector<std::vector<Query>> by_x(static_cast<std::size_t>(len) + 1);
    for (std::size_t x = 0; x < c; ++x) {
        const int wx = weight(ch, x, req[0]);
        if (wx == 0) continue;
        const std::int32_t q[2] = {ch.first[x], ch.second[x]};
        auto [xl, xh] = gap_bounds(q, 2, g[0], len);
        auto [yl, yh] = gap_bounds(q, 2, g[1], len);
        if (xh - xl < 2 || yh - yl < 2) continue;
        by_x[xh].push_back({yh, wx});
        by_x[xh].push_back({yl + 1, -wx});
        by_x[xl + 1].push_back({yh, -wx});
        by_x[xl + 1].push_back({yl + 1, wx});
    }
    std::vector<int> wy(c);
    for (std::size_t y = 0; y < c; ++y) wy[y] = weight(ch, y, req[1]);
    Fenwick fw(static_cast<std::size_t>(len));
    __int128 total = 0;
    for (std::int32_t X = 0; X <= len; ++X) {
        for (const auto& q : by_x[X]) total += static_cast<__int128>(q.mult) * fw.prefix(static_cast<std::size_t>(q.y));
        if (X < len) {
            const auto y = ch.at[X];
            if (ch.first[y] == X && wy[y] != 0) fw.add(static_cast<std::size_t>(ch.second[y]), wy[y]);
        }
    }
    return total;
}

struct RankTable {
    std::size_t c = 0;
    std::vector<std::int32_t> start_rank;  // #starts before position, size len+1
    std::vector<std::int32_t> end_rank;
    // (c+1) x (c+1) prefix sums; entries are bounded by c, so 16 bits usually suffice
    bool narrow = true;
    std::vector<std::int16_t> small;
    std::vector<std::int32_t> wide;

    std::int32_t at(std::int32_t i, std::int32_t j) const {
        const std::size_t k = static_cast<std::size_t>(i) * (c + 1) + j;
        return narrow ? small[k] : wide[k];
    }

    // chords with lo1 < start < hi1 and lo2 < end < hi2
    std::int64_t rect(std::int32_t lo1, std::int32_t hi1, std::int32_t lo2, std::int32_t hi2) const {
        if (hi1 - lo1 < 2 || hi2 - lo2 < 2) return 0;
        const auto i0 = start_rank[lo1 + 1], i1 = start_rank[hi1];
        const auto j0 = end_rank[lo2 + 1], j1 = end_rank[hi2];
        if (i1 <= i0 || j1 <= j0) return 0;
        return static_cast<std::int64_t>(at(i1, j1)) - at(i0, j1) - at(i1, j0) + at(i0, j0);
    }
};

template <class Cell>
void fill_prefix(std::vector<Cell>& table, const BasedChords& ch, const ArrowReq& r, const RankTable& t) {
    const std::size_t w = t.c + 1;
    table.assign(w * w, 0);
    for (std::size_t x = 0; x < t.c; ++x) {
        const int wx = weight(ch, x, r);
        if (wx == 0) continue;
        const auto i = t.start_rank[ch.first[x]];
        const auto j = t.end_rank[ch.second[x]];
        table[static_cast<std::size_t>(i + 1) * w + (j + 1)] += static_cast<Cell>(wx);
    }
    for (std::size_t i = 1; i < w; ++i)
        for (std::size_t j = 1; j < w; ++j)
            table[i * w + j] = static_cast<Cell>(table[i * w + j] + table[(i - 1) * w + j] + table[i * w + j - 1] -
                                                 table[(i - 1) * w + j - 1]);
}

void build_table(RankTable& t, const BasedChords& ch, const ArrowReq& r) {
    const std::size_t c = ch.crossings;
    const std::size_t len = ch.at.size();
    t.c = c;
    t.start_rank.assign(len + 1, 0);
    t.end_rank.assign(len + 1, 0);
    for (std::size_t k = 0; k < len; ++k) {
        const bool is_start = ch.first[ch.at[k]] == static_cast<std::int32_t>(k);
        t.start_rank[k + 1] = t.start_rank[k] + (is_start ? 1 : 0);
        t.end_rank[k + 1] = t.end_rank[k] + (is_start ? 0 : 1);
    }
    t.narrow = c < 32000;
    if (t.narrow)
        fill_prefix(t.small, ch, r, t);
    else
        fill_prefix(t.wide, ch, r, t);
}

__int128 count_three(const ArrowPattern& p, const BasedChords& ch, const RankTable& table) {
    const auto req = requirements(p);
    // gaps of arrow 1 relative to arrow 0, then slots of arrow 2 relative to arrows 0 and 1
    int gb[2], kb = 0, seen0 = 0;
    for (const auto& pt : p.word) {
        if (pt.arrow == 0) ++seen0;
        if (pt.arrow == 1) gb[kb++] = seen0;
    }
    int order[4][2];  // order of the four endpoints of arrows 0 and 1: (arrow, first/second)
    int gc[2], kc = 0, no = 0;
    int seen_ab = 0;
    char met[2] = {0, 0};
    for (const auto& pt : p.word) {
        if (pt.arrow == 2) {
            gc[kc++] = seen_ab;
        } else {
            order[no][0] = pt.arrow;
            order[no][1] = met[pt.arrow]++;
            ++no;
            ++seen_ab;
        }
    }
    const auto len = static_cast<std::int32_t>(ch.at.size());
    __int128 total = 0;
    for (std::size_t x = 0; x < ch.crossings; ++x) {
        const int wx = weight(ch, x, req[0]);
        if (wx == 0) continue;
        const std::int32_t qx[2] = {ch.first[x], ch.second[x]};
        const auto [bl, bh] = gap_bounds(qx, 2, gb[0], len);
        const auto [el, eh] = gap_bounds(qx, 2, gb[1], len);
        std::int64_t acc = 0;
        for (std::int32_t pos = bl + 1; pos < bh; ++pos) {
            const auto y = ch.at[pos];
            if (ch.first[y] != pos) continue;
            const std::int32_t by = ch.second[y];
            if (by <= el || by >= eh) continue;
            const int wy = weight(ch, y, req[1]);
            if (wy == 0) continue;
            const std::int32_t ends[2][2] = {{qx[0], qx[1]}, {pos, by}};
            std::int32_t q[4];
            for (int i = 0; i < 4; ++i) q[i] = ends[order[i][0]][order[i][1]];
            const auto [l1, h1] = gap_bounds(q, 4, gc[0], len);
            const auto [l2, h2] = gap_bounds(q, 4, gc[1], len);
            acc += wy * table.rect(l1, h1, l2, h2);
        }
        total += static_cast<__int128>(wx) * acc;
    }
    return total;
}

}  // namespace

Rational eval_formula_naive(const ArrowFormula& f, const DiagramCode& d, std::size_t basepoint) {
    const auto ch = based_chords(d, basepoint);
    Rational total = 0;
    for (const auto& t : based_terms(f)) {
        const __int128 n = count_naive(t.pattern, ch);
        total += t.coeff * Rational(BigInt(static_cast<long long>(n)));
    }
    return total;
}

namespace {

std::optional<CompiledFormula::CyclicTerm> cyclic_form(const ArrowPattern& p) {
    if (p.based || p.arrows() != 3) return std::nullopt;
    const std::size_t n = p.word.size();
    int perm[3] = {0, 1, 2};
    do {
        const int a = perm[0], b = perm[1], c = perm[2];
        std::size_t start = 0;
        while (p.word[start].arrow != a) ++start;
        std::vector<PatternPoint> sub;
        int gap[2] = {-1, -1};  // [head, tail]
        for (std::size_t i = 0; i < n; ++i) {
            const auto& pt = p.word[(start + i) % n];
            if (pt.arrow == c)
                gap[pt.end == End::Head ? 0 : 1] = static_cast<int>(sub.size()) - 1;
            else
                sub.push_back(pt);
        }
        if (gap[0] == gap[1]) continue;
        CompiledFormula::CyclicTerm t{};
        t.sign_j = p.signs[a];
        t.sign_u = p.signs[b];
        t.sign_v = p.signs[c];
        for (int i = 0; i < 4; ++i) {
            t.from_u[i] = sub[i].arrow == b;
            t.end[i] = sub[i].end;
        }
        t.gap_head = gap[0];
        t.gap_tail = gap[1];
        const auto key = pattern_key(canonical(p));
        t.symmetry = 0;
        for (std::size_t r = 0; r < n; ++r) {
            ArrowPattern rot = p;
            for (std::size_t i = 0; i < n; ++i) rot.word[i] = p.word[(i + r) % n];
            if (pattern_key(canonical(rot)) == key) ++t.symmetry;
        }
        return t;
    } while (std::next_permutation(perm, perm + 3));
    return std::nullopt;
}

std::int64_t scale_coeff(const Rational& coeff, const BigInt& den) {
    const Rational scaled = coeff * den;
    const BigInt num = boost::multiprecision::numerator(scaled);
    if (boost::multiprecision::denominator(scaled) != 1 || num > BigInt(1) << 40 || num < -(BigInt(1) << 40))
        throw std::invalid_argument("formula coefficient out of supported range");
    return static_cast<std::int64_t>(num);
}

struct CyclicTable {
    std::size_t c = 0;
    std::vector<std::int32_t> head_pos, tail_pos;    // per crossing
    std::vector<std::int32_t> other_pos;             // per position: the chord's other endpoint
    std::vector<std::int8_t> is_head, sign_at;       // per position
    std::vector<std::int32_t> head_rank, tail_rank;  // #heads / #tails before a position
    std::vector<std::int32_t> table;                 // prefix sums over (head rank, tail rank)

    std::int64_t at(std::int32_t i, std::int32_t j) const { return table[static_cast<std::size_t>(i) * (c + 1) + j]; }

    // The ranks of the open cyclic interval (p, q) are [lo, hi) when it does
    // not wrap, and everything except [lo, hi) when it does.
    struct Span {
        std::int32_t lo, hi, sign, wrap;
    };
    static Span span(const std::vector<std::int32_t>& rank, std::int32_t p, std::int32_t q) {
        const auto a = rank[p + 1], b = rank[q];
        const std::int32_t w = p > q;
        return {std::min(a, b), std::max(a, b), 1 - 2 * w, w};
    }

    std::int64_t rect(std::int32_t i0, std::int32_t i1, std::int32_t j0, std::int32_t j1) const {
        return at(i1, j1) - at(i0, j1) - at(i1, j0) + at(i0, j0);
    }

    std::int64_t query(std::int32_t h0, std::int32_t h1, std::int32_t t0, std::int32_t t1) const {
        const Span h = span(head_rank, h0, h1), t = span(tail_rank, t0, t1);
        const auto n = static_cast<std::int32_t>(c);
        std::int64_t s = h.sign * t.sign * rect(h.lo, h.hi, t.lo, t.hi);
        if (t.wrap) s += h.sign * (at(h.hi, n) - at(h.lo, n));
        if (h.wrap) s += t.sign * (at(n, t.hi) - at(n, t.lo));
        if (h.wrap & t.wrap) s += at(n, n);
        return s;
    }
};

void build_cyclic_table(CyclicTable& t, const BasedChords& ch, SignConstraint sign) {
    const std::size_t c = ch.crossings, len = ch.at.size();
    t.c = c;
    t.head_pos.resize(c);
    t.tail_pos.resize(c);
    t.other_pos.resize(len);
    t.is_head.assign(len, 0);
    t.sign_at.resize(len);
    auto& is_head = t.is_head;
    for (std::size_t x = 0; x < c; ++x) {
        t.head_pos[x] = ch.first_over[x] ? ch.first[x] : ch.second[x];
        t.tail_pos[x] = ch.first_over[x] ? ch.second[x] : ch.first[x];
        is_head[static_cast<std::size_t>(t.head_pos[x])] = 1;
        t.other_pos[static_cast<std::size_t>(ch.first[x])] = ch.second[x];
        t.other_pos[static_cast<std::size_t>(ch.second[x])] = ch.first[x];
        t.sign_at[static_cast<std::size_t>(ch.first[x])] = ch.sign[x];
        t.sign_at[static_cast<std::size_t>(ch.second[x])] = ch.sign[x];
    }
    t.head_rank.assign(len + 1, 0);
    t.tail_rank.assign(len + 1, 0);
    for (std::size_t k = 0; k < len; ++k) {
        t.head_rank[k + 1] = t.head_rank[k] + is_head[k];
        t.tail_rank[k + 1] = t.tail_rank[k] + 1 - is_head[k];
    }
    const std::size_t w = c + 1;
    t.table.assign(w * w, 0);
    for (std::size_t x = 0; x < c; ++x) {
        if (!sign_ok(sign, ch.sign[x])) continue;
        const auto i = static_cast<std::size_t>(t.head_rank[t.head_pos[x]]);
        const auto j = static_cast<std::size_t>(t.tail_rank[t.tail_pos[x]]);
        t.table[(i + 1) * w + j + 1] += ch.sign[x];
    }
    for (std::size_t i = 1; i < w; ++i)
        for (std::size_t j = 1; j < w; ++j)
            t.table[i * w + j] += t.table[(i - 1) * w + j] + t.table[i * w + j - 1] - t.table[(i - 1) * w + j - 1];
}

__int128 count_cyclic(const CompiledFormula::CyclicTerm& t, const BasedChords& ch, const CyclicTable& tab) {
    const auto len = static_cast<std::int32_t>(ch.at.size());
    const std::size_t c = ch.crossings;
    __int128 total = 0;
    // When j's second endpoint sits between u's two endpoints, u crosses j and
    // is found by walking the arc from j's first endpoint to its second.
    const bool crossing = !t.from_u[2];
    for (std::size_t j = 0; j < c; ++j) {
        if (!sign_ok(t.sign_j, ch.sign[j])) continue;
        const std::int32_t pj[2] = {tab.tail_pos[j], tab.head_pos[j]};
        const std::int32_t p0 = pj[t.end[0] == End::Head];
        std::int64_t acc = 0;
        std::int32_t pos[4];
        pos[0] = p0;
        if (crossing) {
            const std::int32_t p2 = pj[t.end[2] == End::Head];
            pos[2] = p2;
            const std::int8_t want_head = t.end[1] == End::Head ? 1 : 0;
            const bool any_sign = t.sign_u == SignConstraint::Any;
            // u's endpoint walks the open arc (p0, p2); its other endpoint must lie in (p2, p0)
            auto walk = [&](std::int32_t lo, std::int32_t hi) {
                for (std::int32_t k = lo; k < hi; ++k) {
                    if (tab.is_head[k] != want_head) continue;
                    const std::int32_t other = tab.other_pos[k];
                    const bool outside = p0 < p2 ? (other > p2 || other < p0) : (other > p2 && other < p0);
                    if (!outside) continue;
                    const int su = tab.sign_at[k];
                    if (!any_sign && !sign_ok(t.sign_u, su)) continue;
                    pos[1] = k;
                    pos[3] = other;
                    acc += su * tab.query(pos[t.gap_head], pos[(t.gap_head + 1) % 4], pos[t.gap_tail],
                                          pos[(t.gap_tail + 1) % 4]);
                }
            };
            if (p0 < p2) {
                walk(p0 + 1, p2);
            } else {
                walk(p0 + 1, len);
                walk(0, p2);
            }
        } else {
            for (std::size_t u = 0; u < c; ++u) {
                if (u == j || !sign_ok(t.sign_u, ch.sign[u])) continue;
                const std::int32_t pu[2] = {tab.tail_pos[u], tab.head_pos[u]};
                std::int32_t d[4] = {0, 0, 0, 0};
                bool ordered = true;
                for (int i = 1; i < 4; ++i) {
                    pos[i] = (t.from_u[i] ? pu : pj)[t.end[i] == End::Head];
                    d[i] = pos[i] - p0;
                    if (d[i] < 0) d[i] += len;
                    if (d[i] <= d[i - 1]) {
                        ordered = false;
                        break;
                    }
                }
                if (!ordered) continue;
                acc += ch.sign[u] * tab.query(pos[t.gap_head], pos[(t.gap_head + 1) % 4], pos[t.gap_tail],
                                              pos[(t.gap_tail + 1) % 4]);
            }
        }
        total += static_cast<__int128>(ch.sign[j]) * acc;
    }
    if (total % t.symmetry != 0) throw std::logic_error("cyclic count not divisible by its symmetry");
    return total / t.symmetry;
}

}  // namespace

CompiledFormula::CompiledFormula(const ArrowFormula& f, bool cyclic_kernels) : order_(f.order) {
    std::vector<FormulaTerm> based;
    std::vector<std::pair<Rational, CyclicTerm>> cyclic;
    for (const auto& t : f.terms) {
        if (cyclic_kernels) {
            if (auto ct = cyclic_form(t.pattern)) {
                cyclic.emplace_back(t.coeff, *ct);
                continue;
            }
        }
        ArrowFormula one;
        one.terms.push_back(t);
        for (auto& b : based_terms(one)) based.push_back(std::move(b));
    }
    BigInt den = 1;
    for (const auto& t : based) den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(t.coeff));
    for (const auto& t : cyclic)
        den = boost::multiprecision::lcm(den, boost::multiprecision::denominator(t.first));
    denom_ = den;
    for (auto& t : based) terms_.push_back({scale_coeff(t.coeff, den), std::move(t.pattern)});
    for (auto& [coeff, ct] : cyclic) {
        ct.scaled_coeff = scale_coeff(coeff, den);
        cyclic_.push_back(ct);
    }
}

__int128 CompiledFormula::evaluate_scaled(const BasedChords& ch) const {
    __int128 total = 0;
    // tables for the third arrow are shared across terms with the same requirement
    std::map<std::pair<bool, int>, RankTable> tables;
    for (const auto& t : terms_) {
        const int k = t.pattern.arrows();
        __int128 n = 0;
        if (k == 0)
            n = 1;
        else if (k == 1)
            n = count_one(t.pattern, ch);
        else if (k == 2)
            n = count_two(t.pattern, ch);
        else if (k == 3) {
            const auto r = requirements(t.pattern)[2];
            const auto key = std::make_pair(r.first_is_tail, static_cast<int>(r.sign));
            auto it = tables.find(key);
            if (it == tables.end()) {
                it = tables.emplace(key, RankTable{}).first;
                build_table(it->second, ch, r);
            }
            n = count_three(t.pattern, ch, it->second);
        } else
            n = count_naive(t.pattern, ch);
        total += n * t.scaled_coeff;
    }
    std::map<int, CyclicTable> cyclic_tables;
    for (const auto& t : cyclic_) {
        auto it = cyclic_tables.find(static_cast<int>(t.sign_v));
        if (it == cyclic_tables.end()) {
            it = cyclic_tables.emplace(static_cast<int>(t.sign_v), CyclicTable{}).first;
            build_cyclic_table(it->second, ch, t.sign_v);
        }
        total += count_cyclic(t, ch, it->second) * t.scaled_coeff;
    }
    return total;
}

Rational CompiledFormula::evaluate(const BasedChords& ch) const {
    const __int128 n = evaluate_scaled(ch);
    // __int128 to BigInt through two halves
    const bool neg = n < 0;
    const unsigned __int128 mag = neg ? static_cast<unsigned __int128>(-n) : static_cast<unsigned __int128>(n);
    BigInt b = static_cast<std::uint64_t>(mag >> 64);
    b <<= 64;
    b += static_cast<std::uint64_t>(mag);
    if (neg) b = -b;
    return Rational(b, denom_);
}

Rational CompiledFormula::evaluate(const DiagramCode& d, std::size_t basepoint) const {
    return evaluate(based_chords(d, basepoint));
}

Rational eval_formula(const ArrowFormula& f, const DiagramCode& d, std::size_t basepoint) {
    return CompiledFormula(f).evaluate(d, basepoint);
}

}  // namespace knotlab

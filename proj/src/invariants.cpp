#include "knotlab/invariants.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace knotlab {

namespace {

const CompiledFormula& compiled(std::string_view name) {
    static const CompiledFormula c2(bundled_formula("c2"));
    static const CompiledFormula v3f(bundled_formula("v3"));
    static const CompiledFormula df(bundled_formula("defect"));
    if (name == "c2") return c2;
    if (name == "v3") return v3f;
    return df;
}

long long as_integer(const Rational& r, const char* what) {
    if (denominator(r) != 1) throw std::logic_error(std::string(what) + " is not an integer");
    return static_cast<long long>(numerator(r));
}

}  // namespace

long long casson_c2(const BasedChords& ch) { return as_integer(compiled("c2").evaluate(ch), "c2"); }
Rational v3(const BasedChords& ch) { return compiled("v3").evaluate(ch); }
long long defect(const BasedChords& ch) { return as_integer(compiled("defect").evaluate(ch), "defect"); }

long long casson_c2(const DiagramCode& d) { return casson_c2(based_chords(d)); }
Rational v3(const DiagramCode& d) { return v3(based_chords(d)); }
long long defect(const DiagramCode& d) { return defect(based_chords(d)); }

namespace {

struct ArcRelation {
    std::size_t over, under_in, under_out;
    int sign;
};

std::vector<ArcRelation> arc_relations(const DiagramCode& d) {
    if (!d.is_knot()) throw std::invalid_argument("Alexander polynomial is implemented for knots only");
    require_valid(d);
    const auto& comp = d.component(0);
    const std::size_t c = d.crossing_count();
    std::vector<ArcRelation> rel(c);
    std::size_t unders = 0;
    for (const auto& v : comp) {
        const std::size_t arc = unders % c;
        if (v.role == Role::Over) {
            rel[v.crossing].over = arc;
        } else {
            rel[v.crossing].under_in = arc;
            rel[v.crossing].under_out = (unders + 1) % c;
            ++unders;
        }
        rel[v.crossing].sign = v.sign;
    }
    return rel;
}

IntPoly bareiss_det(std::vector<std::vector<IntPoly>> m) {
    const std::size_t n = m.size();
    if (n == 0) return IntPoly::constant(1);
    IntPoly prev = IntPoly::constant(1);
    bool neg = false;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k].is_zero()) {
            std::size_t piv = k + 1;
            while (piv < n && m[piv][k].is_zero()) ++piv;
            if (piv == n) return {};
            std::swap(m[k], m[piv]);
            neg = !neg;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j)
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]).exact_div(prev);
            m[i][k] = {};
        }
        prev = m[k][k];
    }
    return neg ? -m[n - 1][n - 1] : m[n - 1][n - 1];
}

// ---- modular determinant with CRT ----

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL})
        if (n % p == 0) return n == p;
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) d >>= 1, ++s;
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        std::uint64_t x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s && composite; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) composite = false;
        }
        if (composite) return false;
    }
    return true;
}

const std::vector<std::uint64_t>& big_primes() {
    static const std::vector<std::uint64_t> primes = [] {
        std::vector<std::uint64_t> out;
        for (std::uint64_t cand = (std::uint64_t{1} << 62) - 57; out.size() < 64; cand -= 2)
            if (is_prime_u64(cand)) out.push_back(cand);
        return out;
    }();
    return primes;
}

std::uint64_t det_mod(const std::vector<std::vector<std::int64_t>>& a, std::uint64_t p) {
    const std::size_t n = a.size();
    std::vector<std::vector<std::uint64_t>> m(n, std::vector<std::uint64_t>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const std::int64_t v = a[i][j] % static_cast<std::int64_t>(p);
            m[i][j] = v < 0 ? static_cast<std::uint64_t>(v + static_cast<std::int64_t>(p)) : static_cast<std::uint64_t>(v);
        }
    std::uint64_t det = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        while (piv < n && m[piv][k] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != k) {
            std::swap(m[piv], m[k]);
            det = (p - det) % p;
        }
        det = mulmod(det, m[k][k], p);
        const std::uint64_t inv = powmod(m[k][k], p - 2, p);
        for (std::size_t i = k + 1; i < n; ++i) {
            if (m[i][k] == 0) continue;
            const std::uint64_t f = mulmod(m[i][k], inv, p);
            for (std::size_t j = k; j < n; ++j) {
                const std::uint64_t sub = mulmod(f, m[k][j], p);
                m[i][j] = m[i][j] >= sub ? m[i][j] - sub : m[i][j] + p - sub;
            }
        }
    }
    return det;
}

}  // namespace

IntPoly alexander(const DiagramCode& d) {
    const std::size_t c = d.crossing_count();
    if (c == 0) return IntPoly::constant(1);
    const auto rel = arc_relations(d);
    const IntPoly one = IntPoly::constant(1), t({0, 1});
    std::vector<std::vector<IntPoly>> m(c, std::vector<IntPoly>(c));
    for (std::size_t x = 0; x < c; ++x) {
        const auto& r = rel[x];
        if (r.sign > 0) {
            m[x][r.over] = m[x][r.over] + (one - t);
            m[x][r.under_in] = m[x][r.under_in] + t;
            m[x][r.under_out] = m[x][r.under_out] - one;
        } else {
            m[x][r.over] = m[x][r.over] + (t - one);
            m[x][r.under_in] = m[x][r.under_in] + one;
            m[x][r.under_out] = m[x][r.under_out] - t;
        }
    }
    m.pop_back();
    for (auto& row : m) row.pop_back();
    IntPoly det = bareiss_det(std::move(m));
    if (det.is_zero()) throw std::logic_error("Alexander minor vanished on a knot diagram");
    std::size_t low = 0;
    while (det.coeff(low) == 0) ++low;
    std::vector<BigInt> cs(det.coeffs().begin() + static_cast<std::ptrdiff_t>(low), det.coeffs().end());
    IntPoly out(std::move(cs));
    const BigInt at1 = out.eval(1);
    if (at1 != 1 && at1 != -1) throw std::logic_error("Alexander polynomial does not evaluate to +-1 at t = 1");
    return at1 < 0 ? -out : out;
}

LaurentPoly alexander_symmetric(const DiagramCode& d) {
    const IntPoly a = alexander(d);
    if (a.degree() % 2 != 0) throw std::logic_error("Alexander polynomial has odd span");
    const int half = a.degree() / 2;
    LaurentPoly out;
    for (int k = 0; k <= a.degree(); ++k) out.add(k - half, a.coeff(static_cast<std::size_t>(k)));
    return out;
}

IntPoly conway_from_alexander(const LaurentPoly& delta) {
    IntPoly result;
    const IntPoly s({2, 0, 1});  // t + 1/t = z^2 + 2
    IntPoly prev = IntPoly::constant(2), cur = s;
    result = IntPoly::constant(delta.coeff(0));
    const int top = delta.is_zero() ? 0 : delta.max_degree();
    for (int k = 1; k <= top; ++k) {
        if (delta.coeff(k) != delta.coeff(-k)) throw std::invalid_argument("Alexander polynomial is not symmetric");
        result = result + cur * IntPoly::constant(delta.coeff(k));
        IntPoly next = s * cur - prev;
        prev = std::move(cur);
        cur = std::move(next);
    }
    return result;
}

IntPoly conway(const DiagramCode& d) { return conway_from_alexander(alexander_symmetric(d)); }

BigInt determinant(const DiagramCode& d) {
    const std::size_t c = d.crossing_count();
    if (c <= 1) return 1;
    const auto rel = arc_relations(d);
    const std::size_t n = c - 1;
    std::vector<std::vector<std::int64_t>> m(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t x = 0; x < n; ++x) {
        const auto& r = rel[x];
        auto put = [&](std::size_t col, std::int64_t v) {
            if (col < n) m[x][col] += v;
        };
        put(r.over, 2);
        put(r.under_in, -1);
        put(r.under_out, -1);
    }
    // Hadamard bound decides how many primes the CRT needs
    double log2_bound = 0;
    for (const auto& row : m) {
        double s = 0;
        for (auto v : row) s += static_cast<double>(v) * static_cast<double>(v);
        if (s == 0) return 0;
        log2_bound += 0.5 * std::log2(s);
    }
    const auto& primes = big_primes();
    const std::size_t need = static_cast<std::size_t>(std::ceil((log2_bound + 2) / 61.0)) + 1;
    if (need > primes.size()) throw std::length_error("determinant: diagram too large");
    BigInt value = 0, mod = 1;
    for (std::size_t k = 0; k < need; ++k) {
        const std::uint64_t p = primes[k];
        const std::uint64_t r = det_mod(m, p);
        // Garner step: value + mod * h == r (mod p)
        const std::uint64_t vm = static_cast<std::uint64_t>(value % p);
        const std::uint64_t mm = static_cast<std::uint64_t>(mod % p);
        const std::uint64_t diff = r >= vm ? r - vm : r + p - vm;
        const std::uint64_t h = mulmod(diff, powmod(mm, p - 2, p), p);
        value += mod * h;
        mod *= p;
    }
    if (value > mod / 2) value -= mod;
    return value < 0 ? BigInt(-value) : value;
}

namespace {

struct PD {
    std::vector<std::array<int, 4>> x;
    int free_loops = 0;
};

PD planar_code(const DiagramCode& d) {
    require_valid(d);
    PD pd;
    const std::size_t c = d.crossing_count();
    std::vector<int> u_in(c), u_out(c), o_in(c), o_out(c), sign(c);
    int base = 0;
    for (const auto& comp : d.components()) {
        if (comp.empty()) {
            ++pd.free_loops;
            continue;
        }
        const int len = static_cast<int>(comp.size());
        for (int k = 0; k < len; ++k) {
            const auto& v = comp[k];
            const int in = base + (k + len - 1) % len, out = base + k;
            if (v.role == Role::Under)
                u_in[v.crossing] = in, u_out[v.crossing] = out;
            else
                o_in[v.crossing] = in, o_out[v.crossing] = out;
            sign[v.crossing] = v.sign;
        }
        base += len;
    }
    pd.x.resize(c);
    for (std::size_t i = 0; i < c; ++i) {
        if (sign[i] > 0)
            pd.x[i] = {u_in[i], o_out[i], u_out[i], o_in[i]};
        else
            pd.x[i] = {u_in[i], o_in[i], u_out[i], o_out[i]};
    }
    return pd;
}

using Matching = std::vector<std::pair<int, int>>;  // sorted pairs of open edge ends

}  // namespace

LaurentPoly kauffman_bracket(const DiagramCode& d, std::size_t max_crossings) {
    if (d.crossing_count() > max_crossings)
        throw std::length_error("bracket oracle refuses " + std::to_string(d.crossing_count()) + " crossings (guard " +
                                std::to_string(max_crossings) + ")");
    if (max_crossings > 30) throw std::length_error("bracket oracle guard above 30 is not supported");
    const PD pd = planar_code(d);
    const std::size_t c = pd.x.size();
    // exponents of A stay within [-3c - 2*loops, 3c + 2*loops]; loops <= 2c + free
    const int span = static_cast<int>(8 * c + 2 * pd.free_loops + 8);
    const int off = span;
    const std::size_t width = static_cast<std::size_t>(2 * span + 1);

    std::map<Matching, std::vector<std::int64_t>> states;
    {
        std::vector<std::int64_t> one(width, 0);
        one[off] = 1;
        states.emplace(Matching{}, std::move(one));
    }
    // pick crossings greedily by how many of their edges are already open
    std::vector<char> done(c, 0);
    std::vector<int> open_count(2 * c + 1, 0);
    auto shift_mul_d = [&](std::vector<std::int64_t>& p) {
        // multiply by -A^2 - A^-2
        std::vector<std::int64_t> r(width, 0);
        for (std::size_t e = 0; e < width; ++e) {
            if (p[e] == 0) continue;
            if (e + 2 >= width || e < 2) throw std::logic_error("bracket exponent overflow");
            r[e + 2] -= p[e];
            r[e - 2] -= p[e];
        }
        p.swap(r);
    };
    for (std::size_t step = 0; step < c; ++step) {
        std::size_t best = c;
        int best_score = -1;
        for (std::size_t i = 0; i < c; ++i) {
            if (done[i]) continue;
            int score = 0;
            for (int e : pd.x[i]) score += open_count[e];
            if (score > best_score) best_score = score, best = i;
        }
        done[best] = 1;
        const auto& X = pd.x[best];
        for (int e : X) open_count[e]++;
        std::map<Matching, std::vector<std::int64_t>> next;
        for (const auto& [m, poly] : states) {
            for (int smoothing = 0; smoothing < 2; ++smoothing) {
                const int arcs[2][2] = {{X[0], smoothing == 0 ? X[1] : X[3]}, {smoothing == 0 ? X[2] : X[1], smoothing == 0 ? X[3] : X[2]}};
                Matching mm = m;
                int loops = 0;
                for (const auto& arc : arcs) {
                    const int a = arc[0], b = arc[1];
                    if (a == b) {
                        ++loops;
                        continue;
                    }
                    auto find = [&](int e) -> int {
                        for (const auto& pr : mm) {
                            if (pr.first == e) return pr.second;
                            if (pr.second == e) return pr.first;
                        }
                        return -1;
                    };
                    auto erase = [&](int e) {
                        for (auto it = mm.begin(); it != mm.end(); ++it)
                            if (it->first == e || it->second == e) {
                                mm.erase(it);
                                return;
                            }
                    };
                    const int pa = find(a), pb = find(b);
                    if (pa < 0 && pb < 0) {
                        mm.emplace_back(a, b);
                    } else if (pa >= 0 && pb < 0) {
                        erase(a);
                        mm.emplace_back(pa, b);
                    } else if (pa < 0 && pb >= 0) {
                        erase(b);
                        mm.emplace_back(a, pb);
                    } else if (pa == b) {
                        erase(a);
                        ++loops;
                    } else {
                        erase(a);
                        erase(b);
                        mm.emplace_back(pa, pb);
                    }
                }
                for (auto& pr : mm)
                    if (pr.first > pr.second) std::swap(pr.first, pr.second);
                std::sort(mm.begin(), mm.end());
                std::vector<std::int64_t> p = poly;
                // A-smoothing contributes A, B-smoothing A^-1
                std::vector<std::int64_t> shifted(width, 0);
                const int sh = smoothing == 0 ? 1 : -1;
                for (std::size_t e = 0; e < width; ++e) {
                    if (p[e] == 0) continue;
                    const auto ne = static_cast<std::ptrdiff_t>(e) + sh;
                    if (ne < 0 || ne >= static_cast<std::ptrdiff_t>(width)) throw std::logic_error("bracket exponent overflow");
                    shifted[static_cast<std::size_t>(ne)] += p[e];
                }
                for (int l = 0; l < loops; ++l) shift_mul_d(shifted);
                auto [it, inserted] = next.emplace(std::move(mm), shifted);
                if (!inserted)
                    for (std::size_t e = 0; e < width; ++e) it->second[e] += shifted[e];
            }
        }
        states.swap(next);
    }
    if (states.size() != 1 || !states.begin()->first.empty()) throw std::logic_error("bracket contraction left open ends");
    std::vector<std::int64_t> total = states.begin()->second;
    for (int l = 0; l < pd.free_loops; ++l) shift_mul_d(total);
    // every state closed all its loops, so divide one factor d back out:
    // d Q = P  <=>  (1 + A^4) Q = -A^2 P
    std::vector<std::int64_t> r(width, 0), q(width, 0);
    for (std::size_t e = 0; e + 2 < width; ++e) r[e + 2] = -total[e];
    for (std::size_t e = 0; e < width; ++e) q[e] = r[e] - (e >= 4 ? q[e - 4] : 0);
    for (std::size_t e = width - 4; e < width; ++e)
        if (q[e] != 0) throw std::logic_error("bracket not divisible by the loop value");
    LaurentPoly out;
    for (std::size_t e = 0; e < width; ++e)
        if (q[e] != 0) out.add(static_cast<int>(e) - off, q[e]);
    return out;
}

LaurentPoly jones_oracle(const DiagramCode& d, std::size_t max_crossings) {
    const LaurentPoly br = kauffman_bracket(d, max_crossings);
    const long long w = writhe(d);
    // (-A^3)^-w
    const LaurentPoly f = LaurentPoly::monomial(static_cast<int>(-3 * w), (w % 2 == 0) ? 1 : -1);
    const LaurentPoly p = f * br;
    LaurentPoly out;
    for (const auto& [e, c] : p.terms()) {
        if (e % 4 != 0) throw std::domain_error("Jones polynomial has half-integer exponents (even component count)");
        out.add(-e / 4, c);
    }
    return out;
}

Rational c2_from_jones(const LaurentPoly& v) {
    BigInt s = 0;
    for (const auto& [k, a] : v.terms()) s += a * k * k;
    return Rational(-s, 6);
}

Rational v3_from_jones(const LaurentPoly& v) {
    BigInt s = 0;
    for (const auto& [k, a] : v.terms()) s += a * k * k * k;
    return Rational(-s, 36);
}

}  // namespace knotlab

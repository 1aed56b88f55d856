#include "knotlab/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace knotlab {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct FamilyName {
    Family family;
    const char* name;
};

constexpr FamilyName kFamilies[] = {
    {Family::PetalumaKnot, "petaluma"},       {Family::PetalumaLink, "petaluma-link"},
    {Family::GridKnot, "grid"},               {Family::Griddle, "griddle"},
    {Family::JumpPolygon, "jump"},            {Family::GaussianPolygon, "gaussian"},
    {Family::FourierLoop, "fourier"},         {Family::BraidWalk, "braid"},
    {Family::FlatTorus, "flat-torus"},        {Family::Star, "star"},
    {Family::Billiard, "billiard"},
};

int get_int(const nlohmann::json& params, const char* key) {
    const std::string field = std::string("params.") + key;
    if (!params.contains(key)) throw SpecError(field, "missing");
    const auto& v = params.at(key);
    if (!v.is_number_integer()) throw SpecError(field, "expected an integer");
    const auto x = v.get<long long>();
    if (x < 0 || x > 100000000) throw SpecError(field, "out of range");
    return static_cast<int>(x);
}

int get_int_or(const nlohmann::json& params, const char* key, int fallback) {
    return params.contains(key) ? get_int(params, key) : fallback;
}

std::string get_option(const nlohmann::json& options, const char* key, const std::string& fallback) {
    if (!options.contains(key)) return fallback;
    const auto& v = options.at(key);
    if (!v.is_string()) throw SpecError(std::string("options.") + key, "expected a string");
    return v.get<std::string>();
}

std::vector<int> link_petals(const ModelSpec& s) {
    const auto& p = s.params;
    if (!p.contains("petals")) throw SpecError("params.petals", "missing");
    const auto& v = p.at("petals");
    std::vector<int> out;
    if (v.is_array()) {
        for (const auto& x : v) {
            if (!x.is_number_integer()) throw SpecError("params.petals", "expected integers");
            out.push_back(x.get<int>());
        }
    } else {
        const int per = get_int(p, "petals");
        const int k = get_int_or(p, "components", 2);
        out.assign(static_cast<std::size_t>(k), per);
    }
    return out;
}

std::vector<int> jump_counts(const ModelSpec& s) {
    const auto& p = s.params;
    if (p.contains("counts")) {
        std::vector<int> out;
        if (!p.at("counts").is_array()) throw SpecError("params.counts", "expected an array");
        for (const auto& x : p.at("counts")) {
            if (!x.is_number_integer()) throw SpecError("params.counts", "expected integers");
            out.push_back(x.get<int>());
        }
        return out;
    }
    std::vector<int> out{get_int(p, "n")};
    if (p.contains("m")) out.push_back(get_int(p, "m"));
    return out;
}

JumpDomain jump_domain(const ModelSpec& s) {
    const auto d = get_option(s.options, "domain", "cube");
    if (d == "cube") return JumpDomain::Cube;
    if (d == "ball") return JumpDomain::Ball;
    if (d == "sphere") return JumpDomain::Sphere;
    if (d == "gaussian") return JumpDomain::Gaussian;
    throw SpecError("options.domain", "unsupported domain '" + d + "'");
}

FourierScheme fourier_scheme(const ModelSpec& s) {
    FourierScheme f;
    const auto name = get_option(s.options, "scheme", "sharp-cutoff");
    if (name == "sharp-cutoff") {
        f.kind = FourierScheme::SharpCutoff;
    } else if (name == "exp") {
        f.kind = FourierScheme::Exp;
    } else if (name == "gauss") {
        f.kind = FourierScheme::Gauss;
    } else if (name == "power") {
        f.kind = FourierScheme::Power;
        if (s.options.contains("alpha")) {
            if (!s.options.at("alpha").is_number()) throw SpecError("options.alpha", "expected a number");
            f.alpha = s.options.at("alpha").get<double>();
        }
        if (!(f.alpha > 0.0)) throw SpecError("options.alpha", "must be positive");
    } else {
        throw SpecError("options.scheme", "unsupported scheme '" + name + "'");
    }
    return f;
}

int fourier_points(const ModelSpec& s) {
    const int n = get_int(s.params, "n");
    return get_int_or(s.params, "points", std::max(16 * n, 48));
}

Closure braid_closure(const ModelSpec& s) {
    const auto c = get_option(s.options, "closure", "trace");
    if (c == "trace") return Closure::Trace;
    if (c == "plat") return Closure::Plat;
    throw SpecError("options.closure", "expected 'trace' or 'plat'");
}

CrisscrossBase crisscross_base(const ModelSpec& s) {
    switch (s.family) {
        case Family::Star: return {CrisscrossBase::Star, get_int(s.params, "n"), 0};
        case Family::FlatTorus:
            return {CrisscrossBase::FlatTorus, get_int(s.params, "p"), get_int(s.params, "q")};
        case Family::Billiard:
            return {CrisscrossBase::Billiard, get_int(s.params, "b"), get_int(s.params, "a")};
        default: throw std::logic_error("not a crisscross family");
    }
}

double fourier_weight(int k, int n, const FourierScheme& s) {
    const double x = static_cast<double>(k) / n;
    switch (s.kind) {
        case FourierScheme::SharpCutoff: return k <= n ? 1.0 : 0.0;
        case FourierScheme::Exp: return std::exp(-x);
        case FourierScheme::Gauss: return std::exp(-x * x);
        case FourierScheme::Power: return std::pow(static_cast<double>(k), -s.alpha);
    }
    return 0.0;
}

}  // namespace

std::string family_name(Family f) {
    for (const auto& e : kFamilies)
        if (e.family == f) return e.name;
    throw std::logic_error("unknown family");
}

Family family_from_name(const std::string& name) {
    for (const auto& e : kFamilies)
        if (name == e.name) return e.family;
    throw SpecError("family", "unknown model family '" + name + "'");
}

int ModelSpec::scale() const {
    switch (family) {
        case Family::PetalumaKnot: return (get_int(params, "petals") - 1) / 2;
        case Family::PetalumaLink: return link_petals(*this).front() / 2;
        case Family::BraidWalk: return get_int(params, "length");
        case Family::FlatTorus: return get_int(params, "p");
        case Family::Billiard: return get_int(params, "a");
        case Family::JumpPolygon: return jump_counts(*this).front();
        default: return get_int(params, "n");
    }
}

bool ModelSpec::yields_knots() const {
    switch (family) {
        case Family::PetalumaLink: return false;
        case Family::JumpPolygon: return jump_counts(*this).size() == 1;
        case Family::BraidWalk: return false;
        case Family::FlatTorus: return std::gcd(get_int(params, "p"), get_int(params, "q")) == 1;
        default: return true;
    }
}

int ModelSpec::min_components() const {
    if (family == Family::PetalumaLink) return static_cast<int>(link_petals(*this).size());
    if (family == Family::JumpPolygon) return static_cast<int>(jump_counts(*this).size());
    return 1;
}

void require_valid(const ModelSpec& s) {
    if (!s.params.is_object()) throw SpecError("params", "expected an object");
    if (!s.options.is_object()) throw SpecError("options", "expected an object");
    switch (s.family) {
        case Family::PetalumaKnot: {
            const int p = get_int(s.params, "petals");
            if (p % 2 == 0 || p < 1) throw SpecError("params.petals", "must be odd and positive");
            break;
        }
        case Family::PetalumaLink: {
            const auto v = link_petals(s);
            if (v.size() < 2) throw SpecError("params.petals", "need at least two components");
            for (int x : v)
                if (x < 2 || x % 2 != 0) throw SpecError("params.petals", "per-component petal counts must be even");
            break;
        }
        case Family::GridKnot:
        case Family::Griddle:
            if (get_int(s.params, "n") < 2) throw SpecError("params.n", "grid size must be at least 2");
            break;
        case Family::JumpPolygon: {
            for (int c : jump_counts(s))
                if (c < 3) throw SpecError("params.n", "each component needs at least 3 vertices");
            jump_domain(s);
            break;
        }
        case Family::GaussianPolygon:
            if (get_int(s.params, "n") < 3) throw SpecError("params.n", "need at least 3 steps");
            break;
        case Family::FourierLoop: {
            const int n = get_int(s.params, "n");
            if (n < 1) throw SpecError("params.n", "must be positive");
            fourier_scheme(s);
            if (fourier_points(s) < 12 * n) throw SpecError("params.points", "need at least 12 n sample points");
            break;
        }
        case Family::BraidWalk: {
            const int m = get_int(s.params, "strands");
            if (m < 2) throw SpecError("params.strands", "need at least 2 strands");
            if (get_int(s.params, "length") < 1) throw SpecError("params.length", "must be positive");
            if (braid_closure(s) == Closure::Plat && m % 2 != 0)
                throw SpecError("params.strands", "plat closure needs an even strand count");
            break;
        }
        case Family::FlatTorus:
            if (get_int(s.params, "p") < 2) throw SpecError("params.p", "must be at least 2");
            if (get_int(s.params, "q") < 1) throw SpecError("params.q", "must be positive");
            break;
        case Family::Star:
            if (get_int(s.params, "n") < 2) throw SpecError("params.n", "must be at least 2");
            break;
        case Family::Billiard: {
            const int b = get_int(s.params, "b"), a = get_int(s.params, "a");
            if (a < 3 || b < 2) throw SpecError("params", "billiard needs a >= 3 and b >= 2");
            if (std::gcd(a, b) != 1) throw SpecError("params", "billiard ratio b:a must be coprime");
            break;
        }
    }
}

ModelSpec parse_model_spec(const nlohmann::json& j) {
    if (!j.is_object()) throw SpecError("model", "expected a JSON object");
    if (!j.contains("family") || !j.at("family").is_string()) throw SpecError("family", "missing or not a string");
    for (const auto& [key, _] : j.items())
        if (key != "family" && key != "params" && key != "options" && key != "version")
            throw SpecError(key, "unknown model field");
    ModelSpec s;
    s.family = family_from_name(j.at("family").get<std::string>());
    if (j.contains("params")) s.params = j.at("params");
    if (j.contains("options")) s.options = j.at("options");
    require_valid(s);
    return s;
}

nlohmann::json to_json(const ModelSpec& s) {
    return {{"family", family_name(s.family)}, {"params", s.params}, {"options", s.options}};
}

PetalPermutation sample_petaluma(int petals, RandomStream& rng) {
    if (petals < 1 || petals % 2 == 0) throw std::invalid_argument("petal count must be odd");
    PetalPermutation p;
    p.heights.resize(static_cast<std::size_t>(petals));
    std::iota(p.heights.begin(), p.heights.end(), 0);
    rng.shuffle(p.heights);
    return p;
}

DiagramCode petaluma_link_diagram(const std::vector<int>& petals, const std::vector<int>& heights) {
    if (petals.size() < 2) throw std::invalid_argument("a petal link needs at least two components");
    std::vector<int> comp_of, index_in;
    for (std::size_t c = 0; c < petals.size(); ++c) {
        if (petals[c] < 2 || petals[c] % 2 != 0)
            throw std::invalid_argument("per-component petal counts must be even");
        for (int i = 0; i < petals[c]; ++i) {
            comp_of.push_back(static_cast<int>(c));
            index_in.push_back(i);
        }
    }
    const std::size_t total = comp_of.size();
    if (heights.size() != total || !is_permutation(heights))
        throw std::invalid_argument("heights must be a permutation of all strands");

    // Strands are numbered by key order (component-major), so strand s and
    // the sort key coincide. Strand s runs in direction tau(s); along it the
    // other strands are met in increasing key order, reversed when tau = -1.
    auto tau = [&](std::size_t s) { return index_in[s] % 2 == 0 ? 1 : -1; };
    auto crossing_id = [&](std::size_t s, std::size_t t) {
        const std::size_t a = std::min(s, t), b = std::max(s, t);
        // pairs (a, b) with a < b in lexicographic order
        return static_cast<std::uint32_t>(a * total - a * (a + 1) / 2 + (b - a - 1));
    };
    std::vector<Component> comps(petals.size());
    for (std::size_t s = 0; s < total; ++s) {
        std::vector<std::size_t> others;
        for (std::size_t t = 0; t < total; ++t)
            if (t != s) others.push_back(t);
        if (tau(s) < 0) std::reverse(others.begin(), others.end());
        for (std::size_t t : others) {
            const bool s_over = heights[s] > heights[t];
            const std::size_t over = s_over ? s : t, under = s_over ? t : s;
            const int sign = tau(over) * tau(under) * (under > over ? 1 : -1);
            comps[static_cast<std::size_t>(comp_of[s])].push_back(
                {crossing_id(s, t), s_over ? Role::Over : Role::Under, sign});
        }
    }
    return relabel_by_first_visit(DiagramCode(std::move(comps), total * (total - 1) / 2));
}

DiagramCode sample_petaluma_link(const std::vector<int>& petals, RandomStream& rng) {
    const int total = std::accumulate(petals.begin(), petals.end(), 0);
    std::vector<int> h(static_cast<std::size_t>(total));
    std::iota(h.begin(), h.end(), 0);
    rng.shuffle(h);
    return petaluma_link_diagram(petals, h);
}

GridDiagram sample_grid(int n, RandomStream& rng) {
    if (n < 2) throw std::invalid_argument("grid size must be at least 2");
    GridDiagram g;
    g.rho.resize(static_cast<std::size_t>(n));
    std::iota(g.rho.begin(), g.rho.end(), 0);
    g.sigma = g.rho;
    rng.shuffle(g.rho);
    rng.shuffle(g.sigma);
    return g;
}

DiagramCode switch_crossings(const DiagramCode& d, const std::vector<int>& coins) {
    if (coins.size() != d.crossing_count()) throw std::invalid_argument("one coin per crossing expected");
    auto comps = d.components();
    for (auto& comp : comps)
        for (auto& v : comp)
            if (coins[v.crossing] < 0) {
                v.role = opposite(v.role);
                v.sign = -v.sign;
            }
    return DiagramCode(std::move(comps), d.crossing_count());
}

DiagramCode sample_griddle(int n, RandomStream& rng) {
    const auto curve = grid_to_diagram(sample_grid(n, rng));
    std::vector<int> coins(curve.crossing_count());
    for (auto& c : coins) c = rng.coin();
    return switch_crossings(curve, coins);
}

Polygon3D sample_jump(const std::vector<int>& counts, JumpDomain domain, RandomStream& rng) {
    if (counts.empty()) throw std::invalid_argument("need at least one component");
    Polygon3D p;
    for (int n : counts) {
        if (n < 3) throw std::invalid_argument("each component needs at least 3 vertices");
        std::vector<Vec3> comp;
        comp.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            Vec3 x{};
            switch (domain) {
                case JumpDomain::Cube:
                    for (auto& c : x) c = rng.uniform01();
                    break;
                case JumpDomain::Gaussian:
                    for (auto& c : x) c = rng.normal();
                    break;
                case JumpDomain::Sphere:
                case JumpDomain::Ball: {
                    x = random_direction(rng);
                    if (domain == JumpDomain::Ball) {
                        const double r = rng.uniform01();
                        for (auto& c : x) c *= r;
                    }
                    break;
                }
            }
            comp.push_back(x);
        }
        p.components.push_back(std::move(comp));
    }
    return p;
}

Polygon3D sample_gaussian_polygon(int n, RandomStream& rng) {
    if (n < 3) throw std::invalid_argument("need at least 3 steps");
    for (;;) {
        std::vector<Vec3> steps(static_cast<std::size_t>(n));
        Vec3 mean{};
        for (auto& s : steps)
            for (int a = 0; a < 3; ++a) {
                s[a] = rng.normal();
                mean[a] += s[a] / n;
            }
        double spread = 0;
        for (auto& s : steps)
            for (int a = 0; a < 3; ++a) {
                s[a] -= mean[a];
                spread = std::max(spread, std::abs(s[a]));
            }
        if (spread < 1e-12) continue;
        std::vector<Vec3> verts;
        Vec3 at{};
        for (const auto& s : steps) {
            verts.push_back(at);
            for (int a = 0; a < 3; ++a) at[a] += s[a];
        }
        return Polygon3D{{std::move(verts)}};
    }
}

int fourier_modes(int n, const FourierScheme& scheme) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    if (scheme.kind == FourierScheme::SharpCutoff) return n;
    constexpr int kMaxModes = 10000;
    constexpr double kTail = 1e-6;
    // amplitudes decay monotonically, so scan back from the cap
    double tail = 0;
    int k = kMaxModes;
    for (; k >= 1; --k) {
        const double a = fourier_weight(k, n, scheme) / k;
        if (tail + a >= kTail) break;
        tail += a;
    }
    return std::max(k, 1);
}

Polygon3D sample_fourier_loop(int n, const FourierScheme& scheme, int points, RandomStream& rng) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    if (points < 12 * n) throw std::invalid_argument("need at least 12 n sample points");
    const int modes = fourier_modes(n, scheme);
    std::vector<Vec3> z(static_cast<std::size_t>(modes)), zp(static_cast<std::size_t>(modes));
    std::vector<double> amp(static_cast<std::size_t>(modes));
    for (int k = 1; k <= modes; ++k) {
        amp[k - 1] = fourier_weight(k, n, scheme) / k;
        for (auto& c : z[k - 1]) c = rng.normal();
        for (auto& c : zp[k - 1]) c = rng.normal();
    }
    std::vector<Vec3> verts(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j) {
        const double t = 2 * kPi * j / points;
        Vec3 r{};
        for (int k = 1; k <= modes; ++k) {
            const double c = std::cos(k * t) * amp[k - 1], s = std::sin(k * t) * amp[k - 1];
            for (int a = 0; a < 3; ++a) r[a] += c * z[k - 1][a] + s * zp[k - 1][a];
        }
        verts[j] = r;
    }
    return Polygon3D{{std::move(verts)}};
}

BraidWord sample_braid_walk(int strands, int length, Closure closure, RandomStream& rng) {
    if (strands < 2) throw std::invalid_argument("need at least 2 strands");
    if (length < 1) throw std::invalid_argument("length must be positive");
    BraidWord b;
    b.strands = strands;
    b.closure = closure;
    b.letters.resize(static_cast<std::size_t>(length));
    const auto g = static_cast<std::uint64_t>(strands - 1);
    for (auto& l : b.letters) {
        const auto r = rng.below(2 * g);
        l = static_cast<int>(r % g) + 1;
        if (r >= g) l = -l;
    }
    require_valid(b);
    return b;
}

namespace {

std::vector<int> base_letters(const CrisscrossBase& base, int& strands) {
    switch (base.kind) {
        case CrisscrossBase::Star:
            strands = base.p;
            return flat_torus_word(base.p, 2 * base.p + 1);
        case CrisscrossBase::FlatTorus:
            strands = base.p;
            return flat_torus_word(base.p, base.q);
        case CrisscrossBase::Billiard: {
            auto bb = billiard_base(base.p, base.q);
            strands = bb.strands;
            return bb.letters;
        }
    }
    return {};
}

}  // namespace

BraidWord sample_crisscross_word(const CrisscrossBase& base, RandomStream& rng) {
    BraidWord b;
    b.letters = base_letters(base, b.strands);
    for (auto& l : b.letters) l *= rng.coin();
    return b;
}

DiagramCode sample_crisscross(const CrisscrossBase& base, RandomStream& rng) {
    const auto w = sample_crisscross_word(base, rng);
    if (base.kind == CrisscrossBase::Billiard) {
        const auto bb = billiard_base(base.p, base.q);
        return close_braid(bb.strands, w.letters, bb.ends);
    }
    return braid_closure_to_diagram(w);
}

RawSample draw_raw(const ModelSpec& s, RandomStream& rng) {
    switch (s.family) {
        case Family::PetalumaKnot: return sample_petaluma(get_int(s.params, "petals"), rng);
        case Family::PetalumaLink: {
            const auto petals = link_petals(s);
            PetalPermutation h;
            h.heights.resize(static_cast<std::size_t>(std::accumulate(petals.begin(), petals.end(), 0)));
            std::iota(h.heights.begin(), h.heights.end(), 0);
            rng.shuffle(h.heights);
            return h;
        }
        case Family::GridKnot: return sample_grid(get_int(s.params, "n"), rng);
        case Family::Griddle: return sample_griddle(get_int(s.params, "n"), rng);
        case Family::JumpPolygon: return sample_jump(jump_counts(s), jump_domain(s), rng);
        case Family::GaussianPolygon: return sample_gaussian_polygon(get_int(s.params, "n"), rng);
        case Family::FourierLoop:
            return sample_fourier_loop(get_int(s.params, "n"), fourier_scheme(s), fourier_points(s), rng);
        case Family::BraidWalk:
            return sample_braid_walk(get_int(s.params, "strands"), get_int(s.params, "length"), braid_closure(s), rng);
        case Family::FlatTorus:
        case Family::Star: return sample_crisscross_word(crisscross_base(s), rng);
        case Family::Billiard: return sample_crisscross(crisscross_base(s), rng);
    }
    throw std::logic_error("unhandled family");
}

DiagramCode to_diagram(const ModelSpec& s, const RawSample& raw, RandomStream& rng) {
    struct Visitor {
        const ModelSpec& s;
        RandomStream& rng;
        DiagramCode operator()(const PetalPermutation& p) const {
            if (s.family == Family::PetalumaLink) return petaluma_link_diagram(link_petals(s), p.heights);
            return grid_to_diagram(petal_to_grid(p));
        }
        DiagramCode operator()(const GridDiagram& g) const { return grid_to_diagram(g); }
        DiagramCode operator()(const BraidWord& b) const { return braid_closure_to_diagram(b); }
        DiagramCode operator()(const Polygon3D& p) const { return project_generic(p, rng); }
        DiagramCode operator()(const DiagramCode& d) const { return d; }
    };
    return std::visit(Visitor{s, rng}, raw);
}

DiagramCode draw_diagram(const ModelSpec& s, RandomStream& rng) {
    const auto raw = draw_raw(s, rng);
    return to_diagram(s, raw, rng);
}

nlohmann::json raw_to_json(const RawSample& raw) {
    struct Visitor {
        nlohmann::json operator()(const PetalPermutation& p) const { return {{"heights", p.heights}}; }
        nlohmann::json operator()(const GridDiagram& g) const { return {{"rho", g.rho}, {"sigma", g.sigma}}; }
        nlohmann::json operator()(const BraidWord& b) const {
            return {{"strands", b.strands},
                    {"letters", b.letters},
                    {"closure", b.closure == Closure::Trace ? "trace" : "plat"}};
        }
        nlohmann::json operator()(const Polygon3D& p) const { return {{"polygon", to_json(p)}}; }
        nlohmann::json operator()(const DiagramCode& d) const { return {{"diagram", to_json(d)}}; }
    };
    return std::visit(Visitor{}, raw);
}

bool has_braid_form(Family f) {
    switch (f) {
        case Family::PetalumaKnot:
        case Family::GridKnot:
        case Family::BraidWalk:
        case Family::FlatTorus:
        case Family::Star: return true;
        default: return false;
    }
}

BraidWord to_braid(const ModelSpec& s, const RawSample& raw) {
    if (!has_braid_form(s.family)) throw SpecError("family", family_name(s.family) + " samples have no braid export");
    if (const auto* p = std::get_if<PetalPermutation>(&raw)) return grid_to_braid(petal_to_grid(*p));
    if (const auto* g = std::get_if<GridDiagram>(&raw)) return grid_to_braid(*g);
    const auto& b = std::get<BraidWord>(raw);
    if (b.closure != Closure::Trace) throw SpecError("options.closure", "only trace closures export as braids");
    return b;
}

}  // namespace knotlab

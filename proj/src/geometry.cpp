#include "knotlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace knotlab {

namespace {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 normalized(const Vec3& a) {
    const double n = std::sqrt(dot(a, a));
    if (!(n > 0)) throw std::invalid_argument("zero direction");
    return {a[0] / n, a[1] / n, a[2] / n};
}

struct P2 {
    double x, y;
};

double cross2(P2 a, P2 b) { return a.x * b.y - a.y * b.x; }
P2 sub(P2 a, P2 b) { return {a.x - b.x, a.y - b.y}; }

double point_segment_distance(P2 p, P2 a, P2 b) {
    const P2 ab = sub(b, a), ap = sub(p, a);
    const double l2 = ab.x * ab.x + ab.y * ab.y;
    double t = l2 > 0 ? (ap.x * ab.x + ap.y * ab.y) / l2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const P2 q{a.x + t * ab.x - p.x, a.y + t * ab.y - p.y};
    return std::hypot(q.x, q.y);
}

struct Segment {
    std::size_t comp;
    std::size_t index;  // within component
    P2 a, b;
    double ha, hb;
};

struct Hit {
    double t;
    std::uint32_t crossing;
    Role role;
};

}  // namespace

void require_valid(const Polygon3D& p) {
    if (p.components.empty()) throw std::invalid_argument("polygon has no components");
    for (std::size_t k = 0; k < p.components.size(); ++k) {
        const auto& c = p.components[k];
        if (c.size() < 3) throw std::invalid_argument("polygon component " + std::to_string(k) + " has fewer than 3 vertices");
        for (std::size_t i = 0; i < c.size(); ++i) {
            const auto& a = c[i];
            const auto& b = c[(i + 1) % c.size()];
            if (a == b) throw std::invalid_argument("polygon component " + std::to_string(k) + " repeats a vertex");
            for (double x : a)
                if (!std::isfinite(x)) throw std::invalid_argument("polygon has a non-finite coordinate");
        }
    }
}

DiagramCode project_with_frame(const Polygon3D& p, const Vec3& u, const Vec3& v, const Vec3& height) {
    require_valid(p);
    std::vector<Segment> segs;
    std::vector<std::size_t> comp_start;
    for (std::size_t k = 0; k < p.components.size(); ++k) {
        const auto& c = p.components[k];
        comp_start.push_back(segs.size());
        for (std::size_t i = 0; i < c.size(); ++i) {
            const auto& a = c[i];
            const auto& b = c[(i + 1) % c.size()];
            segs.push_back({k, i, {dot(a, u), dot(a, v)}, {dot(b, u), dot(b, v)}, dot(a, height), dot(b, height)});
        }
    }
    const double tol = kGenericTolerance;
    std::vector<std::vector<Hit>> hits(segs.size());
    std::uint32_t next = 0;
    std::vector<int> signs;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& A = segs[i];
        const std::size_t na = p.components[A.comp].size();
        for (std::size_t j = i + 1; j < segs.size(); ++j) {
            const auto& B = segs[j];
            if (A.comp == B.comp) {
                const std::size_t d = B.index - A.index;
                if (d == 1 || d + 1 == na) continue;  // adjacent segments
            }
            const P2 r = sub(A.b, A.a), s = sub(B.b, B.a);
            // cheap bounding box rejection
            if (std::max(A.a.x, A.b.x) + tol < std::min(B.a.x, B.b.x) ||
                std::max(B.a.x, B.b.x) + tol < std::min(A.a.x, A.b.x) ||
                std::max(A.a.y, A.b.y) + tol < std::min(B.a.y, B.b.y) ||
                std::max(B.a.y, B.b.y) + tol < std::min(A.a.y, A.b.y))
                continue;
            const double denom = cross2(r, s);
            const double scale = std::hypot(r.x, r.y) * std::hypot(s.x, s.y);
            if (std::abs(denom) <= tol * scale) {
                const double gap = std::min({point_segment_distance(A.a, B.a, B.b), point_segment_distance(A.b, B.a, B.b),
                                             point_segment_distance(B.a, A.a, A.b), point_segment_distance(B.b, A.a, A.b)});
                if (gap < tol) throw NonGenericProjection("parallel overlap in projection");
                continue;
            }
            const P2 qp = sub(B.a, A.a);
            const double t = cross2(qp, s) / denom;
            const double w = cross2(qp, r) / denom;
            if (t < -tol || t > 1 + tol || w < -tol || w > 1 + tol) continue;
            if (t < tol || t > 1 - tol || w < tol || w > 1 - tol) throw NonGenericProjection("projection hits a vertex");
            const double ha = A.ha + t * (A.hb - A.ha);
            const double hb = B.ha + w * (B.hb - B.ha);
            if (std::abs(ha - hb) < tol) throw NonGenericProjection("strands meet in space");
            const bool a_over = ha > hb;
            const double frame = a_over ? cross2(r, s) : cross2(s, r);
            const int sg = frame > 0 ? 1 : -1;
            hits[i].push_back({t, next, a_over ? Role::Over : Role::Under});
            hits[j].push_back({w, next, a_over ? Role::Under : Role::Over});
            signs.push_back(sg);
            ++next;
        }
    }
    std::vector<Component> comps(p.components.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
        auto& h = hits[i];
        std::sort(h.begin(), h.end(), [](const Hit& x, const Hit& y) { return x.t < y.t; });
        for (std::size_t k = 1; k < h.size(); ++k)
            if (h[k].t - h[k - 1].t < tol) throw NonGenericProjection("triple point in projection");
        for (const auto& x : h) comps[segs[i].comp].push_back({x.crossing, x.role, signs[x.crossing]});
    }
    return relabel_by_first_visit(DiagramCode(std::move(comps), next));
}

DiagramCode project(const Polygon3D& p, const Vec3& dir_in) {
    const Vec3 d = normalized(dir_in);
    const Vec3 e = std::abs(d[0]) <= std::abs(d[1]) && std::abs(d[0]) <= std::abs(d[2])
                       ? Vec3{1, 0, 0}
                       : (std::abs(d[1]) <= std::abs(d[2]) ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
    const Vec3 u = normalized(cross(e, d));
    const Vec3 v = cross(d, u);
    return project_with_frame(p, u, v, d);
}

Vec3 random_direction(RandomStream& rng) {
    for (;;) {
        Vec3 g{rng.normal(), rng.normal(), rng.normal()};
        const double n = std::sqrt(dot(g, g));
        if (n > 1e-6) return {g[0] / n, g[1] / n, g[2] / n};
    }
}

DiagramCode project_generic(const Polygon3D& p, RandomStream& rng, int max_attempts) {
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        try {
            return project(p, random_direction(rng));
        } catch (const NonGenericProjection&) {
        }
    }
    throw NonGenericProjection("no generic projection found in " + std::to_string(max_attempts) + " attempts");
}

nlohmann::json to_json(const Polygon3D& p) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& c : p.components) {
        nlohmann::json cj = nlohmann::json::array();
        for (const auto& v : c) cj.push_back({v[0], v[1], v[2]});
        out.push_back(std::move(cj));
    }
    return out;
}

Polygon3D polygon_from_json(const nlohmann::json& j) {
    Polygon3D p;
    for (const auto& cj : j) {
        std::vector<Vec3> c;
        for (const auto& vj : cj) c.push_back({vj.at(0).get<double>(), vj.at(1).get<double>(), vj.at(2).get<double>()});
        p.components.push_back(std::move(c));
    }
    return p;
}

}  // namespace knotlab

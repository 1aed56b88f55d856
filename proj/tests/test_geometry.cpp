#include <doctest.h>

#include <fstream>

#include "knotlab/dt.hpp"
#include "knotlab/geometry.hpp"
#include "knotlab/invariants.hpp"
#include "support.hpp"

using namespace knotlab;

namespace {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double orient(double ax, double ay, double bx, double by, double cx, double cy) {
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}

// All-pairs count of proper crossings between non-adjacent projected edges.
std::size_t brute_crossings(const Polygon3D& p, const Vec3& u, const Vec3& v) {
    struct Seg {
        double ax, ay, bx, by;
        std::size_t comp, idx, len;
    };
    std::vector<Seg> segs;
    for (std::size_t c = 0; c < p.components.size(); ++c) {
        const auto& pts = p.components[c];
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& a = pts[i];
            const auto& b = pts[(i + 1) % pts.size()];
            segs.push_back({dot(a, u), dot(a, v), dot(b, u), dot(b, v), c, i, pts.size()});
        }
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < segs.size(); ++i)
        for (std::size_t j = i + 1; j < segs.size(); ++j) {
            const auto& s = segs[i];
            const auto& t = segs[j];
            if (s.comp == t.comp && ((s.idx + 1) % s.len == t.idx || (t.idx + 1) % t.len == s.idx)) continue;
            const double d1 = orient(s.ax, s.ay, s.bx, s.by, t.ax, t.ay);
            const double d2 = orient(s.ax, s.ay, s.bx, s.by, t.bx, t.by);
            const double d3 = orient(t.ax, t.ay, t.bx, t.by, s.ax, s.ay);
            const double d4 = orient(t.ax, t.ay, t.bx, t.by, s.bx, s.by);
            if (d1 * d2 < 0 && d3 * d4 < 0) ++count;
        }
    return count;
}

Polygon3D load_trefoil() {
    std::ifstream in(test::fixture("trefoil_polygon.json"));
    REQUIRE(in);
    const auto j = nlohmann::json::parse(in);
    return polygon_from_json(j.at("polygon"));
}

struct KnotInvariants {
    BigInt det;
    long long c2;
    Rational v3;
    bool operator==(const KnotInvariants&) const = default;
};

KnotInvariants knot_invariants(const DiagramCode& d) { return {determinant(d), casson_c2(d), v3(d)}; }

}  // namespace

TEST_CASE("planar square") {
    const Polygon3D square{{{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}}};
    const auto d = project(square, {0, 0, 1});
    CHECK(d.crossing_count() == 0);
    CHECK(d.is_knot());
    CHECK(determinant(d) == 1);
    RandomStream rng(Seed{21, 0});
    for (int k = 0; k < 20; ++k) {
        const auto e = project_generic(square, rng);
        CHECK(e.crossing_count() == 0);
        CHECK(casson_c2(e) == 0);
    }
    // Seen edge-on the square collapses onto a line.
    CHECK_THROWS_AS(project(square, {1, 0, 0}), NonGenericProjection);
}

TEST_CASE("two distant triangles") {
    const Polygon3D p{{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0.2}}, {{10, 10, 10}, {11, 10, 10}, {10, 11, 10.3}}}};
    RandomStream rng(Seed{22, 0});
    const auto d = project_generic(p, rng);
    CHECK(d.component_count() == 2);
    CHECK(d.crossing_count() == 0);
    CHECK(linking_number(d, 0, 1) == 0);
}

TEST_CASE("six-stick trefoil fixture") {
    const auto p = load_trefoil();
    require_valid(p);
    RandomStream rng(Seed{23, 0});
    for (int k = 0; k < 30; ++k) {
        const auto d = project_generic(p, rng);
        REQUIRE(validate_diagram(d).ok());
        CHECK(determinant(d) == 3);
        CHECK(casson_c2(d) == 1);
        CHECK(v3(d) == -1);
        CHECK(jones_oracle(d) == jones_oracle(mirror(parse_dt("4 6 2"))));
    }
}

TEST_CASE("projection crossings match an all-pairs count") {
    RandomStream rng(Seed{24, 0});
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = sample_jump({static_cast<int>(4 + rng.below(20)), 5}, JumpDomain::Cube, rng);
        const Vec3 u{1, 0, 0}, v{0, 1, 0}, h{0, 0, 1};
        const auto d = project_with_frame(p, u, v, h);
        CHECK(validate_diagram(d).ok());
        CHECK(d.crossing_count() == brute_crossings(p, u, v));
        CHECK(d.component_count() == 2);
    }
}

TEST_CASE("knot type does not depend on the projection direction") {
    RandomStream rng(Seed{25, 0});
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = sample_jump({12}, JumpDomain::Cube, rng);
        const auto ref = knot_invariants(project_generic(p, rng));
        for (int k = 0; k < 5; ++k) CHECK(knot_invariants(project_generic(p, rng)) == ref);
    }
    // Same for links, through the linking number.
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = sample_jump({10, 10}, JumpDomain::Ball, rng);
        const auto ref = linking_number(project_generic(p, rng), 0, 1);
        for (int k = 0; k < 5; ++k) CHECK(linking_number(project_generic(p, rng), 0, 1) == ref);
    }
}

TEST_CASE("reversing the height axis mirrors the diagram") {
    RandomStream rng(Seed{26, 0});
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = sample_jump({10}, JumpDomain::Cube, rng);
        const Vec3 dir = random_direction(rng);
        const auto up = project(p, dir);
        const auto down = project(p, {-dir[0], -dir[1], -dir[2]});
        // Looking from the other side is a rotation: the knot type is unchanged.
        CHECK(knot_invariants(up) == knot_invariants(down));
        // Keeping the picture and flipping heights is a reflection.
        const Vec3 u{1, 0, 0}, v{0, 1, 0};
        const auto a = project_with_frame(p, u, v, {0, 0, 1});
        const auto b = project_with_frame(p, u, v, {0, 0, -1});
        CHECK(casson_c2(a) == casson_c2(b));
        CHECK(writhe(a) == -writhe(b));
        CHECK(v3(a) == -v3(b));
    }
}

TEST_CASE("polygon validation and JSON") {
    CHECK_THROWS_AS(require_valid(Polygon3D{}), std::invalid_argument);
    CHECK_THROWS_AS(require_valid(Polygon3D{{{{0, 0, 0}, {1, 0, 0}}}}), std::invalid_argument);
    CHECK_THROWS_AS(project(Polygon3D{{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}}}, {0, 0, 0}), std::invalid_argument);
    const auto p = load_trefoil();
    const auto q = polygon_from_json(to_json(p));
    REQUIRE(q.components.size() == 1);
    CHECK(q.components[0] == p.components[0]);
}

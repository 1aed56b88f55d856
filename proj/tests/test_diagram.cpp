#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "knotlab/braid.hpp"
#include "knotlab/diagram.hpp"
#include "knotlab/dt.hpp"
#include "knotlab/grid.hpp"
#include "knotlab/invariants.hpp"
#include "support.hpp"

using namespace knotlab;

namespace {

DiagramCode trefoil() { return braid_closure_to_diagram({2, {1, 1, 1}, Closure::Trace}); }

std::size_t cycle_count(const std::vector<int>& perm) {
    std::vector<bool> seen(perm.size(), false);
    std::size_t cycles = 0;
    for (std::size_t i = 0; i < perm.size(); ++i) {
        if (seen[i]) continue;
        ++cycles;
        for (std::size_t j = i; !seen[j]; j = static_cast<std::size_t>(perm[j])) seen[j] = true;
    }
    return cycles;
}

}  // namespace

TEST_CASE("validate_diagram") {
    DiagramCode empty;
    CHECK(validate_diagram(empty).ok());
    CHECK(empty.crossing_count() == 0);
    CHECK(empty.is_knot());

    DiagramCode doubled({{{0, Role::Over, 1}, {0, Role::Over, 1}}}, 1);
    const auto rep = validate_diagram(doubled);
    REQUIRE_FALSE(rep.ok());
    CHECK(std::any_of(rep.violations.begin(), rep.violations.end(),
                      [](const std::string& v) { return v.find("role pair broken") != std::string::npos; }));

    DiagramCode bad_sign({{{0, Role::Over, 1}, {0, Role::Under, -1}}}, 1);
    CHECK_FALSE(validate_diagram(bad_sign).ok());

    DiagramCode missing({{{1, Role::Over, 1}, {1, Role::Under, 1}}}, 2);
    CHECK_FALSE(validate_diagram(missing).ok());
    CHECK_THROWS_AS(require_valid(missing), std::invalid_argument);
}

TEST_CASE("grid_to_diagram on the two-by-two grid") {
    const auto d = grid_to_diagram({{0, 1}, {0, 1}});
    CHECK(d.crossing_count() == 0);
    CHECK(d.is_knot());
    CHECK(validate_diagram(d).ok());
    CHECK(determinant(d) == 1);
}

TEST_CASE("grid_to_diagram on a ten-by-ten grid") {
    const GridDiagram g{{4, 0, 6, 2, 9, 3, 8, 5, 1, 7}, {9, 3, 6, 1, 5, 0, 8, 4, 7, 2}};
    const auto d = grid_to_diagram(g);
    CHECK(validate_diagram(d).ok());
    CHECK(d.is_knot());
    CHECK(d.crossing_count() == test::grid_crossings_brute(g));
    CHECK(d.crossing_count() > 0);
}

TEST_CASE("grid diagrams agree with the projected grid curve") {
    // Geometric re-derivation: lift the grid to a space polygon and project it.
    RandomStream rng(Seed{11, 0});
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + static_cast<int>(rng.below(8));
        auto g = sample_grid(n, rng);
        if (trial % 4 == 0) g.sigma = g.rho;
        const auto d = grid_to_diagram(g);
        const auto e = project_with_frame(test::grid_polygon(g), {1, 0, 0}, {0, 1, 0}, {0, 0, 1});
        REQUIRE(validate_diagram(d).ok());
        CHECK(d.is_knot());
        CHECK(d.crossing_count() == test::grid_crossings_brute(g));
        CHECK(e.crossing_count() == d.crossing_count());
        CHECK(writhe(e) == writhe(d));
        CHECK(casson_c2(e) == casson_c2(d));
        CHECK(determinant(e) == determinant(d));
        CHECK(v3(e) == v3(d));
    }
}

TEST_CASE("every random grid gives a valid one-component diagram") {
    RandomStream rng(Seed{12, 0});
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(14));
        const auto g = sample_grid(n, rng);
        const auto d = grid_to_diagram(g);
        REQUIRE(validate_diagram(d).ok());
        CHECK(d.component_count() == 1);
        CHECK(d.crossing_count() == test::grid_crossings_brute(g));
    }
}

TEST_CASE("petal_to_grid") {
    SUBCASE("three petals are always trivial") {
        auto h = test::identity_perm(3);
        do {
            const auto g = petal_to_grid({h});
            CHECK(g.size() == 3);
            const auto d = grid_to_diagram(g);
            CHECK(casson_c2(d) == 0);
            CHECK(determinant(d) == 1);
        } while (std::next_permutation(h.begin(), h.end()));
    }
    SUBCASE("monotone five-petal heights") {
        const auto d = grid_to_diagram(petal_to_grid({test::identity_perm(5)}));
        CHECK(casson_c2(d) == 0);
        CHECK(determinant(d) == 1);
    }
    SUBCASE("columns follow n k mod 2n+1") {
        const auto g = petal_to_grid({{3, 0, 4, 1, 2}});
        CHECK(g.rho == std::vector<int>{0, 2, 4, 1, 3});
        CHECK(g.sigma == std::vector<int>{3, 0, 4, 1, 2});
    }
    CHECK_THROWS(require_valid(PetalPermutation{{0, 1, 2, 3}}));
    CHECK_THROWS(require_valid(PetalPermutation{{0, 0, 1}}));
}

TEST_CASE("braid closures") {
    const auto one = braid_closure_to_diagram({2, {1}, Closure::Trace});
    CHECK(one.crossing_count() == 1);
    CHECK(determinant(one) == 1);

    const auto t = trefoil();
    CHECK(t.crossing_count() == 3);
    CHECK(writhe(t) == 3);
    CHECK(determinant(t) == 3);
    CHECK(casson_c2(t) == 1);

    // On two strands the cancelling pair closes up to the two-component unlink.
    const auto cancel = braid_closure_to_diagram({2, {1, -1}, Closure::Trace});
    CHECK(cancel.crossing_count() == 2);
    CHECK(writhe(cancel) == 0);
    CHECK(cancel.component_count() == 2);
    CHECK(linking_number(cancel, 0, 1) == 0);
    const auto cancel3 = braid_closure_to_diagram({2, {1, -1, 1}, Closure::Trace});
    CHECK(determinant(cancel3) == 1);
    CHECK(casson_c2(cancel3) == 0);

    const auto hopf = braid_closure_to_diagram({2, {1, 1}, Closure::Trace});
    CHECK(hopf.component_count() == 2);
    CHECK(linking_number(hopf, 0, 1) == 1);
    CHECK(linking_number(hopf, 1, 0) == 1);

    RandomStream rng(Seed{13, 0});
    for (int trial = 0; trial < 200; ++trial) {
        BraidWord b;
        b.strands = 2 + static_cast<int>(rng.below(4));
        for (int k = 0, len = static_cast<int>(rng.below(20)); k < len; ++k)
            b.letters.push_back(static_cast<int>(1 + rng.below(b.strands - 1)) * rng.coin());
        const auto d = braid_closure_to_diagram(b);
        REQUIRE(validate_diagram(d).ok());
        CHECK(d.crossing_count() == b.letters.size());
        long long sum = 0;
        for (int l : b.letters) sum += l > 0 ? 1 : -1;
        CHECK(writhe(d) == sum);
        CHECK(d.component_count() == cycle_count(braid_permutation(b.strands, b.letters)));
    }
    CHECK_THROWS(require_valid(BraidWord{2, {2}, Closure::Trace}));
    CHECK_THROWS(require_valid(BraidWord{2, {0}, Closure::Trace}));
}

TEST_CASE("plat closures") {
    // Two strands capped at both ends untwist to the unknot whatever the word.
    const auto two = braid_closure_to_diagram({2, {1, 1, 1}, Closure::Plat});
    REQUIRE(validate_diagram(two).ok());
    CHECK(two.is_knot());
    CHECK(determinant(two) == 1);
    CHECK(casson_c2(two) == 0);
    // sigma_2^3 on four strands: the trefoil as a two-bridge knot.
    const auto four = braid_closure_to_diagram({4, {2, 2, 2}, Closure::Plat});
    REQUIRE(validate_diagram(four).ok());
    CHECK(four.is_knot());
    CHECK(determinant(four) == 3);
    CHECK(casson_c2(four) == 1);
    // sigma_2^2: the Hopf link.
    const auto hopf = braid_closure_to_diagram({4, {2, 2}, Closure::Plat});
    CHECK(hopf.component_count() == 2);
    CHECK(std::abs(linking_number(hopf, 0, 1)) == 1);
}

TEST_CASE("flat torus diagrams") {
    CHECK(casson_c2(flat_torus_diagram(2, 3, {1, 1, 1})) == 1);
    CHECK(determinant(flat_torus_diagram(2, 3, {1, -1, 1})) == 1);
    const auto w = flat_torus_word(4, 9);
    CHECK(w.size() == 27);
    const auto d = flat_torus_diagram(4, 9, std::vector<int>(27, 1));
    CHECK(d.crossing_count() == 27);
    CHECK(d.component_count() == cycle_count(braid_permutation(4, w)));
    CHECK(d.is_knot());
    const auto link = flat_torus_diagram(2, 4, std::vector<int>(4, 1));
    CHECK(link.component_count() == cycle_count(braid_permutation(2, flat_torus_word(2, 4))));
    CHECK(link.component_count() == 2);
    CHECK(determinant(flat_torus_diagram(2, 5, std::vector<int>(5, 1))) == 5);
}

TEST_CASE("mirror") {
    DiagramCode empty;
    CHECK(mirror(empty) == empty);
    CHECK(writhe(mirror(trefoil())) == -3);
    for (const auto& d : test::assorted_knots(14, 200)) {
        CHECK(mirror(mirror(d)) == d);
        CHECK(writhe(mirror(d)) == -writhe(d));
        CHECK(validate_diagram(mirror(d)).ok());
    }
}

TEST_CASE("relabel and rotate keep the knot") {
    RandomStream rng(Seed{15, 0});
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = test::random_petal_diagram(9, rng);
        const auto r = relabel_by_first_visit(d);
        CHECK(validate_diagram(r).ok());
        CHECK(casson_c2(r) == casson_c2(d));
        if (d.crossing_count() == 0) continue;
        const auto shift = static_cast<std::size_t>(rng.below(2 * d.crossing_count()));
        const auto s = rotate_knot(d, shift);
        CHECK(s.component(0).front() == d.component(0)[shift]);
        CHECK(writhe(s) == writhe(d));
    }
}

TEST_CASE("diagram JSON round trip") {
    for (const auto& d : test::assorted_knots(16, 10)) CHECK(diagram_from_json(to_json(d)) == d);
    const auto hopf = braid_closure_to_diagram({2, {1, 1}, Closure::Trace});
    CHECK(diagram_from_json(to_json(hopf)) == hopf);
}

TEST_CASE("linking numbers") {
    const DiagramCode split({{}, {}}, 0);
    CHECK(linking_number(split, 0, 1) == 0);
    // Hopf link written out by hand: two crossings between the components, both positive.
    const DiagramCode hopf({{{0, Role::Over, 1}, {1, Role::Under, 1}}, {{0, Role::Under, 1}, {1, Role::Over, 1}}}, 2);
    REQUIRE(validate_diagram(hopf).ok());
    CHECK(linking_number(hopf, 0, 1) == 1);
    CHECK(linking_number(mirror(hopf), 0, 1) == -1);
    RandomStream rng(Seed{17, 0});
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = sample_petaluma_link({4, 4, 2}, rng);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) {
                if (i == j) continue;
                CHECK(linking_number(d, i, j) == linking_number(d, j, i));
                CHECK(linking_number(mirror(d), i, j) == -linking_number(d, i, j));
            }
    }
}

TEST_CASE("DT codes") {
    const auto t = parse_dt("4 6 2");
    CHECK(t.crossing_count() == 3);
    CHECK(determinant(t) == 3);
    const auto e = parse_dt("4 6 8 2");
    CHECK(determinant(e) == 5);
    CHECK(casson_c2(e) == -1);
    const auto u = parse_dt("");
    CHECK(u.crossing_count() == 0);
    CHECK(u.is_knot());
    CHECK_THROWS_AS(parse_dt("4 6 x"), std::invalid_argument);
    CHECK_THROWS_AS(parse_dt("3 6 2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_dt("4 4 2"), std::invalid_argument);
}

TEST_CASE("fixture table parses and realizes") {
    const auto knots = load_fixture_file(test::fixture("knots.dt"));
    REQUIRE(knots.size() >= 20);
    for (const auto& k : knots) {
        CAPTURE(k.name);
        const auto d = dt_to_diagram(k.dt_code);
        CHECK(validate_diagram(d).ok());
        CHECK(d.is_knot());
        CHECK(d.crossing_count() == k.dt_code.size());
    }
    const auto line = parse_fixture_line("3_1; dt: 4 6 2; det: 3; c2: 1; v3: 1");
    CHECK(line.name == "3_1");
    CHECK(line.dt_code == std::vector<int>{4, 6, 2});
    CHECK(line.determinant == 3);
    CHECK(line.v3 == 1);
}

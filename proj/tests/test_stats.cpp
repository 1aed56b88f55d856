#include <doctest.h>

#include <cmath>

#include "knotlab/experiment.hpp"
#include "knotlab/stats.hpp"
#include "support.hpp"

using namespace knotlab;

namespace {

Moments moments_of(const std::vector<double>& xs) {
    Moments m;
    for (double x : xs) m.add(x);
    return m;
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)}); }

void check_reports_close(const MomentsReport& a, const MomentsReport& b, double tol) {
    CHECK(a.count == b.count);
    CHECK(rel_close(a.mean, b.mean, tol));
    CHECK(rel_close(a.variance, b.variance, tol));
    CHECK(rel_close(a.third_central, b.third_central, tol));
    CHECK(rel_close(a.fourth_central, b.fourth_central, tol));
}

ModelSpec spec(const std::string& text) { return parse_model_spec(nlohmann::json::parse(text)); }

}  // namespace

TEST_CASE("moment merging") {
    RandomStream rng(71, 0);
    std::vector<double> xs(4000);
    for (auto& x : xs) x = rng.normal() * 3 + std::pow(rng.uniform01(), 3) * 50;

    // direct two-pass computation as the reference
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= xs.size();
    double c2 = 0, c3 = 0, c4 = 0;
    for (double x : xs) {
        const double d = x - mean;
        c2 += d * d;
        c3 += d * d * d;
        c4 += d * d * d * d;
    }
    const auto whole = report(moments_of(xs));
    CHECK(rel_close(whole.mean, mean, 1e-12));
    CHECK(rel_close(whole.variance, c2 / (xs.size() - 1), 1e-10));
    CHECK(rel_close(whole.third_central, c3 / xs.size(), 1e-9));
    CHECK(rel_close(whole.fourth_central, c4 / xs.size(), 1e-9));

    SUBCASE("identity") {
        const auto m = moments_of(xs);
        const auto r = report(Moments::merge(m, Moments{}));
        check_reports_close(r, whole, 0);
        check_reports_close(report(Moments::merge(Moments{}, m)), whole, 0);
    }
    SUBCASE("commutativity") {
        const auto a = moments_of({xs.begin(), xs.begin() + 1234}), b = moments_of({xs.begin() + 1234, xs.end()});
        check_reports_close(report(Moments::merge(a, b)), report(Moments::merge(b, a)), 1e-12);
    }
    SUBCASE("eight shards") {
        Moments acc;
        for (int s = 0; s < 8; ++s) acc = Moments::merge(acc, moments_of({xs.begin() + s * 500, xs.begin() + (s + 1) * 500}));
        check_reports_close(report(acc), whole, 1e-9);
        // tree order
        std::vector<Moments> parts;
        for (int s = 0; s < 8; ++s) parts.push_back(moments_of({xs.begin() + s * 500, xs.begin() + (s + 1) * 500}));
        while (parts.size() > 1) {
            std::vector<Moments> next;
            for (std::size_t i = 0; i < parts.size(); i += 2) next.push_back(Moments::merge(parts[i], parts[i + 1]));
            parts = next;
        }
        check_reports_close(report(parts[0]), whole, 1e-9);
    }
    SUBCASE("reports merge too") {
        const auto a = report(moments_of({xs.begin(), xs.begin() + 1000}));
        const auto b = report(moments_of({xs.begin() + 1000, xs.end()}));
        check_reports_close(merge_moments(a, b), whole, 1e-9);
    }
    SUBCASE("variance is never negative") {
        const auto r = report(moments_of(std::vector<double>(1000, 0.1)));
        CHECK(r.variance >= 0);
        CHECK(r.fourth_central >= 0);
        CHECK(report(moments_of({5.0})).variance == 0);
    }
}

TEST_CASE("KS distance against the logistic law") {
    CHECK(logistic_cdf(0) == doctest::Approx(0.5));
    CHECK(logistic_quantile(0.5) == doctest::Approx(0.0));
    CHECK(logistic_cdf(logistic_quantile(0.9)) == doctest::Approx(0.9));
    // density integrates to one
    double area = 0;
    for (double t = -3; t < 3; t += 1e-4) area += logistic_density(t + 5e-5) * 1e-4;
    CHECK(area == doctest::Approx(1.0).epsilon(1e-6));

    RandomStream rng(72, 0);
    std::vector<double> xs(10000);
    for (auto& x : xs) x = logistic_quantile(rng.uniform01());
    CHECK(ks_statistic(xs, logistic_cdf) < 0.02);
    CHECK(ks_statistic(std::vector<double>(100, 0.3), logistic_cdf) >= 0.5);
    CHECK_THROWS(ks_statistic({1.0}, logistic_cdf));
}

TEST_CASE("histograms") {
    Histogram1D h(0, 10, 5);
    for (double x : {-1.0, 0.0, 1.9, 2.0, 9.99, 10.0, 4.5}) h.add(x);
    CHECK(h.underflow == 1);
    CHECK(h.overflow == 1);
    CHECK(h.counts == std::vector<std::uint64_t>{2, 1, 1, 0, 1});
    CHECK(h.total() == 7);
    const auto csv = to_csv(h, "c2");
    CHECK(csv.rfind("c2_lo,c2_hi,count\n", 0) == 0);

    const auto unit = histogram_for({-2, 0, 3, 3});
    CHECK(unit.counts.size() == 6);
    CHECK(unit.lo == -2.5);
    const auto wide = histogram_for({0.0, 0.25, 1000.5}, 50);
    CHECK(wide.counts.size() == 50);
    CHECK(wide.hi > 1000.5);

    Histogram2D g(-0.5, 1.0, 200, -1.5, 1.5, 200);
    g.add(0.0, 0.0);
    g.add(2.0, 0.0);
    CHECK(g.total() == 2);
    CHECK(g.outside == 1);
    CHECK(g.at(66, 100) == 1);
}

TEST_CASE("exhaustive enumeration of small Petaluma models") {
    const auto three = exhaustive_enumeration(spec(R"({"family": "petaluma", "params": {"petals": 3}})"), {Invariant::C2});
    CHECK(three[0].support == 6);
    CHECK(three[0].counts.size() == 1);
    CHECK(three[0].counts.at(0) == 6);
    const auto five = exhaustive_enumeration(spec(R"({"family": "petaluma", "params": {"petals": 5}})"),
                                             {Invariant::C2, Invariant::V3}, 2);
    CHECK(five[0].mean == Rational(1, 12));
    CHECK(five[1].mean == 0);
    const auto seven = exhaustive_enumeration(spec(R"({"family": "petaluma", "params": {"petals": 7}})"), {Invariant::C2}, 3);
    CHECK(seven[0].support == 5040);
    CHECK(seven[0].mean == Rational(1, 4));
    const auto link = exhaustive_enumeration(spec(R"({"family": "petaluma-link", "params": {"petals": [2, 2]}})"),
                                             {Invariant::LinkingNumber});
    CHECK(link[0].support == 24);
    CHECK(link[0].mean == 0);
    CHECK_THROWS(exhaustive_enumeration(spec(R"({"family": "jump", "params": {"n": 6}})"), {Invariant::C2}));
    CHECK_THROWS(exhaustive_enumeration(spec(R"({"family": "petaluma", "params": {"petals": 13}})"), {Invariant::C2}));
    CHECK(support_size(spec(R"({"family": "grid", "params": {"n": 4}})")) == 576);
    CHECK(support_size(spec(R"({"family": "star", "params": {"n": 2}})")) == 32);
}

TEST_CASE("Monte Carlo with the full support converges to the exact moments") {
    ExperimentConfig cfg;
    cfg.spec = spec(R"({"family": "petaluma", "params": {"petals": 7}})");
    cfg.invariants = {Invariant::C2};
    cfg.samples = 50000;
    cfg.seed = 5;
    const auto r = run_experiment(cfg);
    CHECK(std::abs(r.summaries[0].moments.mean - 0.25) < 4 * r.summaries[0].moments.standard_error);
    CHECK(r.summaries[0].moments.variance == doctest::Approx(7.0 / 16).epsilon(0.05));
}

TEST_CASE("experiments do not depend on the shard count") {
    ExperimentConfig cfg;
    cfg.spec = spec(R"({"family": "petaluma", "params": {"petals": 15}})");
    cfg.invariants = {Invariant::C2, Invariant::V3};
    cfg.samples = 3000;
    cfg.seed = 99;
    cfg.shards = 1;
    const auto one = run_experiment(cfg);
    const auto text = report_json(one).dump();
    for (unsigned shards : {2u, 3u, 8u}) {
        cfg.shards = shards;
        const auto r = run_experiment(cfg);
        for (std::size_t k = 0; k < 2; ++k) {
            check_reports_close(r.summaries[k].moments, one.summaries[k].moments, 1e-9);
            CHECK(r.values[k] == one.values[k]);
        }
        CHECK(report_json(r).dump() == text);
        CHECK(samples_jsonl(r) == samples_jsonl(one));
        CHECK(pair_histogram_csv(r) == pair_histogram_csv(one));
    }
    for (std::uint64_t i : {0ull, 1ull, 700ull, 2999ull}) {
        const auto v = sample_values(cfg, i);
        CHECK(v[0] == one.values[0][i]);
        CHECK(v[1] == one.values[1][i]);
    }
}

TEST_CASE("experiment report") {
    ExperimentConfig cfg;
    cfg.spec = spec(R"({"family": "petaluma", "params": {"petals": 41}})");
    cfg.invariants = {Invariant::C2, Invariant::V3};
    cfg.samples = 600;
    const auto r = run_experiment(cfg);
    const auto j = report_json(r);
    const auto& c2 = j.at("invariants").at("c2");
    CHECK(c2.at("baseline").at("mean").get<double>() == doctest::Approx(20.0 * 19 / 24));
    CHECK(c2.at("baseline").contains("z_score"));
    CHECK(j.at("metadata").at("seed") == 0);
    CHECK(j.at("metadata").at("version") == KNOTLAB_VERSION);
    CHECK(j.at("metadata").at("scale_n") == 20);
    REQUIRE(r.pair_histogram);
    CHECK(r.pair_histogram->xbins == 200);
    CHECK(r.pair_histogram->ybins == 200);
    CHECK(r.pair_histogram->xlo == -0.5);
    CHECK(r.pair_histogram->yhi == 1.5);
    CHECK(r.pair_histogram->total() == 600);
    CHECK(r.pair_axes[0] == "c2_over_n2");
    CHECK(pair_histogram_csv(r).rfind("c2_over_n2_lo", 0) == 0);
    const auto lines = samples_jsonl(r);
    CHECK(std::count(lines.begin(), lines.end(), '\n') == 600);
    CHECK(r.normalized_c2);

    ExperimentConfig bad = cfg;
    bad.spec = spec(R"({"family": "petaluma-link", "params": {"petals": [4, 4]}})");
    CHECK_THROWS_AS(check_applicable(bad.spec, bad.invariants), InapplicableInvariant);
    CHECK_THROWS_AS(run_experiment(bad), InapplicableInvariant);
    CHECK_THROWS_AS(check_applicable(cfg.spec, {Invariant::LinkingNumber}), InapplicableInvariant);
    CHECK_THROWS(parse_invariant_list("c2,c2"));
    CHECK_THROWS(parse_invariant_list("c5"));
    CHECK(parse_invariant_list("c2, v3,det") == std::vector<Invariant>{Invariant::C2, Invariant::V3, Invariant::Determinant});
}

TEST_CASE("star normalization is centered by the sample mean") {
    ExperimentConfig cfg;
    cfg.spec = spec(R"({"family": "star", "params": {"n": 6}})");
    cfg.invariants = {Invariant::C2};
    cfg.samples = 500;
    const auto r = run_experiment(cfg);
    REQUIRE(r.normalized_c2);
    CHECK(r.normalized_c2_note.find("mean") != std::string::npos);
    CHECK(report_json(r).contains("normalized_c2"));
}

TEST_CASE("baselines") {
    CHECK(baseline_for("petaluma", 20, "c2")->mean == doctest::Approx(15.8333333).epsilon(1e-6));
    CHECK(baseline_for("grid", 96, "c2")->mean == doctest::Approx(32.0));
    CHECK(baseline_for("star", 24, "c2")->mean == doctest::Approx(1152.0));
    CHECK(baseline_for("griddle", 64, "c2")->mean == doctest::Approx(64.0 * 64 / 144));
    CHECK_FALSE(baseline_for("jump", 10, "c2"));
}

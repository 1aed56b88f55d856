// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Heavy Monte Carlo criteria use every hardware thread; results do not depend on it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "knotlab/dt.hpp"
#include "knotlab/experiment.hpp"
#include "knotlab/formula.hpp"
#include "knotlab/geometry.hpp"
#include "knotlab/grid.hpp"
#include "knotlab/invariants.hpp"
#include "knotlab/samplers.hpp"
#include "knotlab/stats.hpp"

using namespace knotlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

ModelSpec model(const char* json_text) { return parse_model_spec(nlohmann::json::parse(json_text)); }

ExperimentResult experiment(const ModelSpec& spec, std::vector<Invariant> invs, std::uint64_t samples,
                            std::uint64_t seed, unsigned shards = threads()) {
    ExperimentConfig cfg;
    cfg.spec = spec;
    cfg.invariants = std::move(invs);
    cfg.samples = samples;
    cfg.seed = seed;
    cfg.shards = shards;
    return run_experiment(cfg);
}

std::string fmt(const char* f, auto... xs) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, xs...);
    return buf;
}

std::vector<int> identity(int n) {
    std::vector<int> p(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = i;
    return p;
}

Outcome exhaustive_means() {
    const auto s5 = exhaustive_enumeration(model(R"({"family": "petaluma", "params": {"petals": 5}})"), {Invariant::C2});
    const auto s7 = exhaustive_enumeration(model(R"({"family": "petaluma", "params": {"petals": 7}})"), {Invariant::C2},
                                           threads());
    const bool ok = s5[0].support == 120 && s7[0].support == 5040 && s5[0].mean == Rational(1, 12) &&
                    s7[0].mean == Rational(1, 4);
    return {ok, "5 petals: " + rational_string(s5[0].mean) + " over " + std::to_string(s5[0].support) +
                    ", 7 petals: " + rational_string(s7[0].mean) + " over " + std::to_string(s7[0].support)};
}

Outcome petal_mean() {
    const auto r = experiment(model(R"({"family": "petaluma", "params": {"petals": 41}})"), {Invariant::C2}, 100000, 2);
    const auto& m = r.summaries[0].moments;
    const double target = 20.0 * 19 / 24;
    const double z = (m.mean - target) / m.standard_error;
    return {std::abs(z) <= 3, fmt("mean %.4f, target %.4f, SE %.4f, z %.2f", m.mean, target, m.standard_error, z)};
}

Outcome petal_variance() {
    const auto r = experiment(model(R"({"family": "petaluma", "params": {"petals": 81}})"), {Invariant::C2}, 10000, 3);
    const double n4 = std::pow(40.0, 4);
    const double ratio = r.summaries[0].moments.variance / n4;
    return {ratio >= 0.005 && ratio <= 0.010, fmt("V[c2]/n^4 = %.5f (leading term 7/960 = %.5f)", ratio, 7.0 / 960)};
}

Outcome linking_law() {
    const auto r = experiment(model(R"({"family": "petaluma-link", "params": {"petals": [100, 100]}})"),
                              {Invariant::LinkingNumber}, 10000, 4);
    std::vector<double> t = r.values[0];
    for (double& x : t) x /= 4.0 * 50;
    const double ks = ks_statistic(t, logistic_cdf);
    const auto& m = r.summaries[0].moments;
    const double z = m.mean / m.standard_error;
    return {ks <= 0.05 && std::abs(z) <= 4, fmt("KS %.4f, mean lk %.3f, z %.2f", ks, m.mean, z)};
}

Outcome grid_mean() {
    const auto r = experiment(model(R"({"family": "grid", "params": {"n": 96}})"), {Invariant::C2}, 10000, 5);
    const double mean = r.summaries[0].moments.mean;
    return {std::abs(mean - 32) <= 0.2 * 32, fmt("mean c2 %.3f, target 32", mean)};
}

Outcome griddle_ratio() {
    const auto r =
        experiment(model(R"({"family": "griddle", "params": {"n": 64}})"), {Invariant::Defect, Invariant::C2}, 10000, 6);
    const double d = r.summaries[0].moments.mean, c = r.summaries[1].moments.mean;
    const double ratio = d / c;
    return {ratio >= 6.8 && ratio <= 9.2, fmt("mean defect %.3f, mean c2 %.3f, ratio %.3f", d, c, ratio)};
}

Outcome star_drift() {
    const auto big = experiment(model(R"({"family": "star", "params": {"n": 24}})"), {Invariant::C2}, 10000, 7);
    const auto small = experiment(model(R"({"family": "star", "params": {"n": 12}})"), {Invariant::C2}, 10000, 8);
    const auto& b = big.summaries[0].moments;
    const auto& s = small.summaries[0].moments;
    const double growth = (b.mean / std::sqrt(b.variance)) / (s.mean / std::sqrt(s.variance));
    const bool ok = std::abs(b.mean - 1152) <= 0.2 * 1152 && growth >= 1.4 && growth <= 2.6;
    return {ok, fmt("mean c2 at n=24 %.1f (target 1152), mean/sd %.3f vs %.3f at n=12, growth %.3f", b.mean,
                    b.mean / std::sqrt(b.variance), s.mean / std::sqrt(s.variance), growth)};
}

Outcome oracle_suite() {
    int checked = 0, mismatches = 0;
    auto check = [&](const DiagramCode& d) {
        const auto jones = jones_oracle(d);
        const long long c2 = casson_c2(d);
        const bool ok = conway(d).coeff(2) == c2 && c2_from_jones(jones) == Rational(c2) && v3_from_jones(jones) == v3(d);
        ++checked;
        if (!ok) ++mismatches;
    };
    int fixtures = 0;
    for (const auto& k : load_fixture_file(std::string(KNOTLAB_FIXTURES) + "/knots.dt")) {
        const auto d = dt_to_diagram(k.dt_code);
        if (d.crossing_count() > 8) continue;
        ++fixtures;
        check(d);
    }
    for (int petals : {5, 7}) {
        auto h = identity(petals);
        do check(grid_to_diagram(petal_to_grid({h})));
        while (std::next_permutation(h.begin(), h.end()));
    }
    const bool ok = mismatches == 0 && fixtures > 0 && checked == fixtures + 120 + 5040;
    return {ok, fmt("%d diagrams (%d tabulated), %d mismatches", checked, fixtures, mismatches)};
}

Outcome symmetry_suite() {
    const char* knot_models[] = {
        R"({"family": "petaluma", "params": {"petals": 21}})",
        R"({"family": "grid", "params": {"n": 16}})",
        R"({"family": "griddle", "params": {"n": 16}})",
        R"({"family": "jump", "params": {"n": 24}})",
        R"({"family": "jump", "params": {"n": 24}, "options": {"domain": "ball"}})",
        R"({"family": "gaussian", "params": {"n": 24}})",
        R"({"family": "fourier", "params": {"n": 4}, "options": {"scheme": "exp"}})",
        R"({"family": "braid", "params": {"strands": 3, "length": 30}})",
        R"({"family": "star", "params": {"n": 5}})",
        R"({"family": "flat-torus", "params": {"p": 4, "q": 7}})",
        R"({"family": "billiard", "params": {"b": 3, "a": 7}})",
    };
    const char* link_models[] = {
        R"({"family": "petaluma-link", "params": {"petals": [10, 10]}})",
        R"({"family": "jump", "params": {"counts": [20, 20]}})",
    };
    const CompiledFormula formulas[] = {CompiledFormula(bundled_formula("c2")), CompiledFormula(bundled_formula("v3")),
                                        CompiledFormula(bundled_formula("defect"))};
    long long failures = 0, basepoints = 0;
    int models = 0;
    std::uint64_t stream = 0;
    auto draw_knots = [&](const ModelSpec& spec) {
        std::vector<DiagramCode> out;
        while (out.size() < 100) {
            RandomStream rng(9, stream++);
            auto d = draw_diagram(spec, rng);
            if (d.is_knot()) out.push_back(std::move(d));
        }
        return out;
    };
    Moments petal_v3;
    for (const char* text : knot_models) {
        const auto spec = model(text);
        ++models;
        for (const auto& d : draw_knots(spec)) {
            const auto m = mirror(d);
            const long long c2 = casson_c2(d);
            const Rational w = v3(d);
            if (casson_c2(m) != c2 || v3(m) != -w || writhe(m) != -writhe(d)) ++failures;
            const Rational direct[] = {Rational(c2), w, Rational(defect(d))};
            for (std::size_t b = 0; b < 2 * d.crossing_count(); ++b) {
                const auto ch = based_chords(d, b);
                for (int f = 0; f < 3; ++f)
                    if (formulas[f].evaluate(ch) != direct[f]) ++failures;
                ++basepoints;
            }
            if (spec.family == Family::PetalumaKnot) petal_v3.add(w.convert_to<double>());
        }
    }
    for (const char* text : link_models) {
        const auto spec = model(text);
        ++models;
        for (int i = 0; i < 100; ++i) {
            RandomStream rng(10, stream++);
            const auto d = draw_diagram(spec, rng);
            const auto m = mirror(d);
            if (writhe(m) != -writhe(d) || linking_number(m, 0, 1) != -linking_number(d, 0, 1)) ++failures;
        }
    }
    const auto r = report(petal_v3);
    const double z = r.mean / r.standard_error;
    return {failures == 0 && std::abs(z) <= 4,
            fmt("%d models, %lld basepoints, %lld failures; Petaluma v3 mean %.3f, z %.2f", models, basepoints, failures,
                r.mean, z)};
}

Outcome projection_invariance() {
    int unstable = 0;
    for (std::uint64_t i = 0; i < 20; ++i) {
        RandomStream rng(11, i);
        const auto p = sample_jump({30}, JumpDomain::Cube, rng);
        std::vector<std::pair<long long, BigInt>> seen;
        while (seen.size() < 5) {
            try {
                const auto d = project(p, random_direction(rng));
                seen.emplace_back(casson_c2(d), determinant(d));
            } catch (const NonGenericProjection&) {
            }
        }
        if (std::any_of(seen.begin(), seen.end(), [&](const auto& s) { return s != seen.front(); })) ++unstable;
    }
    return {unstable == 0, fmt("20 polygons x 5 directions, %d with varying (c2, det)", unstable)};
}

Outcome jump_link_variance() {
    const auto big = experiment(model(R"({"family": "jump", "params": {"counts": [100, 50]}})"),
                                {Invariant::LinkingNumber}, 10000, 12);
    const auto small = experiment(model(R"({"family": "jump", "params": {"counts": [50, 50]}})"),
                                  {Invariant::LinkingNumber}, 10000, 13);
    const double vb = big.summaries[0].moments.variance, vs = small.summaries[0].moments.variance;
    const double ratio = vb / vs;
    return {ratio >= 1.5 && ratio <= 2.5, fmt("V[lk] %.3f vs %.3f, ratio %.3f", vb, vs, ratio)};
}

bool close_rel(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({std::abs(a), std::abs(b), 1e-300}); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    const auto spec = model(R"({"family": "petaluma", "params": {"petals": 21}})");
    std::vector<ExperimentResult> runs;
    for (unsigned shards : {1u, 2u, 8u}) runs.push_back(experiment(spec, {Invariant::C2, Invariant::V3}, 5000, 14, shards));
    bool moments_ok = true;
    for (std::size_t r = 1; r < runs.size(); ++r)
        for (std::size_t k = 0; k < 2; ++k) {
            const auto& a = runs[0].summaries[k].moments;
            const auto& b = runs[r].summaries[k].moments;
            moments_ok = moments_ok && a.count == b.count && close_rel(a.mean, b.mean) &&
                         close_rel(a.variance, b.variance) && close_rel(a.third_central, b.third_central) &&
                         close_rel(a.fourth_central, b.fourth_central);
        }

    const fs::path dir = fs::temp_directory_path() / ("knotlab_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::vector<std::string> files;
    bool exit_ok = true;
    for (const char* shards : {"1", "2", "8"}) {
        const auto path = (dir / (std::string("samples_") + shards + ".jsonl")).string();
        std::ostringstream out, err;
        exit_ok = exit_ok && cli::run({"sample", "--model", "jump", "--n", "20", "--raw", "-n", "300", "--seed", "15",
                                       "--shards", shards, "--out", path},
                                      out, err) == cli::kOk;
        files.push_back(slurp(path));
    }
    fs::remove_all(dir);
    const bool bytes_ok = exit_ok && !files[0].empty() && files[0] == files[1] && files[0] == files[2];
    return {moments_ok && bytes_ok, fmt("moments %s across shards 1/2/8; sample files %s (%zu bytes)",
                                        moments_ok ? "agree" : "differ", bytes_ok ? "identical" : "differ",
                                        files[0].size())};
}

Outcome fish_plot() {
    const auto r = experiment(model(R"({"family": "petaluma", "params": {"petals": 41}})"),
                              {Invariant::C2, Invariant::V3}, 1000000, 16);
    const double n = 20;
    const auto& c = r.summaries[0].moments;
    const auto& w = r.summaries[1].moments;
    const double z = w.mean / w.standard_error;
    std::uint64_t quadrant[4] = {0, 0, 0, 0};
    const auto& h = *r.pair_histogram;
    for (std::size_t i = 0; i < h.xbins; ++i) {
        const double x0 = h.xlo + (h.xhi - h.xlo) * static_cast<double>(i) / h.xbins;
        const double x1 = h.xlo + (h.xhi - h.xlo) * static_cast<double>(i + 1) / h.xbins;
        for (std::size_t j = 0; j < h.ybins; ++j) {
            const double y0 = h.ylo + (h.yhi - h.ylo) * static_cast<double>(j) / h.ybins;
            const double y1 = h.ylo + (h.yhi - h.ylo) * static_cast<double>(j + 1) / h.ybins;
            // cells straddling an axis belong to no quadrant
            if ((x0 < 0 && x1 > 0) || (y0 < 0 && y1 > 0)) continue;
            quadrant[(x0 >= 0 ? 0 : 1) + (y0 >= 0 ? 0 : 2)] += h.at(i, j);
        }
    }
    const bool ok = h.total() == 1000000 && c.mean / (n * n) > 0 && std::abs(z) <= 4 &&
                    std::all_of(std::begin(quadrant), std::end(quadrant), [](auto q) { return q > 0; });
    return {ok, fmt("mean c2/n^2 %.4f, mean v3/n^3 %.5f (z %.2f), quadrant counts %llu %llu %llu %llu, outside %llu",
                    c.mean / (n * n), w.mean / (n * n * n), z, static_cast<unsigned long long>(quadrant[0]),
                    static_cast<unsigned long long>(quadrant[1]), static_cast<unsigned long long>(quadrant[2]),
                    static_cast<unsigned long long>(quadrant[3]), static_cast<unsigned long long>(h.outside))};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"exhaustive Petaluma means", exhaustive_means},
        {"Petaluma mean at 41 petals", petal_mean},
        {"Petaluma variance at 81 petals", petal_variance},
        {"linking number limit law", linking_law},
        {"grid model mean", grid_mean},
        {"griddle defect/c2 ratio", griddle_ratio},
        {"star model drift", star_drift},
        {"oracle equivalence", oracle_suite},
        {"symmetry properties", symmetry_suite},
        {"projection invariance", projection_invariance},
        {"jump link variance scaling", jump_link_variance},
        {"determinism and merge", determinism},
        {"fish plot shape", fish_plot},
    };
    int failed = 0, index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << index << " " << name << ": " << o.detail
                  << fmt(" [%.1fs]", secs) << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}

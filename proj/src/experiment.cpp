#include "knotlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "knotlab/invariants.hpp"

namespace knotlab {

namespace {

struct InvariantName {
    Invariant inv;
    const char* name;
};

constexpr InvariantName kInvariants[] = {
    {Invariant::C2, "c2"},
    {Invariant::V3, "v3"},
    {Invariant::Writhe, "writhe"},
    {Invariant::Defect, "defect"},
    {Invariant::Determinant, "det"},
    {Invariant::LinkingNumber, "lk"},
    {Invariant::Crossings, "crossings"},
    {Invariant::Components, "components"},
};

bool needs_knot(Invariant i) {
    return i == Invariant::C2 || i == Invariant::V3 || i == Invariant::Defect || i == Invariant::Determinant;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace

std::string invariant_name(Invariant i) {
    for (const auto& e : kInvariants)
        if (e.inv == i) return e.name;
    throw std::logic_error("unknown invariant");
}

Invariant invariant_from_name(const std::string& name) {
    for (const auto& e : kInvariants)
        if (name == e.name) return e.inv;
    if (name == "determinant") return Invariant::Determinant;
    throw std::invalid_argument("unknown invariant '" + name + "'");
}

std::vector<Invariant> parse_invariant_list(const std::string& text) {
    std::vector<Invariant> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        const auto inv = invariant_from_name(item);
        if (std::find(out.begin(), out.end(), inv) != out.end())
            throw std::invalid_argument("invariant '" + item + "' listed twice");
        out.push_back(inv);
    }
    if (out.empty()) throw std::invalid_argument("no invariants requested");
    return out;
}

void check_applicable(const ModelSpec& spec, const std::vector<Invariant>& invs) {
    for (auto i : invs) {
        if (needs_knot(i) && !spec.yields_knots())
            throw InapplicableInvariant(invariant_name(i) + " is a knot invariant but " + family_name(spec.family) +
                                        " samples may have several components");
        if (i == Invariant::LinkingNumber && spec.min_components() < 2)
            throw InapplicableInvariant("lk needs two components but " + family_name(spec.family) +
                                        " samples may be knots");
    }
}

Rational evaluate_exact(const DiagramCode& d, Invariant inv) {
    switch (inv) {
        case Invariant::C2: return Rational(casson_c2(d));
        case Invariant::V3: return v3(d);
        case Invariant::Writhe: return Rational(writhe(d));
        case Invariant::Defect: return Rational(defect(d));
        case Invariant::Determinant: return Rational(determinant(d));
        case Invariant::LinkingNumber: return Rational(linking_number(d, 0, 1));
        case Invariant::Crossings: return Rational(static_cast<long long>(d.crossing_count()));
        case Invariant::Components: return Rational(static_cast<long long>(d.component_count()));
    }
    throw std::logic_error("unhandled invariant");
}

double evaluate(const DiagramCode& d, Invariant inv) {
    switch (inv) {
        case Invariant::C2: return static_cast<double>(casson_c2(d));
        case Invariant::Writhe: return static_cast<double>(writhe(d));
        case Invariant::Defect: return static_cast<double>(defect(d));
        case Invariant::Determinant: return determinant(d).convert_to<double>();
        case Invariant::LinkingNumber: return static_cast<double>(linking_number(d, 0, 1));
        case Invariant::Crossings: return static_cast<double>(d.crossing_count());
        case Invariant::Components: return static_cast<double>(d.component_count());
        default: return to_double(evaluate_exact(d, inv));
    }
}

std::vector<double> sample_values(const ExperimentConfig& cfg, std::uint64_t index) {
    RandomStream rng(Seed{cfg.seed, index});
    const auto d = draw_diagram(cfg.spec, rng);
    std::vector<double> out;
    out.reserve(cfg.invariants.size());
    if (d.is_knot()) {
        // chords are shared by the formula invariants
        const auto ch = based_chords(d);
        for (auto inv : cfg.invariants) {
            if (inv == Invariant::C2)
                out.push_back(static_cast<double>(casson_c2(ch)));
            else if (inv == Invariant::V3)
                out.push_back(to_double(v3(ch)));
            else if (inv == Invariant::Defect)
                out.push_back(static_cast<double>(defect(ch)));
            else
                out.push_back(evaluate(d, inv));
        }
    } else {
        for (auto inv : cfg.invariants) out.push_back(evaluate(d, inv));
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    if (cfg.samples < 1) throw std::invalid_argument("samples must be at least 1");
    if (cfg.shards < 1) throw std::invalid_argument("shards must be at least 1");
    if (cfg.block_size < 1) throw std::invalid_argument("block size must be at least 1");
    if (cfg.invariants.empty()) throw std::invalid_argument("no invariants requested");
    require_valid(cfg.spec);
    check_applicable(cfg.spec, cfg.invariants);

    const std::size_t k = cfg.invariants.size();
    const std::uint64_t blocks = (cfg.samples + cfg.block_size - 1) / cfg.block_size;
    ExperimentResult r;
    r.config = cfg;
    r.values.assign(k, std::vector<double>(cfg.samples));
    std::vector<std::vector<Moments>> block_moments(blocks, std::vector<Moments>(k));

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= blocks) return;
            try {
                const std::uint64_t lo = b * cfg.block_size, hi = std::min(cfg.samples, lo + cfg.block_size);
                for (std::uint64_t i = lo; i < hi; ++i) {
                    const auto v = sample_values(cfg, i);
                    for (std::size_t j = 0; j < k; ++j) {
                        r.values[j][i] = v[j];
                        block_moments[b][j].add(v[j]);
                    }
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = blocks;
                return;
            }
        }
    };
    const unsigned threads = static_cast<unsigned>(std::min<std::uint64_t>(cfg.shards, blocks));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    const std::string fam = family_name(cfg.spec.family);
    const int n = cfg.spec.scale();
    for (std::size_t j = 0; j < k; ++j) {
        Moments total;
        for (const auto& bm : block_moments) total = Moments::merge(total, bm[j]);
        InvariantSummary s;
        s.invariant = cfg.invariants[j];
        s.moments = report(total);
        s.histogram = histogram_for(r.values[j]);
        for (double v : r.values[j]) s.histogram.add(v);
        s.baseline = baseline_for(fam, n, invariant_name(s.invariant));
        if (s.baseline && s.baseline->mean && s.moments.standard_error > 0)
            s.z_score = (s.moments.mean - *s.baseline->mean) / s.moments.standard_error;
        r.summaries.push_back(std::move(s));
    }

    if (k == 2) {
        const auto a = cfg.invariants[0], b = cfg.invariants[1];
        const bool fish = (a == Invariant::C2 && b == Invariant::V3) || (a == Invariant::V3 && b == Invariant::C2);
        const auto& xs = r.values[a == Invariant::V3 && fish ? 1 : 0];
        const auto& ys = r.values[a == Invariant::V3 && fish ? 0 : 1];
        if (fish) {
            // normalized axes c2/n^2 and v3/n^3
            const double n2 = static_cast<double>(n) * n, n3 = n2 * n;
            Histogram2D h(-0.5, 1.0, 200, -1.5, 1.5, 200);
            for (std::size_t i = 0; i < xs.size(); ++i) h.add(xs[i] / n2, ys[i] / n3);
            r.pair_histogram = std::move(h);
            r.pair_axes[0] = "c2_over_n2";
            r.pair_axes[1] = "v3_over_n3";
        } else {
            const auto [x0, x1] = std::minmax_element(xs.begin(), xs.end());
            const auto [y0, y1] = std::minmax_element(ys.begin(), ys.end());
            Histogram2D h(*x0, *x1 + 1e-9 * (std::abs(*x1) + 1), 100, *y0, *y1 + 1e-9 * (std::abs(*y1) + 1), 100);
            for (std::size_t i = 0; i < xs.size(); ++i) h.add(xs[i], ys[i]);
            r.pair_histogram = std::move(h);
            r.pair_axes[0] = invariant_name(a);
            r.pair_axes[1] = invariant_name(b);
        }
    }

    for (std::size_t j = 0; j < k; ++j) {
        if (cfg.invariants[j] != Invariant::C2) continue;
        const double n2 = static_cast<double>(n) * n;
        double center = 0;
        if (cfg.spec.family == Family::Star) {
            center = r.summaries[j].moments.mean;
            r.normalized_c2_note = "(c2 - sample mean) / n^2; star samples drift right, so they are centered";
        } else {
            r.normalized_c2_note = "c2 / n^2";
        }
        std::vector<double> norm(r.values[j].size());
        for (std::size_t i = 0; i < norm.size(); ++i) norm[i] = (r.values[j][i] - center) / n2;
        auto h = histogram_for(norm);
        for (double v : norm) h.add(v);
        r.normalized_c2 = std::move(h);
    }
    return r;
}

nlohmann::json report_json(const ExperimentResult& r) {
    nlohmann::json out;
    out["metadata"] = {{"version", KNOTLAB_VERSION},
                       {"model", to_json(r.config.spec)},
                       {"seed", r.config.seed},
                       {"samples", r.config.samples},
                       {"block_size", r.config.block_size},
                       {"scale_n", r.config.spec.scale()}};
    nlohmann::json invs = nlohmann::json::object();
    for (const auto& s : r.summaries) {
        nlohmann::json e;
        e["moments"] = to_json(s.moments);
        if (s.baseline) {
            nlohmann::json b;
            b["source"] = s.baseline->source;
            b["leading_order_only"] = !s.baseline->exact_mean;
            if (s.baseline->mean) b["mean"] = *s.baseline->mean;
            if (s.baseline->variance) b["variance"] = *s.baseline->variance;
            if (s.z_score) b["z_score"] = *s.z_score;
            e["baseline"] = b;
        }
        e["histogram"] = {{"lo", s.histogram.lo},
                          {"hi", s.histogram.hi},
                          {"bins", s.histogram.counts.size()},
                          {"underflow", s.histogram.underflow},
                          {"overflow", s.histogram.overflow}};
        invs[invariant_name(s.invariant)] = e;
    }
    out["invariants"] = invs;
    if (r.pair_histogram)
        out["pair_histogram"] = {{"x", r.pair_axes[0]},
                                 {"y", r.pair_axes[1]},
                                 {"x_range", {r.pair_histogram->xlo, r.pair_histogram->xhi}},
                                 {"y_range", {r.pair_histogram->ylo, r.pair_histogram->yhi}},
                                 {"bins", {r.pair_histogram->xbins, r.pair_histogram->ybins}},
                                 {"outside", r.pair_histogram->outside}};
    if (r.normalized_c2) out["normalized_c2"] = {{"normalization", r.normalized_c2_note}};
    return out;
}

std::string pair_histogram_csv(const ExperimentResult& r) {
    if (!r.pair_histogram) return {};
    return to_csv(*r.pair_histogram, r.pair_axes[0], r.pair_axes[1]);
}

std::string histograms_csv(const ExperimentResult& r) {
    std::string out;
    for (const auto& s : r.summaries) {
        out += "# " + invariant_name(s.invariant) + "\n";
        out += to_csv(s.histogram, invariant_name(s.invariant));
    }
    if (r.normalized_c2) {
        out += "# normalized c2: " + r.normalized_c2_note + "\n";
        out += to_csv(*r.normalized_c2, "c2_normalized");
    }
    return out;
}

std::string samples_jsonl(const ExperimentResult& r) {
    std::string out;
    const std::uint64_t n = r.config.samples;
    for (std::uint64_t i = 0; i < n; ++i) {
        nlohmann::json v = nlohmann::json::object();
        for (std::size_t j = 0; j < r.summaries.size(); ++j)
            v[invariant_name(r.summaries[j].invariant)] = r.values[j][i];
        out += nlohmann::json{{"index", i}, {"invariants", v}}.dump();
        out += '\n';
    }
    return out;
}

std::string rational_string(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

namespace {

// Lehmer-code unranking of the index-th permutation of {0..n-1} in lexicographic order.
std::vector<int> unrank_permutation(std::uint64_t index, int n) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<std::uint64_t> fact(static_cast<std::size_t>(n) + 1, 1);
    for (int i = 1; i <= n; ++i) fact[i] = fact[i - 1] * static_cast<std::uint64_t>(i);
    std::vector<int> out;
    for (int i = n; i >= 1; --i) {
        const std::uint64_t q = index / fact[i - 1];
        index %= fact[i - 1];
        out.push_back(pool[q]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(q));
    }
    return out;
}

std::optional<std::uint64_t> checked_factorial(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) {
        if (f > kMaxSupport * 64 / static_cast<std::uint64_t>(i)) return std::nullopt;
        f *= static_cast<std::uint64_t>(i);
    }
    return f;
}

std::optional<std::uint64_t> checked_power(std::uint64_t base, std::size_t e) {
    std::uint64_t f = 1;
    for (std::size_t i = 0; i < e; ++i) {
        if (f > kMaxSupport * 64 / base) return std::nullopt;
        f *= base;
    }
    return f;
}

int count_strands(const ModelSpec& s) {
    int total = 0;
    for (const auto& x : s.params.at("petals")) total += x.get<int>();
    return total;
}

std::vector<int> signed_base_word(const ModelSpec& s, int& strands) {
    RandomStream dummy(Seed{0, 0});
    auto w = draw_raw(s, dummy);
    if (const auto* b = std::get_if<BraidWord>(&w)) {
        strands = b->strands;
        std::vector<int> letters = b->letters;
        for (auto& l : letters) l = std::abs(l);
        return letters;
    }
    const int a = s.params.at("a").get<int>(), b = s.params.at("b").get<int>();
    auto bb = billiard_base(b, a);
    strands = bb.strands;
    return bb.letters;
}

DiagramCode configuration(const ModelSpec& s, std::uint64_t index) {
    switch (s.family) {
        case Family::PetalumaKnot: {
            const int p = s.params.at("petals").get<int>();
            return grid_to_diagram(petal_to_grid({unrank_permutation(index, p)}));
        }
        case Family::PetalumaLink: {
            std::vector<int> petals;
            for (const auto& x : s.params.at("petals")) petals.push_back(x.get<int>());
            return petaluma_link_diagram(petals, unrank_permutation(index, count_strands(s)));
        }
        case Family::GridKnot: {
            const int n = s.params.at("n").get<int>();
            const std::uint64_t f = *checked_factorial(n);
            return grid_to_diagram({unrank_permutation(index / f, n), unrank_permutation(index % f, n)});
        }
        case Family::BraidWalk: {
            const int m = s.params.at("strands").get<int>();
            const int len = s.params.at("length").get<int>();
            const auto g = static_cast<std::uint64_t>(m - 1);
            BraidWord b;
            b.strands = m;
            b.closure = s.options.value("closure", std::string("trace")) == "plat" ? Closure::Plat : Closure::Trace;
            for (int i = 0; i < len; ++i) {
                const auto r = index % (2 * g);
                index /= 2 * g;
                int l = static_cast<int>(r % g) + 1;
                b.letters.push_back(r >= g ? -l : l);
            }
            return braid_closure_to_diagram(b);
        }
        case Family::FlatTorus:
        case Family::Star:
        case Family::Billiard: {
            int strands = 0;
            auto letters = signed_base_word(s, strands);
            for (std::size_t i = 0; i < letters.size(); ++i)
                if ((index >> i) & 1u) letters[i] = -letters[i];
            if (s.family == Family::Billiard) {
                const auto bb = billiard_base(s.params.at("b").get<int>(), s.params.at("a").get<int>());
                return close_braid(bb.strands, letters, bb.ends);
            }
            return braid_closure_to_diagram({strands, letters, Closure::Trace});
        }
        default: break;
    }
    throw std::logic_error("model has no finite support");
}

}  // namespace

std::optional<std::uint64_t> support_size(const ModelSpec& s) {
    switch (s.family) {
        case Family::PetalumaKnot: return checked_factorial(s.params.at("petals").get<int>());
        case Family::PetalumaLink: {
            if (!s.params.at("petals").is_array()) return std::nullopt;
            return checked_factorial(count_strands(s));
        }
        case Family::GridKnot: {
            const auto f = checked_factorial(s.params.at("n").get<int>());
            if (!f || *f > kMaxSupport * 64 / *f) return std::nullopt;
            return *f * *f;
        }
        case Family::BraidWalk:
            return checked_power(2 * static_cast<std::uint64_t>(s.params.at("strands").get<int>() - 1),
                                 static_cast<std::size_t>(s.params.at("length").get<int>()));
        case Family::FlatTorus:
        case Family::Star:
        case Family::Billiard: {
            int strands = 0;
            const auto w = signed_base_word(s, strands);
            if (w.size() >= 40) return std::nullopt;
            return std::uint64_t{1} << w.size();
        }
        default: return std::nullopt;
    }
}

std::vector<ExactDistribution> exhaustive_enumeration(const ModelSpec& spec, const std::vector<Invariant>& invs,
                                                      unsigned threads) {
    require_valid(spec);
    check_applicable(spec, invs);
    ModelSpec s = spec;
    if (s.family == Family::PetalumaLink && !s.params.at("petals").is_array()) {
        const int per = s.params.at("petals").get<int>();
        const int k = s.params.value("components", 2);
        s.params["petals"] = std::vector<int>(static_cast<std::size_t>(k), per);
        s.params.erase("components");
    }
    const auto size = support_size(s);
    if (!size) throw std::invalid_argument(family_name(s.family) + " has no enumerable finite support");
    if (*size > kMaxSupport)
        throw std::invalid_argument("support of " + std::to_string(*size) + " configurations exceeds the limit of " +
                                    std::to_string(kMaxSupport));

    using Table = std::vector<std::map<Rational, std::uint64_t>>;
    threads = std::max(1u, threads);
    std::vector<Table> partial(threads, Table(invs.size()));
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&](unsigned t) {
        try {
            const std::uint64_t lo = *size * t / threads, hi = *size * (t + 1) / threads;
            for (std::uint64_t i = lo; i < hi; ++i) {
                const auto d = configuration(s, i);
                for (std::size_t j = 0; j < invs.size(); ++j) ++partial[t][j][evaluate_exact(d, invs[j])];
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<ExactDistribution> out;
    for (std::size_t j = 0; j < invs.size(); ++j) {
        ExactDistribution e;
        e.invariant = invs[j];
        e.support = *size;
        for (const auto& p : partial)
            for (const auto& [v, c] : p[j]) e.counts[v] += c;
        Rational sum = 0;
        for (const auto& [v, c] : e.counts) sum += v * Rational(BigInt(c));
        e.mean = sum / Rational(BigInt(*size));
        Rational var = 0;
        for (const auto& [v, c] : e.counts) var += (v - e.mean) * (v - e.mean) * Rational(BigInt(c));
        e.variance = var / Rational(BigInt(*size));
        out.push_back(std::move(e));
    }
    return out;
}

nlohmann::json to_json(const ExactDistribution& d) {
    nlohmann::json dist = nlohmann::json::object();
    for (const auto& [v, c] : d.counts) dist[rational_string(v)] = c;
    return {{"invariant", invariant_name(d.invariant)},
            {"support", d.support},
            {"mean", rational_string(d.mean)},
            {"variance", rational_string(d.variance)},
            {"distribution", dist}};
}

}  // namespace knotlab

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "knotlab/braid.hpp"
#include "knotlab/dt.hpp"
#include "knotlab/experiment.hpp"
#include "knotlab/formula.hpp"
#include "knotlab/geometry.hpp"
#include "knotlab/grid.hpp"
#include "knotlab/invariants.hpp"
#include "knotlab/samplers.hpp"

namespace knotlab::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flags shared by every subcommand that builds a model.
struct ModelFlags {
    std::string model;
    std::vector<std::pair<std::string, std::string>> params;  // key, raw text
    std::string domain, scheme, closure;
    std::optional<double> alpha;
};

struct Common {
    ModelFlags m;
    std::uint64_t seed = 0;
    std::optional<unsigned> shards;
    std::string out;
    std::string format;
};

void add_model_flags(CLI::App* sub, ModelFlags& f) {
    sub->add_option("--model", f.model, "family name, inline JSON model, or path to a JSON model file");
    static const char* const kParams[] = {"petals", "components", "n", "m", "counts", "points",
                                          "strands", "length", "p", "q", "b", "a"};
    for (const char* key : kParams) {
        const std::string name = key;
        sub->add_option_function<std::string>(
            "--" + name, [&f, name](const std::string& v) { f.params.emplace_back(name, v); },
            "model parameter '" + name + "' (comma-separated for lists)");
    }
    sub->add_option("--domain", f.domain, "jump vertex domain: cube, ball, sphere, gaussian");
    sub->add_option("--scheme", f.scheme, "Fourier amplitude scheme: sharp-cutoff, exp, gauss, power");
    sub->add_option("--alpha", f.alpha, "exponent of the power scheme");
    sub->add_option("--closure", f.closure, "braid closure: trace or plat");
}

void add_common_flags(CLI::App* sub, Common& c) {
    sub->add_option("--seed", c.seed, "master seed (default 0)");
    sub->add_option("--shards", c.shards, "worker threads (default: KNOTLAB_SHARDS or all cores)");
    sub->add_option("--out", c.out, "output path (default: standard output)");
}

json param_value(const std::string& key, const std::string& text) {
    auto to_int = [&](const std::string& t) {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != t.size()) throw SpecError("params." + key, "expected an integer, got '" + t + "'");
        return v;
    };
    if (text.find(',') == std::string::npos) return to_int(text);
    json arr = json::array();
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) arr.push_back(to_int(item));
    return arr;
}

std::string read_text(const std::string& path) {
    if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::string s{std::istreambuf_iterator<char>(in), {}};
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    return s;
}

json parse_json_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError(what, std::string("invalid JSON: ") + e.what());
    }
}

ModelSpec build_spec(const ModelFlags& f) {
    if (f.model.empty()) throw SpecError("model", "missing --model");
    json j;
    if (f.model.front() == '{') {
        j = parse_json_text(f.model, "model");
    } else {
        bool is_family = true;
        try {
            family_from_name(f.model);
        } catch (const SpecError&) {
            is_family = false;
        }
        if (is_family || !fs::is_regular_file(f.model))
            j = {{"family", f.model}};
        else
            j = parse_json_text(read_text(f.model), "model");
    }
    if (!j.is_object()) throw SpecError("model", "expected a JSON object");
    for (const auto& [key, text] : f.params) j["params"][key] = param_value(key, text);
    if (!f.domain.empty()) j["options"]["domain"] = f.domain;
    if (!f.scheme.empty()) j["options"]["scheme"] = f.scheme;
    if (!f.closure.empty()) j["options"]["closure"] = f.closure;
    if (f.alpha) j["options"]["alpha"] = *f.alpha;
    return parse_model_spec(j);
}

unsigned resolve_shards(const std::optional<unsigned>& flag) {
    if (flag) {
        if (*flag == 0) throw SpecError("shards", "must be positive");
        return *flag;
    }
    if (const char* env = std::getenv("KNOTLAB_SHARDS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v <= 0) throw SpecError("KNOTLAB_SHARDS", "expected a positive integer");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

json metadata(const std::string& command, std::uint64_t seed) {
    return {{"tool", "knotlab"}, {"version", KNOTLAB_VERSION}, {"command", command}, {"seed", seed}};
}

json metadata(const std::string& command, const ModelSpec& spec, std::uint64_t seed) {
    auto m = metadata(command, seed);
    m["model"] = to_json(spec);
    return m;
}

// Output file or the caller's stream; write errors surface as IoError on close().
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path) {
        if (path.empty() || path == "-") {
            os_ = &fallback;
        } else {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) throw IoError("cannot write '" + path + "'");
            os_ = &file_;
        }
    }
    std::ostream& operator*() { return *os_; }
    void close() {
        os_->flush();
        if (!*os_) throw IoError("error while writing '" + (path_.empty() ? std::string("stdout") : path_) + "'");
        if (file_.is_open()) file_.close();
    }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* os_ = nullptr;
};

void write_file(const fs::path& path, const std::string& text) {
    Sink s(path.string(), std::cout);
    *s << text;
    s.close();
}

// Calls body(i) for i < n on `threads` workers; the first exception is rethrown.
void parallel_for(std::uint64_t n, unsigned threads, const std::function<void(std::uint64_t)>& body) {
    constexpr std::uint64_t kChunk = 64;
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    auto worker = [&] {
        try {
            for (;;) {
                const std::uint64_t lo = next.fetch_add(kChunk);
                if (lo >= n) return;
                for (std::uint64_t i = lo; i < std::min(n, lo + kChunk); ++i) body(i);
            }
        } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
            next = n;
        }
    };
    threads = static_cast<unsigned>(std::clamp<std::uint64_t>(threads, 1, std::max<std::uint64_t>(1, n / kChunk)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

json exact_value(const Rational& r) {
    const BigInt num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
    if (den == 1 && num >= std::numeric_limits<long long>::min() && num <= std::numeric_limits<long long>::max())
        return num.convert_to<long long>();
    return rational_string(r);
}

// ---- sample ----

int cmd_sample(const Common& c, std::uint64_t count, bool raw, std::ostream& out) {
    const auto spec = build_spec(c.m);
    const std::string format = c.format.empty() ? "jsonl" : c.format;
    if (format != "json" && format != "jsonl") throw SpecError("format", "sample writes json or jsonl");
    const unsigned shards = resolve_shards(c.shards);

    std::vector<json> records(count);
    parallel_for(count, shards, [&](std::uint64_t i) {
        RandomStream rng(Seed{c.seed, i});
        json rec = {{"index", i}};
        if (raw) {
            const json r = raw_to_json(draw_raw(spec, rng));
            for (auto& [k, v] : r.items()) rec[k] = v;
        } else {
            rec["diagram"] = to_json(draw_diagram(spec, rng));
        }
        records[i] = std::move(rec);
    });

    auto meta = metadata("sample", spec, c.seed);
    meta["count"] = count;
    meta["raw"] = raw;
    Sink sink(c.out, out);
    if (format == "jsonl") {
        *sink << json{{"metadata", meta}}.dump() << '\n';
        for (const auto& r : records) *sink << r.dump() << '\n';
    } else {
        *sink << json{{"metadata", meta}, {"samples", records}}.dump() << '\n';
    }
    sink.close();
    return kOk;
}

// ---- invariants / validate input ----

DiagramCode record_to_diagram(const json& rec, std::uint64_t seed, std::uint64_t index) {
    if (rec.is_array()) return diagram_from_json(rec);
    if (!rec.is_object()) throw SpecError("input", "expected a JSON object per record");
    if (rec.contains("diagram")) return diagram_from_json(rec.at("diagram"));
    if (rec.contains("polygon")) {
        RandomStream rng(Seed{seed, index});
        return project_generic(polygon_from_json(rec.at("polygon")), rng);
    }
    if (rec.contains("rho") && rec.contains("sigma")) {
        GridDiagram g{rec.at("rho").get<std::vector<int>>(), rec.at("sigma").get<std::vector<int>>()};
        require_valid(g);
        return grid_to_diagram(g);
    }
    if (rec.contains("heights")) {
        PetalPermutation p{rec.at("heights").get<std::vector<int>>()};
        require_valid(p);
        return grid_to_diagram(petal_to_grid(p));
    }
    if (rec.contains("letters")) {
        BraidWord b;
        b.strands = rec.at("strands").get<int>();
        b.letters = rec.at("letters").get<std::vector<int>>();
        b.closure = rec.value("closure", std::string("trace")) == "plat" ? Closure::Plat : Closure::Trace;
        require_valid(b);
        return braid_closure_to_diagram(b);
    }
    if (rec.contains("dt")) {
        const auto& v = rec.at("dt");
        return v.is_string() ? parse_dt(v.get<std::string>()) : dt_to_diagram(v.get<std::vector<int>>());
    }
    if (rec.contains("components")) return diagram_from_json(rec);
    throw SpecError("input", "record is not a diagram, polygon, grid, petal permutation, braid or DT code");
}

// Accepts one JSON document (a record, or {"samples": [...]}) or JSON lines; metadata lines are skipped.
std::vector<json> read_records(const std::string& text) {
    std::vector<json> out;
    try {
        json doc = json::parse(text);
        if (doc.is_object() && doc.contains("samples")) return doc.at("samples").get<std::vector<json>>();
        if (doc.is_object() && doc.contains("results")) return doc.at("results").get<std::vector<json>>();
        out.push_back(std::move(doc));
        return out;
    } catch (const json::parse_error&) {
    }
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line.front() == '#') continue;
        json rec = parse_json_text(line, "input line " + std::to_string(lineno));
        if (rec.is_object() && rec.contains("metadata") && rec.size() == 1) continue;
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<json> gather_input(const std::string& input, const std::vector<std::string>& dt_codes) {
    std::vector<json> recs;
    if (!input.empty()) recs = read_records(read_text(input));
    for (const auto& code : dt_codes) recs.push_back({{"dt", code}});
    if (recs.empty()) throw SpecError("input", "nothing to read; pass --input or --dt");
    return recs;
}

std::vector<Invariant> default_invariants(const DiagramCode& d) {
    if (d.is_knot())
        return {Invariant::C2, Invariant::V3, Invariant::Writhe, Invariant::Determinant, Invariant::Crossings,
                Invariant::Components};
    return {Invariant::Writhe, Invariant::LinkingNumber, Invariant::Crossings, Invariant::Components};
}

void check_diagram_applicable(const DiagramCode& d, const std::vector<Invariant>& invs, std::uint64_t index) {
    for (auto inv : invs) {
        const bool knot_only = inv == Invariant::C2 || inv == Invariant::V3 || inv == Invariant::Defect ||
                               inv == Invariant::Determinant;
        if (knot_only && !d.is_knot())
            throw InapplicableInvariant(invariant_name(inv) + " needs a knot but record " + std::to_string(index) +
                                        " has " + std::to_string(d.component_count()) + " components");
        if (inv == Invariant::LinkingNumber && d.component_count() < 2)
            throw InapplicableInvariant("lk needs two components; record " + std::to_string(index) + " is a knot");
    }
}

int cmd_invariants(const Common& c, const std::string& input, const std::vector<std::string>& dt_codes,
                   const std::string& inv_text, bool polynomials, std::ostream& out) {
    const std::string format = c.format.empty() ? "json" : c.format;
    if (format != "json" && format != "jsonl" && format != "csv")
        throw SpecError("format", "expected json, jsonl or csv");
    const auto recs = gather_input(input, dt_codes);
    std::optional<std::vector<Invariant>> requested;
    if (!inv_text.empty()) requested = parse_invariant_list(inv_text);
    if (format == "csv" && !requested) throw SpecError("invariants", "csv output needs an explicit --invariants list");

    std::vector<json> results;
    for (std::size_t k = 0; k < recs.size(); ++k) {
        const std::uint64_t index = recs[k].is_object() ? recs[k].value("index", std::uint64_t{k}) : k;
        const auto d = record_to_diagram(recs[k], c.seed, index);
        require_valid(d);
        const auto invs = requested ? *requested : default_invariants(d);
        check_diagram_applicable(d, invs, index);
        json vals = json::object();
        for (auto inv : invs) vals[invariant_name(inv)] = exact_value(evaluate_exact(d, inv));
        if (polynomials && d.is_knot()) {
            vals["alexander"] = alexander_symmetric(d).to_string("t");
            vals["conway"] = conway(d).to_string("z");
            if (d.crossing_count() <= 18) vals["jones"] = jones_oracle(d).to_string("t");
        }
        results.push_back({{"index", index}, {"invariants", vals}});
    }

    auto meta = metadata("invariants", c.seed);
    meta["input"] = input.empty() ? json("dt") : json(input);
    Sink sink(c.out, out);
    if (format == "json") {
        *sink << json{{"metadata", meta}, {"results", results}}.dump(2) << '\n';
    } else if (format == "jsonl") {
        *sink << json{{"metadata", meta}}.dump() << '\n';
        for (const auto& r : results) *sink << r.dump() << '\n';
    } else {
        *sink << "# " << meta.dump() << '\n' << "index";
        for (auto inv : *requested) *sink << ',' << invariant_name(inv);
        *sink << '\n';
        for (const auto& r : results) {
            *sink << r.at("index").get<std::uint64_t>();
            for (auto inv : *requested) {
                const auto& v = r.at("invariants").at(invariant_name(inv));
                *sink << ',' << (v.is_string() ? v.get<std::string>() : v.dump());
            }
            *sink << '\n';
        }
    }
    sink.close();
    return kOk;
}

// ---- experiment ----

int cmd_experiment(const Common& c, std::uint64_t samples, const std::string& inv_text, bool keep_samples,
                   std::ostream& out) {
    const std::string format = c.format.empty() ? "json" : c.format;
    if (format != "json" && format != "jsonl" && format != "csv")
        throw SpecError("format", "expected json, jsonl or csv");
    ExperimentConfig cfg;
    cfg.spec = build_spec(c.m);
    cfg.invariants = parse_invariant_list(inv_text);
    check_applicable(cfg.spec, cfg.invariants);
    if (samples == 0) throw SpecError("samples", "must be positive");
    cfg.samples = samples;
    cfg.seed = c.seed;
    cfg.shards = resolve_shards(c.shards);

    const auto result = run_experiment(cfg);
    auto report = report_json(result);
    auto meta = metadata("experiment", cfg.spec, cfg.seed);
    for (auto& [k, v] : report.at("metadata").items()) meta[k] = v;
    json names = json::array();
    for (auto inv : cfg.invariants) names.push_back(invariant_name(inv));
    meta["invariants"] = names;
    report["metadata"] = meta;
    const std::string header = "# " + meta.dump() + "\n";

    if (!c.out.empty() && c.out != "-") {
        std::error_code ec;
        fs::create_directories(c.out, ec);
        if (ec) throw IoError("cannot create directory '" + c.out + "': " + ec.message());
        const fs::path dir(c.out);
        write_file(dir / "report.json", report.dump(2) + "\n");
        write_file(dir / "histograms.csv", header + histograms_csv(result));
        if (result.pair_histogram) write_file(dir / "pair_histogram.csv", header + pair_histogram_csv(result));
        if (keep_samples) write_file(dir / "samples.jsonl", json{{"metadata", meta}}.dump() + "\n" + samples_jsonl(result));
        return kOk;
    }
    Sink sink("", out);
    if (format == "json")
        *sink << report.dump(2) << '\n';
    else if (format == "csv")
        *sink << header << histograms_csv(result);
    else
        *sink << json{{"metadata", meta}}.dump() << '\n' << samples_jsonl(result);
    sink.close();
    return kOk;
}

// ---- enumerate ----

int cmd_enumerate(const Common& c, const std::string& inv_text, std::ostream& out) {
    const std::string format = c.format.empty() ? "json" : c.format;
    if (format != "json" && format != "csv") throw SpecError("format", "enumerate writes json or csv");
    const auto spec = build_spec(c.m);
    const auto invs = parse_invariant_list(inv_text);
    const auto dists = exhaustive_enumeration(spec, invs, resolve_shards(c.shards));
    const auto meta = metadata("enumerate", spec, c.seed);
    Sink sink(c.out, out);
    if (format == "json") {
        json arr = json::array();
        for (const auto& d : dists) arr.push_back(to_json(d));
        *sink << json{{"metadata", meta}, {"distributions", arr}}.dump(2) << '\n';
    } else {
        *sink << "# " << meta.dump() << "\ninvariant,value,count\n";
        for (const auto& d : dists)
            for (const auto& [v, n] : d.counts) *sink << invariant_name(d.invariant) << ',' << rational_string(v) << ',' << n << '\n';
    }
    sink.close();
    return kOk;
}

// ---- export-braid ----

int cmd_export_braid(const Common& c, std::uint64_t count, std::ostream& out) {
    const auto spec = build_spec(c.m);
    if (!has_braid_form(spec.family))
        throw SpecError("family", family_name(spec.family) + " samples have no braid export");
    std::vector<std::string> lines(count);
    parallel_for(count, resolve_shards(c.shards), [&](std::uint64_t i) {
        RandomStream rng(Seed{c.seed, i});
        const auto b = to_braid(spec, draw_raw(spec, rng));
        std::string line;
        for (std::size_t k = 0; k < b.letters.size(); ++k) {
            if (k) line += ' ';
            line += std::to_string(b.letters[k]);
        }
        lines[i] = std::move(line);
    });
    auto meta = metadata("export-braid", spec, c.seed);
    meta["count"] = count;
    Sink sink(c.out, out);
    *sink << "# " << meta.dump() << '\n';
    for (const auto& l : lines) *sink << l << '\n';
    sink.close();
    return kOk;
}

// ---- validate ----

int cmd_validate(const Common& c, const std::string& input, const std::vector<std::string>& dt_codes,
                 const std::string& formula_path, std::ostream& out) {
    json report = {{"metadata", metadata("validate", c.seed)}};
    bool ok = true;
    bool checked = false;
    if (!c.m.model.empty() || !c.m.params.empty()) {
        checked = true;
        try {
            report["model"] = {{"valid", true}, {"spec", to_json(build_spec(c.m))}};
        } catch (const SpecError& e) {
            ok = false;
            report["model"] = {{"valid", false}, {"field", e.field}, {"error", e.what()}};
        }
    }
    if (!input.empty() || !dt_codes.empty()) {
        checked = true;
        json arr = json::array();
        const auto recs = gather_input(input, dt_codes);
        for (std::size_t k = 0; k < recs.size(); ++k) {
            json entry = {{"index", k}};
            try {
                const auto rep = validate_diagram(record_to_diagram(recs[k], c.seed, k));
                entry["valid"] = rep.ok();
                entry["violations"] = rep.violations;
                ok = ok && rep.ok();
            } catch (const std::exception& e) {
                entry["valid"] = false;
                entry["violations"] = {e.what()};
                ok = false;
            }
            arr.push_back(std::move(entry));
        }
        report["diagrams"] = arr;
    }
    if (!formula_path.empty()) {
        checked = true;
        try {
            const auto f = load_formula_file(formula_path);
            report["formula"] = {{"valid", true}, {"name", f.name}, {"order", f.order}, {"terms", f.terms.size()}};
        } catch (const std::exception& e) {
            ok = false;
            report["formula"] = {{"valid", false}, {"error", e.what()}};
        }
    }
    if (!checked) throw SpecError("validate", "pass --model, --input, --dt or --formula");
    report["valid"] = ok;
    Sink sink(c.out, out);
    *sink << report.dump(2) << '\n';
    sink.close();
    return ok ? kOk : kInvalid;
}

}  // namespace

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
    // "-n" is the sample count; CLI11 would otherwise treat it as the same name as --n.
    std::vector<std::string> args;
    for (const auto& a : args_in) args.push_back(a == "-n" ? "--count" : a);

    CLI::App app{"Random knot and link models, finite-type invariants and Monte Carlo experiments", "knotlab"};
    app.set_version_flag("--version", KNOTLAB_VERSION);
    app.require_subcommand(1);

    // Separate state per subcommand so defaults of one never leak into another.
    struct Options {
        Common c;
        std::uint64_t count = 1, samples = 1000;
        bool raw = false, keep_samples = false, polynomials = false;
        std::string inv_text, input, formula_path;
        std::vector<std::string> dt_codes;
    };
    Options so, io, eo, no, bo, vo;

    auto* sample = app.add_subcommand("sample", "draw diagrams from a model");
    add_model_flags(sample, so.c.m);
    add_common_flags(sample, so.c);
    sample->add_option("--count", so.count, "number of samples (also -n)");
    sample->add_flag("--raw", so.raw, "write the raw draw (permutation, grid, braid, polygon) instead of the diagram");
    sample->add_option("--format", so.c.format, "jsonl (default) or json");

    auto* invariants = app.add_subcommand("invariants", "compute invariants of diagrams");
    add_common_flags(invariants, io.c);
    invariants->add_option("--input", io.input, "JSON or JSON-lines records ('-' for stdin)");
    invariants->add_option("--dt", io.dt_codes, "Dowker-Thistlethwaite code, e.g. \"4 6 2\"");
    invariants->add_option("--invariants", io.inv_text, "comma-separated list (default depends on the diagram)");
    invariants->add_flag("--polynomials", io.polynomials, "also print Alexander, Conway and Jones polynomials");
    invariants->add_option("--format", io.c.format, "json (default), jsonl or csv");

    auto* experiment = app.add_subcommand("experiment", "Monte Carlo moments, histograms and baselines");
    add_model_flags(experiment, eo.c.m);
    add_common_flags(experiment, eo.c);
    eo.inv_text = "c2";
    experiment->add_option("--samples", eo.samples, "number of samples (default 1000)");
    experiment->add_option("--invariants", eo.inv_text, "comma-separated list (default c2)");
    experiment->add_flag("--keep-samples", eo.keep_samples, "with --out, also write samples.jsonl");
    experiment->add_option("--format", eo.c.format, "stdout content: json report (default), csv histograms, jsonl samples");

    auto* enumerate = app.add_subcommand("enumerate", "exact distribution over a finite model");
    add_model_flags(enumerate, no.c.m);
    add_common_flags(enumerate, no.c);
    no.inv_text = "c2";
    enumerate->add_option("--invariants", no.inv_text, "comma-separated list (default c2)");
    enumerate->add_option("--format", no.c.format, "json (default) or csv");

    auto* braid = app.add_subcommand("export-braid", "write sampled knots as braid words");
    add_model_flags(braid, bo.c.m);
    add_common_flags(braid, bo.c);
    braid->add_option("--count", bo.count, "number of samples (also -n)");

    auto* validate = app.add_subcommand("validate", "check a model, diagrams or a formula file");
    add_model_flags(validate, vo.c.m);
    add_common_flags(validate, vo.c);
    validate->add_option("--input", vo.input, "JSON or JSON-lines records");
    validate->add_option("--dt", vo.dt_codes, "Dowker-Thistlethwaite code");
    validate->add_option("--formula", vo.formula_path, "arrow formula JSON file");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (sample->parsed()) return cmd_sample(so.c, so.count, so.raw, out);
        if (invariants->parsed())
            return cmd_invariants(io.c, io.input, io.dt_codes, io.inv_text, io.polynomials, out);
        if (experiment->parsed()) return cmd_experiment(eo.c, eo.samples, eo.inv_text, eo.keep_samples, out);
        if (enumerate->parsed()) return cmd_enumerate(no.c, no.inv_text, out);
        if (braid->parsed()) return cmd_export_braid(bo.c, bo.count, out);
        if (validate->parsed()) return cmd_validate(vo.c, vo.input, vo.dt_codes, vo.formula_path, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const SpecError& e) {
        err << "invalid " << e.what() << '\n';
        return kInvalid;
    } catch (const InapplicableInvariant& e) {
        err << "invalid invariant: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kInvalid;
    } catch (const json::exception& e) {
        err << "invalid input: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
    return kInvalid;
}

}  // namespace knotlab::cli

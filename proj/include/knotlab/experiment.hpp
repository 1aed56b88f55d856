#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "knotlab/diagram.hpp"
#include "knotlab/poly.hpp"
#include "knotlab/samplers.hpp"
#include "knotlab/stats.hpp"

namespace knotlab {

enum class Invariant { C2, V3, Writhe, Defect, Determinant, LinkingNumber, Crossings, Components };

std::string invariant_name(Invariant i);
Invariant invariant_from_name(const std::string& name);
std::vector<Invariant> parse_invariant_list(const std::string& comma_separated);

struct InapplicableInvariant : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Throws InapplicableInvariant when some sample of the model could not carry the invariant.
void check_applicable(const ModelSpec& spec, const std::vector<Invariant>& invs);

Rational evaluate_exact(const DiagramCode& d, Invariant inv);
double evaluate(const DiagramCode& d, Invariant inv);

struct ExperimentConfig {
    ModelSpec spec;
    std::vector<Invariant> invariants;
    std::uint64_t samples = 1;
    std::uint64_t seed = 0;
    unsigned shards = 1;               // worker threads; never changes results
    std::uint64_t block_size = 512;    // merge unit; part of the result contract
};

struct InvariantSummary {
    Invariant invariant;
    MomentsReport moments;
    Histogram1D histogram;
    std::optional<TheoreticalBaseline> baseline;
    std::optional<double> z_score;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<InvariantSummary> summaries;
    std::vector<std::vector<double>> values;   // values[k][sample index]
    std::optional<Histogram2D> pair_histogram; // present when exactly two invariants were requested
    std::string pair_axes[2];
    // Normalized c2 histogram for cross-model comparison.
    std::optional<Histogram1D> normalized_c2;
    std::string normalized_c2_note;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Evaluates invariants for sample index i exactly as run_experiment does.
std::vector<double> sample_values(const ExperimentConfig& cfg, std::uint64_t index);

nlohmann::json report_json(const ExperimentResult& r);
std::string pair_histogram_csv(const ExperimentResult& r);
std::string histograms_csv(const ExperimentResult& r);
// {"index": i, "invariants": {...}} per line
std::string samples_jsonl(const ExperimentResult& r);

struct ExactDistribution {
    Invariant invariant;
    std::map<Rational, std::uint64_t> counts;
    std::uint64_t support = 0;
    Rational mean;
    Rational variance;  // of the uniform distribution over the support
};

constexpr std::uint64_t kMaxSupport = 10000000;

// Size of the finite support of the model, if it has one.
std::optional<std::uint64_t> support_size(const ModelSpec& spec);
std::vector<ExactDistribution> exhaustive_enumeration(const ModelSpec& spec, const std::vector<Invariant>& invs,
                                                      unsigned threads = 1);
nlohmann::json to_json(const ExactDistribution& d);

std::string rational_string(const Rational& r);

}  // namespace knotlab

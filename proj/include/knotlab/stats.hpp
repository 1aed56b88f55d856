#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace knotlab {

// Streaming central moments up to order four, combined with the pairwise
// formulas of Chan et al. and Pebay so shards can be merged in any grouping.
struct Moments {
    std::uint64_t n = 0;
    double mean = 0;
    double m2 = 0;  // sums of powers of deviations
    double m3 = 0;
    double m4 = 0;

    void add(double x);
    static Moments merge(const Moments& a, const Moments& b);
};

struct MomentsReport {
    std::uint64_t count = 0;
    double mean = 0;
    double variance = 0;        // unbiased
    double third_central = 0;   // population central moments
    double fourth_central = 0;
    double standard_error = 0;
};

MomentsReport report(const Moments& m);
MomentsReport merge_moments(const MomentsReport& a, const MomentsReport& b);
nlohmann::json to_json(const MomentsReport& r);

struct Histogram1D {
    double lo = 0, hi = 1;
    std::vector<std::uint64_t> counts;
    std::uint64_t underflow = 0, overflow = 0;

    Histogram1D() = default;
    Histogram1D(double lo, double hi, std::size_t bins) : lo(lo), hi(hi), counts(bins, 0) {}
    void add(double x);
    std::uint64_t total() const;
    double bin_lo(std::size_t i) const { return lo + (hi - lo) * static_cast<double>(i) / counts.size(); }
};

struct Histogram2D {
    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    std::size_t xbins = 0, ybins = 0;
    std::vector<std::uint64_t> counts;  // row-major, x outer
    std::uint64_t outside = 0;

    Histogram2D() = default;
    Histogram2D(double xlo, double xhi, std::size_t xbins, double ylo, double yhi, std::size_t ybins)
        : xlo(xlo), xhi(xhi), ylo(ylo), yhi(yhi), xbins(xbins), ybins(ybins), counts(xbins * ybins, 0) {}
    void add(double x, double y);
    std::uint64_t at(std::size_t i, std::size_t j) const { return counts[i * ybins + j]; }
    std::uint64_t total() const;
};

// Uniform bins covering the sample range (integer-valued data gets unit-width bins when they fit).
Histogram1D histogram_for(const std::vector<double>& values, std::size_t max_bins = 200);

std::string to_csv(const Histogram1D& h, const std::string& label);
std::string to_csv(const Histogram2D& h, const std::string& xlabel, const std::string& ylabel);

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Limit law of the normalized Petaluma linking number: density pi / cosh^2(2 pi t).
double logistic_cdf(double t);
double logistic_density(double t);
double logistic_quantile(double u);

// Leading-order asymptotics keyed by model family name and invariant.
struct TheoreticalBaseline {
    std::string source;
    std::optional<double> mean;
    std::optional<double> variance;
    bool exact_mean = false;  // false: leading order only
};

std::optional<TheoreticalBaseline> baseline_for(const std::string& family, int n, const std::string& invariant);

}  // namespace knotlab

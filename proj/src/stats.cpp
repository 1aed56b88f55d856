#include "knotlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace knotlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void Moments::add(double x) {
    Moments one;
    one.n = 1;
    one.mean = x;
    *this = merge(*this, one);
}

Moments Moments::merge(const Moments& a, const Moments& b) {
    if (a.n == 0) return b;
    if (b.n == 0) return a;
    Moments r;
    const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
    const double n = na + nb;
    const double d = b.mean - a.mean;
    const double d2 = d * d;
    r.n = a.n + b.n;
    r.mean = a.mean + d * nb / n;
    r.m2 = a.m2 + b.m2 + d2 * na * nb / n;
    r.m3 = a.m3 + b.m3 + d * d2 * na * nb * (na - nb) / (n * n) + 3.0 * d * (na * b.m2 - nb * a.m2) / n;
    r.m4 = a.m4 + b.m4 + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
           6.0 * d2 * (na * na * b.m2 + nb * nb * a.m2) / (n * n) + 4.0 * d * (na * b.m3 - nb * a.m3) / n;
    return r;
}

MomentsReport report(const Moments& m) {
    MomentsReport r;
    r.count = m.n;
    if (m.n == 0) return r;
    const double n = static_cast<double>(m.n);
    r.mean = m.mean;
    r.variance = m.n > 1 ? std::max(0.0, m.m2) / (n - 1) : 0.0;
    r.third_central = m.m3 / n;
    r.fourth_central = std::max(0.0, m.m4) / n;
    r.standard_error = std::sqrt(r.variance / n);
    return r;
}

MomentsReport merge_moments(const MomentsReport& a, const MomentsReport& b) {
    auto back = [](const MomentsReport& r) {
        Moments m;
        m.n = r.count;
        const double n = static_cast<double>(r.count);
        m.mean = r.mean;
        m.m2 = r.count > 1 ? r.variance * (n - 1) : 0.0;
        m.m3 = r.third_central * n;
        m.m4 = r.fourth_central * n;
        return m;
    };
    return report(Moments::merge(back(a), back(b)));
}

nlohmann::json to_json(const MomentsReport& r) {
    return {{"count", r.count},
            {"mean", r.mean},
            {"variance", r.variance},
            {"third_central", r.third_central},
            {"fourth_central", r.fourth_central},
            {"standard_error", r.standard_error}};
}

void Histogram1D::add(double x) {
    if (x < lo) {
        ++underflow;
        return;
    }
    if (x >= hi) {
        ++overflow;
        return;
    }
    auto i = static_cast<std::size_t>((x - lo) / (hi - lo) * counts.size());
    ++counts[std::min(i, counts.size() - 1)];
}

std::uint64_t Histogram1D::total() const {
    std::uint64_t t = underflow + overflow;
    for (auto c : counts) t += c;
    return t;
}

void Histogram2D::add(double x, double y) {
    if (x < xlo || x >= xhi || y < ylo || y >= yhi) {
        ++outside;
        return;
    }
    auto i = std::min(static_cast<std::size_t>((x - xlo) / (xhi - xlo) * xbins), xbins - 1);
    auto j = std::min(static_cast<std::size_t>((y - ylo) / (yhi - ylo) * ybins), ybins - 1);
    ++counts[i * ybins + j];
}

std::uint64_t Histogram2D::total() const {
    std::uint64_t t = outside;
    for (auto c : counts) t += c;
    return t;
}

Histogram1D histogram_for(const std::vector<double>& values, std::size_t max_bins) {
    if (values.empty()) return Histogram1D(0.0, 1.0, 1);
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const bool integral = std::all_of(values.begin(), values.end(), [](double v) { return v == std::floor(v); });
    if (integral && *mx - *mn + 1 <= static_cast<double>(max_bins))
        return Histogram1D(*mn - 0.5, *mx + 0.5, static_cast<std::size_t>(*mx - *mn + 1));
    double lo = *mn, hi = *mx;
    if (hi <= lo) hi = lo + 1;
    // widen a hair so the maximum lands inside the last bin
    hi += (hi - lo) * 1e-9;
    return Histogram1D(lo, hi, max_bins);
}

std::string to_csv(const Histogram1D& h, const std::string& label) {
    std::ostringstream out;
    out.precision(17);
    out << label << "_lo," << label << "_hi,count\n";
    out << "-inf," << h.lo << "," << h.underflow << "\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        out << h.bin_lo(i) << "," << h.bin_lo(i + 1) << "," << h.counts[i] << "\n";
    out << h.hi << ",inf," << h.overflow << "\n";
    return out.str();
}

std::string to_csv(const Histogram2D& h, const std::string& xl, const std::string& yl) {
    std::ostringstream out;
    out.precision(17);
    out << xl << "_lo," << xl << "_hi," << yl << "_lo," << yl << "_hi,count\n";
    for (std::size_t i = 0; i < h.xbins; ++i) {
        const double x0 = h.xlo + (h.xhi - h.xlo) * i / h.xbins, x1 = h.xlo + (h.xhi - h.xlo) * (i + 1) / h.xbins;
        for (std::size_t j = 0; j < h.ybins; ++j) {
            const double y0 = h.ylo + (h.yhi - h.ylo) * j / h.ybins,
                         y1 = h.ylo + (h.yhi - h.ylo) * (j + 1) / h.ybins;
            out << x0 << "," << x1 << "," << y0 << "," << y1 << "," << h.at(i, j) << "\n";
        }
    }
    return out.str();
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
    if (xs.size() < 2) throw std::invalid_argument("KS statistic needs at least two samples");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return std::clamp(d, 0.0, 1.0);
}

double logistic_cdf(double t) { return 0.5 * (1.0 + std::tanh(2 * kPi * t)); }

double logistic_density(double t) {
    const double c = std::cosh(2 * kPi * t);
    return kPi / (c * c);
}

double logistic_quantile(double u) { return std::atanh(2 * u - 1) / (2 * kPi); }

std::optional<TheoreticalBaseline> baseline_for(const std::string& family, int n, const std::string& inv) {
    const double x = n;
    TheoreticalBaseline b;
    if (family == "petaluma") {
        if (inv == "c2") {
            b.source = "E[c2] = n(n-1)/24, V[c2] ~ 7 n^4/960";
            b.mean = x * (x - 1) / 24;
            b.variance = 7.0 * std::pow(x, 4) / 960;
            b.exact_mean = true;
            return b;
        }
        if (inv == "v3") {
            b.source = "E[v3] = 0, V[v3] ~ 9298 n^6/5443200";
            b.mean = 0.0;
            b.variance = 9298.0 * std::pow(x, 6) / 5443200;
            b.exact_mean = true;
            return b;
        }
    } else if (family == "petaluma-link") {
        if (inv == "lk") {
            b.source = "lk/4n tends to the logistic law (variance 1/48)";
            b.mean = 0.0;
            b.variance = 16 * x * x / 48;
            b.exact_mean = true;
            return b;
        }
    } else if (family == "grid") {
        if (inv == "c2") {
            b.source = "E[c2] ~ n^2/288, V[c2] ~ 7 n^4/194400";
            b.mean = x * x / 288;
            b.variance = 7 * std::pow(x, 4) / 194400;
            return b;
        }
    } else if (family == "griddle") {
        if (inv == "c2") {
            b.source = "E[c2] ~ n^2/144, V[c2] ~ n^4/7776";
            b.mean = x * x / 144;
            b.variance = std::pow(x, 4) / 7776;
            return b;
        }
        if (inv == "defect") {
            b.source = "E[defect] = 8 E[c2] ~ n^2/18, V[defect] ~ 29 n^3/4050";
            b.mean = x * x / 18;
            b.variance = 29 * std::pow(x, 3) / 4050;
            return b;
        }
    } else if (family == "star") {
        if (inv == "c2") {
            b.source = "E[c2] ~ n^3/12, sd ~ n^2/sqrt(24)";
            b.mean = std::pow(x, 3) / 12;
            b.variance = std::pow(x, 4) / 24;
            return b;
        }
    }
    return std::nullopt;
}

}  // namespace knotlab

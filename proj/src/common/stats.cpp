#include "common/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "common/error.hpp"

namespace cfrca::stats {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_two_sided_p(double x) {
    return std::erfc(std::fabs(x) / std::numbers::sqrt2);
}

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double quantile(std::vector<double> x, double p) {
    if (x.empty()) throw ValidationError("quantile of empty sample");
    std::sort(x.begin(), x.end());
    const double h = (static_cast<double>(x.size()) - 1.0) * std::clamp(p, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

double ks_distance_uniform(std::vector<double> p_values) {
    if (p_values.empty()) return 0.0;
    std::sort(p_values.begin(), p_values.end());
    const double n = static_cast<double>(p_values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < p_values.size(); ++i) {
        const double f = std::clamp(p_values[i], 0.0, 1.0);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    return d;
}

}  // namespace cfrca::stats

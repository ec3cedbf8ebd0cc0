#pragma once

#include <span>
#include <vector>

namespace cfrca::stats {

double normal_cdf(double x);
// Two-sided tail 2 * (1 - Phi(|x|)), computed with erfc for accuracy.
double normal_two_sided_p(double x);

double mean(std::span<const double> x);
// Sample standard deviation (n - 1 denominator).
double stddev(std::span<const double> x);
// Linear-interpolation quantile (Hyndman-Fan type 7) of unsorted data.
double quantile(std::vector<double> x, double p);

// Kolmogorov-Smirnov distance between the empirical CDF of `p_values` and
// Uniform(0, 1).
double ks_distance_uniform(std::vector<double> p_values);

}  // namespace cfrca::stats

#pragma once

#include <functional>
#include <vector>

namespace wtpc {

/// Standard normal CDF.
double normal_cdf(double x);

/// ln of the standard normal CDF, stable far into the left tail (x ~ -1e3).
double log_normal_cdf(double x);

/// Standard normal quantile (inverse CDF), Wichura's AS241 PPND16 algorithm.
/// Throws DataError for p outside (0, 1).
double normal_quantile(double p);

/// Type-7 quantile (linear interpolation between order statistics) of a sample.
/// `sorted` must be ascending and nonempty; q in [0, 1].
double quantile_type7(const std::vector<double>& sorted, double q);

double mean(const std::vector<double>& v);

/// Sample variance with divisor n (second central moment).
double variance(const std::vector<double>& v);

/// Golden-section minimizer of a unimodal function on [a, b].
/// Runs until the bracket is shorter than tol (plus a hard iteration cap).
double golden_section_minimize(const std::function<double(double)>& f,
                               double a, double b, double tol = 1e-7);

/// One-sample Kolmogorov-Smirnov distance between a sample and U(0,1).
double ks_distance_uniform(std::vector<double> samples);

} // namespace wtpc

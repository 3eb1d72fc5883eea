#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gdlab {

double mean(std::span<const double> v);
// Unbiased sample variance (n - 1 denominator).
double variance(std::span<const double> v);
double stddev(std::span<const double> v);

// Two-sided Kolmogorov-Smirnov statistic against a continuous CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Asymptotic p-value via the Kolmogorov distribution series
// Q(lambda) = 2 sum_k (-1)^{k-1} exp(-2 k^2 lambda^2) with the Stephens
// finite-n correction lambda = (sqrt(n) + 0.12 + 0.11/sqrt(n)) * D.
// Series truncated at 100 terms / 1e-10 absolute tolerance.
double ks_pvalue(double d_statistic, std::size_t n);

double normal_cdf(double x, double mu = 0.0, double sigma = 1.0);

// Pearson correlation coefficient of paired samples.
double pearson_r(std::span<const double> a, std::span<const double> b);

// 1-Wasserstein distance between two empirical 1-D distributions.
double wasserstein1(std::vector<double> a, std::vector<double> b);

}  // namespace gdlab

#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Small numerical helpers shared by the estimators.

namespace magree::stats {

double normal_pdf(double x);
double normal_cdf(double x);

// Inverse of the standard normal CDF. Rational approximation refined by one
// Halley step; absolute error below 1e-12 on (1e-300, 1 - 1e-16).
double normal_quantile(double p);

double logistic(double theta);
double logit(double p);

// Smallest order statistic x with ECDF(x) >= p (inverse-CDF quantile).
// `sorted` must be ascending and nonempty; 0 < p <= 1.
double type1_quantile(std::span<const double> sorted, double p);

double mean(std::span<const double> x);
// Sample variance with divisor n - 1 (0 when n < 2).
double sample_variance(std::span<const double> x);

// Silverman's rule of thumb, 0.9 * min(sd, IQR / 1.34) * n^(-1/5); falls back
// to whichever spread measure is positive. Returns 0 when the sample has no
// spread at all.
double silverman_bandwidth(std::span<const double> x);

// Gaussian kernel density estimate at `at`.
double gaussian_kde(std::span<const double> x, double at, double bandwidth);

// splitmix64 mixing; used to derive independent per-task seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace magree::stats

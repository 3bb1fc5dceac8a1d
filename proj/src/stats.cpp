#include "magree/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "magree/errors.hpp"

namespace magree::stats {

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    fail(ErrorCode::InvalidArgument, "normal_quantile: p must lie in (0, 1)");
  }
  // Acklam's rational approximation.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley refinement against the erfc-based CDF.
  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double logistic(double theta) {
  if (theta >= 0.0) {
    return 1.0 / (1.0 + std::exp(-theta));
  }
  const double e = std::exp(theta);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

double type1_quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) {
    fail(ErrorCode::InvalidArgument, "type1_quantile: empty sample");
  }
  if (!(p > 0.0 && p <= 1.0)) {
    fail(ErrorCode::InvalidArgument, "type1_quantile: p must lie in (0, 1]");
  }
  const auto n = sorted.size();
  const auto nd = static_cast<double>(n);
  // Smallest k with k / n >= p, evaluated the same way the ECDF is.
  auto k = static_cast<std::size_t>(std::ceil(nd * p));
  k = std::clamp<std::size_t>(k, 1, n);
  while (k > 1 && static_cast<double>(k - 1) / nd >= p) {
    --k;
  }
  while (k < n && static_cast<double>(k) / nd < p) {
    ++k;
  }
  return sorted[k - 1];
}

double mean(std::span<const double> x) {
  if (x.empty()) {
    return 0.0;
  }
  double s = 0.0;
  for (double v : x) {
    s += v;
  }
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) {
    return 0.0;
  }
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) {
    ss += (v - m) * (v - m);
  }
  return ss / static_cast<double>(x.size() - 1);
}

double silverman_bandwidth(std::span<const double> x) {
  if (x.size() < 2) {
    return 0.0;
  }
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = std::sqrt(sample_variance(x));

  // Type-7 quartiles.
  auto quartile = [&](double q) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double iqr = (quartile(0.75) - quartile(0.25)) / 1.34;

  double spread = std::min(sd, iqr);
  if (!(spread > 0.0)) {
    spread = std::max(sd, iqr);
  }
  if (!(spread > 0.0)) {
    return 0.0;
  }
  return 0.9 * spread * std::pow(static_cast<double>(x.size()), -0.2);
}

double gaussian_kde(std::span<const double> x, double at, double bandwidth) {
  if (x.empty() || !(bandwidth > 0.0)) {
    fail(ErrorCode::InvalidArgument, "gaussian_kde: empty sample or bandwidth <= 0");
  }
  double s = 0.0;
  for (double v : x) {
    s += normal_pdf((at - v) / bandwidth);
  }
  return s / (static_cast<double>(x.size()) * bandwidth);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace magree::stats

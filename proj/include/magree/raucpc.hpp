#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "magree/distance.hpp"

namespace magree {

struct CurvePoint {
  double d = 0.0;
  double cp = 0.0;
};

/// Ordered (d, cp) points: d ascending from >= 0, cp nondecreasing in [0, 1].
using CurvePoints = std::vector<CurvePoint>;

/// Throws InvalidArgument unless `curve` satisfies the CurvePoints invariants.
void validate_curve(const CurvePoints& curve);

/// E[C]/delta_max with C = max(0, delta_max - D): the area under the empirical
/// CP curve on [0, delta_max], relative to delta_max.
double raucpc_ec(std::span<const double> distances, double delta_max);

struct RaucpcWithSe {
  double estimate = 0.0;
  double se = 0.0;  ///< SD(C / delta_max) / sqrt(n), divisor n - 1
};

/// raucpc_ec for independent distances with its Wald standard error.
/// Throws InvalidArgument for fewer than two distances.
RaucpcWithSe raucpc_ec_with_se(std::span<const double> distances, double delta_max);

/// Proportion of distances <= d at each grid point (right-continuous ECDF).
CurvePoints empirical_cp_curve(std::span<const double> distances, std::span<const double> grid);

/// `steps + 1` equally spaced points on [0, upper].
std::vector<double> uniform_grid(double upper, std::size_t steps = 200);

/// Legacy estimator: trapezoid area under the polyline through (0, 0) and the
/// (d_i, ECDF(d_i)) of the distinct observed distances, truncated or extended
/// to delta_max, divided by delta_max.
double raucpc_trapezoid(std::span<const double> distances, double delta_max);

/// RAUCPC of |X| for X ~ N(mean, sd^2), by adaptive Gauss-Kronrod quadrature.
double normal_difference_raucpc(double mean, double sd, double delta_max);

struct ParametricRaucpc {
  double estimate = 0.0;
  double se = 0.0;  ///< delta method on (mean, sd)
  double mean = 0.0;
  double sd = 0.0;
};

/// Legacy parametric estimator: fits a normal to the signed differences.
/// Throws ZeroVariance when the sample has no spread.
ParametricRaucpc raucpc_parametric_normal(std::span<const double> differences, double delta_max);

/// Resample-unit statistic: receives the indices of a resample (with repeats).
using ResampleStatistic = std::function<double(std::span<const std::size_t>)>;

/// Standard deviation (divisor B - 1) of `stat` over B resamples of n_units
/// units drawn with replacement. Deterministic given the seed.
double bootstrap_se(std::size_t n_units, const ResampleStatistic& stat, std::size_t B,
                    std::uint64_t seed);

/// Subject-level bootstrap of a statistic of a DistanceSet.
double bootstrap_se(const DistanceSet& dist, const std::function<double(const DistanceSet&)>& stat,
                    std::size_t B = 1000, std::uint64_t seed = 0);

/// CSV with header "d,cp".
void write_csv(std::ostream& out, const CurvePoints& curve);

}  // namespace magree

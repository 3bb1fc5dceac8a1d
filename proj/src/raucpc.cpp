#include "magree/raucpc.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "magree/errors.hpp"
#include "magree/stats.hpp"

namespace magree {

namespace {

void require_delta_max(double delta_max) {
  if (!(delta_max > 0.0) || !std::isfinite(delta_max)) {
    fail(ErrorCode::NonPositiveDeltaMax, "delta_max must be positive");
  }
}

void require_nonempty(std::span<const double> x) {
  if (x.empty()) {
    fail(ErrorCode::InvalidArgument, "empty distance sample");
  }
}

}  // namespace

void validate_curve(const CurvePoints& curve) {
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& p = curve[i];
    if (!(p.d >= 0.0) || !(p.cp >= 0.0 && p.cp <= 1.0)) {
      fail(ErrorCode::InvalidArgument, "curve point out of range");
    }
    if (i > 0 && (p.d < curve[i - 1].d || p.cp < curve[i - 1].cp)) {
      fail(ErrorCode::InvalidArgument, "curve must be ascending in d and nondecreasing in cp");
    }
  }
}

double raucpc_ec(std::span<const double> distances, double delta_max) {
  require_nonempty(distances);
  require_delta_max(delta_max);
  double total = 0.0;
  for (double d : distances) {
    total += std::max(0.0, delta_max - d);
  }
  return total / (static_cast<double>(distances.size()) * delta_max);
}

RaucpcWithSe raucpc_ec_with_se(std::span<const double> distances, double delta_max) {
  if (distances.size() < 2) fail(ErrorCode::InvalidArgument, "need at least two distances");
  require_delta_max(delta_max);
  std::vector<double> c(distances.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = std::max(0.0, delta_max - distances[i]) / delta_max;
  const double n = static_cast<double>(c.size());
  return {stats::mean(c), std::sqrt(stats::sample_variance(c) / n)};
}

CurvePoints empirical_cp_curve(std::span<const double> distances, std::span<const double> grid) {
  require_nonempty(distances);
  std::vector<double> sorted(distances.begin(), distances.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  CurvePoints out;
  out.reserve(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!(grid[g] >= 0.0) || (g > 0 && grid[g] < grid[g - 1])) {
      fail(ErrorCode::InvalidArgument, "grid must be nonnegative and ascending");
    }
    const auto below = std::upper_bound(sorted.begin(), sorted.end(), grid[g]) - sorted.begin();
    out.push_back({grid[g], static_cast<double>(below) / n});
  }
  return out;
}

std::vector<double> uniform_grid(double upper, std::size_t steps) {
  if (!(upper > 0.0) || steps == 0) {
    fail(ErrorCode::InvalidArgument, "uniform_grid: need upper > 0 and steps >= 1");
  }
  std::vector<double> grid(steps + 1);
  for (std::size_t s = 0; s <= steps; ++s) {
    grid[s] = upper * static_cast<double>(s) / static_cast<double>(steps);
  }
  grid.back() = upper;
  return grid;
}

double raucpc_trapezoid(std::span<const double> distances, double delta_max) {
  require_nonempty(distances);
  require_delta_max(delta_max);
  std::vector<double> sorted(distances.begin(), distances.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());

  CurvePoints poly{{0.0, 0.0}};
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    poly.push_back({sorted[i], static_cast<double>(j) / n});
    i = j;
  }

  double area = 0.0;
  for (std::size_t k = 1; k < poly.size(); ++k) {
    const auto a = poly[k - 1];
    const auto b = poly[k];
    if (a.d >= delta_max) break;
    if (b.d > delta_max) {
      const double cp_end = a.cp + (b.cp - a.cp) * (delta_max - a.d) / (b.d - a.d);
      area += 0.5 * (a.cp + cp_end) * (delta_max - a.d);
      return area / delta_max;
    }
    area += 0.5 * (a.cp + b.cp) * (b.d - a.d);
  }
  // The curve has reached 1 before delta_max; it stays flat from there.
  const double last_d = poly.back().d;
  if (last_d < delta_max) {
    area += poly.back().cp * (delta_max - last_d);
  }
  return area / delta_max;
}

double normal_difference_raucpc(double mean, double sd, double delta_max) {
  require_delta_max(delta_max);
  if (!(sd > 0.0)) {
    fail(ErrorCode::ZeroVariance, "normal_difference_raucpc: sd must be positive");
  }
  auto cp = [mean, sd](double d) {
    return stats::normal_cdf((d - mean) / sd) - stats::normal_cdf((-d - mean) / sd);
  };
  double err = 0.0;
  const double area =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(cp, 0.0, delta_max, 30, 1e-10,
                                                                     &err);
  return std::clamp(area / delta_max, 0.0, 1.0);
}

ParametricRaucpc raucpc_parametric_normal(std::span<const double> differences, double delta_max) {
  if (differences.size() < 2) {
    fail(ErrorCode::InvalidArgument, "parametric RAUCPC needs at least 2 differences");
  }
  require_delta_max(delta_max);
  ParametricRaucpc out;
  out.mean = stats::mean(differences);
  out.sd = std::sqrt(stats::sample_variance(differences));
  if (!(out.sd > 0.0)) {
    fail(ErrorCode::ZeroVariance, "parametric RAUCPC: differences have zero variance");
  }
  out.estimate = normal_difference_raucpc(out.mean, out.sd, delta_max);

  // Delta method with Var(mean) = sd^2/n and Var(sd) ~ sd^2/(2n).
  const double n = static_cast<double>(differences.size());
  const double hm = 1e-5 * std::max(out.sd, 1.0);
  const double hs = 1e-5 * out.sd;
  const double g_mean = (normal_difference_raucpc(out.mean + hm, out.sd, delta_max) -
                         normal_difference_raucpc(out.mean - hm, out.sd, delta_max)) /
                        (2.0 * hm);
  const double g_sd = (normal_difference_raucpc(out.mean, out.sd + hs, delta_max) -
                       normal_difference_raucpc(out.mean, out.sd - hs, delta_max)) /
                      (2.0 * hs);
  const double var = out.sd * out.sd * (g_mean * g_mean / n + g_sd * g_sd / (2.0 * n));
  out.se = std::sqrt(var);
  return out;
}

double bootstrap_se(std::size_t n_units, const ResampleStatistic& stat, std::size_t B,
                    std::uint64_t seed) {
  if (B < 2) fail(ErrorCode::InvalidArgument, "bootstrap needs B >= 2");
  if (n_units == 0) fail(ErrorCode::InvalidArgument, "bootstrap needs at least one unit");
  std::vector<double> values(B);
  std::vector<std::size_t> idx(n_units);
  for (std::size_t b = 0; b < B; ++b) {
    std::mt19937_64 rng(stats::mix_seed(seed, b));
    std::uniform_int_distribution<std::size_t> pick(0, n_units - 1);
    for (auto& i : idx) i = pick(rng);
    values[b] = stat(idx);
  }
  return std::sqrt(stats::sample_variance(values));
}

double bootstrap_se(const DistanceSet& dist, const std::function<double(const DistanceSet&)>& stat,
                    std::size_t B, std::uint64_t seed) {
  const auto m = dist.per_subject();
  return bootstrap_se(
      dist.num_subjects(),
      [&](std::span<const std::size_t> idx) {
        std::vector<double> flat;
        flat.reserve(idx.size() * m);
        for (auto i : idx) {
          const auto row = dist.subject(i);
          flat.insert(flat.end(), row.begin(), row.end());
        }
        return stat(DistanceSet(std::move(flat), m));
      },
      B, seed);
}

void write_csv(std::ostream& out, const CurvePoints& curve) {
  out << "d,cp\n" << std::setprecision(17);
  for (const auto& p : curve) {
    out << p.d << ',' << p.cp << '\n';
  }
}

}  // namespace magree

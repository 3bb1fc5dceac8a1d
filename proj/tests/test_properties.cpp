#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "magree/distance.hpp"
#include "magree/estimation.hpp"
#include "magree/raucpc.hpp"
#include "magree/simulation.hpp"
#include "support.hpp"

namespace {

constexpr int kCases = 10000;

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> kind(0, 2);
  std::normal_distribution<double> normal(0.0, 10.0);
  std::exponential_distribution<double> expo(0.3);
  std::uniform_int_distribution<int> ints(-5, 5);
  std::vector<double> v(n);
  const int k = kind(rng);
  for (auto& x : v) x = k == 0 ? normal(rng) : k == 1 ? expo(rng) : ints(rng);
  return v;
}

std::vector<double> random_distances(std::mt19937_64& rng, std::size_t n) {
  auto v = random_values(rng, n);
  for (auto& x : v) x = std::abs(x);
  return v;
}

magree::DistanceSet as_column(std::vector<double> d) { return magree::DistanceSet(std::move(d), 1); }

}  // namespace

TEST_CASE("mpd is max minus min and dominates rmspd") {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> size(2, 8);
  for (int c = 0; c < kCases; ++c) {
    const auto v = random_values(rng, size(rng));
    double brute = 0.0, sq = 0.0;
    for (std::size_t a = 0; a < v.size(); ++a) {
      for (std::size_t b = a + 1; b < v.size(); ++b) {
        brute = std::max(brute, std::abs(v[a] - v[b]));
        sq += (v[a] - v[b]) * (v[a] - v[b]);
      }
    }
    const double d = magree::mpd(v);
    REQUIRE(d == brute);
    REQUIRE(d == *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()));
    REQUIRE(magree::rmspd(v) <= d * (1.0 + 1e-12));
    REQUIRE(std::abs(magree::rmspd(v) - std::sqrt(2.0 * sq / (v.size() * (v.size() - 1.0)))) <= 1e-9 * (1.0 + d));
  }
}

TEST_CASE("mpd is translation invariant and scale equivariant") {
  std::mt19937_64 rng(102);
  std::uniform_int_distribution<std::size_t> size(2, 8);
  std::uniform_real_distribution<double> shift(-1e3, 1e3), scale(-50.0, 50.0);
  for (int c = 0; c < kCases; ++c) {
    const auto v = random_values(rng, size(rng));
    const double t = shift(rng), a = scale(rng);
    auto moved = v, scaled = v;
    for (auto& x : moved) x += t;
    for (auto& x : scaled) x *= a;
    const double d = magree::mpd(v);
    REQUIRE(std::abs(magree::mpd(moved) - d) <= 1e-9 * (1.0 + std::abs(t)));
    REQUIRE(std::abs(magree::mpd(scaled) - std::abs(a) * d) <= 1e-12 * (1.0 + std::abs(a) * d));
  }
}

TEST_CASE("point estimates are monotone in their parameter") {
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<std::size_t> size(1, 60);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < kCases; ++c) {
    const auto dist = as_column(random_distances(rng, size(rng)));
    const double d1 = 20.0 * u(rng), d2 = d1 + 5.0 * u(rng);
    REQUIRE(magree::estimate_ocp(dist, d1).beta_hat <= magree::estimate_ocp(dist, d2).beta_hat);
    const double p1 = 0.01 + 0.97 * u(rng), p2 = std::min(0.99, p1 + 0.2 * u(rng));
    REQUIRE(magree::estimate_otdi(dist, p1).beta_hat <= magree::estimate_otdi(dist, p2).beta_hat);
    const double m1 = 0.1 + 20.0 * u(rng), m2 = m1 + 5.0 * u(rng);
    REQUIRE(magree::estimate_rauocpc(dist, m1).beta_hat <= magree::estimate_rauocpc(dist, m2).beta_hat + 1e-12);
  }
}

TEST_CASE("shrinking every distance never lowers agreement") {
  std::mt19937_64 rng(104);
  std::uniform_int_distribution<std::size_t> size(1, 60);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < kCases; ++c) {
    const auto d = random_distances(rng, size(rng));
    auto smaller = d;
    for (auto& x : smaller) x *= u(rng);
    const auto a = as_column(d), b = as_column(smaller);
    REQUIRE(magree::estimate_ocp(a, 3.0).beta_hat <= magree::estimate_ocp(b, 3.0).beta_hat);
    REQUIRE(magree::estimate_otdi(b, 0.8).beta_hat <= magree::estimate_otdi(a, 0.8).beta_hat);
    REQUIRE(magree::estimate_rauocpc(a, 5.0).beta_hat <= magree::estimate_rauocpc(b, 5.0).beta_hat + 1e-12);
  }
}

TEST_CASE("CP curves are nondecreasing CDFs in [0, 1]") {
  std::mt19937_64 rng(105);
  std::uniform_int_distribution<std::size_t> size(1, 80);
  const auto grid = magree::uniform_grid(25.0, 50);
  for (int c = 0; c < kCases; ++c) {
    const auto d = random_distances(rng, size(rng));
    const auto curve = magree::empirical_cp_curve(d, grid);
    REQUIRE(curve.front().cp >= 0.0);
    for (std::size_t i = 1; i < curve.size(); ++i) REQUIRE(curve[i].cp >= curve[i - 1].cp);
    REQUIRE(curve.back().cp <= 1.0);
    if (*std::max_element(d.begin(), d.end()) <= 25.0) REQUIRE(curve.back().cp == 1.0);
  }
}

TEST_CASE("RAUOCPC equals the integrated empirical CDF") {
  std::mt19937_64 rng(106);
  std::uniform_int_distribution<std::size_t> size(1, 60);
  std::uniform_real_distribution<double> u(0.1, 30.0);
  for (int c = 0; c < kCases; ++c) {
    auto d = random_distances(rng, size(rng));
    const double delta = u(rng);
    std::sort(d.begin(), d.end());
    // Integral of the ECDF step function over [0, delta].
    double area = 0.0;
    const double n = static_cast<double>(d.size());
    for (std::size_t i = 0; i < d.size() && d[i] < delta; ++i) {
      const double next = i + 1 < d.size() ? std::min(d[i + 1], delta) : delta;
      area += (next - d[i]) * static_cast<double>(i + 1) / n;
    }
    REQUIRE(std::abs(magree::raucpc_ec(d, delta) - area / delta) <= 1e-12);
  }
}

TEST_CASE("Monte Carlo replications do not depend on the worker count") {
  const auto cfg = magree::find_preset("normal-low-shift", 2);
  magree::AgreementQuestion q;
  q.index = magree::Index::Otdi;
  q.pi0 = 0.8;
  q.delta0 = 5.0;
  magree::MonteCarloOptions opts;
  opts.true_value = 4.0;
  opts.compute_se_true = false;
  opts.threads = 1;
  const auto serial = magree::run_monte_carlo(cfg, q, 10, kCases, 99, opts);
  opts.threads = 4;
  const auto parallel = magree::run_monte_carlo(cfg, q, 10, kCases, 99, opts);
  REQUIRE(serial.outcomes.size() == static_cast<std::size_t>(kCases));
  std::size_t same = 0;
  for (std::size_t r = 0; r < serial.outcomes.size(); ++r) {
    const auto& a = serial.outcomes[r];
    const auto& b = parallel.outcomes[r];
    same += a.beta_hat == b.beta_hat && a.degenerate == b.degenerate && a.covered == b.covered &&
            (a.se_ind == b.se_ind || (std::isnan(a.se_ind) && std::isnan(b.se_ind)));
  }
  CHECK(same == serial.outcomes.size());
  CHECK(serial.mean_bias == parallel.mean_bias);
  CHECK(serial.coverage_rate == parallel.coverage_rate);
}

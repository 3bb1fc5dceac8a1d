// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "magree/correlation.hpp"
#include "magree/distance.hpp"
#include "magree/estimation.hpp"
#include "magree/grading.hpp"
#include "magree/raucpc.hpp"
#include "magree/simulation.hpp"
#include "support.hpp"

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

magree::AgreementQuestion question(magree::Index index, double delta0, double pi0, double delta_max) {
  magree::AgreementQuestion q;
  q.index = index;
  q.delta0 = delta0;
  q.pi0 = pi0;
  q.delta_max = delta_max;
  return q;
}

// Integral of the ECDF step function over [0, delta], divided by delta.
double ecdf_area(std::vector<double> d, double delta) {
  std::sort(d.begin(), d.end());
  const double n = static_cast<double>(d.size());
  double area = 0.0;
  for (std::size_t i = 0; i < d.size() && d[i] < delta; ++i) {
    const double next = i + 1 < d.size() ? std::min(d[i + 1], delta) : delta;
    area += (next - d[i]) * static_cast<double>(i + 1) / n;
  }
  return area / delta;
}

std::vector<double> mixed_sample(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> kind(0, 3);
  std::normal_distribution<double> normal(0.0, 2.0);
  std::exponential_distribution<double> expo(0.5);
  std::lognormal_distribution<double> lognormal(0.0, 1.0);
  std::uniform_int_distribution<int> ints(0, 8);
  const int k = kind(rng);
  std::vector<double> d(n);
  for (auto& x : d) {
    switch (k) {
      case 0: x = std::abs(normal(rng)); break;
      case 1: x = expo(rng); break;
      case 2: x = lognormal(rng); break;
      default: x = static_cast<double>(ints(rng)); break;
    }
  }
  return d;
}

void criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> size(1, 500);
  std::uniform_real_distribution<double> delta(0.1, 10.0);
  double worst = 0.0;
  for (int c = 0; c < 1000; ++c) {
    const auto d = mixed_sample(rng, size(rng));
    const double dm = delta(rng);
    worst = std::max(worst, std::abs(magree::raucpc_ec(d, dm) - ecdf_area(d, dm)));
  }
  const double t = seconds_since(t0);
  report(1, worst <= 1e-12 && t < 5.0,
         fmt("RAUOCPC = integrated ECDF / delta_max on 1000 samples, max |diff| %.2e, %.2f s", worst, t));
}

void criterion2() {
  const auto t0 = Clock::now();
  bool ok = true;
  int designs = 0;
  for (std::size_t j = 2; j <= 4; ++j) {
    for (std::size_t k = 1; k <= 3; ++k) {
      const std::vector<std::size_t> reps(j, k);
      const auto labels = magree::build_label_matrix(reps);
      const auto check = magree::verify_equal_rows(labels);
      ok = ok && check.equal_rows;
      std::size_t total = 0;
      for (const auto& [label, count] : check.multiplicity) {
        ok = ok && count == magree::predicted_multiplicity(label, reps);
        total += count;
      }
      ok = ok && total == labels.size();
      ++designs;
    }
  }
  const std::uint32_t reference[8][8] = {{7, 3, 5, 1, 6, 2, 4, 0}, {3, 7, 1, 5, 2, 6, 0, 4},
                                         {5, 1, 7, 3, 4, 0, 6, 2}, {1, 5, 3, 7, 0, 4, 2, 6},
                                         {6, 2, 4, 0, 7, 3, 5, 1}, {2, 6, 0, 4, 3, 7, 1, 5},
                                         {4, 0, 6, 2, 5, 1, 7, 3}, {0, 4, 2, 6, 1, 5, 3, 7}};
  const std::vector<std::size_t> j3k2{2, 2, 2};
  const auto labels = magree::build_label_matrix(j3k2);
  bool table = labels.size() == 8;
  for (std::size_t r = 0; table && r < 8; ++r) {
    for (std::size_t c = 0; c < 8; ++c) table = table && labels(r, c) == reference[r][c];
  }
  const double t = seconds_since(t0);
  report(2, ok && table && t < 1.0,
         fmt("equal label rows with predicted multiplicities for %d designs (J 2..4, K 1..3); "
             "J=3 K=2 8x8 label pattern %s; %.3f s",
             designs, table ? "matches" : "differs", t));
}

void criterion3() {
  const auto t0 = Clock::now();
  const auto cfg = magree::find_preset("normal-high-noshift", 3);

  // Closed form vs R_w = I sandwich on one dataset per index.
  std::mt19937_64 rng(3);
  const auto dist = magree::enumerate_distances(magree::generate(cfg, 500, rng));
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(27, 27);
  double worst_rel = 0.0;
  for (auto index : {magree::Index::Ocp, magree::Index::Otdi, magree::Index::Rauocpc}) {
    const auto q = question(index, 3.0, 0.8, 4.0);
    const auto est = magree::analyze(dist, q);
    const auto score = magree::ScoreFunction::for_question(q);
    const auto dec = magree::estimate_rho_and_a(dist, score, est.beta_hat);
    const double closed = magree::theoretical_variance(dec.a_value, dec.sigma_s_sq, 27, est.h_theta, 500);
    const double sandwich =
        magree::sandwich_with_working_matrix(dist, score, est.beta_hat, est.h_theta, identity);
    worst_rel = std::max(worst_rel, std::abs(closed - sandwich) / sandwich);
  }

  std::string detail = fmt("R_w = I sandwich vs closed form, max rel diff %.1e;", worst_rel);
  bool ok = worst_rel <= 1e-10;
  for (auto index : {magree::Index::Ocp, magree::Index::Otdi, magree::Index::Rauocpc}) {
    magree::MonteCarloOptions opts;
    const auto mc = magree::run_monte_carlo(cfg, question(index, 3.0, 0.8, 4.0), 500, 1000, 30, opts);
    ok = ok && mc.mean_abs_se_diff <= 0.001;
    detail += fmt(" %s mean|SE_ind-SE_t| %.5f (SE_ind %.4f, SE_t %.4f);",
                  std::string(magree::to_string(index)).c_str(), mc.mean_abs_se_diff, mc.mean_se_ind,
                  mc.mean_se_true);
  }
  const double t = seconds_since(t0);
  report(3, ok && t <= 120.0, detail + fmt(" %.1f s", t));
}

void criterion4() {
  const auto t0 = Clock::now();
  const char* scenarios[] = {"normal-high-noshift", "normal-low-noshift", "normal-high-shift",
                             "normal-low-shift"};
  const double ocp[] = {0.9412, 0.8066, 0.6457, 0.5397};
  const double otdi[] = {2.2455, 2.9660, 3.5219, 4.0533};
  const double rau[] = {0.6084, 0.4911, 0.3583, 0.3100};
  bool ok = true;
  std::string detail = "literal thresholds OCP(4), OTDI(0.8), RAUOCPC(5):";
  std::string alt = "same tables at OCP(3), RAUOCPC(4):";
  bool alt_ok = true;
  auto truth = [](const magree::ScenarioConfig& cfg, const magree::AgreementQuestion& q) {
    return magree::true_value_oracle(cfg, q, 100000, 4).value;
  };
  for (int s = 0; s < 4; ++s) {
    const auto cfg = magree::find_preset(scenarios[s], 3);
    const double o4 = truth(cfg, question(magree::Index::Ocp, 4.0, 0.8, 5.0));
    const double t8 = truth(cfg, question(magree::Index::Otdi, 4.0, 0.8, 5.0));
    const double r5 = truth(cfg, question(magree::Index::Rauocpc, 4.0, 0.8, 5.0));
    const bool row = std::abs(o4 - ocp[s]) <= 0.005 && std::abs(t8 - otdi[s]) <= 0.02 &&
                     std::abs(r5 - rau[s]) <= 0.005;
    ok = ok && row;
    detail += fmt(" %s %.4f/%.4f/%.4f (%s);", scenarios[s], o4, t8, r5, row ? "ok" : "off");
    const double o3 = truth(cfg, question(magree::Index::Ocp, 3.0, 0.8, 4.0));
    const double r4 = truth(cfg, question(magree::Index::Rauocpc, 3.0, 0.8, 4.0));
    alt_ok = alt_ok && std::abs(o3 - ocp[s]) <= 0.005 && std::abs(r4 - rau[s]) <= 0.005;
    alt += fmt(" %.4f/%.4f", o3, r4);
  }
  const auto lognormal = magree::find_preset("lognormal-high-noshift", 3);
  const double l35 = truth(lognormal, question(magree::Index::Ocp, 3.5, 0.8, 4.0));
  const double l3 = truth(lognormal, question(magree::Index::Ocp, 3.0, 0.8, 4.0));
  ok = ok && std::abs(l35 - 0.9444) <= 0.005;
  detail += fmt(" lognormal-high OCP(3.5) %.4f (target 0.9444);", l35);
  alt += fmt(" lognormal-high OCP(3) %.4f", l3);
  const double t = seconds_since(t0);
  report(4, ok && t <= 300.0, detail + fmt(" %.1f s", t));
  std::printf("info criterion 4: %s -> %s\n", alt.c_str(),
              alt_ok && std::abs(l3 - 0.9444) <= 0.005 ? "within tolerance" : "outside tolerance");
}

void criterion5() {
  const auto t0 = Clock::now();
  const char* scenarios[] = {"normal-high-noshift", "normal-low-noshift", "normal-high-shift",
                             "normal-low-shift"};
  bool ok = true;
  std::string detail;
  for (const char* name : scenarios) {
    const auto cfg = magree::find_preset(name, 3);
    for (auto index : {magree::Index::Ocp, magree::Index::Otdi, magree::Index::Rauocpc}) {
      magree::MonteCarloOptions opts;
      opts.compute_se_true = false;
      opts.oracle_n = 1'000'000;
      const auto mc = magree::run_monte_carlo(cfg, question(index, 3.0, 0.8, 4.0), 500, 2000, 50, opts);
      const double limit = index == magree::Index::Otdi ? 0.01 : 0.002;
      const bool cell = std::abs(mc.mean_bias) <= limit && mc.coverage_rate >= 0.935 &&
                        mc.coverage_rate <= 0.965;
      ok = ok && cell;
      detail += fmt(" %s/%s bias %+.4f CR %.3f%s;", name, std::string(magree::to_string(index)).c_str(),
                    mc.mean_bias, mc.coverage_rate, cell ? "" : " (off)");
    }
  }
  const double t = seconds_since(t0);
  report(5, ok && t <= 600.0, "2000 reps, N=500, K=3, oracle_n 1e6:" + detail + fmt(" %.1f s", t));
}

void criterion6() {
  const auto t0 = Clock::now();
  const double pop2 = magree::normal_difference_raucpc(0.0, 1.0, 2.0);
  const double pop3 = magree::normal_difference_raucpc(0.0, 1.0, 3.0);
  bool ok = std::abs(pop2 - 0.610) <= 5e-4 && std::abs(pop3 - 0.734) <= 5e-4;

  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0.0, 1.0);
  double bias = 0.0, covered = 0.0;
  std::vector<double> d(200);
  for (int s = 0; s < 1000; ++s) {
    for (auto& x : d) x = std::abs(z(rng));
    const auto r = magree::raucpc_ec_with_se(d, 2.0);
    bias += r.estimate - pop2;
    covered += std::abs(r.estimate - pop2) <= 1.96 * r.se ? 1.0 : 0.0;
  }
  bias /= 1000.0;
  const double cr = covered / 1000.0;
  ok = ok && std::abs(bias) <= 0.003 && cr >= 0.935 && cr <= 0.965;

  // Normal plus log-normal: the normal-theory estimator is inconsistent.
  std::lognormal_distribution<double> w(0.1, 2.15);
  std::vector<double> big(4'000'000);
  for (auto& x : big) x = std::abs(z(rng) + w(rng));
  const double mix_truth = magree::raucpc_ec(big, 2.0);
  std::vector<double> diff(100);
  double para_cover = 0.0, ec_cover = 0.0;
  for (int s = 0; s < 1000; ++s) {
    for (auto& x : diff) x = z(rng) + w(rng);
    const auto p = magree::raucpc_parametric_normal(diff, 2.0);
    para_cover += std::abs(p.estimate - mix_truth) <= 1.96 * p.se ? 1.0 : 0.0;
    std::vector<double> abs_diff(diff.size());
    std::transform(diff.begin(), diff.end(), abs_diff.begin(), [](double x) { return std::abs(x); });
    const auto e = magree::raucpc_ec_with_se(abs_diff, 2.0);
    ec_cover += std::abs(e.estimate - mix_truth) <= 1.96 * e.se ? 1.0 : 0.0;
  }
  para_cover /= 1000.0;
  ec_cover /= 1000.0;
  ok = ok && para_cover < 0.5;
  report(6, ok,
         fmt("normal truths %.4f (d=2) %.4f (d=3); n=200 bias %+.4f CR %.3f; mixture truth %.4f, n=100 "
             "parametric CR %.3f, nonparametric CR %.3f; %.1f s",
             pop2, pop3, bias, cr, mix_truth, para_cover, ec_cover, seconds_since(t0)));
}

void criterion7() {
  const auto& p = magree::bhsp();
  const auto& grades = p.grades;
  auto tau = [&](const std::string& name) {
    for (const auto& g : grades) {
      if (g.name == name) return magree::satisfactory_tau(p, g);
    }
    return std::nan("");
  };
  const double a = tau("A"), b = tau("B"), c = tau("C");
  report(7, c == 0.5875 && a > b && b > c, fmt("BHSP tau A %.6f > B %.6f > C %.6f", a, b, c));
}

void criterion8() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> size(2, 200);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int c = 0; c < 1000; ++c) {
    const auto ds = testing::random_dataset(rng, size(rng), {1, 1}, c);
    const auto dist = magree::enumerate_distances(ds);
    std::vector<double> d;
    for (const auto& s : ds.subjects()) d.push_back(std::abs(s.values[0][0] - s.values[1][0]));
    const double delta0 = 6.0 * u(rng) + 0.01, pi0 = 0.05 + 0.9 * u(rng), delta_max = 8.0 * u(rng) + 0.1;

    double cp = 0.0, rau = 0.0;
    for (double x : d) {
      cp += x < delta0 ? 1.0 : 0.0;
      rau += std::max(0.0, delta_max - x) / delta_max;
    }
    const double n = static_cast<double>(d.size());
    cp /= n;
    rau /= n;
    auto sorted = d;
    std::sort(sorted.begin(), sorted.end());
    const double tdi = sorted[static_cast<std::size_t>(std::ceil(pi0 * n)) - 1];

    worst = std::max({worst, std::abs(magree::estimate_ocp(dist, delta0).beta_hat - cp),
                      std::abs(magree::estimate_otdi(dist, pi0).beta_hat - tdi),
                      std::abs(magree::estimate_rauocpc(dist, delta_max).beta_hat - rau)});
  }
  report(8, worst <= 1e-12, fmt("J=2 K=1 vs pairwise CP/TDI/RAUCPC on 1000 datasets, max |diff| %.2e", worst));
}

void criterion9() {
  constexpr int cases = 10000;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> small(2, 8), medium(1, 60);
  std::uniform_real_distribution<double> u(0.0, 1.0), shift(-1e3, 1e3), scale(-50.0, 50.0);
  std::normal_distribution<double> normal(0.0, 10.0);
  auto values = [&](std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = normal(rng);
    return v;
  };
  std::vector<std::string> broken;
  auto suite = [&](const char* name, const std::function<bool()>& body) {
    for (int c = 0; c < cases; ++c) {
      if (!body()) {
        broken.emplace_back(name);
        return;
      }
    }
  };

  suite("mpd identities", [&] {
    const auto v = values(small(rng));
    const double d = magree::mpd(v), t = shift(rng), a = scale(rng);
    auto moved = v, scaled = v;
    for (auto& x : moved) x += t;
    for (auto& x : scaled) x *= a;
    return d == *std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()) &&
           std::abs(magree::mpd(moved) - d) <= 1e-9 * (1.0 + std::abs(t)) &&
           std::abs(magree::mpd(scaled) - std::abs(a) * d) <= 1e-12 * (1.0 + std::abs(a) * d) &&
           magree::rmspd(v) <= d * (1.0 + 1e-12);
  });
  suite("estimator monotonicity", [&] {
    auto v = values(medium(rng));
    for (auto& x : v) x = std::abs(x);
    const magree::DistanceSet dist(std::move(v), 1);
    const double d1 = 20.0 * u(rng), d2 = d1 + 5.0 * u(rng);
    const double p1 = 0.01 + 0.97 * u(rng), p2 = std::min(0.99, p1 + 0.2 * u(rng));
    return magree::estimate_ocp(dist, d1).beta_hat <= magree::estimate_ocp(dist, d2).beta_hat &&
           magree::estimate_otdi(dist, p1).beta_hat <= magree::estimate_otdi(dist, p2).beta_hat &&
           magree::estimate_rauocpc(dist, d1 + 0.1).beta_hat <=
               magree::estimate_rauocpc(dist, d2 + 0.1).beta_hat + 1e-12;
  });
  const auto grid = magree::uniform_grid(25.0, 50);
  suite("CP curve monotonicity", [&] {
    auto v = values(medium(rng));
    for (auto& x : v) x = std::abs(x);
    const auto curve = magree::empirical_cp_curve(v, grid);
    bool ok = curve.front().cp >= 0.0 && curve.back().cp <= 1.0;
    for (std::size_t i = 1; i < curve.size(); ++i) ok = ok && curve[i].cp >= curve[i - 1].cp;
    return ok;
  });

  const auto cfg = magree::find_preset("normal-low-shift", 2);
  magree::MonteCarloOptions opts;
  opts.true_value = 4.0;
  opts.compute_se_true = false;
  opts.threads = 1;
  const auto q = question(magree::Index::Otdi, 5.0, 0.8, 5.0);
  const auto serial = magree::run_monte_carlo(cfg, q, 10, cases, 99, opts);
  opts.threads = 4;
  const auto parallel = magree::run_monte_carlo(cfg, q, 10, cases, 99, opts);
  bool same = true;
  for (std::size_t r = 0; r < serial.outcomes.size(); ++r) {
    same = same && serial.outcomes[r].beta_hat == parallel.outcomes[r].beta_hat &&
           serial.outcomes[r].covered == parallel.outcomes[r].covered;
  }
  if (!same || serial.mean_bias != parallel.mean_bias) broken.emplace_back("parallel determinism");

  std::string detail = "4 suites x 10^4 cases (mpd identities, estimator monotonicity, CP curves, "
                       "parallel determinism)";
  for (const auto& b : broken) detail += "; broken: " + b;
  report(9, broken.empty(), detail);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion1, criterion2, criterion3,
                                                    criterion4, criterion5, criterion6,
                                                    criterion7, criterion8, criterion9};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, std::string("error: ") + e.what());
    }
  }
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}

#include "magree/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "magree/correlation.hpp"
#include "magree/distance.hpp"
#include "magree/errors.hpp"
#include "magree/stats.hpp"

namespace magree {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kOracleStream = 0xFFFF'FFFF'FFFF'FFFFull;

bool is_psd(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, cov.diagonal().cwiseAbs().maxCoeff());
  return eig.info() == Eigen::Success && eig.eigenvalues().minCoeff() >= -1e-10 * scale;
}

void check_correlation(double r, const char* what) {
  if (!(r >= -1.0 && r <= 1.0)) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " must lie in [-1, 1]");
  }
}

}  // namespace

std::string_view to_string(Family f) { return f == Family::Normal ? "normal" : "lognormal"; }

void ScenarioConfig::validate() const {
  const auto j = num_raters();
  if (j < 2) fail(ErrorCode::TooFewRaters, "scenario needs at least 2 raters");
  if (sigma_sq.size() != j || rho_intra.size() != j || rho_inter.rows() != static_cast<Eigen::Index>(j) ||
      rho_inter.cols() != static_cast<Eigen::Index>(j)) {
    fail(ErrorCode::InvalidArgument, "scenario parameter sizes disagree with J");
  }
  if (replicates == 0) fail(ErrorCode::InvalidArgument, "replicates must be >= 1");
  for (std::size_t a = 0; a < j; ++a) {
    if (!(sigma_sq[a] >= 0.0) || !std::isfinite(mu[a])) {
      fail(ErrorCode::InvalidArgument, "variances must be nonnegative and means finite");
    }
    check_correlation(rho_intra[a], "rho_intra");
    for (std::size_t b = 0; b < j; ++b) {
      if (a == b) continue;
      const auto ia = static_cast<Eigen::Index>(a);
      const auto ib = static_cast<Eigen::Index>(b);
      check_correlation(rho_inter(ia, ib), "rho_inter");
      if (rho_inter(ia, ib) != rho_inter(ib, ia)) {
        fail(ErrorCode::InvalidArgument, "rho_inter must be symmetric");
      }
    }
  }
  if (family == Family::LogNormal) {
    // Throws InfeasibleTarget / NotPSD on the log scale.
    lognormal_params(*this).validate();
    return;
  }
  if (!is_psd(scenario_covariance(*this))) {
    fail(ErrorCode::NotPSD, "scenario covariance is not positive semidefinite");
  }
}

ScenarioConfig make_scenario(std::string name, Family family, std::vector<double> mu,
                             std::vector<double> sigma_sq, double rho_intra, double rho_inter,
                             std::size_t replicates) {
  ScenarioConfig cfg;
  const auto j = static_cast<Eigen::Index>(mu.size());
  cfg.name = std::move(name);
  cfg.family = family;
  cfg.rho_intra.assign(mu.size(), rho_intra);
  cfg.mu = std::move(mu);
  cfg.sigma_sq = std::move(sigma_sq);
  cfg.rho_inter = Eigen::MatrixXd::Constant(j, j, rho_inter);
  cfg.rho_inter.diagonal().setOnes();
  cfg.replicates = replicates;
  return cfg;
}

Eigen::MatrixXd scenario_covariance(const ScenarioConfig& cfg) {
  const auto j = cfg.num_raters();
  const auto k = cfg.replicates;
  const auto dim = static_cast<Eigen::Index>(j * k);
  Eigen::MatrixXd cov(dim, dim);
  for (std::size_t a = 0; a < j; ++a) {
    for (std::size_t b = 0; b < j; ++b) {
      const double sd_ab = std::sqrt(cfg.sigma_sq[a] * cfg.sigma_sq[b]);
      for (std::size_t ka = 0; ka < k; ++ka) {
        for (std::size_t kb = 0; kb < k; ++kb) {
          double r;
          if (a == b) {
            r = ka == kb ? 1.0 : cfg.rho_intra[a];
          } else {
            r = cfg.rho_inter(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
          }
          cov(static_cast<Eigen::Index>(a * k + ka), static_cast<Eigen::Index>(b * k + kb)) =
              sd_ab * r;
        }
      }
    }
  }
  return cov;
}

ScenarioConfig lognormal_params(const ScenarioConfig& target) {
  const auto j = target.num_raters();
  ScenarioConfig out = target;
  out.family = Family::Normal;
  auto safe_log = [](double x) {
    if (!(x > 0.0)) fail(ErrorCode::InfeasibleTarget, "log-normal inversion: nonpositive argument");
    return std::log(x);
  };
  std::vector<double> sd_log(j);
  for (std::size_t a = 0; a < j; ++a) {
    const double mu = target.mu[a];
    const double s2 = target.sigma_sq[a];
    if (!(mu > 0.0)) fail(ErrorCode::InfeasibleTarget, "log-normal target needs positive means");
    const double log_m2 = safe_log(s2 + mu * mu);
    out.mu[a] = 2.0 * std::log(mu) - 0.5 * log_m2;
    out.sigma_sq[a] = std::max(0.0, log_m2 - 2.0 * std::log(mu));
    sd_log[a] = std::sqrt(out.sigma_sq[a]);
    if (out.sigma_sq[a] > 0.0) {
      out.rho_intra[a] =
          (safe_log(s2 * target.rho_intra[a] + mu * mu) - 2.0 * std::log(mu)) / out.sigma_sq[a];
    } else {
      out.rho_intra[a] = 0.0;
    }
  }
  for (std::size_t a = 0; a < j; ++a) {
    for (std::size_t b = 0; b < j; ++b) {
      const auto ia = static_cast<Eigen::Index>(a);
      const auto ib = static_cast<Eigen::Index>(b);
      if (a == b) {
        out.rho_inter(ia, ib) = 1.0;
        continue;
      }
      const double denom = sd_log[a] * sd_log[b];
      if (denom == 0.0) {
        out.rho_inter(ia, ib) = 0.0;
        continue;
      }
      const double mm = target.mu[a] * target.mu[b];
      const double cross = std::sqrt(target.sigma_sq[a] * target.sigma_sq[b]) * target.rho_inter(ia, ib);
      out.rho_inter(ia, ib) = (safe_log(cross + mm) - std::log(mm)) / denom;
    }
  }
  constexpr double kSlack = 1e-12;
  for (std::size_t a = 0; a < j; ++a) {
    if (std::abs(out.rho_intra[a]) > 1.0 + kSlack) {
      fail(ErrorCode::InfeasibleTarget, "log-scale intra-rater correlation outside [-1, 1]");
    }
    out.rho_intra[a] = std::clamp(out.rho_intra[a], -1.0, 1.0);
    for (std::size_t b = 0; b < j; ++b) {
      auto& r = out.rho_inter(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      if (std::abs(r) > 1.0 + kSlack) {
        fail(ErrorCode::InfeasibleTarget, "log-scale inter-rater correlation outside [-1, 1]");
      }
      r = std::clamp(r, -1.0, 1.0);
    }
  }
  if (!is_psd(scenario_covariance(out))) {
    fail(ErrorCode::InfeasibleTarget, "log-scale covariance is not positive semidefinite");
  }
  return out;
}

MvnSampler::MvnSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& cov) : mean_(std::move(mean)) {
  if (cov.rows() != mean_.size() || cov.cols() != mean_.size()) {
    fail(ErrorCode::InvalidArgument, "MvnSampler: dimension mismatch");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    return;
  }
  if (!is_psd(cov)) {
    fail(ErrorCode::NotPSD, "covariance is not positive semidefinite");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  factor_ = eig.eigenvectors() * root.asDiagonal();
}

void MvnSampler::draw(std::mt19937_64& rng, Eigen::VectorXd& out) const {
  std::normal_distribution<double> z;
  Eigen::VectorXd e(mean_.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = z(rng);
  out = mean_ + factor_ * e;
}

namespace {

MeasurementDataset draw_dataset(const ScenarioConfig& normal_cfg, std::size_t n,
                                std::mt19937_64& rng, bool exponentiate) {
  const auto j = normal_cfg.num_raters();
  const auto k = normal_cfg.replicates;
  Eigen::VectorXd mean(static_cast<Eigen::Index>(j * k));
  for (std::size_t a = 0; a < j; ++a) {
    for (std::size_t r = 0; r < k; ++r) mean[static_cast<Eigen::Index>(a * k + r)] = normal_cfg.mu[a];
  }
  const MvnSampler sampler(mean, scenario_covariance(normal_cfg));

  std::vector<std::string> raters(j);
  for (std::size_t a = 0; a < j; ++a) raters[a] = "R" + std::to_string(a + 1);
  std::vector<SubjectRecord> subjects(n);
  Eigen::VectorXd x;
  for (std::size_t i = 0; i < n; ++i) {
    sampler.draw(rng, x);
    auto& rec = subjects[i];
    rec.subject_id = "S" + std::to_string(i + 1);
    rec.values.assign(j, std::vector<double>(k));
    for (std::size_t a = 0; a < j; ++a) {
      for (std::size_t r = 0; r < k; ++r) {
        const double v = x[static_cast<Eigen::Index>(a * k + r)];
        rec.values[a][r] = exponentiate ? std::exp(v) : v;
      }
    }
  }
  return MeasurementDataset(std::move(raters), std::move(subjects));
}

}  // namespace

MeasurementDataset generate_normal(const ScenarioConfig& cfg, std::size_t n, std::mt19937_64& rng) {
  return draw_dataset(cfg, n, rng, false);
}

MeasurementDataset generate_lognormal(const ScenarioConfig& cfg, std::size_t n,
                                      std::mt19937_64& rng) {
  return draw_dataset(lognormal_params(cfg), n, rng, true);
}

MeasurementDataset generate(const ScenarioConfig& cfg, std::size_t n, std::mt19937_64& rng) {
  return cfg.family == Family::Normal ? generate_normal(cfg, n, rng)
                                      : generate_lognormal(cfg, n, rng);
}

OracleResult true_value_oracle(const ScenarioConfig& cfg, const AgreementQuestion& q,
                               std::size_t oracle_n, std::uint64_t seed) {
  cfg.validate();
  q.validate();
  if (oracle_n < 2) fail(ErrorCode::InvalidArgument, "oracle needs at least 2 subjects");
  std::mt19937_64 rng(stats::mix_seed(seed, kOracleStream));
  const auto dist = enumerate_distances(generate(cfg, oracle_n, rng));

  OracleResult out;
  // The point estimate is all the oracle needs; avoid the SE machinery.
  switch (q.index) {
    case Index::Ocp: {
      std::size_t hits = 0;
      for (double d : dist.pooled()) hits += d < *q.delta0 ? 1 : 0;
      out.value = static_cast<double>(hits) / static_cast<double>(dist.pooled().size());
      break;
    }
    case Index::Otdi: {
      std::vector<double> sorted(dist.pooled().begin(), dist.pooled().end());
      std::sort(sorted.begin(), sorted.end());
      out.value = stats::type1_quantile(sorted, *q.pi0);
      break;
    }
    case Index::Rauocpc:
      out.value = estimate_rauocpc(dist, *q.delta_max).beta_hat;
      break;
  }

  // The D-correlation is singular when J >= 3 (ranges are sums of pairwise
  // distances), so R0 is taken from the scores, which is what the sandwich
  // weights act on.
  const auto score = ScoreFunction::for_question(q);
  const auto m = static_cast<Eigen::Index>(dist.per_subject());
  const auto n = static_cast<Eigen::Index>(dist.num_subjects());
  Eigen::VectorXd row_scores(m), total = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = dist.subject(static_cast<std::size_t>(i));
    for (Eigen::Index c = 0; c < m; ++c) row_scores[c] = score(row[static_cast<std::size_t>(c)], out.value);
    total += row_scores;
    cross.selfadjointView<Eigen::Lower>().rankUpdate(row_scores);
  }
  const double nd = static_cast<double>(n);
  const Eigen::MatrixXd cov =
      (Eigen::MatrixXd(cross.selfadjointView<Eigen::Lower>()) - total * total.transpose() / nd) / (nd - 1.0);
  const Eigen::VectorXd sd = cov.diagonal().cwiseSqrt();
  if ((sd.array() > 0.0).all()) {
    const Eigen::VectorXd inv = sd.cwiseInverse();
    const auto projected = nearest_pd(inv.asDiagonal() * cov * inv.asDiagonal());
    out.r0 = projected.matrix;
    out.r0_adjusted = projected.adjusted;
  }

  try {
    out.a_value = estimate_rho_and_a(dist, score, out.value).a_value;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateScores) throw;
    out.a_value = kNaN;
  }
  return out;
}

MonteCarloReport run_monte_carlo(const ScenarioConfig& cfg, const AgreementQuestion& q,
                                 std::size_t n_subjects, std::size_t replications,
                                 std::uint64_t seed, const MonteCarloOptions& opts) {
  cfg.validate();
  q.validate();
  if (replications < 2) fail(ErrorCode::InvalidArgument, "need at least 2 replications");
  if (n_subjects < 2) fail(ErrorCode::InvalidArgument, "need at least 2 subjects");

  MonteCarloReport report;
  report.n_replications = replications;
  std::optional<Eigen::MatrixXd> r0_true = opts.r0_true;
  if (!opts.true_value || (opts.compute_se_true && !r0_true)) {
    auto oracle = true_value_oracle(cfg, q, opts.oracle_n, seed);
    report.true_value = opts.true_value.value_or(oracle.value);
    if (!r0_true) r0_true = std::move(oracle.r0);
  } else {
    report.true_value = *opts.true_value;
  }
  if (!opts.compute_se_true || (r0_true && r0_true->size() == 0)) r0_true.reset();

  // Log-scale parameters are shared by every replication.
  const ScenarioConfig draw_cfg = cfg.family == Family::LogNormal ? lognormal_params(cfg) : cfg;
  const bool exponentiate = cfg.family == Family::LogNormal;
  const auto score = ScoreFunction::for_question(q);
  const double truth = report.true_value;

  report.outcomes.resize(replications);
  auto run_one = [&](std::size_t r) {
    std::mt19937_64 rng(stats::mix_seed(seed, r));
    const auto dist = enumerate_distances(draw_dataset(draw_cfg, n_subjects, rng, exponentiate));
    auto est = analyze(dist, q, opts.estimation);
    ReplicationOutcome& o = report.outcomes[r];
    o.beta_hat = est.beta_hat;
    o.theta_hat = est.theta_hat;
    o.se_ind = est.se_theta;
    o.se_true = kNaN;
    if (est.degenerate()) {
      o.degenerate = true;
      return;
    }
    if (r0_true) {
      o.se_true = std::sqrt(
          sandwich_with_working_matrix(dist, score, est.beta_hat, est.h_theta, *r0_true));
    }
    o.covered = q.index == Index::Otdi ? est.ci->upper >= truth : est.ci->lower <= truth;
  };

  std::size_t workers = opts.threads ? opts.threads : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, replications);
  if (workers == 1) {
    for (std::size_t r = 0; r < replications; ++r) run_one(r);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t r; (r = next.fetch_add(1)) < replications && !failed;) {
          try {
            run_one(r);
          } catch (...) {
            if (!failed.exchange(true)) error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  // Ordered reduction.
  std::vector<double> thetas, betas;
  double se_ind = 0.0, se_true = 0.0, se_diff = 0.0, covered = 0.0;
  for (const auto& o : report.outcomes) {
    if (o.degenerate) {
      ++report.n_degenerate;
      continue;
    }
    thetas.push_back(o.theta_hat);
    betas.push_back(o.beta_hat);
    se_ind += o.se_ind;
    se_true += o.se_true;
    se_diff += std::abs(o.se_ind - o.se_true);
    covered += o.covered ? 1.0 : 0.0;
  }
  const double used = static_cast<double>(thetas.size());
  if (thetas.empty()) {
    report.mean_bias = report.sd_theta = report.sd_beta = report.mean_se_ind = kNaN;
    report.mean_se_true = report.mean_abs_se_diff = report.mse = report.coverage_rate = kNaN;
    return report;
  }
  const double mean_beta = stats::mean(betas);
  report.mean_bias = mean_beta - truth;
  report.sd_theta = std::sqrt(stats::sample_variance(thetas));
  double ss = 0.0;
  for (double b : betas) ss += (b - mean_beta) * (b - mean_beta);
  report.sd_beta = std::sqrt(ss / used);
  report.mse = report.sd_beta * report.sd_beta + report.mean_bias * report.mean_bias;
  report.mean_se_ind = se_ind / used;
  report.mean_se_true = r0_true ? se_true / used : kNaN;
  report.mean_abs_se_diff = r0_true ? se_diff / used : kNaN;
  report.coverage_rate = covered / used;
  return report;
}

std::vector<ScenarioConfig> builtin_presets(std::size_t replicates) {
  // The shifted rater is the one with unit variance; see README.
  const std::vector<double> sigma_sq{1.0, 2.0, 2.0};
  std::vector<ScenarioConfig> out;
  for (auto family : {Family::Normal, Family::LogNormal}) {
    for (const char* corr : {"high", "low"}) {
      for (const char* shift : {"noshift", "shift"}) {
        const bool high = std::string_view(corr) == "high";
        const bool shifted = std::string_view(shift) == "shift";
        std::string name = std::string(to_string(family)) + "-" + corr + "-" + shift;
        out.push_back(make_scenario(std::move(name), family,
                                    shifted ? std::vector<double>{3.0, 1.0, 1.0}
                                            : std::vector<double>{1.0, 1.0, 1.0},
                                    sigma_sq, high ? 0.8 : 0.5, high ? 0.5 : 0.1, replicates));
      }
    }
  }
  return out;
}

ScenarioConfig find_preset(std::string_view name, std::size_t replicates) {
  static const std::pair<std::string_view, std::string_view> kAliases[] = {
      {"high", "high-noshift"},
      {"moderate", "low-noshift"},
      {"mild", "high-shift"},
      {"low", "low-shift"},
  };
  std::string wanted(name);
  for (auto family : {"normal-", "lognormal-"}) {
    const std::string_view prefix(family);
    if (name.substr(0, prefix.size()) != prefix) continue;
    for (const auto& [alias, target] : kAliases) {
      if (name.substr(prefix.size()) == alias) wanted = std::string(prefix) + std::string(target);
    }
  }
  for (auto& cfg : builtin_presets(replicates)) {
    if (cfg.name == wanted) return cfg;
  }
  fail(ErrorCode::InvalidArgument, "unknown scenario preset '" + std::string(name) + "'");
}

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) {
      fail(ErrorCode::MalformedInput, "empty entry in '" + key + "'");
    }
    double v = 0.0;
    const char* b = item.data() + first;
    const char* e = item.data() + last + 1;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) {
      fail(ErrorCode::NonNumericValue, "non-numeric entry '" + item + "' in '" + key + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

std::vector<ScenarioConfig> parse_scenarios(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(ErrorCode::MalformedInput, std::string("scenario file: ") + e.what());
  }
  std::vector<ScenarioConfig> out;
  for (const auto& [section, body] : tree) {
    auto get = [&, &section = section, &body = body](const char* key) {
      const auto v = body.get_optional<std::string>(key);
      if (!v) fail(ErrorCode::MalformedInput, "scenario [" + section + "] lacks '" + key + "'");
      return *v;
    };
    const std::string family = get("family");
    if (family != "normal" && family != "lognormal") {
      fail(ErrorCode::MalformedInput, "scenario [" + section + "]: unknown family '" + family + "'");
    }
    auto mu = parse_list(get("mu"), "mu");
    auto sigma_sq = parse_list(get("sigma_sq"), "sigma_sq");
    const auto intra = parse_list(get("rho_intra"), "rho_intra");
    const auto inter = parse_list(get("rho_inter"), "rho_inter");
    const auto reps = parse_list(get("replicates"), "replicates");
    const auto j = mu.size();
    if (reps.size() != 1 || !(reps[0] >= 1.0) || reps[0] != std::floor(reps[0])) {
      fail(ErrorCode::MalformedInput, "scenario [" + section + "]: replicates must be an integer >= 1");
    }
    ScenarioConfig cfg = make_scenario(section, family == "normal" ? Family::Normal : Family::LogNormal,
                                       std::move(mu), std::move(sigma_sq), 0.0, 0.0,
                                       static_cast<std::size_t>(reps[0]));
    if (intra.size() == 1) {
      cfg.rho_intra.assign(j, intra[0]);
    } else if (intra.size() == j) {
      cfg.rho_intra = intra;
    } else {
      fail(ErrorCode::MalformedInput, "scenario [" + section + "]: rho_intra needs 1 or J values");
    }
    // rho_inter: one value, or J(J-1)/2 values in (1,2), (1,3), ..., (J-1,J) order.
    if (inter.size() == 1) {
      cfg.rho_inter.setConstant(inter[0]);
      cfg.rho_inter.diagonal().setOnes();
    } else if (inter.size() == j * (j - 1) / 2) {
      std::size_t p = 0;
      for (std::size_t a = 0; a < j; ++a) {
        for (std::size_t b = a + 1; b < j; ++b, ++p) {
          cfg.rho_inter(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = inter[p];
          cfg.rho_inter(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = inter[p];
        }
      }
    } else {
      fail(ErrorCode::MalformedInput, "scenario [" + section + "]: rho_inter needs 1 or J(J-1)/2 values");
    }
    if (const auto seed = body.get_optional<std::uint64_t>("seed")) cfg.seed = *seed;
    cfg.validate();
    out.push_back(std::move(cfg));
  }
  return out;
}

std::vector<ScenarioConfig> load_scenarios(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open scenario file " + path.string());
  return parse_scenarios(in);
}

void write_csv_header(std::ostream& out) {
  out << "scenario,True,Bias,SD_t,SE_ind,SE_t,MSE,CR,nmiss\n";
}

void write_csv_row(std::ostream& out, std::string_view label, const MonteCarloReport& r) {
  const auto flags = out.flags();
  const auto prec = out.precision();
  out << label << std::fixed << std::setprecision(6) << ',' << r.true_value << ',' << r.mean_bias
      << ',' << r.sd_theta << ',' << r.mean_se_ind << ',' << r.mean_se_true << ',' << r.mse << ','
      << r.coverage_rate << ',' << r.n_degenerate << '\n';
  out.flags(flags);
  out.precision(prec);
}

}  // namespace magree

#include "magree/estimation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "magree/errors.hpp"
#include "magree/stats.hpp"

namespace magree {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

}  // namespace

std::string_view to_string(Index index) {
  switch (index) {
    case Index::Ocp: return "OCP";
    case Index::Otdi: return "OTDI";
    case Index::Rauocpc: return "RAUOCPC";
  }
  return "?";
}

Index parse_index(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "ocp") return Index::Ocp;
  if (lower == "otdi") return Index::Otdi;
  if (lower == "rauocpc") return Index::Rauocpc;
  fail(ErrorCode::InvalidArgument, "unknown index '" + std::string(name) + "'");
}

std::string_view to_string(Degeneracy d) {
  switch (d) {
    case Degeneracy::None: return "none";
    case Degeneracy::BoundaryProportion: return "boundary-proportion";
    case Degeneracy::ZeroQuantile: return "zero-quantile";
    case Degeneracy::KernelFailure: return "kernel-failure";
    case Degeneracy::InsufficientSubjects: return "insufficient-subjects";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Reject: return "reject";
    case Verdict::FailToReject: return "fail-to-reject";
    case Verdict::InconclusiveDegenerate: return "inconclusive-degenerate";
  }
  return "?";
}

void AgreementQuestion::validate() const {
  auto positive = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) {
      fail(ErrorCode::InvalidArgument, std::string(name) + " must be positive");
    }
  };
  auto unit = [](const std::optional<double>& v, const char* name) {
    if (v && !in_open_unit(*v)) {
      fail(ErrorCode::InvalidArgument, std::string(name) + " must lie in (0, 1)");
    }
  };
  positive(delta0, "delta0");
  positive(delta_max, "delta_max");
  unit(pi0, "pi0");
  unit(tau0, "tau0");
  if (!in_open_unit(confidence)) {
    fail(ErrorCode::InvalidArgument, "confidence must lie in (0, 1)");
  }
  switch (index) {
    case Index::Ocp:
      if (!delta0) fail(ErrorCode::InvalidArgument, "OCP needs delta0");
      break;
    case Index::Otdi:
      if (!pi0) fail(ErrorCode::InvalidArgument, "OTDI needs pi0");
      break;
    case Index::Rauocpc:
      if (!delta_max) fail(ErrorCode::InvalidArgument, "RAUOCPC needs delta_max");
      break;
  }
}

double AgreementQuestion::score_parameter() const {
  switch (index) {
    case Index::Ocp: return delta0.value();
    case Index::Otdi: return pi0.value();
    case Index::Rauocpc: return delta_max.value();
  }
  return kNaN;
}

bool AgreementQuestion::has_test() const {
  switch (index) {
    case Index::Ocp: return pi0.has_value();
    case Index::Otdi: return delta0.has_value();
    case Index::Rauocpc: return tau0.has_value();
  }
  return false;
}

ScoreFunction ScoreFunction::ocp(double delta0) {
  if (!(delta0 > 0.0)) fail(ErrorCode::InvalidArgument, "delta0 must be positive");
  return {Index::Ocp, delta0};
}

ScoreFunction ScoreFunction::otdi(double pi0) {
  if (!in_open_unit(pi0)) fail(ErrorCode::InvalidArgument, "pi0 must lie in (0, 1)");
  return {Index::Otdi, pi0};
}

ScoreFunction ScoreFunction::rauocpc(double delta_max) {
  if (!(delta_max > 0.0)) fail(ErrorCode::NonPositiveDeltaMax, "delta_max must be positive");
  return {Index::Rauocpc, delta_max};
}

ScoreFunction ScoreFunction::for_question(const AgreementQuestion& q) {
  q.validate();
  switch (q.index) {
    case Index::Ocp: return ocp(*q.delta0);
    case Index::Otdi: return otdi(*q.pi0);
    case Index::Rauocpc: return rauocpc(*q.delta_max);
  }
  fail(ErrorCode::InvalidArgument, "bad index");
}

double ScoreFunction::operator()(double d, double beta) const {
  switch (index_) {
    case Index::Ocp: return (d < param_ ? 1.0 : 0.0) - beta;
    case Index::Otdi: return param_ - (d < beta ? 1.0 : 0.0);
    case Index::Rauocpc: return std::max(0.0, param_ - d) / param_ - beta;
  }
  return kNaN;
}

double ScoreFunction::link_inverse(double theta) const {
  return index_ == Index::Otdi ? std::exp(theta) : stats::logistic(theta);
}

double ScoreFunction::link(double beta) const {
  return index_ == Index::Otdi ? std::log(beta) : stats::logit(beta);
}

ScoreSummary summarize_scores(const DistanceSet& dist, const ScoreFunction& score, double beta,
                              double h_theta) {
  ScoreSummary out;
  out.h_theta = h_theta;
  const auto n = dist.num_subjects();
  out.per_subject_score_sum.resize(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double u = 0.0;
    for (double d : dist.subject(i)) {
      const double s = score(d, beta);
      u += s;
      ss += s * s;
    }
    out.per_subject_score_sum[i] = u;
  }
  out.sigma_s_sq = ss / static_cast<double>(dist.pooled().size());
  return out;
}

double sandwich_se(const ScoreSummary& scores, std::size_t n_subjects, std::size_t per_subject) {
  if (n_subjects < 2) {
    fail(ErrorCode::InvalidArgument, "sandwich_se: need at least 2 subjects");
  }
  if (!(scores.h_theta > 0.0)) {
    fail(ErrorCode::ZeroDerivative, "sandwich_se: h(theta) must be positive");
  }
  double ss = 0.0;
  for (double u : scores.per_subject_score_sum) {
    ss += u * u;
  }
  return std::sqrt(ss) /
         (static_cast<double>(n_subjects) * static_cast<double>(per_subject) * scores.h_theta);
}

namespace {

AgreementEstimate blank_estimate(const DistanceSet& dist, Index index, double param) {
  if (dist.num_subjects() == 0) {
    fail(ErrorCode::InvalidArgument, "estimation needs at least one subject");
  }
  AgreementEstimate est;
  est.index = index;
  est.parameter = param;
  est.n_subjects = dist.num_subjects();
  est.m_per_subject = dist.per_subject();
  est.theta_hat = kNaN;
  est.se_theta = kNaN;
  est.h_theta = kNaN;
  return est;
}

void finish_with_se(AgreementEstimate& est, const DistanceSet& dist, const ScoreFunction& score) {
  if (est.n_subjects < 2) {
    est.degeneracy = Degeneracy::InsufficientSubjects;
    return;
  }
  const auto summary = summarize_scores(dist, score, est.beta_hat, est.h_theta);
  est.se_theta = sandwich_se(summary, est.n_subjects, est.m_per_subject);
}

// OCP and RAUOCPC share the pooled-mean structure: beta_hat is the mean of a
// bounded per-distance quantity.
AgreementEstimate estimate_pooled_mean(const DistanceSet& dist, const ScoreFunction& score,
                                       const EstimationOptions& opts) {
  auto est = blank_estimate(dist, score.index(), score.parameter());
  const auto pooled = dist.pooled();
  double total = 0.0;
  for (double d : pooled) {
    // s(d, 0) is the bounded quantity itself.
    total += score(d, 0.0);
  }
  double count = static_cast<double>(pooled.size());
  if (opts.continuity_correction) {
    const double m = static_cast<double>(dist.per_subject());
    total += 0.5 * m;
    count += m;
  }
  est.beta_hat = total / count;
  if (!(est.beta_hat > 0.0 && est.beta_hat < 1.0)) {
    est.beta_hat = std::clamp(est.beta_hat, 0.0, 1.0);
    est.degeneracy = Degeneracy::BoundaryProportion;
    return est;
  }
  est.theta_hat = score.link(est.beta_hat);
  est.h_theta = est.beta_hat * (1.0 - est.beta_hat);
  finish_with_se(est, dist, score);
  return est;
}

}  // namespace

AgreementEstimate estimate_ocp(const DistanceSet& dist, double delta0, const EstimationOptions& opts) {
  return estimate_pooled_mean(dist, ScoreFunction::ocp(delta0), opts);
}

AgreementEstimate estimate_rauocpc(const DistanceSet& dist, double delta_max,
                                   const EstimationOptions& opts) {
  return estimate_pooled_mean(dist, ScoreFunction::rauocpc(delta_max), opts);
}

AgreementEstimate estimate_otdi(const DistanceSet& dist, double pi0, const EstimationOptions& opts) {
  const auto score = ScoreFunction::otdi(pi0);
  auto est = blank_estimate(dist, Index::Otdi, pi0);
  std::vector<double> sorted(dist.pooled().begin(), dist.pooled().end());
  std::sort(sorted.begin(), sorted.end());
  est.beta_hat = stats::type1_quantile(sorted, pi0);
  if (!(est.beta_hat > 0.0)) {
    est.degeneracy = Degeneracy::ZeroQuantile;
    return est;
  }
  est.theta_hat = std::log(est.beta_hat);

  const double bw = opts.bandwidth ? *opts.bandwidth : stats::silverman_bandwidth(sorted);
  if (!(bw > 0.0)) {
    est.degeneracy = Degeneracy::KernelFailure;
    return est;
  }
  const double density = stats::gaussian_kde(sorted, est.beta_hat, bw);
  est.h_theta = density * est.beta_hat;
  if (!(est.h_theta > 0.0)) {
    est.degeneracy = Degeneracy::KernelFailure;
    return est;
  }
  finish_with_se(est, dist, score);
  return est;
}

Interval one_sided_interval(const AgreementEstimate& est, double confidence) {
  if (est.degenerate()) {
    fail(ErrorCode::Degenerate, "no interval for a degenerate estimate");
  }
  if (!in_open_unit(confidence)) {
    fail(ErrorCode::InvalidArgument, "confidence must lie in (0, 1)");
  }
  const double z = stats::normal_quantile(confidence);
  if (est.index == Index::Otdi) {
    return {0.0, std::exp(est.theta_hat + z * est.se_theta)};
  }
  return {stats::logistic(est.theta_hat - z * est.se_theta), 1.0};
}

TestResult interchangeability_test(const AgreementEstimate& est, const AgreementQuestion& q) {
  TestResult out;
  const std::string name(to_string(est.index));
  switch (est.index) {
    case Index::Ocp:
      out.threshold = q.pi0.value();
      out.h0 = name + "(" + format_number(est.parameter) + ") < " + format_number(out.threshold);
      break;
    case Index::Otdi:
      out.threshold = q.delta0.value();
      out.h0 = name + "(" + format_number(est.parameter) + ") > " + format_number(out.threshold);
      break;
    case Index::Rauocpc:
      out.threshold = q.tau0.value();
      out.h0 = name + "(" + format_number(est.parameter) + ") < " + format_number(out.threshold);
      break;
  }
  if (est.degenerate()) {
    out.verdict = Verdict::InconclusiveDegenerate;
    return out;
  }
  const Interval ci = est.ci ? *est.ci : one_sided_interval(est, q.confidence);
  const bool reject =
      est.index == Index::Otdi ? ci.upper <= out.threshold : ci.lower >= out.threshold;
  out.verdict = reject ? Verdict::Reject : Verdict::FailToReject;
  return out;
}

AgreementEstimate analyze(const DistanceSet& dist, const AgreementQuestion& q,
                          const EstimationOptions& opts) {
  q.validate();
  AgreementEstimate est;
  switch (q.index) {
    case Index::Ocp: est = estimate_ocp(dist, *q.delta0, opts); break;
    case Index::Otdi: est = estimate_otdi(dist, *q.pi0, opts); break;
    case Index::Rauocpc: est = estimate_rauocpc(dist, *q.delta_max, opts); break;
  }
  if (!est.degenerate()) {
    est.ci = one_sided_interval(est, q.confidence);
  }
  if (q.has_test()) {
    est.test = interchangeability_test(est, q);
  }
  return est;
}

}  // namespace magree

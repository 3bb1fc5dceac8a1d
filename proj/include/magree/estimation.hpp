#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "magree/distance.hpp"

namespace magree {

enum class Index { Ocp, Otdi, Rauocpc };

std::string_view to_string(Index index);
/// Accepts "ocp", "otdi", "rauocpc" (case-insensitive).
Index parse_index(std::string_view name);

/// Which index to estimate and the thresholds that go with it.
///
/// Estimation needs delta0 (OCP), pi0 (OTDI) or delta_max (RAUOCPC). The
/// interchangeability test additionally needs pi0 (OCP), delta0 (OTDI) or
/// tau0 (RAUOCPC); without it no test is run.
struct AgreementQuestion {
  Index index = Index::Ocp;
  std::optional<double> delta0;
  std::optional<double> pi0;
  std::optional<double> tau0;
  std::optional<double> delta_max;
  double confidence = 0.95;

  /// Throws InvalidArgument if a required field is missing or a present field
  /// is out of range.
  void validate() const;
  /// Threshold of the estimating score: delta0, pi0 or delta_max.
  double score_parameter() const;
  bool has_test() const;
};

/// Estimating score s(D, beta) of one index with its link function.
///
/// The score is written against the natural-scale beta = g(theta) so that the
/// OTDI indicator I(D < beta) is evaluated at the exact order statistic.
class ScoreFunction {
 public:
  static ScoreFunction ocp(double delta0);
  static ScoreFunction otdi(double pi0);
  static ScoreFunction rauocpc(double delta_max);
  static ScoreFunction for_question(const AgreementQuestion& q);

  Index index() const noexcept { return index_; }
  double parameter() const noexcept { return param_; }

  double operator()(double d, double beta) const;

  /// g(theta): logistic for OCP/RAUOCPC, exp for OTDI.
  double link_inverse(double theta) const;
  /// g^{-1}(beta).
  double link(double beta) const;

 private:
  ScoreFunction(Index index, double param) : index_(index), param_(param) {}
  Index index_;
  double param_;
};

enum class Degeneracy {
  None,
  BoundaryProportion,    ///< OCP/RAUOCPC estimate is 0 or 1, logit undefined
  ZeroQuantile,          ///< OTDI estimate is 0, log undefined
  KernelFailure,         ///< OTDI density estimate unavailable (no spread)
  InsufficientSubjects,  ///< fewer than 2 subjects, no sandwich SE
};

std::string_view to_string(Degeneracy d);

enum class Verdict { Reject, FailToReject, InconclusiveDegenerate };

std::string_view to_string(Verdict v);

/// One-sided interval on the natural scale: (lower, 1] for OCP/RAUOCPC,
/// [0, upper) for OTDI.
struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct TestResult {
  std::string h0;  ///< e.g. "OCP(15) < 0.85"
  double threshold = 0.0;
  Verdict verdict = Verdict::InconclusiveDegenerate;
  bool interchangeable() const noexcept { return verdict == Verdict::Reject; }
};

struct AgreementEstimate {
  Index index = Index::Ocp;
  double parameter = 0.0;  ///< delta0, pi0 or delta_max
  double beta_hat = 0.0;
  double theta_hat = 0.0;  ///< NaN when the link is undefined
  double se_theta = 0.0;   ///< NaN when unavailable
  double h_theta = 0.0;    ///< derivative factor h(theta_hat)
  std::optional<Interval> ci;
  std::optional<TestResult> test;
  std::size_t n_subjects = 0;
  std::size_t m_per_subject = 0;
  Degeneracy degeneracy = Degeneracy::None;

  bool degenerate() const noexcept { return degeneracy != Degeneracy::None; }
};

/// Per-subject score sums u_i = sum_m s(D_im, beta_hat) and friends.
struct ScoreSummary {
  std::vector<double> per_subject_score_sum;
  double sigma_s_sq = 0.0;  ///< mean of s^2 over all N*M scores
  double h_theta = 0.0;
};

struct EstimationOptions {
  /// Adds one pseudo-subject with M/2 successes to OCP/RAUOCPC.
  bool continuity_correction = false;
  /// OTDI kernel bandwidth; Silverman's rule on the pooled distances if unset.
  std::optional<double> bandwidth;
};

AgreementEstimate estimate_ocp(const DistanceSet& dist, double delta0,
                               const EstimationOptions& opts = {});
AgreementEstimate estimate_otdi(const DistanceSet& dist, double pi0,
                                const EstimationOptions& opts = {});
AgreementEstimate estimate_rauocpc(const DistanceSet& dist, double delta_max,
                                   const EstimationOptions& opts = {});

ScoreSummary summarize_scores(const DistanceSet& dist, const ScoreFunction& score, double beta,
                              double h_theta);

/// SE(theta_hat) = sqrt(sum_i u_i^2) / (N M h): the empirical sandwich under
/// an independent working correlation. Throws ZeroDerivative when h <= 0 and
/// InvalidArgument when N < 2.
double sandwich_se(const ScoreSummary& scores, std::size_t n_subjects, std::size_t per_subject);

/// Throws Degenerate on a degenerate estimate.
Interval one_sided_interval(const AgreementEstimate& est, double confidence);

/// Rejecting H0 means the raters may be used interchangeably. Comparisons are
/// closed: a bound equal to the threshold rejects.
TestResult interchangeability_test(const AgreementEstimate& est, const AgreementQuestion& q);

/// Point estimate, SE, interval and (if thresholds allow) the test.
AgreementEstimate analyze(const DistanceSet& dist, const AgreementQuestion& q,
                          const EstimationOptions& opts = {});

}  // namespace magree

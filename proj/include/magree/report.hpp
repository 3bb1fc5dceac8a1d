#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "magree/dataset.hpp"
#include "magree/distance.hpp"
#include "magree/estimation.hpp"
#include "magree/grading.hpp"
#include "magree/raucpc.hpp"
#include "magree/simulation.hpp"

namespace magree {

enum class ScopeKind { Overall, Pair, Intra };

std::string_view to_string(ScopeKind s);

/// Which slices of a dataset to analyse.
struct ScopeSelection {
  bool overall = true;
  bool pairs = false;
  bool intra = false;

  /// "overall", "pairs", "intra" or "all"; comma-separated lists combine.
  static ScopeSelection parse(std::string_view text);
};

/// One slice: the distances of all raters, of one pair, or of one rater's
/// replicate pairs. Labels: "overall", "J&R", "J".
struct ScopedDistances {
  ScopeKind kind = ScopeKind::Overall;
  std::string label;
  DistanceSet distances;
};

/// Builds the requested slices. Raters with K < 2 are skipped for the intra
/// scope with a message appended to `warnings`.
std::vector<ScopedDistances> scoped_distances(const MeasurementDataset& ds,
                                              const ScopeSelection& scopes,
                                              std::vector<std::string>& warnings);

/// Single slice by name: "overall", "pair:<a>,<b>" or "intra:<r>".
ScopedDistances scoped_distance(const MeasurementDataset& ds, std::string_view scope);

struct RaterSummary {
  std::string rater;
  std::size_t replicates = 0;
  double mean = 0.0;
  /// Pooled within-subject SD of replicates (NaN when K = 1).
  double sd_intra = 0.0;
};

std::vector<RaterSummary> summarize_raters(const MeasurementDataset& ds);

struct ReportRow {
  ScopeKind scope = ScopeKind::Overall;
  std::string label;
  AgreementEstimate estimate;
};

struct AnalysisRequest {
  std::vector<Index> indices{Index::Ocp, Index::Otdi, Index::Rauocpc};
  ScopeSelection scopes;
  /// Thresholds shared by all indices; `index` is ignored.
  AgreementQuestion thresholds;
  EstimationOptions options;
};

struct AnalysisReport {
  std::size_t n_subjects = 0;
  std::vector<RaterSummary> raters;
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;

  /// True when any requested test ended inconclusive-degenerate.
  bool any_inconclusive() const;
};

AnalysisReport run_analysis(const MeasurementDataset& ds, const AnalysisRequest& request);

/// 6-decimal JSON with fixed key order.
std::string estimate_json(const AgreementEstimate& est);
std::string report_json(const AnalysisReport& report);
void write_report_csv(std::ostream& out, const AnalysisReport& report);

struct GradeRow {
  std::string label;
  std::vector<double> cp;  ///< empirical CP at the protocol grid
  std::string grade;
  double rauocpc = 0.0;     ///< at the protocol's delta_max
  double rauocpc_lower = 0.0;  ///< one-sided lower bound (NaN if degenerate)
  std::vector<std::pair<std::string, bool>> meets_tau;  ///< per grade: lower >= tau0
};

GradeRow grade_scope(const ScopedDistances& scope, const GradingProtocol& protocol,
                     double confidence = 0.95);
/// Classification of a stored curve (no RAUOCPC comparison).
GradeRow grade_curve(const CurvePoints& curve, const GradingProtocol& protocol);

std::string grades_json(const std::vector<GradeRow>& rows, const GradingProtocol& protocol);
void write_grades_csv(std::ostream& out, const std::vector<GradeRow>& rows,
                      const GradingProtocol& protocol);

/// "d,cp" CSV as written by write_csv(CurvePoints).
CurvePoints read_curve_csv(std::istream& in);

std::string monte_carlo_json(std::string_view label, const MonteCarloReport& report);

}  // namespace magree

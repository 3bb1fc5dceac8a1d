#include "magree/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "magree/errors.hpp"
#include "magree/stats.hpp"

namespace magree {

namespace {

using ojson = nlohmann::ordered_json;

// Six decimals; non-finite values become null.
ojson num(double x) {
  if (!std::isfinite(x)) return nullptr;
  const double r = std::round(x * 1e6) / 1e6;
  return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

std::string fixed6(double x) {
  if (!std::isfinite(x)) return "";
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << (std::abs(x) < 5e-7 ? 0.0 : x);
  return os.str();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Quotes a CSV field when needed.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

ojson estimate_to_json(const AgreementEstimate& est) {
  ojson j;
  j["index"] = std::string(to_string(est.index));
  j["parameter"] = num(est.parameter);
  j["beta_hat"] = num(est.beta_hat);
  j["theta_hat"] = num(est.theta_hat);
  j["se_theta"] = num(est.se_theta);
  if (est.ci) {
    j["ci"] = ojson::array({num(est.ci->lower), num(est.ci->upper)});
  } else {
    j["ci"] = nullptr;
  }
  if (est.test) {
    j["test"] = {{"h0", est.test->h0}, {"verdict", std::string(to_string(est.test->verdict))}};
  } else {
    j["test"] = nullptr;
  }
  j["n"] = est.n_subjects;
  j["m"] = est.m_per_subject;
  j["degenerate"] = est.degenerate();
  j["degeneracy"] = std::string(to_string(est.degeneracy));
  return j;
}

}  // namespace

std::string_view to_string(ScopeKind s) {
  switch (s) {
    case ScopeKind::Overall: return "overall";
    case ScopeKind::Pair: return "pair";
    case ScopeKind::Intra: return "intra";
  }
  return "?";
}

ScopeSelection ScopeSelection::parse(std::string_view text) {
  ScopeSelection s{false, false, false};
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item == "overall") {
      s.overall = true;
    } else if (item == "pairs" || item == "pair") {
      s.pairs = true;
    } else if (item == "intra") {
      s.intra = true;
    } else if (item == "all") {
      s = {true, true, true};
    } else {
      fail(ErrorCode::InvalidArgument, "unknown scope '" + item + "'");
    }
  }
  if (!s.overall && !s.pairs && !s.intra) fail(ErrorCode::InvalidArgument, "no scope selected");
  return s;
}

std::vector<ScopedDistances> scoped_distances(const MeasurementDataset& ds,
                                              const ScopeSelection& scopes,
                                              std::vector<std::string>& warnings) {
  std::vector<ScopedDistances> out;
  const auto& raters = ds.raters();
  if (scopes.overall) {
    out.push_back({ScopeKind::Overall, "overall", enumerate_distances(ds)});
  }
  if (scopes.pairs) {
    for (std::size_t a = 0; a < raters.size(); ++a) {
      for (std::size_t b = a + 1; b < raters.size(); ++b) {
        const std::vector<std::string> pair{raters[a], raters[b]};
        out.push_back({ScopeKind::Pair, raters[a] + "&" + raters[b],
                       enumerate_distances(subset_raters(ds, pair))});
      }
    }
  }
  if (scopes.intra) {
    for (std::size_t r = 0; r < raters.size(); ++r) {
      if (ds.replicate_counts()[r] < 2) {
        warnings.push_back("intra scope skipped for rater " + raters[r] + ": only one replicate");
        continue;
      }
      out.push_back({ScopeKind::Intra, raters[r], enumerate_distances(intra_rater_view(ds, raters[r]))});
    }
  }
  return out;
}

ScopedDistances scoped_distance(const MeasurementDataset& ds, std::string_view scope) {
  if (scope == "overall") {
    return {ScopeKind::Overall, "overall", enumerate_distances(ds)};
  }
  if (scope.substr(0, 5) == "pair:") {
    std::vector<std::string> names;
    std::stringstream ss{std::string(scope.substr(5))};
    std::string item;
    while (std::getline(ss, item, ',')) names.push_back(trim(item));
    if (names.size() != 2) fail(ErrorCode::InvalidArgument, "pair scope needs two raters");
    return {ScopeKind::Pair, names[0] + "&" + names[1], enumerate_distances(subset_raters(ds, names))};
  }
  if (scope.substr(0, 6) == "intra:") {
    const auto rater = trim(scope.substr(6));
    return {ScopeKind::Intra, rater, enumerate_distances(intra_rater_view(ds, rater))};
  }
  fail(ErrorCode::InvalidArgument, "unknown scope '" + std::string(scope) + "'");
}

std::vector<RaterSummary> summarize_raters(const MeasurementDataset& ds) {
  std::vector<RaterSummary> out;
  for (std::size_t r = 0; r < ds.num_raters(); ++r) {
    RaterSummary s;
    s.rater = ds.raters()[r];
    s.replicates = ds.replicate_counts()[r];
    double total = 0.0;
    double within = 0.0;
    for (std::size_t i = 0; i < ds.num_subjects(); ++i) {
      const auto v = ds.values(i, r);
      for (double x : v) total += x;
      within += stats::sample_variance(v);
    }
    const double n = static_cast<double>(ds.num_subjects());
    s.mean = total / (n * static_cast<double>(s.replicates));
    s.sd_intra = s.replicates >= 2 ? std::sqrt(within / n) : std::nan("");
    out.push_back(s);
  }
  return out;
}

bool AnalysisReport::any_inconclusive() const {
  return std::any_of(rows.begin(), rows.end(), [](const ReportRow& r) {
    return r.estimate.test && r.estimate.test->verdict == Verdict::InconclusiveDegenerate;
  });
}

AnalysisReport run_analysis(const MeasurementDataset& ds, const AnalysisRequest& request) {
  if (request.indices.empty()) fail(ErrorCode::InvalidArgument, "no index requested");
  AnalysisReport report;
  report.n_subjects = ds.num_subjects();
  report.raters = summarize_raters(ds);
  const auto scopes = scoped_distances(ds, request.scopes, report.warnings);
  for (const auto index : request.indices) {
    AgreementQuestion q = request.thresholds;
    q.index = index;
    for (const auto& scope : scopes) {
      report.rows.push_back({scope.kind, scope.label, analyze(scope.distances, q, request.options)});
    }
  }
  return report;
}

std::string estimate_json(const AgreementEstimate& est) { return estimate_to_json(est).dump(); }

std::string report_json(const AnalysisReport& report) {
  ojson j;
  j["n_subjects"] = report.n_subjects;
  ojson raters = ojson::array();
  for (const auto& r : report.raters) {
    raters.push_back({{"rater", r.rater},
                      {"replicates", r.replicates},
                      {"mean", num(r.mean)},
                      {"sd_intra", num(r.sd_intra)}});
  }
  j["raters"] = raters;
  ojson rows = ojson::array();
  for (const auto& row : report.rows) {
    ojson r;
    r["scope"] = std::string(to_string(row.scope));
    r["label"] = row.label;
    const ojson est = estimate_to_json(row.estimate);
    for (const auto& [k, v] : est.items()) r[k] = v;
    rows.push_back(std::move(r));
  }
  j["rows"] = rows;
  j["warnings"] = report.warnings;
  return j.dump(2) + "\n";
}

void write_report_csv(std::ostream& out, const AnalysisReport& report) {
  out << "scope,label,index,parameter,beta_hat,theta_hat,se_theta,ci_lower,ci_upper,h0,verdict,n,m,"
         "degenerate\n";
  for (const auto& row : report.rows) {
    const auto& e = row.estimate;
    out << to_string(row.scope) << ',' << csv_field(row.label) << ',' << to_string(e.index) << ','
        << fixed6(e.parameter) << ',' << fixed6(e.beta_hat) << ',' << fixed6(e.theta_hat) << ','
        << fixed6(e.se_theta) << ',' << (e.ci ? fixed6(e.ci->lower) : "") << ','
        << (e.ci ? fixed6(e.ci->upper) : "") << ',' << (e.test ? csv_field(e.test->h0) : "") << ','
        << (e.test ? std::string(to_string(e.test->verdict)) : "") << ',' << e.n_subjects << ','
        << e.m_per_subject << ',' << (e.degenerate() ? "true" : "false") << '\n';
  }
}

GradeRow grade_curve(const CurvePoints& curve, const GradingProtocol& protocol) {
  GradeRow row;
  row.label = "curve";
  for (double d : protocol.grid) row.cp.push_back(interpolate_cp(curve, d));
  row.grade = classify(curve, protocol);
  row.rauocpc = std::nan("");
  row.rauocpc_lower = std::nan("");
  return row;
}

GradeRow grade_scope(const ScopedDistances& scope, const GradingProtocol& protocol,
                     double confidence) {
  std::vector<double> grid{0.0};
  grid.insert(grid.end(), protocol.grid.begin(), protocol.grid.end());
  const auto curve = empirical_cp_curve(scope.distances.pooled(), grid);

  GradeRow row = grade_curve(curve, protocol);
  row.label = scope.label;
  const auto est = estimate_rauocpc(scope.distances, protocol.delta_max);
  row.rauocpc = est.beta_hat;
  if (!est.degenerate()) {
    row.rauocpc_lower = one_sided_interval(est, confidence).lower;
  }
  for (const auto& g : protocol.grades) {
    const double tau = satisfactory_tau(protocol, g);
    row.meets_tau.emplace_back(g.name, std::isfinite(row.rauocpc_lower) && row.rauocpc_lower >= tau);
  }
  return row;
}

std::string grades_json(const std::vector<GradeRow>& rows, const GradingProtocol& protocol) {
  ojson j;
  j["protocol"] = protocol.name;
  j["delta_max"] = num(protocol.delta_max);
  j["grid"] = protocol.grid;
  ojson taus;
  for (const auto& g : protocol.grades) taus[g.name] = num(satisfactory_tau(protocol, g));
  j["tau0"] = taus;
  ojson out = ojson::array();
  for (const auto& r : rows) {
    ojson item;
    item["label"] = r.label;
    ojson cps = ojson::array();
    for (double c : r.cp) cps.push_back(num(c));
    item["cp"] = cps;
    item["grade"] = r.grade;
    item["rauocpc"] = num(r.rauocpc);
    item["rauocpc_lower"] = num(r.rauocpc_lower);
    ojson meets;
    for (const auto& [name, ok] : r.meets_tau) meets[name] = ok;
    item["meets_tau0"] = r.meets_tau.empty() ? ojson(nullptr) : meets;
    out.push_back(std::move(item));
  }
  j["rows"] = out;
  return j.dump(2) + "\n";
}

void write_grades_csv(std::ostream& out, const std::vector<GradeRow>& rows,
                      const GradingProtocol& protocol) {
  out << "label";
  for (double d : protocol.grid) out << ",cp_" << d;
  out << ",grade,rauocpc,rauocpc_lower";
  for (const auto& g : protocol.grades) out << ",meets_tau0_" << g.name;
  out << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.label);
    for (double c : r.cp) out << ',' << fixed6(c);
    out << ',' << r.grade << ',' << fixed6(r.rauocpc) << ',' << fixed6(r.rauocpc_lower);
    for (std::size_t g = 0; g < protocol.grades.size(); ++g) {
      out << ',';
      if (g < r.meets_tau.size()) out << (r.meets_tau[g].second ? "true" : "false");
    }
    out << '\n';
  }
}

CurvePoints read_curve_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "d,cp") {
    fail(ErrorCode::MalformedInput, "curve CSV must start with header 'd,cp'");
  }
  CurvePoints curve;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    auto parse = [&](std::string_view s) {
      double v = 0.0;
      const auto t = trim(s);
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        fail(ErrorCode::NonNumericValue, "curve CSV line " + std::to_string(line_no) + ": bad number");
      }
      return v;
    };
    if (comma == std::string::npos) {
      fail(ErrorCode::MalformedInput, "curve CSV line " + std::to_string(line_no) + ": need 2 fields");
    }
    curve.push_back({parse(std::string_view(line).substr(0, comma)),
                     parse(std::string_view(line).substr(comma + 1))});
  }
  validate_curve(curve);
  return curve;
}

std::string monte_carlo_json(std::string_view label, const MonteCarloReport& r) {
  ojson j;
  j["scenario"] = std::string(label);
  j["true"] = num(r.true_value);
  j["bias"] = num(r.mean_bias);
  j["sd_t"] = num(r.sd_theta);
  j["se_ind"] = num(r.mean_se_ind);
  j["se_t"] = num(r.mean_se_true);
  j["mse"] = num(r.mse);
  j["cr"] = num(r.coverage_rate);
  j["nmiss"] = r.n_degenerate;
  j["replications"] = r.n_replications;
  return j.dump(2) + "\n";
}

}  // namespace magree

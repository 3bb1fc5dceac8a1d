#include "magree/grading.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "magree/errors.hpp"

namespace magree {

namespace {

// Comparisons against protocol thresholds tolerate this much round-off in an
// estimated CP.
constexpr double kGradeTolerance = 1e-12;

}  // namespace

void GradingProtocol::validate() const {
  if (!(delta_max > 0.0)) fail(ErrorCode::NonPositiveDeltaMax, "protocol delta_max must be positive");
  if (grid.empty()) fail(ErrorCode::InvalidArgument, "protocol grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      fail(ErrorCode::InvalidArgument, "protocol grid must be positive and strictly ascending");
    }
  }
  if (grid.back() > delta_max) fail(ErrorCode::InvalidArgument, "protocol grid exceeds delta_max");
  if (grades.empty()) fail(ErrorCode::InvalidArgument, "protocol has no grades");
  for (std::size_t g = 0; g < grades.size(); ++g) {
    const auto& cp = grades[g].cp_percent;
    if (cp.size() != grid.size()) {
      fail(ErrorCode::InvalidArgument, "grade " + grades[g].name + " does not match the grid");
    }
    for (std::size_t i = 0; i < cp.size(); ++i) {
      if (cp[i] < 0 || cp[i] > 100 || (i > 0 && cp[i] < cp[i - 1])) {
        fail(ErrorCode::InvalidArgument, "grade " + grades[g].name + " percents must be nondecreasing in [0, 100]");
      }
      if (g > 0 && cp[i] > grades[g - 1].cp_percent[i]) {
        fail(ErrorCode::InvalidArgument, "grades must be ordered best first");
      }
    }
  }
}

const GradeCriteria& GradingProtocol::grade(std::string_view wanted) const {
  for (const auto& g : grades) {
    if (g.name == wanted) return g;
  }
  fail(ErrorCode::InvalidArgument, "unknown grade '" + std::string(wanted) + "'");
}

const GradingProtocol& bhsp() {
  static const GradingProtocol protocol = [] {
    GradingProtocol p;
    p.name = "BHSP";
    p.delta_max = 20.0;
    p.grid = {5.0, 10.0, 15.0, 20.0};
    p.grades = {
        {"A", {60, 85, 95, 100}},
        {"B", {50, 75, 90, 95}},
        {"C", {40, 65, 85, 90}},
    };
    p.validate();
    return p;
  }();
  return protocol;
}

GradingProtocol parse_protocol(const std::string& json_text) {
  GradingProtocol p;
  try {
    const auto j = nlohmann::json::parse(json_text);
    p.name = j.value("name", std::string("custom"));
    p.delta_max = j.at("delta_max").get<double>();
    p.grid = j.at("grid").get<std::vector<double>>();
    for (const auto& g : j.at("grades")) {
      p.grades.push_back({g.at("name").get<std::string>(), g.at("cp_percent").get<std::vector<int>>()});
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::MalformedInput, std::string("grading protocol: ") + e.what());
  }
  p.validate();
  return p;
}

GradingProtocol load_protocol(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open protocol file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_protocol(ss.str());
}

double satisfactory_area(const GradingProtocol& protocol, const GradeCriteria& grade) {
  // Trapezoid sums of percent * width; exact for the usual integer grids.
  double area_pct = 0.0;
  double prev_d = 0.0;
  int prev_cp = 0;
  for (std::size_t i = 0; i < protocol.grid.size(); ++i) {
    area_pct += 0.5 * (prev_cp + grade.cp_percent[i]) * (protocol.grid[i] - prev_d);
    prev_d = protocol.grid[i];
    prev_cp = grade.cp_percent[i];
  }
  area_pct += prev_cp * (protocol.delta_max - prev_d);
  return area_pct / 100.0;
}

double satisfactory_tau(const GradingProtocol& protocol, const GradeCriteria& grade) {
  return satisfactory_area(protocol, grade) / protocol.delta_max;
}

CurvePoints satisfactory_curve(const GradingProtocol& protocol, const GradeCriteria& grade) {
  CurvePoints out{{0.0, 0.0}};
  for (std::size_t i = 0; i < protocol.grid.size(); ++i) {
    out.push_back({protocol.grid[i], grade.cp_percent[i] / 100.0});
  }
  if (protocol.grid.back() < protocol.delta_max) {
    out.push_back({protocol.delta_max, out.back().cp});
  }
  return out;
}

double interpolate_cp(const CurvePoints& curve, double d) {
  if (curve.empty() || d < curve.front().d || d > curve.back().d) {
    fail(ErrorCode::CurveDomainTooShort,
         "curve does not cover d = " + std::to_string(d));
  }
  const auto it = std::lower_bound(curve.begin(), curve.end(), d,
                                   [](const CurvePoint& p, double x) { return p.d < x; });
  if (it->d == d) return it->cp;
  const auto prev = it - 1;
  return prev->cp + (it->cp - prev->cp) * (d - prev->d) / (it->d - prev->d);
}

std::string classify(const CurvePoints& curve, const GradingProtocol& protocol) {
  validate_curve(curve);
  std::vector<double> cp(protocol.grid.size());
  for (std::size_t i = 0; i < cp.size(); ++i) {
    cp[i] = interpolate_cp(curve, protocol.grid[i]);
  }
  for (const auto& g : protocol.grades) {
    bool ok = true;
    for (std::size_t i = 0; i < cp.size() && ok; ++i) {
      ok = cp[i] + kGradeTolerance >= g.cp_percent[i] / 100.0;
    }
    if (ok) return g.name;
  }
  return kFailGrade;
}

}  // namespace magree

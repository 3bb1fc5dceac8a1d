#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "magree/raucpc.hpp"

namespace magree {

/// One grade: required CP (integer percent) at each protocol difference.
struct GradeCriteria {
  std::string name;
  std::vector<int> cp_percent;
};

/// Grid of differences plus grades ordered best first.
struct GradingProtocol {
  std::string name;
  double delta_max = 20.0;
  std::vector<double> grid;
  std::vector<GradeCriteria> grades;

  /// Grid ascending and positive, last point <= delta_max, percents in
  /// [0, 100] and nondecreasing, each grade dominating the next.
  void validate() const;
  const GradeCriteria& grade(std::string_view name) const;
};

/// British Hypertension Society protocol, 5/10/15/20 mmHg, grades A-C.
const GradingProtocol& bhsp();

/// JSON {"name", "delta_max", "grid": [...], "grades": [{"name", "cp_percent": [...]}]}.
GradingProtocol load_protocol(const std::filesystem::path& path);
GradingProtocol parse_protocol(const std::string& json_text);

/// Area under the polyline through (0, 0) and the grade's (d, CP) points,
/// held flat to delta_max, divided by delta_max. Computed in integer
/// percent-units so the result is exact up to the final division.
double satisfactory_tau(const GradingProtocol& protocol, const GradeCriteria& grade);

/// Unscaled area (measurement units).
double satisfactory_area(const GradingProtocol& protocol, const GradeCriteria& grade);

/// Satisfactory curve of a grade as curve points.
CurvePoints satisfactory_curve(const GradingProtocol& protocol, const GradeCriteria& grade);

/// CP at d by linear interpolation between adjacent curve points. Throws
/// CurveDomainTooShort when d lies outside the curve's range.
double interpolate_cp(const CurvePoints& curve, double d);

inline constexpr const char* kFailGrade = "Fail";

/// Best grade whose every threshold is met (closed comparison), else "Fail".
std::string classify(const CurvePoints& curve, const GradingProtocol& protocol = bhsp());

}  // namespace magree

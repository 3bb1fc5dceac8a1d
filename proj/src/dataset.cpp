#include "magree/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <optional>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "magree/errors.hpp"

namespace magree {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::MissingCell: return "MissingCell";
    case ErrorCode::RaggedReplicates: return "RaggedReplicates";
    case ErrorCode::NonNumericValue: return "NonNumericValue";
    case ErrorCode::DuplicateKey: return "DuplicateKey";
    case ErrorCode::UnknownRater: return "UnknownRater";
    case ErrorCode::TooFewRaters: return "TooFewRaters";
    case ErrorCode::InsufficientReplicates: return "InsufficientReplicates";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::NonPositiveDeltaMax: return "NonPositiveDeltaMax";
    case ErrorCode::ZeroDerivative: return "ZeroDerivative";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::DegenerateScores: return "DegenerateScores";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::InfeasibleTarget: return "InfeasibleTarget";
    case ErrorCode::CurveDomainTooShort: return "CurveDomainTooShort";
    case ErrorCode::Degenerate: return "Degenerate";
  }
  return "Unknown";
}

MeasurementDataset::MeasurementDataset(std::vector<std::string> raters,
                                       std::vector<SubjectRecord> subjects,
                                       std::string value_unit, Layout layout)
    : raters_(std::move(raters)),
      subjects_(std::move(subjects)),
      value_unit_(std::move(value_unit)),
      layout_(layout) {
  if (raters_.size() < 2) {
    fail(ErrorCode::TooFewRaters, "dataset needs at least 2 raters");
  }
  if (subjects_.empty()) {
    fail(ErrorCode::InvalidArgument, "dataset needs at least 1 subject");
  }
  replicates_.assign(raters_.size(), 0);
  for (const auto& s : subjects_) {
    if (s.values.size() != raters_.size()) {
      fail(ErrorCode::MissingCell, "subject '" + s.subject_id + "' does not cover every rater");
    }
    for (std::size_t j = 0; j < raters_.size(); ++j) {
      const auto& reps = s.values[j];
      if (reps.empty()) {
        fail(ErrorCode::MissingCell,
             "subject '" + s.subject_id + "' has no values for rater '" + raters_[j] + "'");
      }
      if (replicates_[j] == 0) {
        replicates_[j] = reps.size();
      } else if (replicates_[j] != reps.size()) {
        fail(ErrorCode::RaggedReplicates,
             "rater '" + raters_[j] + "' has " + std::to_string(reps.size()) +
                 " replicates for subject '" + s.subject_id + "' but " +
                 std::to_string(replicates_[j]) + " elsewhere");
      }
      for (double v : reps) {
        if (!std::isfinite(v)) {
          fail(ErrorCode::NonNumericValue, "non-finite value for subject '" + s.subject_id + "'");
        }
      }
    }
  }
  if (layout_ == Layout::ReplicatePairs && replicates_[0] < 2) {
    fail(ErrorCode::InsufficientReplicates, "replicate-pair layout needs K >= 2");
  }
}

std::size_t MeasurementDataset::rater_index(std::string_view rater) const {
  const auto it = std::find(raters_.begin(), raters_.end(), rater);
  if (it == raters_.end()) {
    fail(ErrorCode::UnknownRater, "unknown rater '" + std::string(rater) + "'");
  }
  return static_cast<std::size_t>(it - raters_.begin());
}

bool operator==(const MeasurementDataset& a, const MeasurementDataset& b) {
  if (a.raters_ != b.raters_ || a.layout_ != b.layout_ ||
      a.subjects_.size() != b.subjects_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.subjects_.size(); ++i) {
    if (a.subjects_[i].subject_id != b.subjects_[i].subject_id ||
        a.subjects_[i].values != b.subjects_[i].values) {
      return false;
    }
  }
  return true;
}

namespace {

// Splits one CSV record. Handles double-quoted fields with "" escapes; embedded
// newlines inside quotes are not supported.
std::optional<std::vector<std::string>> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) {
    return std::nullopt;
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) {
    return std::nullopt;
  }
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (*first == '+') {
    ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += "\"\"";
    } else {
      out.push_back(c);
    }
  }
  out += '"';
  return out;
}

}  // namespace

MeasurementDataset parse_csv(std::istream& in, const CsvSchema& schema, const std::string& source) {
  auto where = [&](std::size_t line) { return source + ":" + std::to_string(line) + ": "; };

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
      line.erase(0, 3);
    }
    if (trim(line).empty()) {
      continue;
    }
    auto fields = split_csv_line(line);
    if (!fields) {
      fail(ErrorCode::MalformedInput, where(line_no) + "unterminated quote in header");
    }
    for (auto& f : *fields) {
      header.push_back(trim(f));
    }
    break;
  }
  if (header.empty()) {
    fail(ErrorCode::MalformedInput, source + ": missing header");
  }

  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      fail(ErrorCode::MalformedInput, source + ": header lacks column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_subject = column(schema.subject);
  const std::size_t c_rater = column(schema.rater);
  const std::size_t c_rep = column(schema.replicate);
  const std::size_t c_value = column(schema.value);

  struct Cell {
    std::vector<double> values;
    std::set<std::string> labels;
  };
  std::vector<std::string> subject_order;
  std::vector<std::string> rater_order;
  std::unordered_map<std::string, std::size_t> subject_pos;
  std::unordered_map<std::string, std::size_t> rater_pos;
  // cells[subject][rater]
  std::vector<std::vector<Cell>> cells;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) {
      continue;
    }
    auto fields = split_csv_line(line);
    if (!fields) {
      fail(ErrorCode::MalformedInput, where(line_no) + "unterminated quote");
    }
    if (fields->size() != header.size()) {
      fail(ErrorCode::MalformedInput, where(line_no) + "expected " +
                                          std::to_string(header.size()) + " fields, got " +
                                          std::to_string(fields->size()));
    }
    const std::string subject = trim((*fields)[c_subject]);
    const std::string rater = trim((*fields)[c_rater]);
    const std::string rep = trim((*fields)[c_rep]);
    const std::string raw_value = trim((*fields)[c_value]);
    if (subject.empty() || rater.empty() || rep.empty()) {
      fail(ErrorCode::MalformedInput, where(line_no) + "empty key field");
    }
    const auto value = parse_double(raw_value);
    if (!value) {
      fail(ErrorCode::NonNumericValue, where(line_no) + "value '" + raw_value + "' is not a finite number");
    }

    auto [rit, rnew] = rater_pos.try_emplace(rater, rater_order.size());
    if (rnew) {
      rater_order.push_back(rater);
      for (auto& row : cells) {
        row.emplace_back();
      }
    }
    auto [sit, snew] = subject_pos.try_emplace(subject, subject_order.size());
    if (snew) {
      subject_order.push_back(subject);
      cells.emplace_back(rater_order.size());
    }
    auto& cell = cells[sit->second][rit->second];
    cell.values.push_back(*value);
    if (!cell.labels.insert(rep).second) {
      fail(ErrorCode::DuplicateKey, where(line_no) + "duplicate (subject, rater, replicate) = (" +
                                        subject + ", " + rater + ", " + rep + ")");
    }
  }

  if (subject_order.empty()) {
    fail(ErrorCode::MalformedInput, source + ": no data rows");
  }
  if (rater_order.size() < 2) {
    fail(ErrorCode::TooFewRaters, source + ": need at least 2 raters");
  }

  std::vector<SubjectRecord> subjects;
  subjects.reserve(subject_order.size());
  std::vector<std::size_t> k_first(rater_order.size(), 0);
  for (std::size_t i = 0; i < subject_order.size(); ++i) {
    SubjectRecord rec;
    rec.subject_id = subject_order[i];
    rec.values.resize(rater_order.size());
    for (std::size_t j = 0; j < rater_order.size(); ++j) {
      const auto& cell = cells[i][j];
      if (cell.values.empty()) {
        fail(ErrorCode::MissingCell, source + ": subject '" + subject_order[i] +
                                         "' has no values for rater '" + rater_order[j] + "'");
      }
      if (k_first[j] == 0) {
        k_first[j] = cell.values.size();
      } else if (k_first[j] != cell.values.size()) {
        fail(ErrorCode::RaggedReplicates,
             source + ": subject '" + subject_order[i] + "' has " +
                 std::to_string(cell.values.size()) + " replicates for rater '" +
                 rater_order[j] + "', expected " + std::to_string(k_first[j]));
      }
      rec.values[j] = cell.values;
    }
    subjects.push_back(std::move(rec));
  }
  return MeasurementDataset(std::move(rater_order), std::move(subjects));
}

MeasurementDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  }
  return parse_csv(in, schema, path.string());
}

void write_csv(std::ostream& out, const MeasurementDataset& ds) {
  out << "subject,rater,replicate,value\n";
  out << std::setprecision(17);
  for (const auto& s : ds.subjects()) {
    for (std::size_t j = 0; j < ds.num_raters(); ++j) {
      for (std::size_t k = 0; k < s.values[j].size(); ++k) {
        out << csv_field(s.subject_id) << ',' << csv_field(ds.raters()[j]) << ',' << (k + 1) << ','
            << s.values[j][k] << '\n';
      }
    }
  }
}

std::string dump_json(const MeasurementDataset& ds) {
  auto rows = nlohmann::json::array();
  for (const auto& s : ds.subjects()) {
    for (std::size_t j = 0; j < ds.num_raters(); ++j) {
      for (std::size_t k = 0; k < s.values[j].size(); ++k) {
        rows.push_back({{"subject", s.subject_id},
                        {"rater", ds.raters()[j]},
                        {"replicate", k + 1},
                        {"value", s.values[j][k]}});
      }
    }
  }
  return rows.dump();
}

MeasurementDataset subset_raters(const MeasurementDataset& ds, std::span<const std::string> raters) {
  if (ds.layout() != Layout::CrossProduct) {
    fail(ErrorCode::InvalidArgument, "subset_raters: not defined for an intra-rater view");
  }
  if (raters.size() < 2) {
    fail(ErrorCode::TooFewRaters, "subset_raters: need at least 2 raters");
  }
  std::vector<std::size_t> idx;
  for (const auto& r : raters) {
    const auto j = ds.rater_index(r);
    if (std::find(idx.begin(), idx.end(), j) != idx.end()) {
      fail(ErrorCode::InvalidArgument, "subset_raters: rater '" + r + "' listed twice");
    }
    idx.push_back(j);
  }
  // Keep the dataset's rater order regardless of request order.
  std::sort(idx.begin(), idx.end());

  std::vector<std::string> names;
  for (auto j : idx) {
    names.push_back(ds.raters()[j]);
  }
  std::vector<SubjectRecord> subjects;
  subjects.reserve(ds.num_subjects());
  for (const auto& s : ds.subjects()) {
    SubjectRecord rec{s.subject_id, {}};
    for (auto j : idx) {
      rec.values.push_back(s.values[j]);
    }
    subjects.push_back(std::move(rec));
  }
  return MeasurementDataset(std::move(names), std::move(subjects), ds.value_unit());
}

MeasurementDataset intra_rater_view(const MeasurementDataset& ds, std::string_view rater) {
  if (ds.layout() != Layout::CrossProduct) {
    fail(ErrorCode::InvalidArgument, "intra_rater_view: dataset is already an intra-rater view");
  }
  const auto j = ds.rater_index(rater);
  if (ds.replicate_counts()[j] < 2) {
    fail(ErrorCode::InsufficientReplicates,
         "rater '" + std::string(rater) + "' has fewer than 2 replicates");
  }
  std::vector<SubjectRecord> subjects;
  subjects.reserve(ds.num_subjects());
  for (const auto& s : ds.subjects()) {
    subjects.push_back({s.subject_id, {s.values[j], s.values[j]}});
  }
  const std::string name(rater);
  return MeasurementDataset({name + "[a]", name + "[b]"}, std::move(subjects), ds.value_unit(),
                            Layout::ReplicatePairs);
}

}  // namespace magree

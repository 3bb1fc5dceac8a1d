#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace magree {

/// One subject's replicated measurements. `values[j]` holds the replicates of
/// rater j, in input order; replicate order carries no meaning.
struct SubjectRecord {
  std::string subject_id;
  std::vector<std::vector<double>> values;
};

/// How distance collections are formed from a dataset.
enum class Layout {
  /// One replicate per rater, all Π_j K_j cross-product collections.
  CrossProduct,
  /// Intra-rater view: two synthetic raters backed by one real rater; the
  /// collections are the K(K-1)/2 unordered replicate pairs.
  ReplicatePairs,
};

/// Replicated multi-rater measurements Y_ijk (subject i, rater j, replicate k).
///
/// Immutable after construction. The constructor validates the invariants:
/// at least two raters and one subject, every subject has K_j >= 1 finite
/// values for every rater, and K_j is the same for all subjects.
class MeasurementDataset {
 public:
  MeasurementDataset(std::vector<std::string> raters, std::vector<SubjectRecord> subjects,
                     std::string value_unit = {}, Layout layout = Layout::CrossProduct);

  std::size_t num_subjects() const noexcept { return subjects_.size(); }
  std::size_t num_raters() const noexcept { return raters_.size(); }

  const std::vector<std::string>& raters() const noexcept { return raters_; }
  const std::vector<SubjectRecord>& subjects() const noexcept { return subjects_; }
  const std::string& value_unit() const noexcept { return value_unit_; }
  Layout layout() const noexcept { return layout_; }

  /// K_j for each rater.
  const std::vector<std::size_t>& replicate_counts() const noexcept { return replicates_; }

  std::span<const double> values(std::size_t subject, std::size_t rater) const {
    return subjects_[subject].values[rater];
  }

  /// Index of `rater` in rater order; throws UnknownRater.
  std::size_t rater_index(std::string_view rater) const;

  friend bool operator==(const MeasurementDataset&, const MeasurementDataset&);

 private:
  std::vector<std::string> raters_;
  std::vector<SubjectRecord> subjects_;
  std::string value_unit_;
  Layout layout_;
  std::vector<std::size_t> replicates_;
};

/// Column names of the long CSV format.
struct CsvSchema {
  std::string subject = "subject";
  std::string rater = "rater";
  std::string replicate = "replicate";
  std::string value = "value";
};

/// Reads long-format CSV (header required). Raters and subjects are ordered by
/// first appearance; replicate labels are normalized to 1..K_j in input order.
MeasurementDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
MeasurementDataset parse_csv(std::istream& in, const CsvSchema& schema = {},
                             const std::string& source = "<input>");

void write_csv(std::ostream& out, const MeasurementDataset& ds);

/// Debug dump: array of {subject, rater, replicate, value}.
std::string dump_json(const MeasurementDataset& ds);

MeasurementDataset subset_raters(const MeasurementDataset& ds, std::span<const std::string> raters);

/// Intra-rater dataset for `rater` (requires K >= 2); see Layout::ReplicatePairs.
MeasurementDataset intra_rater_view(const MeasurementDataset& ds, std::string_view rater);

}  // namespace magree

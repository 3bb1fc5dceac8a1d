#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "magree/dataset.hpp"

namespace magree {

enum class Metric {
  Mpd,    ///< maximum pairwise difference, max - min
  Rmspd,  ///< root mean square of pairwise differences (comparison only)
};

/// Hard limit on collections per subject.
inline constexpr std::size_t kMaxCollections = 1'000'000;

/// Maximum pairwise difference over J >= 2 values.
double mpd(std::span<const double> values);

/// Root mean square of the J(J-1)/2 pairwise differences.
double rmspd(std::span<const double> values);

/// max(0, delta_max - d). Throws NonPositiveDeltaMax unless delta_max > 0.
double clamp_transform(double d, double delta_max);

/// Replicate-label tuples (0-based) of the Π K_j cross-product collections in
/// lexicographic order, rater 1 slowest-varying. Throws CapExceeded beyond
/// kMaxCollections.
std::vector<std::vector<std::size_t>> collection_tuples(std::span<const std::size_t> replicates);

/// Per-subject distance vectors D_i, each of length M, stored row-major.
class DistanceSet {
 public:
  DistanceSet() = default;

  /// `flat` holds N*M values, subject-major. `replicates` records the design
  /// (K_j per rater) when the set came from a cross-product enumeration; leave
  /// it empty for hand-built sets.
  DistanceSet(std::vector<double> flat, std::size_t per_subject,
              std::vector<std::size_t> replicates = {}, Layout layout = Layout::CrossProduct);

  /// One distance vector per subject; all rows must share a length.
  static DistanceSet from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t num_subjects() const noexcept { return m_ == 0 ? 0 : flat_.size() / m_; }
  std::size_t per_subject() const noexcept { return m_; }
  std::span<const double> subject(std::size_t i) const { return {flat_.data() + i * m_, m_}; }
  std::span<const double> pooled() const noexcept { return flat_; }

  const std::vector<std::size_t>& replicates() const noexcept { return replicates_; }
  Layout layout() const noexcept { return layout_; }

  /// Replicate tuple used by collection m (empty for hand-built sets).
  std::vector<std::vector<std::size_t>> collections() const;

 private:
  std::vector<double> flat_;
  std::size_t m_ = 0;
  std::vector<std::size_t> replicates_;
  Layout layout_ = Layout::CrossProduct;
};

/// Enumerates D_im for every subject. For Layout::ReplicatePairs datasets the
/// collections are the unordered replicate pairs (k < k') of the single rater.
DistanceSet enumerate_distances(const MeasurementDataset& ds, Metric metric = Metric::Mpd);

/// Debug dump: subject,m,distance (m is 1-based).
void write_csv(std::ostream& out, const DistanceSet& dist);

}  // namespace magree

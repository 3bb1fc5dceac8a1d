#include "magree/distance.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "magree/errors.hpp"

namespace magree {

double mpd(std::span<const double> values) {
  if (values.size() < 2) {
    fail(ErrorCode::InvalidArgument, "mpd: need at least 2 values");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

double rmspd(std::span<const double> values) {
  const auto j = values.size();
  if (j < 2) {
    fail(ErrorCode::InvalidArgument, "rmspd: need at least 2 values");
  }
  double ss = 0.0;
  for (std::size_t a = 0; a < j; ++a) {
    for (std::size_t b = a + 1; b < j; ++b) {
      const double d = values[a] - values[b];
      ss += d * d;
    }
  }
  const double pairs = static_cast<double>(j * (j - 1) / 2);
  return std::sqrt(ss / pairs);
}

double clamp_transform(double d, double delta_max) {
  if (!(delta_max > 0.0)) {
    fail(ErrorCode::NonPositiveDeltaMax, "delta_max must be positive");
  }
  return std::max(0.0, delta_max - d);
}

namespace {

std::size_t collection_count(std::span<const std::size_t> replicates) {
  std::size_t m = 1;
  for (auto k : replicates) {
    if (k == 0) {
      fail(ErrorCode::InvalidArgument, "replicate count must be >= 1");
    }
    if (m > kMaxCollections / k) {
      fail(ErrorCode::CapExceeded, "more than 10^6 collections per subject");
    }
    m *= k;
  }
  return m;
}

// Advances an odometer over the replicate cross product, last rater fastest.
bool next_tuple(std::vector<std::size_t>& tuple, std::span<const std::size_t> replicates) {
  for (std::size_t j = tuple.size(); j-- > 0;) {
    if (++tuple[j] < replicates[j]) {
      return true;
    }
    tuple[j] = 0;
  }
  return false;
}

}  // namespace

std::vector<std::vector<std::size_t>> collection_tuples(std::span<const std::size_t> replicates) {
  const auto m = collection_count(replicates);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(m);
  std::vector<std::size_t> tuple(replicates.size(), 0);
  do {
    out.push_back(tuple);
  } while (next_tuple(tuple, replicates));
  return out;
}

DistanceSet::DistanceSet(std::vector<double> flat, std::size_t per_subject,
                         std::vector<std::size_t> replicates, Layout layout)
    : flat_(std::move(flat)), m_(per_subject), replicates_(std::move(replicates)), layout_(layout) {
  if (m_ == 0 || flat_.empty() || flat_.size() % m_ != 0) {
    fail(ErrorCode::InvalidArgument, "DistanceSet: size is not a positive multiple of M");
  }
  for (double d : flat_) {
    if (!(d >= 0.0) || !std::isfinite(d)) {
      fail(ErrorCode::InvalidArgument, "DistanceSet: distances must be finite and nonnegative");
    }
  }
}

DistanceSet DistanceSet::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    fail(ErrorCode::InvalidArgument, "DistanceSet: no rows");
  }
  const auto m = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * m);
  for (const auto& r : rows) {
    if (r.size() != m) {
      fail(ErrorCode::InvalidArgument, "DistanceSet: rows differ in length");
    }
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return DistanceSet(std::move(flat), m);
}

std::vector<std::vector<std::size_t>> DistanceSet::collections() const {
  if (replicates_.empty()) {
    return {};
  }
  if (layout_ == Layout::ReplicatePairs) {
    std::vector<std::vector<std::size_t>> out;
    const auto k = replicates_.front();
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        out.push_back({a, b});
      }
    }
    return out;
  }
  return collection_tuples(replicates_);
}

DistanceSet enumerate_distances(const MeasurementDataset& ds, Metric metric) {
  const auto& reps = ds.replicate_counts();
  const auto n = ds.num_subjects();
  const auto j_count = ds.num_raters();
  auto distance = [metric](std::span<const double> v) {
    return metric == Metric::Mpd ? mpd(v) : rmspd(v);
  };

  if (ds.layout() == Layout::ReplicatePairs) {
    const auto k = reps.front();
    const auto m = k * (k - 1) / 2;
    std::vector<double> flat;
    flat.reserve(n * m);
    for (std::size_t i = 0; i < n; ++i) {
      const auto y = ds.values(i, 0);
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
          flat.push_back(std::abs(y[a] - y[b]));
        }
      }
    }
    return DistanceSet(std::move(flat), m, reps, Layout::ReplicatePairs);
  }

  const auto m = collection_count(reps);
  std::vector<double> flat;
  flat.reserve(n * m);
  std::vector<std::size_t> tuple(j_count);
  std::vector<double> picked(j_count);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(tuple.begin(), tuple.end(), 0);
    do {
      for (std::size_t j = 0; j < j_count; ++j) {
        picked[j] = ds.values(i, j)[tuple[j]];
      }
      flat.push_back(distance(picked));
    } while (next_tuple(tuple, reps));
  }
  return DistanceSet(std::move(flat), m, reps);
}

void write_csv(std::ostream& out, const DistanceSet& dist) {
  out << "subject,m,distance\n" << std::setprecision(17);
  for (std::size_t i = 0; i < dist.num_subjects(); ++i) {
    const auto row = dist.subject(i);
    for (std::size_t m = 0; m < row.size(); ++m) {
      out << (i + 1) << ',' << (m + 1) << ',' << row[m] << '\n';
    }
  }
}

}  // namespace magree

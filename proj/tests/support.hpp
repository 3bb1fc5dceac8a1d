#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "magree/dataset.hpp"
#include "magree/distance.hpp"
#include "magree/errors.hpp"

namespace testing {

// values[i][j] = replicates of rater j on subject i. Raters are named A, B, ...
inline magree::MeasurementDataset make_dataset(
    const std::vector<std::vector<std::vector<double>>>& values) {
  std::vector<std::string> raters;
  for (std::size_t j = 0; j < values.front().size(); ++j) {
    raters.emplace_back(1, static_cast<char>('A' + j));
  }
  std::vector<magree::SubjectRecord> subjects;
  for (std::size_t i = 0; i < values.size(); ++i) {
    subjects.push_back({"s" + std::to_string(i + 1), values[i]});
  }
  return magree::MeasurementDataset(std::move(raters), std::move(subjects));
}

inline magree::MeasurementDataset parse(const std::string& csv) {
  std::istringstream in(csv);
  return magree::parse_csv(in, {}, "test.csv");
}

// Random balanced dataset with values drawn from a distribution picked by `kind`.
inline magree::MeasurementDataset random_dataset(std::mt19937_64& rng, std::size_t n,
                                                 std::vector<std::size_t> reps, int kind = 0) {
  std::normal_distribution<double> normal(10.0, 3.0);
  std::exponential_distribution<double> expo(0.5);
  std::uniform_int_distribution<int> ints(0, 6);
  std::vector<std::vector<std::vector<double>>> values(n);
  for (auto& subject : values) {
    const double centre = normal(rng);
    for (auto k : reps) {
      std::vector<double> v(k);
      for (auto& x : v) {
        switch (kind % 3) {
          case 0: x = centre + normal(rng) - 10.0; break;
          case 1: x = centre + expo(rng); break;
          default: x = static_cast<double>(ints(rng)); break;  // ties on purpose
        }
      }
      subject.push_back(std::move(v));
    }
  }
  return make_dataset(values);
}

template <class F>
magree::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const magree::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected a magree::Error");
}

}  // namespace testing

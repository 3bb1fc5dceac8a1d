#include <doctest.h>

#include <cmath>
#include <sstream>

#include "magree/correlation.hpp"
#include "support.hpp"

using doctest::Approx;
using magree::ErrorCode;
using testing::error_code_of;

TEST_CASE("label matrix first row for J = 3, K = 2") {
  const std::vector<std::size_t> reps{2, 2, 2};
  const auto labels = magree::build_label_matrix(reps);
  REQUIRE(labels.size() == 8);
  const std::vector<std::uint32_t> expected{7, 3, 5, 1, 6, 2, 4, 0};
  for (std::size_t m = 0; m < 8; ++m) CHECK(labels(0, m) == expected[m]);
  CHECK(labels.full_mask() == 7u);
}

TEST_CASE("label matrix for J = 2, K = 2") {
  const std::vector<std::size_t> reps{2, 2};
  const auto labels = magree::build_label_matrix(reps);
  // Collections (1,1), (1,2), (2,1), (2,2).
  CHECK(labels(0, 0) == 3);
  CHECK(labels(0, 1) == 1);
  CHECK(labels(0, 2) == 2);
  CHECK(labels(0, 3) == 0);
  CHECK(labels(1, 2) == 0);
  CHECK(labels(3, 1) == 2);
}

TEST_CASE("multiplicities for J = 2, K = 3") {
  const std::vector<std::size_t> reps{3, 3};
  const auto check = magree::verify_equal_rows(magree::build_label_matrix(reps));
  CHECK(check.equal_rows);
  CHECK(check.multiplicity.at(3) == 1);
  CHECK(check.multiplicity.at(1) == 2);
  CHECK(check.multiplicity.at(2) == 2);
  CHECK(check.multiplicity.at(0) == 4);

  std::ostringstream out;
  magree::write_csv(out, check, reps);
  CHECK(out.str() == "label,count,predicted\n0,4,4\n1,2,2\n2,2,2\n3,1,1\n");
}

TEST_CASE("rows share one label multiset for every design with J <= 4, K <= 3") {
  for (std::size_t j = 2; j <= 4; ++j) {
    std::vector<std::size_t> design(j, 1);
    for (;;) {
      const auto labels = magree::build_label_matrix(design);
      const auto check = magree::verify_equal_rows(labels);
      CHECK(check.equal_rows);
      std::size_t total = 0;
      for (const auto& [label, count] : check.multiplicity) {
        CHECK(count == magree::predicted_multiplicity(label, design));
        total += count;
      }
      CHECK(total == labels.size());
      for (std::size_t m = 0; m < labels.size(); ++m) {
        CHECK(labels(m, m) == labels.full_mask());
        for (std::size_t mp = 0; mp < labels.size(); ++mp) CHECK(labels(m, mp) == labels(mp, m));
      }
      std::size_t p = 0;
      while (p < j && design[p] == 3) design[p++] = 1;
      if (p == j) break;
      ++design[p];
    }
  }
}

TEST_CASE("label matrix limits") {
  const std::vector<std::size_t> one{3};
  CHECK(error_code_of([&] { magree::build_label_matrix(one); }) == ErrorCode::TooFewRaters);
  const std::vector<std::size_t> big{20, 20, 20};
  CHECK(error_code_of([&] { magree::build_label_matrix(big); }) == ErrorCode::CapExceeded);
}

TEST_CASE("label CSV") {
  const std::vector<std::size_t> reps{1, 2};
  std::ostringstream out;
  magree::write_csv(out, magree::build_label_matrix(reps));
  CHECK(out.str() == "m,m_prime,label\n1,1,3\n1,2,1\n2,1,1\n2,2,3\n");
}

TEST_CASE("row-sum decomposition reproduces the sandwich") {
  std::mt19937_64 rng(21);
  int exact_checks = 0;
  for (int kind = 0; kind < 3; ++kind) {
    const auto ds = testing::random_dataset(rng, 40, {2, 3, 2}, kind);
    const auto dist = magree::enumerate_distances(ds);
    const std::size_t n = dist.num_subjects(), m = dist.per_subject();
    const auto est = magree::estimate_ocp(dist, 4.0);
    REQUIRE_FALSE(est.degenerate());
    const auto score = magree::ScoreFunction::ocp(4.0);

    const auto dec = magree::estimate_rho_and_a(dist, score, est.beta_hat);
    CHECK(dec.rho.at(7) == Approx(1.0));
    const double var = magree::theoretical_variance(dec.a_value, dec.sigma_s_sq, m, est.h_theta, n);
    CHECK(var == Approx(est.se_theta * est.se_theta).epsilon(1e-10));

    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(m, m);
    const double sw = magree::sandwich_with_working_matrix(dist, score, est.beta_hat, est.h_theta, identity);
    CHECK(sw == Approx(est.se_theta * est.se_theta).epsilon(1e-10));

    // R0 has equal row sums a, so 1 is an eigenvector: 1' R0^{-1} 1 = M / a,
    // and weighting by R0^{-1} 1 leaves the sandwich unchanged.
    const auto labels = magree::build_label_matrix(dist.replicates());
    const Eigen::MatrixXd r0 = magree::build_r0(labels, dec.rho);
    CHECK(r0.rowwise().sum().minCoeff() == Approx(dec.a_value).epsilon(1e-10));
    CHECK(r0.rowwise().sum().maxCoeff() == Approx(dec.a_value).epsilon(1e-10));
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m);
    const auto proj = magree::nearest_pd(r0);
    if (!proj.adjusted) {
      CHECK(ones.dot(r0.ldlt().solve(ones)) == Approx(m / dec.a_value).epsilon(1e-8));
      CHECK(magree::sandwich_with_working_matrix(dist, score, est.beta_hat, est.h_theta, r0) ==
            Approx(sw).epsilon(1e-8));
      ++exact_checks;
    }
  }
  CHECK(exact_checks > 0);
}

TEST_CASE("M = 1 gives a = 1") {
  const auto ds = testing::make_dataset({{{1.0}, {3.0}}, {{2.0}, {2.5}}, {{0.0}, {4.0}}, {{1.0}, {1.2}}});
  const auto dist = magree::enumerate_distances(ds);
  const auto est = magree::estimate_ocp(dist, 1.0);
  const auto dec = magree::estimate_rho_and_a(dist, magree::ScoreFunction::ocp(1.0), est.beta_hat);
  CHECK(dec.a_value == Approx(1.0));
  CHECK(dec.multiplicity.size() == 1);
}

TEST_CASE("decomposition rejects degenerate scores and hand-built sets") {
  const auto ds = testing::make_dataset({{{1.0, 1.0}, {1.0, 1.0}}, {{2.0, 2.0}, {2.0, 2.0}}});
  const auto dist = magree::enumerate_distances(ds);
  CHECK(error_code_of([&] {
          magree::estimate_rho_and_a(dist, magree::ScoreFunction::ocp(1.0), 1.0);
        }) == ErrorCode::DegenerateScores);
  const auto bare = magree::DistanceSet::from_rows({{1.0, 2.0}});
  CHECK(error_code_of([&] {
          magree::estimate_rho_and_a(bare, magree::ScoreFunction::ocp(1.5), 0.5);
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("working matrix must be positive definite") {
  const auto dist = magree::DistanceSet::from_rows({{1, 2}, {3, 4}, {5, 6}});
  Eigen::MatrixXd singular(2, 2);
  singular << 1, 1, 1, 1;
  CHECK(error_code_of([&] {
          magree::sandwich_with_working_matrix(dist, magree::ScoreFunction::ocp(3.5), 0.5, 0.25, singular);
        }) == ErrorCode::SingularMatrix);
}

TEST_CASE("nearest_pd") {
  Eigen::MatrixXd good(2, 2);
  good << 1, 0.5, 0.5, 1;
  const auto same = magree::nearest_pd(good);
  CHECK_FALSE(same.adjusted);
  CHECK((same.matrix - good).norm() < 1e-12);

  Eigen::MatrixXd bad(3, 3);
  bad << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;
  const auto fixed = magree::nearest_pd(bad);
  CHECK(fixed.adjusted);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fixed.matrix);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
  for (int i = 0; i < 3; ++i) CHECK(fixed.matrix(i, i) == Approx(1.0));
}

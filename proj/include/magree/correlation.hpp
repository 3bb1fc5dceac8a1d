#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "magree/distance.hpp"
#include "magree/estimation.hpp"

namespace magree {

/// Cap on M for the explicit-matrix paths (verification only).
inline constexpr std::size_t kMaxMatrixCollections = 4096;

/// Shared-rater bitmask labels between every pair of collections.
///
/// labels(m, m') = sum of 2^(j-1) over raters j whose replicate index agrees in
/// collections m and m'. Collections follow collection_tuples() order.
class CorrelationLabelMatrix {
 public:
  CorrelationLabelMatrix(std::size_t raters, std::vector<std::size_t> replicates,
                         std::vector<std::uint32_t> labels);

  std::size_t num_raters() const noexcept { return raters_; }
  const std::vector<std::size_t>& replicates() const noexcept { return replicates_; }
  std::size_t size() const noexcept { return m_; }
  std::uint32_t full_mask() const noexcept { return (1u << raters_) - 1u; }
  std::uint32_t operator()(std::size_t m, std::size_t mp) const { return labels_[m * m_ + mp]; }

 private:
  std::size_t raters_;
  std::vector<std::size_t> replicates_;
  std::vector<std::uint32_t> labels_;
  std::size_t m_;
};

/// Throws CapExceeded when M > kMaxMatrixCollections.
CorrelationLabelMatrix build_label_matrix(std::span<const std::size_t> replicates);

struct RowCheck {
  bool equal_rows = false;
  /// Label -> count within row 0 (all rows when equal_rows holds).
  std::map<std::uint32_t, std::size_t> multiplicity;
};

RowCheck verify_equal_rows(const CorrelationLabelMatrix& labels);

/// Product over raters not in `label` of (K_j - 1).
std::size_t predicted_multiplicity(std::uint32_t label, std::span<const std::size_t> replicates);

struct RowSumDecomposition {
  std::map<std::uint32_t, std::size_t> multiplicity;
  std::map<std::uint32_t, double> rho;  ///< pooled correlation per label
  double a_value = 0.0;                 ///< row sum of R0
  double sigma_s_sq = 0.0;
};

/// Pools the products s_im * s_im' over subjects and position pairs sharing a
/// label. Moments are uncentered (the scores have mean zero at beta_hat) and
/// scaled by sigma_S^2, so a * sigma_S^2 / (M h^2 N) reproduces the
/// independence sandwich exactly. Throws DegenerateScores if sigma_S^2 = 0.
RowSumDecomposition estimate_rho_and_a(const DistanceSet& dist, const ScoreFunction& score,
                                       double beta_hat);

/// Var(theta_hat) = a sigma_S^2 / (M h^2 N).
double theoretical_variance(double a, double sigma_s_sq, std::size_t m, double h_theta,
                            std::size_t n);

/// Sandwich variance of theta_hat under working correlation R_w:
/// sum_i (w' S_i)^2 / (N h w'1)^2 with w = R_w^{-1} 1. Throws SingularMatrix
/// unless R_w is positive definite.
double sandwich_with_working_matrix(const DistanceSet& dist, const ScoreFunction& score,
                                    double beta_hat, double h_theta, const Eigen::MatrixXd& r_w);

/// R0 with entries rho[label(m, m')]; the diagonal label maps to 1.
Eigen::MatrixXd build_r0(const CorrelationLabelMatrix& labels,
                         const std::map<std::uint32_t, double>& rho);

struct PdProjection {
  Eigen::MatrixXd matrix;
  bool adjusted = false;
};

/// Clips eigenvalues below `floor` and rescales to unit diagonal.
PdProjection nearest_pd(const Eigen::MatrixXd& r, double floor = 1e-8);

void write_csv(std::ostream& out, const CorrelationLabelMatrix& labels);
void write_csv(std::ostream& out, const RowCheck& check, std::span<const std::size_t> replicates);

}  // namespace magree

#include "magree/correlation.hpp"

#include <cmath>
#include <ostream>

#include "magree/errors.hpp"

namespace magree {

CorrelationLabelMatrix::CorrelationLabelMatrix(std::size_t raters,
                                               std::vector<std::size_t> replicates,
                                               std::vector<std::uint32_t> labels)
    : raters_(raters), replicates_(std::move(replicates)), labels_(std::move(labels)) {
  m_ = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(labels_.size()))));
  if (m_ * m_ != labels_.size() || raters_ != replicates_.size()) {
    fail(ErrorCode::InvalidArgument, "label matrix shape mismatch");
  }
}

CorrelationLabelMatrix build_label_matrix(std::span<const std::size_t> replicates) {
  if (replicates.size() < 2) {
    fail(ErrorCode::TooFewRaters, "label matrix needs J >= 2");
  }
  if (replicates.size() > 31) {
    fail(ErrorCode::CapExceeded, "label matrix supports at most 31 raters");
  }
  std::size_t m = 1;
  for (auto k : replicates) {
    if (k == 0) fail(ErrorCode::InvalidArgument, "replicate count must be >= 1");
    m *= k;
    if (m > kMaxMatrixCollections) {
      fail(ErrorCode::CapExceeded, "more than 4096 collections for the matrix path");
    }
  }
  const auto tuples = collection_tuples(replicates);
  std::vector<std::uint32_t> labels(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      std::uint32_t l = 0;
      for (std::size_t j = 0; j < replicates.size(); ++j) {
        if (tuples[a][j] == tuples[b][j]) l |= 1u << j;
      }
      labels[a * m + b] = l;
    }
  }
  return {replicates.size(), {replicates.begin(), replicates.end()}, std::move(labels)};
}

RowCheck verify_equal_rows(const CorrelationLabelMatrix& labels) {
  RowCheck out;
  const auto m = labels.size();
  for (std::size_t b = 0; b < m; ++b) {
    ++out.multiplicity[labels(0, b)];
  }
  out.equal_rows = true;
  for (std::size_t a = 1; a < m && out.equal_rows; ++a) {
    std::map<std::uint32_t, std::size_t> row;
    for (std::size_t b = 0; b < m; ++b) {
      ++row[labels(a, b)];
    }
    out.equal_rows = row == out.multiplicity;
  }
  return out;
}

std::size_t predicted_multiplicity(std::uint32_t label, std::span<const std::size_t> replicates) {
  std::size_t count = 1;
  for (std::size_t j = 0; j < replicates.size(); ++j) {
    if (!(label & (1u << j))) count *= replicates[j] - 1;
  }
  return count;
}

namespace {

const CorrelationLabelMatrix& require_cross_product(const DistanceSet& dist,
                                                   std::optional<CorrelationLabelMatrix>& slot) {
  if (dist.replicates().empty() || dist.layout() != Layout::CrossProduct) {
    fail(ErrorCode::InvalidArgument,
         "correlation labels need a cross-product distance set with a known design");
  }
  slot.emplace(build_label_matrix(dist.replicates()));
  return *slot;
}

}  // namespace

RowSumDecomposition estimate_rho_and_a(const DistanceSet& dist, const ScoreFunction& score,
                                       double beta_hat) {
  if (dist.num_subjects() < 2) {
    fail(ErrorCode::InvalidArgument, "estimate_rho_and_a needs N >= 2");
  }
  std::optional<CorrelationLabelMatrix> slot;
  const auto& labels = require_cross_product(dist, slot);
  const auto m = labels.size();
  const auto n_labels = static_cast<std::size_t>(labels.full_mask()) + 1;

  std::vector<double> sums(n_labels, 0.0);
  std::vector<std::size_t> counts(n_labels, 0);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) ++counts[labels(a, b)];
  }
  std::vector<double> s(m);
  for (std::size_t i = 0; i < dist.num_subjects(); ++i) {
    const auto row = dist.subject(i);
    for (std::size_t k = 0; k < m; ++k) s[k] = score(row[k], beta_hat);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) sums[labels(a, b)] += s[a] * s[b];
    }
  }

  RowSumDecomposition out;
  const double n = static_cast<double>(dist.num_subjects());
  out.sigma_s_sq = sums[labels.full_mask()] / (n * static_cast<double>(m));
  if (!(out.sigma_s_sq > 0.0)) {
    fail(ErrorCode::DegenerateScores, "scores have zero variance");
  }
  out.multiplicity = verify_equal_rows(labels).multiplicity;
  for (const auto& [label, mult] : out.multiplicity) {
    const double rho = sums[label] / (n * static_cast<double>(counts[label])) / out.sigma_s_sq;
    out.rho[label] = rho;
    out.a_value += static_cast<double>(mult) * rho;
  }
  return out;
}

double theoretical_variance(double a, double sigma_s_sq, std::size_t m, double h_theta,
                            std::size_t n) {
  if (m == 0 || n == 0 || !(h_theta > 0.0)) {
    fail(ErrorCode::InvalidArgument, "theoretical_variance: M, N and h must be positive");
  }
  return a * sigma_s_sq /
         (static_cast<double>(m) * h_theta * h_theta * static_cast<double>(n));
}

double sandwich_with_working_matrix(const DistanceSet& dist, const ScoreFunction& score,
                                    double beta_hat, double h_theta, const Eigen::MatrixXd& r_w) {
  const auto m = dist.per_subject();
  if (m > kMaxMatrixCollections) {
    fail(ErrorCode::CapExceeded, "matrix sandwich limited to M <= 4096");
  }
  if (r_w.rows() != static_cast<Eigen::Index>(m) || r_w.cols() != static_cast<Eigen::Index>(m)) {
    fail(ErrorCode::InvalidArgument, "working matrix must be M x M");
  }
  if (!(h_theta > 0.0)) {
    fail(ErrorCode::ZeroDerivative, "h(theta) must be positive");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(r_w);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::SingularMatrix, "working correlation is not positive definite");
  }
  const Eigen::VectorXd w = llt.solve(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m)));
  const double w_sum = w.sum();
  if (!(std::abs(w_sum) > 0.0)) {
    fail(ErrorCode::SingularMatrix, "1' R_w^{-1} 1 vanishes");
  }

  double meat = 0.0;
  for (std::size_t i = 0; i < dist.num_subjects(); ++i) {
    const auto row = dist.subject(i);
    double ws = 0.0;
    for (std::size_t k = 0; k < m; ++k) ws += w[static_cast<Eigen::Index>(k)] * score(row[k], beta_hat);
    meat += ws * ws;
  }
  const double bread = static_cast<double>(dist.num_subjects()) * h_theta * w_sum;
  return meat / (bread * bread);
}

Eigen::MatrixXd build_r0(const CorrelationLabelMatrix& labels,
                         const std::map<std::uint32_t, double>& rho) {
  const auto m = static_cast<Eigen::Index>(labels.size());
  Eigen::MatrixXd r(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      const auto l = labels(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
      if (l == labels.full_mask()) {
        r(a, b) = 1.0;
        continue;
      }
      const auto it = rho.find(l);
      if (it == rho.end()) {
        fail(ErrorCode::InvalidArgument, "missing rho for label " + std::to_string(l));
      }
      r(a, b) = it->second;
    }
  }
  return r;
}

PdProjection nearest_pd(const Eigen::MatrixXd& r, double floor) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (r + r.transpose()));
  if (eig.info() != Eigen::Success) {
    fail(ErrorCode::SingularMatrix, "eigendecomposition failed");
  }
  PdProjection out;
  Eigen::VectorXd values = eig.eigenvalues();
  if (values.minCoeff() >= floor) {
    out.matrix = r;
    return out;
  }
  out.adjusted = true;
  values = values.cwiseMax(floor);
  Eigen::MatrixXd fixed = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
  const Eigen::VectorXd scale = fixed.diagonal().cwiseSqrt().cwiseInverse();
  out.matrix = scale.asDiagonal() * fixed * scale.asDiagonal();
  return out;
}

void write_csv(std::ostream& out, const CorrelationLabelMatrix& labels) {
  out << "m,m_prime,label\n";
  for (std::size_t a = 0; a < labels.size(); ++a) {
    for (std::size_t b = 0; b < labels.size(); ++b) {
      out << (a + 1) << ',' << (b + 1) << ',' << labels(a, b) << '\n';
    }
  }
}

void write_csv(std::ostream& out, const RowCheck& check, std::span<const std::size_t> replicates) {
  out << "label,count,predicted\n";
  for (const auto& [label, count] : check.multiplicity) {
    out << label << ',' << count << ',' << predicted_multiplicity(label, replicates) << '\n';
  }
}

}  // namespace magree

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "magree/dataset.hpp"
#include "magree/estimation.hpp"

namespace magree {

enum class Family { Normal, LogNormal };

std::string_view to_string(Family f);

/// Mean/covariance design of a simulation scenario on the measurement scale.
///
/// Covariance of the JK-vector (rater-major): within rater j, variance
/// sigma_sq[j] and replicate correlation rho_intra[j]; between raters j != j',
/// sqrt(sigma_sq[j] sigma_sq[j']) * rho_inter(j, j') for every replicate pair.
struct ScenarioConfig {
  std::string name;
  Family family = Family::Normal;
  std::vector<double> mu;
  std::vector<double> sigma_sq;
  std::vector<double> rho_intra;
  Eigen::MatrixXd rho_inter;  ///< J x J, symmetric; diagonal ignored
  std::size_t replicates = 1;
  std::uint64_t seed = 0;

  std::size_t num_raters() const noexcept { return mu.size(); }
  /// Sizes, ranges and (for the normal family) positive semidefiniteness.
  /// Throws InvalidArgument / NotPSD / InfeasibleTarget.
  void validate() const;
};

/// Uniform-correlation convenience constructor.
ScenarioConfig make_scenario(std::string name, Family family, std::vector<double> mu,
                             std::vector<double> sigma_sq, double rho_intra, double rho_inter,
                             std::size_t replicates);

/// Block covariance of the JK-vector for a normal-family scenario.
Eigen::MatrixXd scenario_covariance(const ScenarioConfig& cfg);

/// Log-scale normal scenario whose exponential has the target moments.
/// Throws InfeasibleTarget when the inversion leaves the valid domain.
ScenarioConfig lognormal_params(const ScenarioConfig& target);

/// Draws from N(mean, cov); Cholesky, falling back to an eigen factor for
/// semidefinite matrices. Throws NotPSD.
class MvnSampler {
 public:
  MvnSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& cov);
  void draw(std::mt19937_64& rng, Eigen::VectorXd& out) const;
  std::size_t dim() const noexcept { return static_cast<std::size_t>(mean_.size()); }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;
};

MeasurementDataset generate_normal(const ScenarioConfig& cfg, std::size_t n, std::mt19937_64& rng);
MeasurementDataset generate_lognormal(const ScenarioConfig& cfg, std::size_t n,
                                      std::mt19937_64& rng);
/// Dispatches on cfg.family.
MeasurementDataset generate(const ScenarioConfig& cfg, std::size_t n, std::mt19937_64& rng);

struct OracleResult {
  double value = 0.0;
  /// Sample correlation of the score vector S_i(beta) at the true value
  /// (M x M), projected to PD; empty when a score column is constant.
  Eigen::MatrixXd r0;
  bool r0_adjusted = false;
  /// Row sum of the score correlation matrix at the true value; NaN when the
  /// scores are degenerate.
  double a_value = 0.0;
};

OracleResult true_value_oracle(const ScenarioConfig& cfg, const AgreementQuestion& q,
                               std::size_t oracle_n = 100000, std::uint64_t seed = 0);

struct ReplicationOutcome {
  bool degenerate = false;
  double beta_hat = 0.0;
  double theta_hat = 0.0;
  double se_ind = 0.0;
  double se_true = 0.0;  ///< sandwich with R_w = true R0; NaN when not computed
  bool covered = false;
};

struct MonteCarloReport {
  double true_value = 0.0;
  double mean_bias = 0.0;     ///< natural scale
  double sd_theta = 0.0;      ///< SD_t: SD of theta_hat, divisor n - 1
  double sd_beta = 0.0;       ///< SD of beta_hat, divisor n
  double mean_se_ind = 0.0;   ///< SE_ind
  double mean_se_true = 0.0;  ///< SE_t (NaN when not computed)
  double mean_abs_se_diff = 0.0;
  double mse = 0.0;           ///< natural scale; sd_beta^2 + bias^2
  double coverage_rate = 0.0;
  std::size_t n_degenerate = 0;  ///< nmiss
  std::size_t n_replications = 0;
  std::vector<ReplicationOutcome> outcomes;
};

struct MonteCarloOptions {
  std::size_t threads = 0;  ///< 0: hardware concurrency
  std::optional<double> true_value;
  /// True score correlation R0 (M x M) for SE_t; taken from the oracle if unset.
  std::optional<Eigen::MatrixXd> r0_true;
  bool compute_se_true = true;
  std::size_t oracle_n = 100000;
  EstimationOptions estimation;
};

/// Replication r draws from mt19937_64(mix_seed(seed, r)), so the report does
/// not depend on the worker count. The oracle uses its own stream.
MonteCarloReport run_monte_carlo(const ScenarioConfig& cfg, const AgreementQuestion& q,
                                 std::size_t n_subjects, std::size_t replications,
                                 std::uint64_t seed, const MonteCarloOptions& opts = {});

/// The eight scenarios: {normal,lognormal}-{high,low}-{noshift,shift}.
std::vector<ScenarioConfig> builtin_presets(std::size_t replicates = 3);

/// Builtin preset by name. Also accepts the agreement-level aliases
/// {normal,lognormal}-{high,moderate,mild,low}. Throws InvalidArgument.
ScenarioConfig find_preset(std::string_view name, std::size_t replicates = 3);

/// INI-style scenario file: one [section] per scenario with keys family, mu,
/// sigma_sq, rho_intra, rho_inter, replicates and optional seed.
std::vector<ScenarioConfig> load_scenarios(const std::filesystem::path& path);
std::vector<ScenarioConfig> parse_scenarios(std::istream& in);

/// Header matching write_csv_row.
void write_csv_header(std::ostream& out);
/// True,Bias,SD_t,SE_ind,SE_t,MSE,CR,nmiss with 6 decimals.
void write_csv_row(std::ostream& out, std::string_view label, const MonteCarloReport& r);

}  // namespace magree

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string_view>
#include <vector>

#include "conjproc/measure.hpp"

namespace conjproc {

enum class ExperimentKind { C1Boxplot, RateHs, RateEigen };

std::string_view to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(std::string_view name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::C1Boxplot;
  std::vector<long> n_values{100, 1000, 10000};
  int replications = 1000;
  int q_t = 1;
  double q0 = 10.0;
  Measure measure = Measure::logistic();
  int m = 256;
  std::uint64_t master_seed = 20240501;
  bool oracle_mode = false;
  int workers = 0;  // 0 = hardware concurrency; never affects results

  /// Desk-scale Monte Carlo defaults (Ĉ_1(0,0) boxplots).
  static ExperimentConfig c1_defaults();
  /// Oracle-mode rate defaults: n ∈ {250, 1000, 4000, 16000}, 200 reps, m = 64.
  static ExperimentConfig rate_defaults(ExperimentKind kind = ExperimentKind::RateHs);

  void validate() const;
  nlohmann::json to_json() const;
  /// Overlays keys present in j onto base.
  static ExperimentConfig from_json(const nlohmann::json& j, ExperimentConfig base);
};

/// Runs body(i) for i in [0, count) on up to `workers` threads. Each index is
/// handled exactly once; the first exception thrown is rethrown.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

/// Tukey boxplot summary plus moments.
struct SummaryStats {
  long n = 0;
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;   // sample (divisor count − 1); 0 for a single value
  double std_error = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double whisker_low = 0.0;   // smallest value ≥ q1 − 1.5 IQR
  double whisker_high = 0.0;  // largest value ≤ q3 + 1.5 IQR

  nlohmann::json to_json() const;
};

/// Quartiles use linear interpolation between order statistics (type 7).
SummaryStats summarize(std::vector<double> values, long n);

/// Seed for one replication: derived from (master seed, experiment, n, rep).
std::uint64_t replication_seed(const ExperimentConfig& config, long n, int rep);

/// One full pipeline run (latent → CTMC, q_t samples per cycle → Ĉ_1(0,0)).
double c1_origin_replication(const ExperimentConfig& config, long n, int rep);

struct C1Experiment {
  ExperimentConfig config;
  std::vector<std::vector<double>> values;  // [n index][replication]
  std::vector<SummaryStats> summaries;
  double reference = 0.0;  // 1/48

  void write_replications_csv(std::ostream& os) const;
  nlohmann::json summary_json() const;
};

C1Experiment run_c1_experiment(const ExperimentConfig& config);

struct RateFit {
  std::vector<double> log_n;
  std::vector<double> log_rmse;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;

  nlohmann::json to_json() const;
};

/// Least-squares fit of log RMSE on log n. Throws UsageError for fewer than
/// three points and NumericError when any RMSE is zero or not finite.
RateFit fit_rate(const std::vector<long>& n_values, const std::vector<double>& rmse);

/// Errors of one replication against the grid-discretized true operator.
struct RateSample {
  double hs = 0.0;          // ‖R̂ − R‖_HS
  double theta1_gap = 0.0;  // |θ̂_1 − θ_1|
  double sup_gap = 0.0;     // sup_j |θ̂_j − θ_j|
  double psi1_gap = 0.0;    // sign-aligned ‖ψ̂_1 − ψ_1‖_{L²(μ)}
};

struct RatePoint {
  long n = 0;
  double rmse_hs = 0.0;
  double rmse_theta1 = 0.0;
  double rmse_sup = 0.0;
  double rmse_psi1 = 0.0;
  double mean_psi1 = 0.0;
  double se_psi1 = 0.0;
};

struct RateExperiment {
  ExperimentConfig config;
  double theta1 = 0.0;  // (1/48)² μ̂([0,1))², the leading eigenvalue on the grid
  std::vector<std::vector<RateSample>> samples;  // [n index][replication]
  std::vector<RatePoint> points;
  RateFit fit_hs;
  RateFit fit_theta1;
  RateFit fit_sup;

  /// The fit selected by config.experiment.
  const RateFit& fit() const;
  void write_replications_csv(std::ostream& os) const;
  nlohmann::json summary_json() const;
};

RateSample rate_replication(const ExperimentConfig& config, long n, int rep);
RateExperiment run_rate_experiment(const ExperimentConfig& config);

}  // namespace conjproc

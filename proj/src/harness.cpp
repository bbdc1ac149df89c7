#include "conjproc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include "conjproc/errors.hpp"
#include "conjproc/estimate.hpp"
#include "conjproc/latent.hpp"
#include "conjproc/observe.hpp"
#include "conjproc/rng.hpp"
#include "conjproc/spectral.hpp"

namespace conjproc {

namespace {

// Grid-discretized truth for the rate experiments.
struct RateTarget {
  QuadratureGrid grid;
  CovKernelGrid r_true;
  double theta1;
  GridFunction psi1;

  explicit RateTarget(const ExperimentConfig& config)
      : grid(config.measure, config.m), r_true(r_hat(true_c1_grid(grid))) {
    const double mass = grid.mass(0.0, 1.0);
    theta1 = kTrueC1 * kTrueC1 * mass * mass;
    psi1 = tabulate(grid, [&](double z) { return (z >= 0.0 && z < 1.0) ? 1.0 / std::sqrt(mass) : 0.0; });
  }
};

struct Pipeline {
  LatentSequence latent;
  std::uint64_t observe_seed;
};

// Latent and observation seeds for one replication; n cycles indexed 0..n−1.
Pipeline build_latent(const ExperimentConfig& config, long n, int rep) {
  const std::uint64_t seed = replication_seed(config, n, rep);
  TwoPointLatentConfig latent_config{derive_seed(seed, {stream_tag::kLatent}), std::nullopt};
  return {generate_latent(latent_config, n - 1), derive_seed(seed, {stream_tag::kObserve})};
}

RateSample rate_sample(const ExperimentConfig& config, const RateTarget& target, long n, int rep) {
  Pipeline p = build_latent(config, n, rep);
  Eigen::MatrixXd projection;
  if (config.oracle_mode) {
    projection = project(std::span<const LatentState>(p.latent.states), target.grid);
  } else {
    const auto samples = simulate_conjugate(p.latent, CTMCConfig{config.q0},
                                            SamplingScheme(config.q_t), p.observe_seed);
    const auto cdfs = empirical_cdfs(samples);
    projection = project(std::span<const EmpiricalCDF>(cdfs), target.grid);
  }
  const CovKernelGrid r_est = r_hat(c1_hat(projection, target.grid));
  const Spectrum spec = eigendecompose(r_est);

  RateSample out;
  out.hs = hs_distance(r_est, target.r_true);
  out.theta1_gap = std::abs(spec.eigenvalues[0] - target.theta1);
  out.sup_gap = out.theta1_gap;
  for (int j = 1; j < spec.size(); ++j) out.sup_gap = std::max(out.sup_gap, std::abs(spec.eigenvalues[j]));
  out.psi1_gap = eigenfunction_gap(spec.eigenfunction(0), target.psi1, target.grid);
  return out;
}

double rms(const std::vector<RateSample>& xs, double RateSample::*field) {
  double s = 0.0;
  for (const auto& x : xs) s += (x.*field) * (x.*field);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

double quantile_type7(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::C1Boxplot: return "c1_boxplot";
    case ExperimentKind::RateHs: return "rate_hs";
    case ExperimentKind::RateEigen: return "rate_eigen";
  }
  return "unknown";
}

ExperimentKind experiment_from_string(std::string_view name) {
  if (name == "c1_boxplot") return ExperimentKind::C1Boxplot;
  if (name == "rate_hs") return ExperimentKind::RateHs;
  if (name == "rate_eigen") return ExperimentKind::RateEigen;
  throw ConfigError("unknown experiment '" + std::string(name) +
                    "' (expected c1_boxplot, rate_hs or rate_eigen)");
}

ExperimentConfig ExperimentConfig::c1_defaults() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::rate_defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  c.n_values = {250, 1000, 4000, 16000};
  c.replications = 200;
  c.m = 64;
  c.oracle_mode = true;
  return c;
}

void ExperimentConfig::validate() const {
  if (n_values.empty()) throw ConfigError("n_values must be nonempty");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] < 2) throw ConfigError("every n must be at least 2");
    if (i > 0 && n_values[i] <= n_values[i - 1]) throw ConfigError("n_values must be ascending");
  }
  if (replications < 1) throw ConfigError("replications must be at least 1");
  if (q_t < 1) throw ConfigError("q_t must be at least 1");
  if (m < 1) throw ConfigError("grid size m must be at least 1");
  if (workers < 0) throw ConfigError("workers must be nonnegative");
  CTMCConfig{q0}.validate();
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"experiment", to_string(experiment)},
          {"n_values", n_values},
          {"replications", replications},
          {"q_t", q_t},
          {"q0", q0},
          {"measure", measure.to_json()},
          {"m", m},
          {"master_seed", master_seed},
          {"oracle_mode", oracle_mode}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, ExperimentConfig c) {
  try {
    if (j.contains("experiment")) c.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    if (j.contains("n_values")) c.n_values = j.at("n_values").get<std::vector<long>>();
    if (j.contains("replications")) c.replications = j.at("replications").get<int>();
    if (j.contains("q_t")) c.q_t = j.at("q_t").get<int>();
    if (j.contains("q0")) c.q0 = j.at("q0").get<double>();
    if (j.contains("measure")) c.measure = Measure::from_json(j.at("measure"));
    if (j.contains("m")) c.m = j.at("m").get<int>();
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("oracle_mode")) c.oracle_mode = j.at("oracle_mode").get<bool>();
    if (j.contains("workers")) c.workers = j.at("workers").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body) {
  std::size_t threads = workers > 0 ? static_cast<std::size_t>(workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

SummaryStats summarize(std::vector<double> values, long n) {
  if (values.empty()) throw UsageError("summarize needs at least one value");
  std::sort(values.begin(), values.end());
  SummaryStats s;
  s.n = n;
  s.count = values.size();
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_dev = std::sqrt(ss / static_cast<double>(s.count - 1));
    s.std_error = s.std_dev / std::sqrt(static_cast<double>(s.count));
  }
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile_type7(values, 0.25);
  s.median = quantile_type7(values, 0.5);
  s.q3 = quantile_type7(values, 0.75);
  const double iqr = s.q3 - s.q1;
  s.whisker_low = *std::lower_bound(values.begin(), values.end(), s.q1 - 1.5 * iqr);
  s.whisker_high = *(std::upper_bound(values.begin(), values.end(), s.q3 + 1.5 * iqr) - 1);
  return s;
}

nlohmann::json SummaryStats::to_json() const {
  return {{"n", n},           {"count", count},
          {"mean", mean},     {"std", std_dev},
          {"std_error", std_error},
          {"min", min},       {"q1", q1},
          {"median", median}, {"q3", q3},
          {"max", max},       {"whisker_low", whisker_low},
          {"whisker_high", whisker_high}};
}

std::uint64_t replication_seed(const ExperimentConfig& config, long n, int rep) {
  return derive_seed(config.master_seed, {static_cast<std::uint64_t>(config.experiment),
                                          static_cast<std::uint64_t>(n),
                                          static_cast<std::uint64_t>(rep)});
}

double c1_origin_replication(const ExperimentConfig& config, long n, int rep) {
  Pipeline p = build_latent(config, n, rep);
  const auto samples =
      simulate_conjugate(p.latent, CTMCConfig{config.q0}, SamplingScheme(config.q_t), p.observe_seed);
  const auto cdfs = empirical_cdfs(samples);
  return c1_hat_at(std::span<const EmpiricalCDF>(cdfs), 0.0, 0.0);
}

C1Experiment run_c1_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment != ExperimentKind::C1Boxplot) {
    throw ConfigError("run_c1_experiment needs experiment = c1_boxplot");
  }
  C1Experiment out{config, {}, {}, kTrueC1};
  for (long n : config.n_values) {
    std::vector<double> values(static_cast<std::size_t>(config.replications));
    parallel_for(values.size(), config.workers, [&](std::size_t r) {
      values[r] = c1_origin_replication(config, n, static_cast<int>(r));
    });
    out.summaries.push_back(summarize(values, n));
    out.values.push_back(std::move(values));
  }
  return out;
}

void C1Experiment::write_replications_csv(std::ostream& os) const {
  os << "n,rep,value\n";
  os.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t r = 0; r < values[i].size(); ++r) {
      os << config.n_values[i] << ',' << r << ',' << values[i][r] << '\n';
    }
  }
}

nlohmann::json C1Experiment::summary_json() const {
  nlohmann::json per_n = nlohmann::json::array();
  for (const auto& s : summaries) per_n.push_back(s.to_json());
  return {{"config", config.to_json()},
          {"statistic", "C1_hat(0,0)"},
          {"reference_value", reference},
          {"summaries", std::move(per_n)}};
}

RateFit fit_rate(const std::vector<long>& n_values, const std::vector<double>& rmse) {
  if (n_values.size() != rmse.size()) throw UsageError("fit_rate needs one RMSE per n");
  if (n_values.size() < 3) throw UsageError("fit_rate needs at least 3 sample sizes");
  RateFit fit;
  for (std::size_t i = 0; i < rmse.size(); ++i) {
    if (!(rmse[i] > 0.0) || !std::isfinite(rmse[i])) {
      throw NumericError("rate fit rejected: RMSE at n = " + std::to_string(n_values[i]) + " is " +
                         std::to_string(rmse[i]) + "; log-log slope is undefined");
    }
    fit.log_n.push_back(std::log(static_cast<double>(n_values[i])));
    fit.log_rmse.push_back(std::log(rmse[i]));
  }
  const auto k = static_cast<double>(fit.log_n.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < fit.log_n.size(); ++i) {
    mx += fit.log_n[i];
    my += fit.log_rmse[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < fit.log_n.size(); ++i) {
    const double dx = fit.log_n[i] - mx;
    const double dy = fit.log_rmse[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

nlohmann::json RateFit::to_json() const {
  return {{"log_n", log_n},
          {"log_rmse", log_rmse},
          {"slope", slope},
          {"intercept", intercept},
          {"r_squared", r_squared}};
}

RateSample rate_replication(const ExperimentConfig& config, long n, int rep) {
  return rate_sample(config, RateTarget(config), n, rep);
}

RateExperiment run_rate_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.experiment == ExperimentKind::C1Boxplot) {
    throw ConfigError("run_rate_experiment needs experiment = rate_hs or rate_eigen");
  }
  if (config.n_values.size() < 3) throw UsageError("rate experiments need at least 3 values of n");
  const RateTarget target(config);
  RateExperiment out;
  out.config = config;
  out.theta1 = target.theta1;
  for (long n : config.n_values) {
    std::vector<RateSample> samples(static_cast<std::size_t>(config.replications));
    parallel_for(samples.size(), config.workers, [&](std::size_t r) {
      samples[r] = rate_sample(config, target, n, static_cast<int>(r));
    });
    RatePoint pt;
    pt.n = n;
    pt.rmse_hs = rms(samples, &RateSample::hs);
    pt.rmse_theta1 = rms(samples, &RateSample::theta1_gap);
    pt.rmse_sup = rms(samples, &RateSample::sup_gap);
    pt.rmse_psi1 = rms(samples, &RateSample::psi1_gap);
    std::vector<double> psi;
    for (const auto& s : samples) psi.push_back(s.psi1_gap);
    const SummaryStats st = summarize(psi, n);
    pt.mean_psi1 = st.mean;
    pt.se_psi1 = st.std_error;
    out.points.push_back(pt);
    out.samples.push_back(std::move(samples));
  }
  auto column = [&](double RatePoint::*field) {
    std::vector<double> v;
    for (const auto& p : out.points) v.push_back(p.*field);
    return v;
  };
  out.fit_hs = fit_rate(config.n_values, column(&RatePoint::rmse_hs));
  out.fit_theta1 = fit_rate(config.n_values, column(&RatePoint::rmse_theta1));
  out.fit_sup = fit_rate(config.n_values, column(&RatePoint::rmse_sup));
  return out;
}

const RateFit& RateExperiment::fit() const {
  return config.experiment == ExperimentKind::RateEigen ? fit_theta1 : fit_hs;
}

void RateExperiment::write_replications_csv(std::ostream& os) const {
  os << "n,rep,hs_distance,theta1_gap,sup_eigenvalue_gap,psi1_gap\n";
  os.precision(17);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t r = 0; r < samples[i].size(); ++r) {
      const RateSample& s = samples[i][r];
      os << config.n_values[i] << ',' << r << ',' << s.hs << ',' << s.theta1_gap << ',' << s.sup_gap
         << ',' << s.psi1_gap << '\n';
    }
  }
}

nlohmann::json RateExperiment::summary_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    pts.push_back({{"n", p.n},
                   {"rmse_hs", p.rmse_hs},
                   {"rmse_theta1", p.rmse_theta1},
                   {"rmse_sup_eigenvalue_gap", p.rmse_sup},
                   {"rmse_psi1", p.rmse_psi1},
                   {"mean_psi1", p.mean_psi1},
                   {"se_psi1", p.se_psi1}});
  }
  return {{"config", config.to_json()},
          {"theta1", theta1},
          {"points", std::move(pts)},
          {"fit", fit().to_json()},
          {"fit_hs", fit_hs.to_json()},
          {"fit_theta1", fit_theta1.to_json()},
          {"fit_sup_eigenvalue_gap", fit_sup.to_json()}};
}

}  // namespace conjproc

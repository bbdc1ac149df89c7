#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <string>

#include "conjproc/errors.hpp"
#include "conjproc/estimate.hpp"
#include "conjproc/harness.hpp"
#include "conjproc/io.hpp"
#include "conjproc/latent.hpp"
#include "conjproc/measure.hpp"
#include "conjproc/mixing.hpp"
#include "conjproc/observe.hpp"
#include "conjproc/spectral.hpp"

namespace conjproc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Context {
  json config;
  fs::path out_dir;
  std::ostream& out;
  std::ostream& err;
};

template <typename T>
T get(const json& section, const char* key) {
  try {
    return section.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

const json& section(const json& config, const char* name) {
  if (!config.contains(name) || !config.at(name).is_object()) {
    throw ConfigError(std::string("config section '") + name + "' is missing");
  }
  return config.at(name);
}

Measure measure_of(const json& config) { return Measure::from_json(section(config, "measure")); }

std::uint64_t seed_of(const json& config) { return get<std::uint64_t>(config, "seed"); }

TwoPointLatentConfig latent_config(const json& config, const json& sec) {
  TwoPointLatentConfig lc{derive_seed(seed_of(config), {stream_tag::kLatent}), std::nullopt};
  if (sec.contains("theta_levels") && !sec.at("theta_levels").is_null()) {
    lc.theta_levels = get<std::vector<double>>(sec, "theta_levels");
  }
  lc.validate();
  return lc;
}

// Simulated per-cycle CDF projections for estimate/spectrum, cycles 0..n−1.
CovKernelGrid estimated_c1(const json& config, const json& sec, const QuadratureGrid& grid) {
  const long n = get<long>(sec, "n");
  if (n < 2) throw ConfigError("estimate.n must be at least 2");
  const bool oracle = get<bool>(sec, "oracle_mode");
  const LatentSequence latent = generate_latent(latent_config(config, sec), n - 1);
  CovKernelGrid c1 = [&] {
    if (oracle) return c1_hat(project(std::span<const LatentState>(latent.states), grid), grid);
    const auto samples = simulate_conjugate(latent, CTMCConfig{get<double>(config, "q0")},
                                            SamplingScheme(get<int>(sec, "q_t")),
                                            derive_seed(seed_of(config), {stream_tag::kObserve}));
    const auto cdfs = empirical_cdfs(samples);
    return c1_hat(std::span<const EmpiricalCDF>(cdfs), grid);
  }();
  c1.provenance = {{"seed", seed_of(config)},
                   {"n", n},
                   {"q_t", get<int>(sec, "q_t")},
                   {"oracle_mode", oracle},
                   {"measure", grid.measure().to_json()}};
  return c1;
}

ExperimentConfig experiment_config(const json& config, const char* name, ExperimentConfig base) {
  json j = section(config, name);
  j["q0"] = config.at("q0");
  j["measure"] = config.at("measure");
  j["master_seed"] = config.at("seed");
  j["workers"] = config.at("workers");
  return ExperimentConfig::from_json(j, base);
}

int cmd_simulate(Context& ctx) {
  const json& sec = section(ctx.config, "simulate");
  const long days = get<long>(sec, "n_days");
  if (days < 1) throw ConfigError("simulate.n_days must be at least 1");
  const LatentSequence latent = generate_latent(latent_config(ctx.config, sec), days - 1);
  const auto paths = simulate_paths(latent, CTMCConfig{get<double>(ctx.config, "q0")},
                                    derive_seed(seed_of(ctx.config), {stream_tag::kObserve}));
  write_file(ctx.out_dir / "path.csv", [&](std::ostream& os) { write_path_csv(os, paths); });
  write_file(ctx.out_dir / "latent.csv", [&](std::ostream& os) { latent.write_csv(os); });
  ctx.out << "wrote " << (ctx.out_dir / "path.csv").string() << " (" << days << " days)\n";
  return kOk;
}

int cmd_estimate(Context& ctx) {
  const json& sec = section(ctx.config, "estimate");
  const QuadratureGrid grid(measure_of(ctx.config), get<int>(sec, "m"));
  const CovKernelGrid c1 = estimated_c1(ctx.config, sec, grid);
  const CovKernelGrid r = r_hat(c1);
  write_file(ctx.out_dir / "c1_hat.csv", [&](std::ostream& os) { c1.write_csv(os); });
  write_file(ctx.out_dir / "r_hat.csv", [&](std::ostream& os) { r.write_csv(os); });
  write_json(ctx.out_dir / "kernels.json",
             {{"config", ctx.config}, {"c1_hat", c1.to_json()}, {"r_hat", r.to_json()},
              {"hs_distance_to_truth", hs_distance(r, r_hat(true_c1_grid(grid)))}});
  ctx.out << "wrote kernels on a " << grid.size() << "-point grid to " << ctx.out_dir.string() << '\n';
  return kOk;
}

int cmd_spectrum(Context& ctx) {
  const json& sec = section(ctx.config, "spectrum");
  const QuadratureGrid grid(measure_of(ctx.config), get<int>(sec, "m"));
  const std::string source = get<std::string>(sec, "source");
  CovKernelGrid kernel = [&] {
    if (source == "true") return r_hat(true_c1_grid(grid));
    if (source == "estimate") return r_hat(estimated_c1(ctx.config, sec, grid));
    throw ConfigError("spectrum.source must be 'true' or 'estimate'");
  }();
  const Spectrum spec = eigendecompose(kernel, JacobiOptions{get<double>(sec, "tol"), 100});

  const double trace = kernel.values.trace() / static_cast<double>(grid.size());
  const double trace_gap = std::abs(spec.eigenvalues.sum() - trace);
  const Eigen::MatrixXd gram =
      spec.eigenfunctions.transpose() * spec.eigenfunctions / static_cast<double>(grid.size());
  const double ortho_gap = (gram - Eigen::MatrixXd::Identity(grid.size(), grid.size())).cwiseAbs().maxCoeff();
  const bool ok = trace_gap <= 1e-9 && ortho_gap <= 1e-8;

  json j = spec.to_json();
  j["config"] = ctx.config;
  j["source"] = source;
  j["kind"] = to_string(kernel.kind);
  j["hs_norm"] = hs_norm(kernel);
  j["checks"] = {{"trace_gap", trace_gap}, {"orthonormality_gap", ortho_gap}, {"passed", ok}};
  write_json(ctx.out_dir / "spectrum.json", j);
  ctx.out << "leading eigenvalue " << spec.eigenvalues[0] << ", second "
          << (spec.size() > 1 ? spec.eigenvalues[1] : 0.0) << '\n';
  if (!ok) ctx.err << "spectrum consistency checks failed\n";
  return ok ? kOk : kCheckFailed;
}

int cmd_mixing(Context& ctx) {
  const json& sec = section(ctx.config, "mixing");
  const FiniteConjugateModel model = FiniteConjugateModel::from_json(sec);
  const MixingReport report =
      mixing_report(model, get<std::vector<int>>(sec, "k_values"), get<std::vector<int>>(sec, "w_values"),
                    get<int>(sec, "factorization_trials"), seed_of(ctx.config));
  json j = report.to_json(model);
  j["config"] = ctx.config;
  write_json(ctx.out_dir / "mixing.json", j);
  const bool ok = report.inheritance_holds() && report.factorization_max_abs_gap < 1e-12;
  ctx.out << "psi inheritance " << (report.inheritance_holds() ? "holds" : "VIOLATED")
          << ", factorization gap " << report.factorization_max_abs_gap << '\n';
  if (!ok) ctx.err << "mixing checks failed\n";
  return ok ? kOk : kCheckFailed;
}

int cmd_montecarlo(Context& ctx) {
  const ExperimentConfig config = experiment_config(ctx.config, "montecarlo", ExperimentConfig::c1_defaults());
  const C1Experiment result = run_c1_experiment(config);
  write_file(ctx.out_dir / "c1_replications.csv",
             [&](std::ostream& os) { result.write_replications_csv(os); });
  json j = result.summary_json();
  j["run_config"] = ctx.config;
  write_json(ctx.out_dir / "c1_summary.json", j);
  for (const auto& s : result.summaries) {
    ctx.out << "n=" << s.n << " mean=" << s.mean << " sd=" << s.std_dev << " median=" << s.median << '\n';
  }
  return kOk;
}

int cmd_rate(Context& ctx) {
  const ExperimentConfig config = experiment_config(ctx.config, "rate", ExperimentConfig::rate_defaults());
  const RateExperiment result = run_rate_experiment(config);
  write_file(ctx.out_dir / "rate_replications.csv",
             [&](std::ostream& os) { result.write_replications_csv(os); });
  json j = result.summary_json();
  j["run_config"] = ctx.config;
  write_json(ctx.out_dir / "rate_summary.json", j);
  ctx.out << to_string(config.experiment) << " slope=" << result.fit().slope
          << " r2=" << result.fit().r_squared << '\n';
  return kOk;
}

}  // namespace

json default_config() {
  return json::parse(R"({
    "seed": 20240501,
    "measure": {"name": "logistic", "location": 0.5, "scale": 1.0},
    "q0": 10.0,
    "workers": 0,
    "simulate": {"n_days": 4, "theta_levels": null},
    "estimate": {"n": 1000, "q_t": 1, "m": 256, "oracle_mode": false, "theta_levels": null},
    "spectrum": {"source": "true", "m": 256, "tol": 1e-12,
                 "n": 1000, "q_t": 1, "oracle_mode": false, "theta_levels": null},
    "mixing": {"theta_levels": [0.25, 0.75], "theta_probs": [0.5, 0.5], "moving_average": true,
               "k_values": [1, 2, 3], "w_values": [1, 2, 3], "factorization_trials": 100},
    "montecarlo": {"n_values": [100, 1000, 10000], "replications": 1000, "q_t": 1, "m": 256},
    "rate": {"experiment": "rate_hs", "n_values": [250, 1000, 4000, 16000], "replications": 200,
             "m": 64, "q_t": 1, "oracle_mode": true}
  })");
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  std::string pointer;
  const std::string key = assignment.substr(0, eq);
  std::size_t start = 0;
  while (start <= key.size()) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
    pointer += "/" + part;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  j[json::json_pointer(pointer)] = std::move(value);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("conjproc");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation and covariance-operator estimation for conjugate processes"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool full = false;
  std::vector<std::string> overrides;

  const std::vector<std::pair<const char*, const char*>> commands = {
      {"simulate", "Simulate sample paths of the example model (time, state, day_index CSV)"},
      {"estimate", "Estimate the lag-1 covariance kernel and the operator kernel on a grid"},
      {"spectrum", "Eigendecompose the true or estimated operator"},
      {"mixing", "Exact psi-mixing coefficients of the discretized model"},
      {"montecarlo", "Replicate C1_hat(0,0) across sample sizes (boxplot data)"},
      {"rate", "Monte Carlo convergence-rate fit for the operator estimator"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
  }
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--workers", workers, "Worker threads for Monte Carlo (0 = auto)");
  app.add_flag("--full", full, "Use the full-scale replication count for montecarlo");
  app.add_option("--set", overrides, "Override a config value, e.g. --set montecarlo.replications=50");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kInvalidConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    json config = default_config();
    if (!config_path.empty()) config.merge_patch(read_json(config_path));
    for (const auto& o : overrides) apply_override(config, o);
    if (seed) config["seed"] = *seed;
    if (workers) config["workers"] = *workers;
    if (full) config["montecarlo"]["replications"] = 10000;

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory '" + out_dir + "'");
    Context ctx{config, fs::path(out_dir), out, err};
    write_json(ctx.out_dir / (command + "_config.json"), config);

    if (command == "simulate") return cmd_simulate(ctx);
    if (command == "estimate") return cmd_estimate(ctx);
    if (command == "spectrum") return cmd_spectrum(ctx);
    if (command == "mixing") return cmd_mixing(ctx);
    if (command == "montecarlo") return cmd_montecarlo(ctx);
    return cmd_rate(ctx);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const UsageError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const json::exception& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const ResourceError& e) {
    err << "enumeration too large: " << e.what() << '\n';
    return kNumericFailure;
  }
}

}  // namespace conjproc::cli

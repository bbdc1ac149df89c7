#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "conjproc/errors.hpp"
#include "conjproc/harness.hpp"

namespace conjproc {
namespace {

TEST(Summarize, SingleValue) {
  const SummaryStats s = summarize({0.3}, 10);
  EXPECT_EQ(s.count, 1u);
  EXPECT_EQ(s.n, 10);
  EXPECT_DOUBLE_EQ(s.mean, 0.3);
  EXPECT_EQ(s.std_dev, 0.0);
  EXPECT_EQ(s.std_error, 0.0);
  EXPECT_DOUBLE_EQ(s.q1, 0.3);
  EXPECT_DOUBLE_EQ(s.median, 0.3);
  EXPECT_DOUBLE_EQ(s.q3, 0.3);
  EXPECT_DOUBLE_EQ(s.whisker_low, 0.3);
  EXPECT_DOUBLE_EQ(s.whisker_high, 0.3);
}

TEST(Summarize, QuartilesAndWhiskers) {
  SummaryStats s = summarize({5, 3, 1, 4, 2}, 5);
  EXPECT_DOUBLE_EQ(s.q1, 2.0);
  EXPECT_DOUBLE_EQ(s.median, 3.0);
  EXPECT_DOUBLE_EQ(s.q3, 4.0);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_DOUBLE_EQ(s.std_dev, std::sqrt(2.5));
  EXPECT_DOUBLE_EQ(s.std_error, std::sqrt(2.5 / 5.0));

  s = summarize({1, 2, 3, 4, 100}, 5);  // IQR 2, upper fence 7
  EXPECT_DOUBLE_EQ(s.whisker_high, 4.0);
  EXPECT_DOUBLE_EQ(s.whisker_low, 1.0);
  EXPECT_DOUBLE_EQ(s.max, 100.0);

  s = summarize({1, 2, 3, 4}, 4);  // type 7: q1 = 1.75, q3 = 3.25
  EXPECT_DOUBLE_EQ(s.q1, 1.75);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.q3, 3.25);
  EXPECT_THROW(summarize({}, 1), UsageError);
}

TEST(FitRate, ExactPowerLaw) {
  const std::vector<long> ns{100, 400, 1600, 6400};
  std::vector<double> rmse;
  for (long n : ns) rmse.push_back(3.0 * std::pow(static_cast<double>(n), -0.5));
  const RateFit f = fit_rate(ns, rmse);
  EXPECT_NEAR(f.slope, -0.5, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
}

TEST(FitRate, Errors) {
  EXPECT_THROW(fit_rate({1, 2}, {1.0, 0.5}), UsageError);
  EXPECT_THROW(fit_rate({1, 2, 3}, {1.0, 0.5}), UsageError);
  try {
    fit_rate({10, 20, 40}, {1.0, 0.0, 0.5});
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("n = 20"), std::string::npos);
  }
  EXPECT_THROW(fit_rate({10, 20, 40}, {1.0, NAN, 0.5}), NumericError);
}

TEST(ParallelFor, VisitsEachIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  parallel_for(0, 4, [&](std::size_t) { FAIL(); });
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(50, 3,
                            [](std::size_t i) {
                              if (i == 17) throw NumericError("boom");
                            }),
               NumericError);
}

ExperimentConfig small_c1() {
  ExperimentConfig c;
  c.n_values = {20, 80};
  c.replications = 12;
  c.m = 16;
  return c;
}

TEST(C1Experiment, DegenerateSingleReplication) {
  ExperimentConfig c = small_c1();
  c.replications = 1;
  const C1Experiment e = run_c1_experiment(c);
  ASSERT_EQ(e.summaries.size(), 2u);
  for (const auto& s : e.summaries) {
    EXPECT_EQ(s.std_dev, 0.0);
    EXPECT_EQ(s.q1, s.q3);
  }
  EXPECT_DOUBLE_EQ(e.reference, 1.0 / 48.0);
}

TEST(C1Experiment, ResultsIndependentOfWorkerCount) {
  ExperimentConfig c = small_c1();
  c.workers = 1;
  const C1Experiment one = run_c1_experiment(c);
  c.workers = 3;
  const C1Experiment three = run_c1_experiment(c);
  EXPECT_EQ(one.values, three.values);
  std::ostringstream a, b;
  one.write_replications_csv(a);
  three.write_replications_csv(b);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, 12), "n,rep,value\n");
}

TEST(C1Experiment, ReplicationMatchesStandalone) {
  const ExperimentConfig c = small_c1();
  const C1Experiment e = run_c1_experiment(c);
  EXPECT_EQ(e.values[1][5], c1_origin_replication(c, 80, 5));
  EXPECT_NE(replication_seed(c, 80, 5), replication_seed(c, 80, 6));
  EXPECT_NE(replication_seed(c, 20, 5), replication_seed(c, 80, 5));
  const auto j = e.summary_json();
  EXPECT_EQ(j.at("summaries").size(), 2u);
  EXPECT_DOUBLE_EQ(j.at("reference_value").get<double>(), 1.0 / 48.0);
  EXPECT_EQ(j.at("config").at("replications"), 12);
}

TEST(RateExperiment, SmallRunShapesAndTarget) {
  ExperimentConfig c = ExperimentConfig::rate_defaults(ExperimentKind::RateEigen);
  c.n_values = {50, 100, 200};
  c.replications = 4;
  c.m = 16;
  const RateExperiment r = run_rate_experiment(c);
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_EQ(&r.fit(), &r.fit_theta1);
  const double mass = 4.0 / 16.0;  // logistic grid points in [0,1) at m = 16
  EXPECT_NEAR(r.theta1, std::pow(mass / 48.0, 2), 1e-18);
  for (const auto& p : r.points) {
    EXPECT_GT(p.rmse_hs, 0.0);
    EXPECT_GE(p.rmse_sup + 1e-18, p.rmse_theta1);
  }
  std::ostringstream os;
  r.write_replications_csv(os);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "n,rep,hs_distance,theta1_gap,sup_eigenvalue_gap,psi1_gap");
}

TEST(ExperimentConfig, ValidationAndJson) {
  ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.n_values = {100, 50};
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.replications = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = ExperimentConfig{};
  c.q0 = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(experiment_from_string("nope"), ConfigError);
  EXPECT_EQ(experiment_from_string("rate_eigen"), ExperimentKind::RateEigen);

  const ExperimentConfig rt = ExperimentConfig::rate_defaults();
  const ExperimentConfig back = ExperimentConfig::from_json(rt.to_json(), ExperimentConfig{});
  EXPECT_EQ(back.n_values, rt.n_values);
  EXPECT_EQ(back.m, 64);
  EXPECT_TRUE(back.oracle_mode);
  EXPECT_THROW(ExperimentConfig::from_json({{"replications", "many"}}, ExperimentConfig{}), ConfigError);

  ExperimentConfig rate = ExperimentConfig::rate_defaults();
  rate.n_values = {100, 200};
  EXPECT_THROW(run_rate_experiment(rate), UsageError);
  EXPECT_THROW(run_rate_experiment(ExperimentConfig{}), ConfigError);
}

}  // namespace
}  // namespace conjproc

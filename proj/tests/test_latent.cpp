#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "conjproc/errors.hpp"
#include "conjproc/latent.hpp"

namespace conjproc {
namespace {

std::vector<double> xi0_series(const LatentSequence& seq) {
  std::vector<double> out;
  for (const auto& s : seq.states) out.push_back(s.masses[0]);
  return out;
}

double mean(const std::vector<double>& x, std::size_t begin, std::size_t end) {
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += x[i];
  return s / static_cast<double>(end - begin);
}

// Sample autocovariance at lag k with the overall mean.
double autocov(const std::vector<double>& x, std::size_t k) {
  const double mu = mean(x, 0, x.size());
  double s = 0.0;
  for (std::size_t t = 0; t + k < x.size(); ++t) s += (x[t] - mu) * (x[t + k] - mu);
  return s / static_cast<double>(x.size());
}

TEST(GenerateLatent, DegenerateLevelsGiveUnitMass) {
  const LatentSequence seq = generate_latent({42, std::vector<double>{1.0}}, 20);
  ASSERT_EQ(seq.size(), 21u);
  ASSERT_EQ(seq.theta_draws.size(), 22u);
  for (const auto& s : seq.states) {
    EXPECT_EQ(s.masses[0], 1.0);
    EXPECT_EQ(s.masses[1], 0.0);
    EXPECT_NO_THROW(s.validate());
  }
}

TEST(GenerateLatent, MassAtZeroIsAverageOfAdjacentThetas) {
  const LatentSequence seq = generate_latent({3, std::vector<double>{0.0, 1.0}}, 200);
  bool saw_midpoint = false;
  for (long t = 0; t < static_cast<long>(seq.size()); ++t) {
    EXPECT_EQ(seq.mass_at_zero(t), 0.5 * (seq.theta(t - 1) + seq.theta(t)));
    EXPECT_EQ(seq.states[static_cast<std::size_t>(t)].cycle_index, t);
    if (seq.theta(t - 1) == 0.0 && seq.theta(t) == 1.0) {
      EXPECT_EQ(seq.mass_at_zero(t), 0.5);
      saw_midpoint = true;
    }
  }
  EXPECT_TRUE(saw_midpoint);
}

TEST(GenerateLatent, SampleMeanNearOneHalf) {
  const LatentSequence seq = generate_latent({2024, std::nullopt}, 100000);
  const auto x = xi0_series(seq);
  EXPECT_NEAR(mean(x, 0, x.size()), 0.5, 0.005);
}

TEST(GenerateLatent, StationaryAcrossWindows) {
  const long n = 100000;
  const auto x = xi0_series(generate_latent({99, std::nullopt}, n));
  const std::size_t half = x.size() / 2;
  auto window_var = [&](std::size_t b, std::size_t e) {
    const double mu = mean(x, b, e);
    double s = 0.0;
    for (std::size_t i = b; i < e; ++i) s += (x[i] - mu) * (x[i] - mu);
    return s / static_cast<double>(e - b - 1);
  };
  // Var ξ_t({0}) = 1/24 and lag-1 covariance 1/48, so the long-run variance
  // of a window mean is (1/24 + 2/48)/len.
  const double se_mean = std::sqrt(2.0 * (1.0 / 12.0) / static_cast<double>(half));
  EXPECT_NEAR(mean(x, 0, half), mean(x, half, x.size()), 3.0 * se_mean);
  // ξ_t({0}) is triangular on [0, 1]: fourth central moment 1/240 → Var(s²) ≈ (1/240 − 1/576)/len,
  // doubled for the lag-1 dependence.
  const double se_var = std::sqrt(2.0 * 2.0 * (1.0 / 240.0 - 1.0 / 576.0) / static_cast<double>(half));
  EXPECT_NEAR(window_var(0, half), window_var(half, x.size()), 3.0 * se_var);
}

TEST(GenerateLatent, OneDependent) {
  const long n = 200000;
  const auto x = xi0_series(generate_latent({5, std::nullopt}, n));
  const double c0 = autocov(x, 0);
  EXPECT_NEAR(c0, 1.0 / 24.0, 0.002);
  // Exact lag-1 correlation: (Var ϑ / 4) / (Var ϑ / 2) = 1/2. Bartlett
  // variances for an MA(1) with ρ₁ = 1/2: lag 1 (1 − 3ρ² + 4ρ⁴)/n, lag k ≥ 2 (1 + 2ρ²)/n.
  const double nd = static_cast<double>(x.size());
  EXPECT_NEAR(autocov(x, 1) / c0, 0.5, 3.0 * std::sqrt(0.5 / nd));
  for (std::size_t k = 2; k <= 5; ++k) {
    EXPECT_NEAR(autocov(x, k) / c0, 0.0, 3.0 * std::sqrt(1.5 / nd)) << "lag " << k;
  }
}

TEST(GenerateLatent, ReproducibleAndPrefixStable) {
  const TwoPointLatentConfig cfg{123, std::nullopt};
  const LatentSequence a = generate_latent(cfg, 500);
  const LatentSequence b = generate_latent(cfg, 500);
  EXPECT_EQ(a.theta_draws, b.theta_draws);
  EXPECT_EQ(xi0_series(a), xi0_series(b));

  const LatentSequence longer = generate_latent(cfg, 900);
  for (long t = -1; t <= 500; ++t) EXPECT_EQ(a.theta(t), longer.theta(t));

  const LatentSequence other = generate_latent({124, std::nullopt}, 500);
  EXPECT_NE(a.theta_draws, other.theta_draws);
}

TEST(GenerateLatent, RejectsInvalidInput) {
  EXPECT_THROW(generate_latent({1, std::vector<double>{}}, 3), ConfigError);
  EXPECT_THROW(generate_latent({1, std::vector<double>{0.5, 1.5}}, 3), ConfigError);
  EXPECT_THROW(generate_latent({1, std::nullopt}, 0), UsageError);
}

TEST(LatentState, CdfAndValidation) {
  const LatentState s = LatentState::two_point(0.3, 0);
  EXPECT_EQ(s.cdf(-0.1), 0.0);
  EXPECT_DOUBLE_EQ(s.cdf(0.0), 0.3);
  EXPECT_DOUBLE_EQ(s.cdf(0.99), 0.3);
  EXPECT_EQ(s.cdf(1.0), 1.0);
  EXPECT_DOUBLE_EQ(s.mass_at(1.0), 0.7);
  EXPECT_EQ(s.mass_at(0.5), 0.0);
  EXPECT_THROW(LatentState::two_point(1.2, 0), UsageError);
  EXPECT_THROW((LatentState{{1.0, 0.0}, {0.5, 0.5}, 0}.validate()), UsageError);
  EXPECT_THROW((LatentState{{0.0, 1.0}, {0.5, 0.6}, 0}.validate()), UsageError);
}

TEST(TrueKernels, LagOneCovariance) {
  EXPECT_DOUBLE_EQ(true_c1(0.0, 0.0), 1.0 / 48.0);
  EXPECT_NEAR(true_c1(0.0, 0.0), 0.0208333, 1e-7);
  EXPECT_EQ(true_c1(1.5, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(true_c1(0.3, 0.9), 1.0 / 48.0);
  EXPECT_EQ(true_c1(1.0, 0.5), 0.0);
  EXPECT_EQ(true_c1(-1e-9, 0.5), 0.0);
}

TEST(TrueKernels, OperatorKernel) {
  const Measure mu = Measure::logistic(0.5, 1.0);
  const double expected =
      (1.0 / 48.0) * (1.0 / 48.0) * (1.0 / (1.0 + std::exp(-0.5)) - 1.0 / (1.0 + std::exp(0.5)));
  EXPECT_NEAR(true_r_kernel(0.2, 0.7, mu), expected, 1e-18);
  EXPECT_NEAR(true_r_kernel(0.2, 0.7, mu), 0.00010630150277938766, 1e-18);
  EXPECT_EQ(true_r_kernel(2.0, 0.5, mu), 0.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    const double y = u(rng);
    EXPECT_EQ(true_r_kernel(x, y, mu), true_r_kernel(y, x, mu));
  }
}

TEST(LatentSequence, CsvLayout) {
  const LatentSequence seq = generate_latent({1, std::vector<double>{0.0, 1.0}}, 2);
  std::ostringstream os;
  seq.write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,theta_prev,theta,xi0");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

}  // namespace
}  // namespace conjproc

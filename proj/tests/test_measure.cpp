#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "conjproc/errors.hpp"
#include "conjproc/measure.hpp"

namespace conjproc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// μ([0,1)) under logistic(0.5, 1): 1/(1+e^{−1/2}) − 1/(1+e^{1/2}).
const double kLogisticUnitMass = 1.0 / (1.0 + std::exp(-0.5)) - 1.0 / (1.0 + std::exp(0.5));

GridFunction unit_indicator(const QuadratureGrid& grid) {
  return tabulate(grid, [](double z) { return (z >= 0.0 && z < 1.0) ? 1.0 : 0.0; });
}

TEST(BuildGrid, UniformMidpoints) {
  const QuadratureGrid grid = build_grid(Measure::uniform(), 2);
  ASSERT_EQ(grid.size(), 2);
  EXPECT_DOUBLE_EQ(grid[0], 0.25);
  EXPECT_DOUBLE_EQ(grid[1], 0.75);
  EXPECT_DOUBLE_EQ(grid.weight(), 0.5);
}

TEST(BuildGrid, LogisticMedianAndSymmetry) {
  EXPECT_DOUBLE_EQ(build_grid(Measure::logistic(0.5, 1.0), 1)[0], 0.5);

  // Frozen from 0.5 + ln(u/(1−u)), u = 1/8, 3/8, 5/8, 7/8.
  const QuadratureGrid grid = build_grid(Measure::logistic(0.5, 1.0), 4);
  EXPECT_NEAR(grid[0], -1.4459101490553135, 1e-14);
  EXPECT_NEAR(grid[1], -0.010825623765990722, 1e-14);
  EXPECT_NEAR(grid[2], 1.0108256237659907, 1e-14);
  EXPECT_NEAR(grid[3], 2.4459101490553135, 1e-14);
  EXPECT_NEAR(grid[0] + grid[3], 1.0, 1e-14);
  EXPECT_NEAR(grid[1] + grid[2], 1.0, 1e-14);
}

TEST(BuildGrid, PointsStrictlyIncreasing) {
  for (const Measure& mu : {Measure::logistic(), Measure::gaussian(), Measure::uniform(-2, 3)}) {
    const QuadratureGrid grid = build_grid(mu, 512);
    for (int i = 1; i < grid.size(); ++i) EXPECT_LT(grid[i - 1], grid[i]) << mu.name();
  }
}

TEST(BuildGrid, RejectsBadSizeAndNonFiniteQuantile) {
  EXPECT_THROW(build_grid(Measure::logistic(), 0), ConfigError);
  try {
    build_grid(Measure::logistic(0.0, 1e308), 8);
    FAIL() << "expected a configuration error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("grid index 1"), std::string::npos) << e.what();
  }
}

TEST(Integrate, ConstantsAreExact) {
  const Measure mu = Measure::logistic();
  for (int m = 1; m <= 300; ++m) {
    const QuadratureGrid grid = build_grid(mu, m);
    for (double c : {1.0, 0.0, -3.0, 0.5, 7.25}) {
      EXPECT_EQ(integrate(GridFunction::Constant(m, c), grid), c) << "m=" << m;
    }
  }
}

TEST(Integrate, IndicatorMatchesClosedForm) {
  const QuadratureGrid grid = build_grid(Measure::logistic(), 4096);
  EXPECT_NEAR(integrate(unit_indicator(grid), grid), kLogisticUnitMass, 1e-3);
}

TEST(Integrate, ConvergesInGridSize) {
  const Measure mu = Measure::logistic();
  double previous = kInf;
  for (int m : {1 << 6, 1 << 8, 1 << 10, 1 << 12}) {
    const QuadratureGrid grid = build_grid(mu, m);
    const double err = std::abs(integrate(unit_indicator(grid), grid) - measure_mass(mu, 0.0, 1.0));
    EXPECT_LE(err, previous * 1.1) << "m=" << m;
    previous = err;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(Integrate, LengthMismatchIsUsageError) {
  const QuadratureGrid grid = build_grid(Measure::logistic(), 4);
  EXPECT_THROW(integrate(GridFunction::Ones(3), grid), UsageError);
  EXPECT_THROW(inner_product(GridFunction::Ones(4), GridFunction::Ones(5), grid), UsageError);
}

TEST(InnerProduct, Examples) {
  const QuadratureGrid grid = build_grid(Measure::logistic(), 4096);
  const GridFunction one = GridFunction::Ones(grid.size());
  EXPECT_EQ(inner_product(one, one, grid), 1.0);
  EXPECT_EQ(inner_product(one, -one, grid), -1.0);
  const GridFunction ind = unit_indicator(grid);
  EXPECT_NEAR(inner_product(ind, ind, grid), kLogisticUnitMass, 1e-3);
}

TEST(InnerProduct, CauchySchwarz) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 64);
    const QuadratureGrid grid = build_grid(Measure::gaussian(), m);
    GridFunction f(m), g(m);
    for (int i = 0; i < m; ++i) {
      f[i] = normal(rng);
      g[i] = normal(rng);
    }
    const double fg = inner_product(f, g, grid);
    EXPECT_LE(fg * fg, inner_product(f, f, grid) * inner_product(g, g, grid) * (1 + 1e-12));
  }
}

TEST(MeasureMass, Examples) {
  const Measure mu = Measure::logistic(0.5, 1.0);
  EXPECT_EQ(measure_mass(mu, -kInf, kInf), 1.0);
  EXPECT_NEAR(measure_mass(mu, 0.0, 1.0), 0.2449186624037092, 1e-15);
  EXPECT_EQ(measure_mass(mu, 0.3, 0.3), 0.0);
  EXPECT_THROW(measure_mass(mu, 1.0, 0.0), UsageError);
}

TEST(Measure, CdfQuantileDensityInvariants) {
  for (const Measure& mu : {Measure::logistic(), Measure::gaussian(), Measure::logistic(-1, 0.3)}) {
    double previous = 0.0;
    for (double x = -20.0; x <= 20.0; x += 0.05) {
      const double f = mu.cdf(x);
      EXPECT_GE(f, previous) << mu.name();
      EXPECT_GE(mu.density(x), 0.0);
      previous = f;
    }
    EXPECT_EQ(mu.cdf(-kInf), 0.0);
    EXPECT_EQ(mu.cdf(kInf), 1.0);
    EXPECT_LT(mu.cdf(-40.0), 1e-12);
    EXPECT_GT(mu.cdf(40.0), 1.0 - 1e-12);
    for (double x = -5.0; x <= 5.0; x += 0.125) {
      // Rounding of the cdf near 0 or 1 is amplified by 1/density.
      EXPECT_NEAR(mu.quantile(mu.cdf(x)), x, 1e-9 + 1e-15 / mu.density(x)) << mu.name() << " x=" << x;
    }
  }
}

TEST(Measure, JsonRoundTripAndErrors) {
  const Measure mu = Measure::from_json({{"name", "logistic"}, {"location", 0.5}, {"scale", 1.0}});
  EXPECT_EQ(mu, Measure::logistic(0.5, 1.0));
  EXPECT_EQ(Measure::from_json(mu.to_json()), mu);
  EXPECT_EQ(Measure::from_json(Measure::gaussian(1, 2).to_json()), Measure::gaussian(1, 2));
  EXPECT_THROW(Measure::from_json({{"name", "cauchy"}}), ConfigError);
  EXPECT_THROW(Measure::from_json({{"name", "logistic"}, {"scale", -1.0}}), ConfigError);
  EXPECT_THROW(Measure::from_json({{"name", "logistic"}, {"scale", "wide"}}), ConfigError);
}

}  // namespace
}  // namespace conjproc

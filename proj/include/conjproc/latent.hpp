#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "conjproc/measure.hpp"

namespace conjproc {

/// A finitely supported probability measure ξ_t.
struct LatentState {
  std::vector<double> support;  // strictly increasing
  std::vector<double> masses;
  long cycle_index = 0;

  /// F_t(x) = ξ_t((−∞, x]).
  double cdf(double x) const;
  /// Mass at a support point, 0 if x is not in the support.
  double mass_at(double x) const;

  static LatentState two_point(double mass_at_zero, long cycle_index);
  void validate() const;
};

struct TwoPointLatentConfig {
  std::uint64_t seed = 0;
  /// Finite alphabet for ϑ, drawn uniformly; empty optional means ϑ ~ U[0, 1].
  std::optional<std::vector<double>> theta_levels;

  void validate() const;
};

/// ξ_t = (η_{t−1} + η_t)/2 with η_t = ϑ_t δ_0 + (1 − ϑ_t) δ_1, for t = 0..n.
struct LatentSequence {
  std::vector<LatentState> states;   // t = 0..n
  std::vector<double> theta_draws;   // ϑ_{−1}..ϑ_n

  std::size_t size() const { return states.size(); }
  double theta(long t) const { return theta_draws.at(static_cast<std::size_t>(t + 1)); }
  /// ξ_t({0}).
  double mass_at_zero(long t) const { return states.at(static_cast<std::size_t>(t)).masses[0]; }

  /// CSV with columns t, theta_prev, theta, xi0.
  void write_csv(std::ostream& os) const;
};

/// ϑ_t from its own stream derived from (seed, t); independent of n.
double draw_theta(const TwoPointLatentConfig& config, long t);

LatentSequence generate_latent(const TwoPointLatentConfig& config, long n);

inline constexpr double kTrueC1 = 1.0 / 48.0;

/// Cov(F_0(x), F_1(y)) for the two-point example: 1/48 on [0,1)², else 0.
double true_c1(double x, double y);

/// R_μ(x, y) = ∫ C_1(x, z) C_1(y, z) μ(dz) = (1/48)² μ([0,1)) on [0,1)², else 0.
double true_r_kernel(double x, double y, const Measure& measure);

}  // namespace conjproc

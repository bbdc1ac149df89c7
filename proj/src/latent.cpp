#include "conjproc/latent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "conjproc/errors.hpp"
#include "conjproc/rng.hpp"

namespace conjproc {

namespace {

bool in_unit_interval(double x) { return x >= 0.0 && x < 1.0; }

}  // namespace

double LatentState::cdf(double x) const {
  double total = 0.0;
  for (std::size_t i = 0; i < support.size() && support[i] <= x; ++i) total += masses[i];
  return std::min(total, 1.0);
}

double LatentState::mass_at(double x) const {
  auto it = std::lower_bound(support.begin(), support.end(), x);
  if (it == support.end() || *it != x) return 0.0;
  return masses[static_cast<std::size_t>(it - support.begin())];
}

LatentState LatentState::two_point(double mass_at_zero, long cycle_index) {
  if (!(mass_at_zero >= 0.0 && mass_at_zero <= 1.0)) {
    throw UsageError("mass at 0 must lie in [0, 1]");
  }
  return LatentState{{0.0, 1.0}, {mass_at_zero, 1.0 - mass_at_zero}, cycle_index};
}

void LatentState::validate() const {
  if (support.empty() || support.size() != masses.size()) {
    throw UsageError("latent state needs matching, nonempty support and masses");
  }
  for (std::size_t i = 1; i < support.size(); ++i) {
    if (!(support[i] > support[i - 1])) throw UsageError("latent support must be strictly increasing");
  }
  double total = 0.0;
  for (double w : masses) {
    if (!(w >= 0.0)) throw UsageError("latent masses must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw UsageError("latent masses must sum to 1");
}

void TwoPointLatentConfig::validate() const {
  if (!theta_levels) return;
  if (theta_levels->empty()) throw ConfigError("theta_levels must be nonempty when given");
  for (double v : *theta_levels) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("theta_levels must lie in [0, 1]");
  }
}

double draw_theta(const TwoPointLatentConfig& config, long t) {
  SplitMix64 rng(derive_seed(config.seed, {stream_tag::kTheta, static_cast<std::uint64_t>(t)}));
  const double u = uniform01(rng);
  if (!config.theta_levels) return u;
  const auto& levels = *config.theta_levels;
  auto idx = static_cast<std::size_t>(u * static_cast<double>(levels.size()));
  return levels[std::min(idx, levels.size() - 1)];
}

LatentSequence generate_latent(const TwoPointLatentConfig& config, long n) {
  config.validate();
  if (n < 1) throw UsageError("generate_latent needs n >= 1, got " + std::to_string(n));
  LatentSequence seq;
  seq.theta_draws.reserve(static_cast<std::size_t>(n + 2));
  for (long t = -1; t <= n; ++t) seq.theta_draws.push_back(draw_theta(config, t));
  seq.states.reserve(static_cast<std::size_t>(n + 1));
  for (long t = 0; t <= n; ++t) {
    const double p0 = 0.5 * (seq.theta(t - 1) + seq.theta(t));
    seq.states.push_back(LatentState::two_point(p0, t));
  }
  return seq;
}

void LatentSequence::write_csv(std::ostream& os) const {
  os << "t,theta_prev,theta,xi0\n";
  os.precision(17);
  for (const auto& s : states) {
    const long t = s.cycle_index;
    os << t << ',' << theta(t - 1) << ',' << theta(t) << ',' << s.masses[0] << '\n';
  }
}

double true_c1(double x, double y) {
  return (in_unit_interval(x) && in_unit_interval(y)) ? kTrueC1 : 0.0;
}

double true_r_kernel(double x, double y, const Measure& measure) {
  if (!(in_unit_interval(x) && in_unit_interval(y))) return 0.0;
  // μ([0,1)) = μ((0,1]) since μ is atomless.
  return kTrueC1 * kTrueC1 * measure_mass(measure, 0.0, 1.0);
}

}  // namespace conjproc

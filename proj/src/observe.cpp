#include "conjproc/observe.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "conjproc/errors.hpp"

namespace conjproc {

namespace {

double exponential(SplitMix64& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

}  // namespace

void CTMCConfig::validate() const {
  if (!(q0 > 0.0) || !std::isfinite(q0)) throw ConfigError("q0 must be a positive finite rate");
}

int PathSegment::value_at(double tau) const {
  auto it = std::upper_bound(jump_times.begin(), jump_times.end(), tau);
  return states[static_cast<std::size_t>(it - jump_times.begin())];
}

void PathSegment::validate() const {
  if (states.size() != jump_times.size() + 1) throw UsageError("path needs one more state than jumps");
  if (states.front() != initial_state) throw UsageError("path does not start at its initial state");
  for (std::size_t k = 0; k < jump_times.size(); ++k) {
    if (!(jump_times[k] > 0.0 && jump_times[k] < 1.0)) throw UsageError("jump time outside (0, 1)");
    if (k > 0 && !(jump_times[k] > jump_times[k - 1])) throw UsageError("jump times not increasing");
  }
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (states[k] != 0 && states[k] != 1) throw UsageError("path state must be 0 or 1");
    if (k > 0 && states[k] == states[k - 1]) throw UsageError("path states must alternate");
  }
}

SamplingScheme::SamplingScheme(int samples_per_cycle) : q_(samples_per_cycle) {
  if (q_ < 1) throw ConfigError("samples per cycle must be positive");
  offsets_.reserve(static_cast<std::size_t>(q_));
  for (int i = 0; i < q_; ++i) offsets_.push_back(static_cast<double>(i) / static_cast<double>(q_));
}

double return_rate(double mass_at_zero, const CTMCConfig& config) {
  return config.q0 * mass_at_zero / (1.0 - mass_at_zero);
}

PathSegment simulate_segment(const LatentState& state, const CTMCConfig& config, SplitMix64& rng) {
  config.validate();
  if (state.support.size() != 2 || state.support[0] != 0.0 || state.support[1] != 1.0) {
    throw UsageError("simulate_segment needs a latent state supported on {0, 1}");
  }
  const double p0 = state.masses[0];
  const double p1 = state.masses[1];

  PathSegment seg;
  seg.cycle_index = state.cycle_index;
  if (p1 < kDegenerateMass || p0 < kDegenerateMass) {
    seg.initial_state = p1 < kDegenerateMass ? 0 : 1;
    seg.states.push_back(seg.initial_state);
    return seg;
  }

  const double rates[2] = {config.q0, return_rate(p0, config)};
  int current = uniform01(rng) < p0 ? 0 : 1;
  seg.initial_state = current;
  seg.states.push_back(current);
  double clock = 0.0;
  for (;;) {
    clock += exponential(rng, rates[current]);
    if (clock >= 1.0) break;
    current = 1 - current;
    seg.jump_times.push_back(clock);
    seg.states.push_back(current);
  }
  return seg;
}

std::vector<double> sample_segment(const PathSegment& segment, const SamplingScheme& scheme) {
  std::vector<double> out;
  out.reserve(scheme.offsets().size());
  for (double tau : scheme.offsets()) out.push_back(static_cast<double>(segment.value_at(tau)));
  return out;
}

SplitMix64 cycle_stream(std::uint64_t seed, long cycle_index) {
  return SplitMix64(
      derive_seed(seed, {stream_tag::kCycle, static_cast<std::uint64_t>(cycle_index)}));
}

std::vector<PathSegment> simulate_paths(const LatentSequence& latent, const CTMCConfig& config,
                                        std::uint64_t seed) {
  std::vector<PathSegment> out;
  out.reserve(latent.size());
  for (const auto& state : latent.states) {
    SplitMix64 rng = cycle_stream(seed, state.cycle_index);
    out.push_back(simulate_segment(state, config, rng));
  }
  return out;
}

std::vector<std::vector<double>> simulate_conjugate(const LatentSequence& latent,
                                                    const CTMCConfig& config,
                                                    const SamplingScheme& scheme,
                                                    std::uint64_t seed) {
  std::vector<std::vector<double>> out;
  out.reserve(latent.size());
  for (const auto& state : latent.states) {
    SplitMix64 rng = cycle_stream(seed, state.cycle_index);
    out.push_back(sample_segment(simulate_segment(state, config, rng), scheme));
  }
  return out;
}

void write_path_csv(std::ostream& os, const std::vector<PathSegment>& segments) {
  os << "time,state,day_index\n";
  os.precision(17);
  for (const auto& seg : segments) {
    const auto t = static_cast<double>(seg.cycle_index);
    os << t << ',' << seg.initial_state << ',' << seg.cycle_index << '\n';
    for (std::size_t k = 0; k < seg.jump_times.size(); ++k) {
      os << t + seg.jump_times[k] << ',' << seg.states[k + 1] << ',' << seg.cycle_index << '\n';
    }
    os << t + 1.0 << ',' << seg.states.back() << ',' << seg.cycle_index << '\n';
  }
}

}  // namespace conjproc

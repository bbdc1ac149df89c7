#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "conjproc/latent.hpp"
#include "conjproc/rng.hpp"

namespace conjproc {

struct CTMCConfig {
  double q0 = 10.0;  // rate of leaving state 0; mean holding time 1/q0

  void validate() const;
};

/// One cycle X^{(t)} = (X_{t+τ} : τ ∈ [0, 1)) of the two-state chain.
/// The path is right-continuous: states[k] holds on [jump_times[k−1], jump_times[k]).
struct PathSegment {
  long cycle_index = 0;
  int initial_state = 0;
  std::vector<double> jump_times;  // strictly increasing, in (0, 1)
  std::vector<int> states;         // alternating, size = jump_times.size() + 1

  /// X_{t+τ} for τ ∈ [0, 1).
  int value_at(double tau) const;
  void validate() const;
};

/// Within-cycle sampling times (i − 1)/q_t, i = 1..q_t.
class SamplingScheme {
 public:
  explicit SamplingScheme(int samples_per_cycle);

  int samples_per_cycle() const { return q_; }
  const std::vector<double>& offsets() const { return offsets_; }

 private:
  int q_;
  std::vector<double> offsets_;
};

/// Jump rate out of state 1 that makes (λ(0), λ(1)) stationary: q0·λ(0)/λ(1).
double return_rate(double mass_at_zero, const CTMCConfig& config);

/// Masses below this are treated as zero, giving a constant path.
inline constexpr double kDegenerateMass = 1e-12;

/// Stationary two-state chain with initial law (λ(0), λ(1)), truncated at 1.
PathSegment simulate_segment(const LatentState& state, const CTMCConfig& config, SplitMix64& rng);

std::vector<double> sample_segment(const PathSegment& segment, const SamplingScheme& scheme);

/// Stream for cycle t: derived from (seed, t) only, so cycles can be simulated
/// in any order or concurrently with identical results.
SplitMix64 cycle_stream(std::uint64_t seed, long cycle_index);

std::vector<PathSegment> simulate_paths(const LatentSequence& latent, const CTMCConfig& config,
                                        std::uint64_t seed);

/// Per-cycle observations X_{i,t}, one list per latent state.
std::vector<std::vector<double>> simulate_conjugate(const LatentSequence& latent,
                                                    const CTMCConfig& config,
                                                    const SamplingScheme& scheme,
                                                    std::uint64_t seed);

/// Step-plot CSV with columns time, state, day_index: a row at the start of
/// each day, one per jump, and a closing row at the end of the day.
void write_path_csv(std::ostream& os, const std::vector<PathSegment>& segments);

}  // namespace conjproc

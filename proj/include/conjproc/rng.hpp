#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace conjproc {

/// SplitMix64 (Steele, Lea & Flood 2014). Small state, cheap to construct,
/// which matters because every simulated cycle gets its own stream.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Hash a master seed and a path of tags (experiment, n, replication,
/// cycle, ...) into a child seed. Distinct tag paths give independent
/// streams up to 64-bit hash collisions.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t h = SplitMix64::mix(master ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t tag : tags) {
    h = SplitMix64::mix(h + 0x9e3779b97f4a7c15ULL + SplitMix64::mix(tag));
  }
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(SplitMix64& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Stream tags used across modules.
namespace stream_tag {
inline constexpr std::uint64_t kTheta = 0x7468657461ULL;      // "theta"
inline constexpr std::uint64_t kCycle = 0x6379636c65ULL;      // "cycle"
inline constexpr std::uint64_t kLatent = 0x6c6174656e74ULL;   // "latent"
inline constexpr std::uint64_t kObserve = 0x6f6273ULL;        // "obs"
}  // namespace stream_tag

}  // namespace conjproc

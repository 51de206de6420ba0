#ifndef EGGSYNTH_RNG_HPP
#define EGGSYNTH_RNG_HPP

#include <cmath>
#include <cstdint>

namespace eggsynth {

// Deterministic pseudorandom generator used everywhere in the library.
//
// The core is SplitMix64: a counter-based mix of a 64-bit state, so draws
// depend only on (seed, draw index) and are identical on every platform,
// compiler, and thread layout. The standard <random> distributions are
// avoided on purpose: their output is implementation-defined and would
// break byte-identical regeneration across toolchains.
//
// Substream scheme: stream k of master seed s is seeded with
//   mix(mix(s) ^ (GOLDEN * (k + 1)))
// Each consumer of randomness (kernel draws, phases per segment, noise
// floors, Monte Carlo replications) owns its own stream id, so adding a
// consumer never shifts the draws seen by the others.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  // SplitMix64 finalizer (Stafford mix13).
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z += kGolden;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static Rng substream(std::uint64_t master, std::uint64_t stream) {
    return Rng(mix(mix(master) ^ (kGolden * (stream + 1))));
  }

  std::uint64_t next_u64() {
    state_ += kGolden;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller. Consumes exactly two 64-bit draws per
  // call (the sine partner is discarded), which keeps stream consumption
  // easy to reason about.
  double normal() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::uint64_t state_;
};

}  // namespace eggsynth

#endif

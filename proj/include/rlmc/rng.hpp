#pragma once

#include <cstdint>
#include <initializer_list>

namespace rlmc::rng {

// SplitMix64 step. Fast, passes BigCrush as a 64-bit mixer, and is the
// standard tool for deriving independent seed streams from a master seed.
inline constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives a child seed by absorbing a sequence of words into a SplitMix64
// sponge. Distinct word sequences give (with overwhelming probability)
// distinct, statistically independent streams; this is how every stream in
// the library is keyed: (master, stream tag, layer, sample, step, ...).
inline constexpr std::uint64_t derive(std::initializer_list<std::uint64_t> words) {
  std::uint64_t state = 0x6a09e667f3bcc909ULL;  // sqrt(2) fraction bits
  for (std::uint64_t w : words) {
    state ^= splitmix64(state) ^ w;
    (void)splitmix64(state);
  }
  return splitmix64(state);
}

// Stream tags. Each consumer of randomness owns a tag so that no two
// subsystems can collide on derived seeds.
enum class StreamTag : std::uint64_t {
  training_layer = 0x544c4159ULL,   // per-time training points
  perf_resim = 0x5245534dULL,       // performance-iteration resimulation
  policy_eval = 0x4556414cULL,      // forward policy evaluation
  inner_mc = 0x494e4d43ULL,         // inner Monte Carlo cond. expectation
};

// Counter-style uniform generator: a SplitMix64 sequence starting from a
// derived seed. Cheap to construct, so one stream per (layer, sample) or
// even per step is fine.
class Stream {
 public:
  explicit constexpr Stream(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform draw strictly inside (0, 1); 53-bit resolution. The +0.5 offset
  // keeps 0 and 1 unreachable, which the noise contract requires.
  constexpr double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// A single uniform in (0,1) keyed directly by a word sequence. Used for
// per-(layer, sample, step, component) noise where no stream state is kept.
inline constexpr double keyed_uniform(std::initializer_list<std::uint64_t> words) {
  return (static_cast<double>(derive(words) >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace rlmc::rng

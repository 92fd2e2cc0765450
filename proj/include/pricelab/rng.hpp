#pragma once

#include <cstdint>
#include <random>

namespace pricelab {

// splitmix64 finalizer. Used to spread (base_seed XOR counter) pairs into
// well-separated engine seeds so parallel episodes never share a stream.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Episode j of a run with base seed b draws from a stream seeded with
// derive_seed(b, j). Pure function of its inputs; no global state anywhere.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t counter) {
  return splitmix64(base_seed ^ counter);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits; avoids distribution objects so the
  // draw sequence is fully pinned by the engine.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pricelab

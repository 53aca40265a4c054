#pragma once

#include <cstdint>

namespace mstboot::rng {

// SplitMix64 (Steele/Lea/Flood). Serves two roles: the replica stream
// generator, and (through mix below) the seed derivation hash. Every stream is
// a pure function of its seed, which is what makes bootstrap runs independent
// of thread count and execution order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Draw in [0, bound) via Lemire's multiply-shift reduction.
  std::uint32_t next_below(std::uint32_t bound) {
    return static_cast<std::uint32_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

 private:
  std::uint64_t state_;
};

/// Deterministic seed derivation: distinct (a, b) give distinct streams.
inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  SplitMix64 g(a ^ (0x9E3779B97F4A7C15ull * (b + 1)));
  return g.next();
}

/// Per-replica seed = mix(master_seed, replica index).
struct ReplicaSeedPolicy {
  std::uint64_t master_seed = 0;

  std::uint64_t replica_seed(std::uint64_t replica_index) const {
    return mix(master_seed, replica_index);
  }
};

}  // namespace mstboot::rng

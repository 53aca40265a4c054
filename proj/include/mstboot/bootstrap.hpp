#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "mstboot/correlation.hpp"
#include "mstboot/panel.hpp"
#include "mstboot/rng.hpp"

namespace mstboot {

enum class BootstrapMethod { Row, Pair };

std::string to_string(BootstrapMethod method);
BootstrapMethod bootstrap_method_from_string(const std::string& name);

/// Per-link bootstrap values: how many of the B replica MSTs contain each
/// unordered pair. Pairs never observed are absent.
struct BootstrapTally {
  BootstrapMethod method = BootstrapMethod::Row;
  std::uint32_t replicas = 0;
  std::size_t n_nodes = 0;
  std::unordered_map<std::uint64_t, std::uint32_t> counts;

  static std::uint64_t pack(std::uint32_t i, std::uint32_t j) {
    return (static_cast<std::uint64_t>(i) << 32) | j;  // requires i < j
  }
  static std::pair<std::uint32_t, std::uint32_t> unpack(std::uint64_t key) {
    return {static_cast<std::uint32_t>(key >> 32),
            static_cast<std::uint32_t>(key & 0xFFFFFFFFull)};
  }

  std::uint32_t value(std::uint32_t i, std::uint32_t j) const;
  std::uint64_t total_count() const;  // == replicas * (n_nodes - 1)
};

/// Replica correlation matrices (seed -> matrix, pure functions).
CorrelationMatrix row_replica(const ReturnsPanel& panel, std::uint64_t replica_seed);
CorrelationMatrix pair_replica(const ReturnsPanel& panel, std::uint64_t replica_seed);

/// B replica MST extractions tallied per link. Replicas are distributed over
/// an OpenMP worker pool; per-replica randomness depends only on
/// (policy.master_seed, replica index) and tally merging is integer addition,
/// so the result is bit-identical for every worker count.
BootstrapTally run_bootstrap(const ReturnsPanel& panel, BootstrapMethod method,
                             std::uint32_t replicas, rng::ReplicaSeedPolicy policy,
                             int n_threads = 0);

/// Plain serial loop over replicas, kept as the reference the parallel engine
/// is tested and benchmarked against.
BootstrapTally run_bootstrap_reference(const ReturnsPanel& panel,
                                       BootstrapMethod method,
                                       std::uint32_t replicas,
                                       rng::ReplicaSeedPolicy policy);

/// Number of distinct links observed at least once (out of n(n-1)/2 possible).
std::size_t distinct_link_count(const BootstrapTally& tally);

/// CSV `element_i,element_j,count,method,replicas`, sorted by descending count
/// then lexicographic pair.
void write_tally_csv(const BootstrapTally& tally,
                     const std::vector<std::string>& elements, std::ostream& out);
void write_tally_csv(const BootstrapTally& tally,
                     const std::vector<std::string>& elements,
                     const std::string& path);
BootstrapTally read_tally_csv(std::istream& in,
                              const std::vector<std::string>& elements);
BootstrapTally read_tally_csv(const std::string& path,
                              const std::vector<std::string>& elements);

/// Default scan grid: B - step down to step, step = B/50 (>= 1).
std::vector<std::uint32_t> default_threshold_grid(std::uint32_t replicas);

}  // namespace mstboot

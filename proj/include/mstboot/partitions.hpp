#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mstboot/bootstrap.hpp"
#include "mstboot/filtering.hpp"
#include "mstboot/panel.hpp"
#include "mstboot/topology.hpp"

namespace mstboot {

/// Assignment of each member of a universe to exactly one block.
/// members are sorted node ids; labels[k] is the block of members[k].
struct Partition {
  std::vector<std::uint32_t> members;
  std::vector<int> labels;

  std::size_t size() const { return members.size(); }
  std::size_t n_blocks() const;

  static Partition from_components(const ComponentsResult& comps);
};

enum class SectorLevel { Sector, Subsector };

std::string to_string(SectorLevel level);

/// Expert partition restricted to the given universe of node ids.
Partition sector_partition(const SectorMap& sectors,
                           const std::vector<std::string>& elements,
                           SectorLevel level,
                           const std::vector<std::uint32_t>& universe);

/// Pair-count contingency between two partitions over a common universe.
struct Contingency {
  std::int64_t pairs_both = 0;   // pairs co-blocked in both partitions
  std::int64_t pairs_test = 0;   // pairs co-blocked in the test partition
  std::int64_t pairs_ref = 0;    // pairs co-blocked in the reference partition
  std::int64_t pairs_total = 0;  // C(N, 2)

  static Contingency build(const Partition& test, const Partition& reference);
};

/// Hubert-Arabie adjusted Rand index. 1 for identical partitions, 0 expected
/// under independent random labelings. Exact rational arithmetic internally.
/// Degenerate denominator (both partitions single-block or all-singletons):
/// 1 if the partitions are identical, else 0.
double ari(const Partition& test, const Partition& reference);

/// Adjusted Wallace index (W - p) / (1 - p) with W the precision of test
/// co-blocked pairs against the reference and p the reference co-block
/// probability. 1 when every test block is inside a reference block, 0 at
/// random inclusion, unbounded below. Empty when undefined (test has no
/// co-blocked pair, or p == 1).
std::optional<double> awi(const Partition& test, const Partition& reference);

struct MetricRow {
  std::uint32_t threshold = 0;
  std::size_t nodes = 0;          // non-isolated nodes at this threshold
  std::optional<double> ari;      // empty when degenerate
  std::optional<double> awi;
  bool degenerate = false;
};

/// ARI/AWI of the threshold-network component partition against the expert
/// partition, per threshold.
std::vector<MetricRow> metric_curves(const BootstrapTally& tally,
                                     const SectorMap& sectors,
                                     const std::vector<std::string>& elements,
                                     SectorLevel level,
                                     const std::vector<std::uint32_t>& thresholds,
                                     ThresholdRule rule = ThresholdRule::Strict);

/// Two-sided Fisher exact test for a 2x2 table [[a, b], [c, d]], point
/// probability method. Undefined when any margin is zero.
struct FisherResult {
  bool defined = false;
  double p_value = 1.0;
};

FisherResult fisher_exact_two_sided(std::uint64_t a, std::uint64_t b,
                                    std::uint64_t c, std::uint64_t d);

/// Association between link dominance (r_bv > p_bv vs p_bv > r_bv; ties
/// excluded) and sector agreement of the link's nodes.
struct AssociationTest {
  // rows: r_bv > p_bv, p_bv > r_bv; cols: same sector, different sector
  std::array<std::array<std::uint64_t, 2>, 2> table{{{0, 0}, {0, 0}}};
  bool defined = false;
  double p_value = 1.0;
  double alpha = 0.01;
  bool reject = false;
  /// "row_dominant_cross_sector" when r_bv > p_bv links are enriched in
  /// different-sector pairs, "row_dominant_same_sector" otherwise.
  std::string direction;
};

AssociationTest sector_association_test(const std::vector<ScatterPoint>& points,
                                        double alpha = 0.01);

/// `method,level,threshold,nodes,ari,awi` ("--" for undefined values).
void write_metrics_csv(const std::vector<std::tuple<BootstrapMethod, SectorLevel,
                                                    std::vector<MetricRow>>>& curves,
                       const std::string& path);

/// JSON {table, p_value, direction, alpha, reject, defined}.
void write_association_json(const AssociationTest& test, const std::string& path);

}  // namespace mstboot

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mstboot/bootstrap.hpp"
#include "mstboot/filtering.hpp"
#include "mstboot/panel.hpp"

namespace mstboot {

/// Connected components over the non-isolated node set; isolated nodes are
/// reported separately.
struct ComponentsResult {
  std::vector<std::vector<std::uint32_t>> components;  // each sorted, >= 2 nodes
  std::vector<std::uint32_t> isolated;
};

ComponentsResult components(const EdgeNetwork& net);

/// All vertex subsets of the given size (3 or 4) that are pairwise connected,
/// in canonical sorted-tuple order.
std::vector<std::vector<std::uint32_t>> count_cliques(const EdgeNetwork& net, int size);

struct CliqueReport {
  std::uint32_t threshold = 0;
  int clique_size = 3;
  std::size_t total = 0;
  std::size_t in_pmfg = 0;
  std::optional<double> percent;  // empty when total == 0 (rendered "--")
};

/// Per threshold: 3-cliques of the threshold network and how many have all
/// three edges in the original PMFG.
std::vector<CliqueReport> clique_pmfg_inclusion(const BootstrapTally& tally,
                                                const EdgeNetwork& pmfg_net,
                                                const std::vector<std::uint32_t>& thresholds,
                                                ThresholdRule rule = ThresholdRule::Strict);

/// |edges(threshold network) ∩ edges(original MST)| per threshold;
/// non-increasing in the threshold.
std::vector<std::pair<std::uint32_t, std::size_t>> mst_overlap_curve(
    const BootstrapTally& tally, const EdgeNetwork& original_mst,
    const std::vector<std::uint32_t>& thresholds,
    ThresholdRule rule = ThresholdRule::Strict);

struct ScatterPoint {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  std::uint32_t row_value = 0;
  std::uint32_t pair_value = 0;
  bool same_sector = false;
};

struct ScatterResult {
  std::vector<ScatterPoint> points;   // union of pairs observed in either tally
  std::size_t both_positive = 0;      // pairs with row_value > 0 and pair_value > 0
};

/// Row-vs-pair bootstrap values of every link detected at least once by either
/// method. Tallies must share panel size and replica count.
ScatterResult scatter(const BootstrapTally& row_tally, const BootstrapTally& pair_tally,
                      const SectorMap& sectors, const std::vector<std::string>& elements);

// Figure/table analogs ------------------------------------------------------

/// `method,bootstrap_value,link_count`, values ascending, observed only.
void write_histogram_csv(const std::vector<const BootstrapTally*>& tallies,
                         const std::string& path);

/// `method,threshold,non_isolated_nodes,links` over the given grid.
void write_threshold_scan_csv(const std::vector<const BootstrapTally*>& tallies,
                              const std::vector<std::uint32_t>& thresholds,
                              ThresholdRule rule, const std::string& path);

/// `method,threshold,common_links` against the original MST.
void write_mst_overlap_csv(const std::vector<const BootstrapTally*>& tallies,
                           const EdgeNetwork& original_mst,
                           const std::vector<std::uint32_t>& thresholds,
                           ThresholdRule rule, const std::string& path);

/// `threshold,method,n_3cliques,in_pmfg,percent` ("--" when undefined).
void write_cliques_csv(const std::vector<const BootstrapTally*>& tallies,
                       const EdgeNetwork& pmfg_net,
                       const std::vector<std::uint32_t>& thresholds,
                       ThresholdRule rule, const std::string& path);

/// `element_i,element_j,row_value,pair_value,same_sector`.
void write_scatter_csv(const ScatterResult& result,
                       const std::vector<std::string>& elements,
                       const std::string& path);

}  // namespace mstboot

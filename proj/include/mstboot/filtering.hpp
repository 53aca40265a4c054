#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mstboot/bootstrap.hpp"
#include "mstboot/correlation.hpp"
#include "mstboot/core.hpp"

namespace mstboot {

struct WeightedEdge {
  std::uint32_t i = 0;  // i < j always
  std::uint32_t j = 0;
  double weight = 0.0;
};

/// Undirected graph over element indices. Edges are kept sorted by (i, j)
/// with no self-loops or duplicates.
struct EdgeNetwork {
  std::size_t n_nodes = 0;
  std::vector<WeightedEdge> edges;

  bool has_edge(std::uint32_t i, std::uint32_t j) const;
  std::size_t non_isolated_count() const;
  std::vector<std::uint32_t> non_isolated_nodes() const;

  void sort_edges();  // canonical (i, j) ascending
};

/// Minimum spanning tree of a symmetric, zero-diagonal, finite distance
/// matrix. Ties broken by ascending (distance, i, j), which makes the result
/// deterministic; edge weights are the distances.
EdgeNetwork mst(const Matrix& distance);

/// Planar maximally filtered graph: insert pairs by descending correlation
/// (ties: ascending (i, j)) while the graph stays planar, stopping at
/// 3(n-2) edges. Contains the MST of to_distance(corr); edge weights are the
/// correlations. Requires n >= 3.
EdgeNetwork pmfg(const CorrelationMatrix& corr);

enum class ThresholdRule {
  Strict,     // keep links with count >  threshold
  Inclusive,  // keep links with count >= threshold
};

ThresholdRule threshold_rule_from_string(const std::string& name);
std::string to_string(ThresholdRule rule);

/// Network of links whose bootstrap value passes the threshold. Spans all
/// n nodes; isolated nodes permitted. Edge weights are the counts.
EdgeNetwork threshold_network(const BootstrapTally& tally, std::uint32_t threshold,
                              ThresholdRule rule = ThresholdRule::Strict);

bool is_tree(const EdgeNetwork& net);      // n-1 edges, connected, acyclic
bool is_connected(const EdgeNetwork& net);
bool is_planar(const EdgeNetwork& net);

/// Edge-list CSV `element_i,element_j,weight`.
void write_edges_csv(const EdgeNetwork& net, const std::vector<std::string>& elements,
                     const std::string& path);

/// JSON summary {nodes, non_isolated_nodes, edges, is_tree, is_planar}.
void write_network_summary_json(const EdgeNetwork& net, const std::string& path);

}  // namespace mstboot

#include "mstboot/filtering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>
#include <json.hpp>

#include "dsu.hpp"

namespace mstboot {

namespace {

bool edge_less(const WeightedEdge& a, const WeightedEdge& b) {
  return a.i != b.i ? a.i < b.i : a.j < b.j;
}

using BoostGraph =
    boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;

}  // namespace

bool EdgeNetwork::has_edge(std::uint32_t i, std::uint32_t j) const {
  if (i == j) return false;
  if (i > j) std::swap(i, j);
  const WeightedEdge probe{i, j, 0.0};
  const auto it = std::lower_bound(edges.begin(), edges.end(), probe, edge_less);
  return it != edges.end() && it->i == i && it->j == j;
}

std::size_t EdgeNetwork::non_isolated_count() const {
  return non_isolated_nodes().size();
}

std::vector<std::uint32_t> EdgeNetwork::non_isolated_nodes() const {
  std::vector<char> seen(n_nodes, 0);
  for (const auto& e : edges) {
    seen[e.i] = 1;
    seen[e.j] = 1;
  }
  std::vector<std::uint32_t> nodes;
  for (std::uint32_t v = 0; v < n_nodes; ++v) {
    if (seen[v]) nodes.push_back(v);
  }
  return nodes;
}

void EdgeNetwork::sort_edges() { std::sort(edges.begin(), edges.end(), edge_less); }

EdgeNetwork mst(const Matrix& distance) {
  const auto n = distance.rows();
  if (n < 2 || distance.cols() != n) {
    throw Error("mst: need a square distance matrix with n >= 2");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (distance(i, i) != 0.0) throw Error("mst: nonzero diagonal");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!std::isfinite(distance(i, j))) throw Error("mst: non-finite entry");
      if (distance(i, j) != distance(j, i)) throw Error("mst: asymmetric input");
    }
  }

  std::vector<WeightedEdge> candidates;
  candidates.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      candidates.push_back({static_cast<std::uint32_t>(i),
                            static_cast<std::uint32_t>(j), distance(i, j)});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const WeightedEdge& a, const WeightedEdge& b) {
              if (a.weight != b.weight) return a.weight < b.weight;
              return a.i != b.i ? a.i < b.i : a.j < b.j;
            });

  EdgeNetwork tree;
  tree.n_nodes = static_cast<std::size_t>(n);
  detail::Dsu dsu(tree.n_nodes);
  for (const auto& e : candidates) {
    if (dsu.unite(e.i, e.j)) {
      tree.edges.push_back(e);
      if (tree.edges.size() == tree.n_nodes - 1) break;
    }
  }
  tree.sort_edges();
  return tree;
}

EdgeNetwork pmfg(const CorrelationMatrix& corr) {
  const std::size_t n = corr.size();
  if (n < 3) throw Error("pmfg: need n >= 3");

  std::vector<WeightedEdge> candidates;
  candidates.reserve(n * (n - 1) / 2);
  for (std::uint32_t i = 0; i + 1 < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      candidates.push_back({i, j, corr(i, j)});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const WeightedEdge& a, const WeightedEdge& b) {
              if (a.weight != b.weight) return a.weight > b.weight;
              return a.i != b.i ? a.i < b.i : a.j < b.j;
            });

  const std::size_t capacity = 3 * (n - 2);
  BoostGraph graph(n);
  EdgeNetwork net;
  net.n_nodes = n;
  for (const auto& e : candidates) {
    boost::add_edge(e.i, e.j, graph);
    if (boost::boyer_myrvold_planarity_test(graph)) {
      net.edges.push_back(e);
      if (net.edges.size() == capacity) break;
    } else {
      boost::remove_edge(e.i, e.j, graph);
    }
  }
  if (net.edges.size() != capacity) {
    throw Error("pmfg: construction stopped at " +
                std::to_string(net.edges.size()) + " edges, expected " +
                std::to_string(capacity));
  }
  net.sort_edges();
  return net;
}

ThresholdRule threshold_rule_from_string(const std::string& name) {
  if (name == "strict") return ThresholdRule::Strict;
  if (name == "inclusive") return ThresholdRule::Inclusive;
  throw Error("unknown threshold rule '" + name + "' (expected strict or inclusive)");
}

std::string to_string(ThresholdRule rule) {
  return rule == ThresholdRule::Strict ? "strict" : "inclusive";
}

EdgeNetwork threshold_network(const BootstrapTally& tally, std::uint32_t threshold,
                              ThresholdRule rule) {
  if (threshold > tally.replicas) {
    throw Error("threshold_network: threshold " + std::to_string(threshold) +
                " exceeds replica count " + std::to_string(tally.replicas));
  }
  EdgeNetwork net;
  net.n_nodes = tally.n_nodes;
  for (const auto& [key, count] : tally.counts) {
    const bool keep = rule == ThresholdRule::Strict ? count > threshold
                                                    : count >= threshold;
    if (keep) {
      const auto [i, j] = BootstrapTally::unpack(key);
      net.edges.push_back({i, j, static_cast<double>(count)});
    }
  }
  net.sort_edges();
  return net;
}

bool is_connected(const EdgeNetwork& net) {
  if (net.n_nodes == 0) return false;
  detail::Dsu dsu(net.n_nodes);
  std::size_t merges = 0;
  for (const auto& e : net.edges) {
    if (dsu.unite(e.i, e.j)) ++merges;
  }
  return merges == net.n_nodes - 1;
}

bool is_tree(const EdgeNetwork& net) {
  return net.edges.size() == net.n_nodes - 1 && is_connected(net);
}

bool is_planar(const EdgeNetwork& net) {
  BoostGraph graph(net.n_nodes);
  for (const auto& e : net.edges) boost::add_edge(e.i, e.j, graph);
  return boost::boyer_myrvold_planarity_test(graph);
}

void write_edges_csv(const EdgeNetwork& net, const std::vector<std::string>& elements,
                     const std::string& path) {
  if (elements.size() != net.n_nodes) {
    throw Error("write_edges_csv: label count mismatch");
  }
  std::ofstream out(path);
  if (!out) throw Error("write_edges_csv: cannot open '" + path + "'");
  out << "element_i,element_j,weight\n";
  for (const auto& e : net.edges) {
    out << elements[e.i] << ',' << elements[e.j] << ',' << format_double(e.weight)
        << '\n';
  }
}

void write_network_summary_json(const EdgeNetwork& net, const std::string& path) {
  nlohmann::json summary{
      {"nodes", net.n_nodes},
      {"non_isolated_nodes", net.non_isolated_count()},
      {"edges", net.edges.size()},
      {"is_tree", is_tree(net)},
      {"is_planar", is_planar(net)},
  };
  std::ofstream out(path);
  if (!out) throw Error("write_network_summary_json: cannot open '" + path + "'");
  out << summary.dump(2) << '\n';
}

}  // namespace mstboot

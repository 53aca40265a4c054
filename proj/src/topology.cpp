#include "mstboot/topology.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_map>

#include "dsu.hpp"

namespace mstboot {

ComponentsResult components(const EdgeNetwork& net) {
  detail::Dsu dsu(net.n_nodes);
  std::vector<char> touched(net.n_nodes, 0);
  for (const auto& e : net.edges) {
    dsu.unite(e.i, e.j);
    touched[e.i] = 1;
    touched[e.j] = 1;
  }

  ComponentsResult result;
  std::unordered_map<std::uint32_t, std::size_t> root_to_slot;
  for (std::uint32_t v = 0; v < net.n_nodes; ++v) {
    if (!touched[v]) {
      result.isolated.push_back(v);
      continue;
    }
    const std::uint32_t root = dsu.find(v);
    auto [it, inserted] = root_to_slot.emplace(root, result.components.size());
    if (inserted) result.components.emplace_back();
    result.components[it->second].push_back(v);
  }
  // Nodes were scanned in ascending order, so each component is sorted and
  // components are ordered by their smallest member already.
  return result;
}

std::vector<std::vector<std::uint32_t>> count_cliques(const EdgeNetwork& net,
                                                      int size) {
  if (size != 3 && size != 4) throw Error("count_cliques: size must be 3 or 4");
  const std::size_t n = net.n_nodes;
  std::vector<char> adj(n * n, 0);
  for (const auto& e : net.edges) {
    adj[e.i * n + e.j] = 1;
    adj[e.j * n + e.i] = 1;
  }

  std::vector<std::vector<std::uint32_t>> cliques;
  for (const auto& e : net.edges) {  // edges sorted, so output is lexicographic
    const std::uint32_t i = e.i;
    const std::uint32_t j = e.j;
    for (std::uint32_t k = j + 1; k < n; ++k) {
      if (!adj[i * n + k] || !adj[j * n + k]) continue;
      if (size == 3) {
        cliques.push_back({i, j, k});
        continue;
      }
      for (std::uint32_t l = k + 1; l < n; ++l) {
        if (adj[i * n + l] && adj[j * n + l] && adj[k * n + l]) {
          cliques.push_back({i, j, k, l});
        }
      }
    }
  }
  return cliques;
}

std::vector<CliqueReport> clique_pmfg_inclusion(
    const BootstrapTally& tally, const EdgeNetwork& pmfg_net,
    const std::vector<std::uint32_t>& thresholds, ThresholdRule rule) {
  if (pmfg_net.n_nodes != tally.n_nodes) {
    throw Error("clique_pmfg_inclusion: node count mismatch");
  }
  std::vector<CliqueReport> reports;
  reports.reserve(thresholds.size());
  for (const auto threshold : thresholds) {
    const EdgeNetwork net = threshold_network(tally, threshold, rule);
    const auto cliques = count_cliques(net, 3);
    CliqueReport report;
    report.threshold = threshold;
    report.clique_size = 3;
    report.total = cliques.size();
    for (const auto& c : cliques) {
      if (pmfg_net.has_edge(c[0], c[1]) && pmfg_net.has_edge(c[0], c[2]) &&
          pmfg_net.has_edge(c[1], c[2])) {
        ++report.in_pmfg;
      }
    }
    if (report.total > 0) {
      report.percent = 100.0 * static_cast<double>(report.in_pmfg) /
                       static_cast<double>(report.total);
    }
    reports.push_back(report);
  }
  return reports;
}

std::vector<std::pair<std::uint32_t, std::size_t>> mst_overlap_curve(
    const BootstrapTally& tally, const EdgeNetwork& original_mst,
    const std::vector<std::uint32_t>& thresholds, ThresholdRule rule) {
  if (original_mst.n_nodes != tally.n_nodes) {
    throw Error("mst_overlap_curve: node count mismatch");
  }
  std::vector<std::pair<std::uint32_t, std::size_t>> curve;
  curve.reserve(thresholds.size());
  for (const auto threshold : thresholds) {
    std::size_t common = 0;
    for (const auto& e : original_mst.edges) {
      const std::uint32_t count = tally.value(e.i, e.j);
      const bool keep = rule == ThresholdRule::Strict ? count > threshold
                                                      : count >= threshold;
      if (keep) ++common;
    }
    curve.emplace_back(threshold, common);
  }
  return curve;
}

ScatterResult scatter(const BootstrapTally& row_tally,
                      const BootstrapTally& pair_tally, const SectorMap& sectors,
                      const std::vector<std::string>& elements) {
  if (row_tally.n_nodes != pair_tally.n_nodes ||
      row_tally.n_nodes != elements.size()) {
    throw Error("scatter: tallies cover different node sets");
  }
  if (row_tally.replicas != pair_tally.replicas) {
    throw Error("scatter: tallies have different replica counts");
  }
  sectors.require_covers(elements);

  std::vector<std::uint64_t> keys;
  keys.reserve(row_tally.counts.size() + pair_tally.counts.size());
  for (const auto& [key, count] : row_tally.counts) keys.push_back(key);
  for (const auto& [key, count] : pair_tally.counts) keys.push_back(key);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  ScatterResult result;
  result.points.reserve(keys.size());
  for (const auto key : keys) {
    const auto [i, j] = BootstrapTally::unpack(key);
    ScatterPoint point;
    point.i = i;
    point.j = j;
    point.row_value = row_tally.value(i, j);
    point.pair_value = pair_tally.value(i, j);
    point.same_sector = sectors.assignments.at(elements[i]).first ==
                        sectors.assignments.at(elements[j]).first;
    if (point.row_value > 0 && point.pair_value > 0) ++result.both_positive;
    result.points.push_back(point);
  }
  return result;
}

void write_histogram_csv(const std::vector<const BootstrapTally*>& tallies,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_histogram_csv: cannot open '" + path + "'");
  out << "method,bootstrap_value,link_count\n";
  for (const auto* tally : tallies) {
    std::map<std::uint32_t, std::size_t> histogram;
    for (const auto& [key, count] : tally->counts) ++histogram[count];
    const std::string method = to_string(tally->method);
    for (const auto& [value, links] : histogram) {
      out << method << ',' << value << ',' << links << '\n';
    }
  }
}

void write_threshold_scan_csv(const std::vector<const BootstrapTally*>& tallies,
                              const std::vector<std::uint32_t>& thresholds,
                              ThresholdRule rule, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_threshold_scan_csv: cannot open '" + path + "'");
  out << "method,threshold,non_isolated_nodes,links\n";
  for (const auto* tally : tallies) {
    const std::string method = to_string(tally->method);
    for (const auto threshold : thresholds) {
      const EdgeNetwork net = threshold_network(*tally, threshold, rule);
      out << method << ',' << threshold << ',' << net.non_isolated_count() << ','
          << net.edges.size() << '\n';
    }
  }
}

void write_mst_overlap_csv(const std::vector<const BootstrapTally*>& tallies,
                           const EdgeNetwork& original_mst,
                           const std::vector<std::uint32_t>& thresholds,
                           ThresholdRule rule, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_mst_overlap_csv: cannot open '" + path + "'");
  out << "method,threshold,common_links\n";
  for (const auto* tally : tallies) {
    const std::string method = to_string(tally->method);
    for (const auto& [threshold, common] :
         mst_overlap_curve(*tally, original_mst, thresholds, rule)) {
      out << method << ',' << threshold << ',' << common << '\n';
    }
  }
}

void write_cliques_csv(const std::vector<const BootstrapTally*>& tallies,
                       const EdgeNetwork& pmfg_net,
                       const std::vector<std::uint32_t>& thresholds,
                       ThresholdRule rule, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_cliques_csv: cannot open '" + path + "'");
  out << "threshold,method,n_3cliques,in_pmfg,percent\n";
  for (const auto* tally : tallies) {
    const std::string method = to_string(tally->method);
    for (const auto& report :
         clique_pmfg_inclusion(*tally, pmfg_net, thresholds, rule)) {
      out << report.threshold << ',' << method << ',' << report.total << ','
          << report.in_pmfg << ',';
      if (report.percent) {
        out << format_double(*report.percent);
      } else {
        out << "--";
      }
      out << '\n';
    }
  }
}

void write_scatter_csv(const ScatterResult& result,
                       const std::vector<std::string>& elements,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_scatter_csv: cannot open '" + path + "'");
  out << "element_i,element_j,row_value,pair_value,same_sector\n";
  for (const auto& p : result.points) {
    out << elements[p.i] << ',' << elements[p.j] << ',' << p.row_value << ','
        << p.pair_value << ',' << (p.same_sector ? 1 : 0) << '\n';
  }
}

}  // namespace mstboot

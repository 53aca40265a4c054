#include "mstboot/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>

#include <json.hpp>

namespace mstboot {

namespace {

using Int128 = __int128;

std::int64_t pairs_of(std::int64_t k) { return k * (k - 1) / 2; }

}  // namespace

std::size_t Partition::n_blocks() const {
  std::vector<int> distinct(labels);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  return distinct.size();
}

Partition Partition::from_components(const ComponentsResult& comps) {
  Partition partition;
  std::vector<std::pair<std::uint32_t, int>> assigned;
  for (std::size_t c = 0; c < comps.components.size(); ++c) {
    for (const auto v : comps.components[c]) {
      assigned.emplace_back(v, static_cast<int>(c));
    }
  }
  std::sort(assigned.begin(), assigned.end());
  partition.members.reserve(assigned.size());
  partition.labels.reserve(assigned.size());
  for (const auto& [v, label] : assigned) {
    partition.members.push_back(v);
    partition.labels.push_back(label);
  }
  return partition;
}

std::string to_string(SectorLevel level) {
  return level == SectorLevel::Sector ? "sector" : "subsector";
}

Partition sector_partition(const SectorMap& sectors,
                           const std::vector<std::string>& elements,
                           SectorLevel level,
                           const std::vector<std::uint32_t>& universe) {
  Partition partition;
  partition.members = universe;
  std::sort(partition.members.begin(), partition.members.end());
  partition.labels.reserve(partition.members.size());
  std::map<std::string, int> label_ids;
  for (const auto v : partition.members) {
    if (v >= elements.size()) throw Error("sector_partition: node out of range");
    const auto it = sectors.assignments.find(elements[v]);
    if (it == sectors.assignments.end()) {
      throw Error("sector_partition: element '" + elements[v] +
                  "' has no sector assignment");
    }
    const std::string& label = level == SectorLevel::Sector ? it->second.first
                                                            : it->second.second;
    const auto [slot, inserted] =
        label_ids.emplace(label, static_cast<int>(label_ids.size()));
    partition.labels.push_back(slot->second);
    (void)inserted;
  }
  return partition;
}

Contingency Contingency::build(const Partition& test, const Partition& reference) {
  if (test.members != reference.members) {
    throw Error("partition comparison: universes differ");
  }
  const auto n = static_cast<std::int64_t>(test.size());
  if (n < 2) throw Error("partition comparison: need at least 2 members");

  std::unordered_map<std::int64_t, std::int64_t> cells;
  std::unordered_map<int, std::int64_t> test_sizes;
  std::unordered_map<int, std::int64_t> ref_sizes;
  for (std::size_t k = 0; k < test.size(); ++k) {
    const int a = test.labels[k];
    const int b = reference.labels[k];
    ++cells[(static_cast<std::int64_t>(a) << 32) ^ (b & 0xFFFFFFFFll)];
    ++test_sizes[a];
    ++ref_sizes[b];
  }

  Contingency c;
  for (const auto& [key, count] : cells) c.pairs_both += pairs_of(count);
  for (const auto& [label, count] : test_sizes) c.pairs_test += pairs_of(count);
  for (const auto& [label, count] : ref_sizes) c.pairs_ref += pairs_of(count);
  c.pairs_total = pairs_of(n);
  return c;
}

double ari(const Partition& test, const Partition& reference) {
  const Contingency c = Contingency::build(test, reference);
  const Int128 index = c.pairs_both;
  const Int128 sum_a = c.pairs_test;
  const Int128 sum_b = c.pairs_ref;
  const Int128 total = c.pairs_total;

  const Int128 numerator = 2 * (total * index - sum_a * sum_b);
  const Int128 denominator = total * (sum_a + sum_b) - 2 * sum_a * sum_b;
  if (denominator == 0) {
    // Both partitions all-singletons or both single-block: identical iff the
    // pair sets coincide, which here reduces to index == sum_a == sum_b.
    return (index == sum_a && index == sum_b) ? 1.0 : 0.0;
  }
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

std::optional<double> awi(const Partition& test, const Partition& reference) {
  const Contingency c = Contingency::build(test, reference);
  if (c.pairs_test == 0) return std::nullopt;   // Wallace precision undefined
  if (c.pairs_ref == c.pairs_total) return std::nullopt;  // p = 1
  const Int128 numerator =
      static_cast<Int128>(c.pairs_total) * c.pairs_both -
      static_cast<Int128>(c.pairs_test) * c.pairs_ref;
  const Int128 denominator =
      static_cast<Int128>(c.pairs_test) * (c.pairs_total - c.pairs_ref);
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

std::vector<MetricRow> metric_curves(const BootstrapTally& tally,
                                     const SectorMap& sectors,
                                     const std::vector<std::string>& elements,
                                     SectorLevel level,
                                     const std::vector<std::uint32_t>& thresholds,
                                     ThresholdRule rule) {
  if (elements.size() != tally.n_nodes) {
    throw Error("metric_curves: label count mismatch");
  }
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    if (thresholds[k] > tally.replicas) {
      throw Error("metric_curves: threshold out of [0, B]");
    }
    if (k > 0 && thresholds[k] >= thresholds[k - 1]) {
      throw Error("metric_curves: thresholds must be strictly descending");
    }
  }

  std::vector<MetricRow> rows;
  rows.reserve(thresholds.size());
  for (const auto threshold : thresholds) {
    const EdgeNetwork net = threshold_network(tally, threshold, rule);
    const ComponentsResult comps = components(net);
    const Partition test = Partition::from_components(comps);

    MetricRow row;
    row.threshold = threshold;
    row.nodes = test.size();
    if (test.size() < 2) {
      row.degenerate = true;
    } else {
      const Partition reference =
          sector_partition(sectors, elements, level, test.members);
      row.ari = ari(test, reference);
      row.awi = awi(test, reference);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

long double log_binomial(std::uint64_t n, std::uint64_t k) {
  return std::lgamma(static_cast<long double>(n) + 1.0L) -
         std::lgamma(static_cast<long double>(k) + 1.0L) -
         std::lgamma(static_cast<long double>(n - k) + 1.0L);
}

}  // namespace

FisherResult fisher_exact_two_sided(std::uint64_t a, std::uint64_t b,
                                    std::uint64_t c, std::uint64_t d) {
  const std::uint64_t r1 = a + b;
  const std::uint64_t r2 = c + d;
  const std::uint64_t c1 = a + c;
  const std::uint64_t c2 = b + d;
  if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) return {false, 1.0};

  const std::uint64_t n = r1 + r2;
  const long double log_denominator = log_binomial(n, c1);
  const auto log_pmf = [&](std::uint64_t k) {
    return log_binomial(r1, k) + log_binomial(r2, c1 - k) - log_denominator;
  };

  const std::uint64_t k_lo = c1 > r2 ? c1 - r2 : 0;
  const std::uint64_t k_hi = std::min(r1, c1);
  // Distinct hypergeometric point masses at this scale differ by far more than
  // this slack, while lgamma noise stays far below it, so the inclusion set
  // matches exact rational enumeration.
  constexpr long double kLogSlack = 1e-13L;
  const long double log_observed = log_pmf(a);

  long double p = 0.0L;
  for (std::uint64_t k = k_lo; k <= k_hi; ++k) {
    const long double lp = log_pmf(k);
    if (lp <= log_observed + kLogSlack) p += std::exp(lp);
  }
  p = std::min(p, 1.0L);
  return {true, static_cast<double>(p)};
}

AssociationTest sector_association_test(const std::vector<ScatterPoint>& points,
                                        double alpha) {
  AssociationTest test;
  test.alpha = alpha;
  for (const auto& p : points) {
    if (p.row_value == p.pair_value) continue;  // ties carry no direction
    const std::size_t row = p.row_value > p.pair_value ? 0 : 1;
    const std::size_t col = p.same_sector ? 0 : 1;
    ++test.table[row][col];
  }
  const auto& t = test.table;
  const FisherResult fisher =
      fisher_exact_two_sided(t[0][0], t[0][1], t[1][0], t[1][1]);
  test.defined = fisher.defined;
  test.p_value = fisher.p_value;
  test.reject = test.defined && test.p_value < alpha;
  // Cross-multiplied comparison of cross-sector fractions between the two
  // dominance classes; avoids dividing by possibly-zero row sums.
  const auto row_total = t[0][0] + t[0][1];
  const auto pair_total = t[1][0] + t[1][1];
  test.direction = t[0][1] * pair_total > t[1][1] * row_total
                       ? "row_dominant_cross_sector"
                       : "row_dominant_same_sector";
  return test;
}

void write_metrics_csv(
    const std::vector<std::tuple<BootstrapMethod, SectorLevel,
                                 std::vector<MetricRow>>>& curves,
    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_metrics_csv: cannot open '" + path + "'");
  out << "method,level,threshold,nodes,ari,awi\n";
  for (const auto& [method, level, rows] : curves) {
    const std::string method_name = to_string(method);
    const std::string level_name = to_string(level);
    for (const auto& row : rows) {
      out << method_name << ',' << level_name << ',' << row.threshold << ','
          << row.nodes << ',';
      out << (row.ari ? format_double(*row.ari) : std::string("--")) << ',';
      out << (row.awi ? format_double(*row.awi) : std::string("--")) << '\n';
    }
  }
}

void write_association_json(const AssociationTest& test, const std::string& path) {
  nlohmann::json report{
      {"table", {{test.table[0][0], test.table[0][1]},
                 {test.table[1][0], test.table[1][1]}}},
      {"defined", test.defined},
      {"p_value", test.p_value},
      {"alpha", test.alpha},
      {"reject", test.reject},
      {"direction", test.direction},
  };
  std::ofstream out(path);
  if (!out) throw Error("write_association_json: cannot open '" + path + "'");
  out << report.dump(2) << '\n';
}

}  // namespace mstboot

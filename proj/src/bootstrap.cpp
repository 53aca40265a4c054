#include "mstboot/bootstrap.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <omp.h>
#include <sstream>

#include "mstboot/filtering.hpp"
#include "mstboot/kernels.hpp"

namespace mstboot {

std::string to_string(BootstrapMethod method) {
  return method == BootstrapMethod::Row ? "row" : "pair";
}

BootstrapMethod bootstrap_method_from_string(const std::string& name) {
  if (name == "row") return BootstrapMethod::Row;
  if (name == "pair") return BootstrapMethod::Pair;
  throw Error("unknown bootstrap method '" + name + "' (expected row or pair)");
}

std::uint32_t BootstrapTally::value(std::uint32_t i, std::uint32_t j) const {
  if (i == j) return 0;
  if (i > j) std::swap(i, j);
  const auto it = counts.find(pack(i, j));
  return it == counts.end() ? 0 : it->second;
}

std::uint64_t BootstrapTally::total_count() const {
  std::uint64_t total = 0;
  for (const auto& [key, count] : counts) total += count;
  return total;
}

CorrelationMatrix row_replica(const ReturnsPanel& panel, std::uint64_t replica_seed) {
  return CorrelationMatrix(kernels::row_resample_corr(
      panel.observations().data(), panel.n(), panel.periods(), replica_seed));
}

CorrelationMatrix pair_replica(const ReturnsPanel& panel, std::uint64_t replica_seed) {
  return CorrelationMatrix(kernels::pair_resample_corr(
      panel.observations().data(), panel.n(), panel.periods(), replica_seed));
}

namespace {

// Tree edges of one replica, written into a caller-owned flat n*n count grid.
void tally_one_replica(const ReturnsPanel& panel, BootstrapMethod method,
                       std::uint64_t replica_seed, std::uint32_t* grid) {
  const std::size_t n = panel.n();
  const CorrelationMatrix corr = method == BootstrapMethod::Row
                                     ? row_replica(panel, replica_seed)
                                     : pair_replica(panel, replica_seed);
  const EdgeNetwork tree = mst(to_distance(corr));
  for (const auto& e : tree.edges) ++grid[e.i * n + e.j];
}

BootstrapTally merge_grids(const std::vector<std::vector<std::uint32_t>>& grids,
                           BootstrapMethod method, std::uint32_t replicas,
                           std::size_t n) {
  BootstrapTally tally;
  tally.method = method;
  tally.replicas = replicas;
  tally.n_nodes = n;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::uint64_t total = 0;
      for (const auto& grid : grids) total += grid[i * n + j];
      if (total > 0) {
        tally.counts.emplace(
            BootstrapTally::pack(static_cast<std::uint32_t>(i),
                                 static_cast<std::uint32_t>(j)),
            static_cast<std::uint32_t>(total));
      }
    }
  }
  return tally;
}

}  // namespace

BootstrapTally run_bootstrap(const ReturnsPanel& panel, BootstrapMethod method,
                             std::uint32_t replicas, rng::ReplicaSeedPolicy policy,
                             int n_threads) {
  if (replicas == 0) throw Error("bootstrap: need at least 1 replica");
  const std::size_t n = panel.n();
  const int threads = n_threads > 0 ? n_threads : omp_get_max_threads();

  std::vector<std::vector<std::uint32_t>> grids(
      threads, std::vector<std::uint32_t>(n * n, 0));
  bool failed = false;
  std::int64_t failed_replica = -1;
  std::string failure;
  std::mutex failure_mutex;

#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(replicas); ++b) {
    bool skip;
#pragma omp atomic read
    skip = failed;
    if (skip) continue;
    try {
      tally_one_replica(panel, method,
                        policy.replica_seed(static_cast<std::uint64_t>(b)),
                        grids[omp_get_thread_num()].data());
    } catch (const std::exception& ex) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failed || b < failed_replica) {
        failed_replica = b;
        failure = ex.what();
      }
#pragma omp atomic write
      failed = true;
    }
  }

  if (failed) {
    throw Error("bootstrap: replica " + std::to_string(failed_replica) +
                " failed: " + failure);
  }
  return merge_grids(grids, method, replicas, n);
}

BootstrapTally run_bootstrap_reference(const ReturnsPanel& panel,
                                       BootstrapMethod method,
                                       std::uint32_t replicas,
                                       rng::ReplicaSeedPolicy policy) {
  if (replicas == 0) throw Error("bootstrap: need at least 1 replica");
  const std::size_t n = panel.n();
  std::vector<std::vector<std::uint32_t>> grids(
      1, std::vector<std::uint32_t>(n * n, 0));
  for (std::uint32_t b = 0; b < replicas; ++b) {
    try {
      tally_one_replica(panel, method, policy.replica_seed(b), grids[0].data());
    } catch (const std::exception& ex) {
      throw Error("bootstrap: replica " + std::to_string(b) +
                  " failed: " + ex.what());
    }
  }
  return merge_grids(grids, method, replicas, n);
}

std::size_t distinct_link_count(const BootstrapTally& tally) {
  return tally.counts.size();
}

void write_tally_csv(const BootstrapTally& tally,
                     const std::vector<std::string>& elements, std::ostream& out) {
  if (elements.size() != tally.n_nodes) {
    throw Error("write_tally_csv: label count mismatch");
  }
  struct Row {
    std::uint32_t count;
    const std::string* a;
    const std::string* b;
  };
  std::vector<Row> rows;
  rows.reserve(tally.counts.size());
  for (const auto& [key, count] : tally.counts) {
    const auto [i, j] = BootstrapTally::unpack(key);
    rows.push_back({count, &elements[i], &elements[j]});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
    if (x.count != y.count) return x.count > y.count;
    if (*x.a != *y.a) return *x.a < *y.a;
    return *x.b < *y.b;
  });
  const std::string method = to_string(tally.method);
  out << "element_i,element_j,count,method,replicas\n";
  for (const auto& row : rows) {
    out << *row.a << ',' << *row.b << ',' << row.count << ',' << method << ','
        << tally.replicas << '\n';
  }
}

void write_tally_csv(const BootstrapTally& tally,
                     const std::vector<std::string>& elements,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("write_tally_csv: cannot open '" + path + "'");
  write_tally_csv(tally, elements, out);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    auto pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::uint64_t parse_count(const std::string& s, const char* what) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(std::string("read_tally_csv: bad ") + what + " '" + s + "'");
  }
  return v;
}

}  // namespace

BootstrapTally read_tally_csv(std::istream& in,
                              const std::vector<std::string>& elements) {
  std::map<std::string, std::uint32_t> index;
  for (std::uint32_t i = 0; i < elements.size(); ++i) index[elements[i]] = i;

  std::string line;
  if (!std::getline(in, line)) throw Error("read_tally_csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "element_i,element_j,count,method,replicas") {
    throw Error("read_tally_csv: unexpected header '" + line + "'");
  }

  BootstrapTally tally;
  tally.n_nodes = elements.size();
  bool meta_set = false;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != 5) {
      throw Error("read_tally_csv: line " + std::to_string(line_no) +
                  " needs 5 fields");
    }
    const auto ia = index.find(fields[0]);
    const auto ib = index.find(fields[1]);
    if (ia == index.end() || ib == index.end()) {
      throw Error("read_tally_csv: unknown element at line " +
                  std::to_string(line_no));
    }
    std::uint32_t i = ia->second;
    std::uint32_t j = ib->second;
    if (i == j) {
      throw Error("read_tally_csv: self-pair at line " + std::to_string(line_no));
    }
    if (i > j) std::swap(i, j);
    const auto count = parse_count(fields[2], "count");
    const auto method = bootstrap_method_from_string(fields[3]);
    const auto replicas = parse_count(fields[4], "replica count");
    if (!meta_set) {
      tally.method = method;
      tally.replicas = static_cast<std::uint32_t>(replicas);
      meta_set = true;
    } else if (method != tally.method || replicas != tally.replicas) {
      throw Error("read_tally_csv: inconsistent method/replicas at line " +
                  std::to_string(line_no));
    }
    if (count < 1 || count > tally.replicas) {
      throw Error("read_tally_csv: count out of [1, B] at line " +
                  std::to_string(line_no));
    }
    if (!tally.counts
             .emplace(BootstrapTally::pack(i, j),
                      static_cast<std::uint32_t>(count))
             .second) {
      throw Error("read_tally_csv: duplicate pair at line " +
                  std::to_string(line_no));
    }
  }
  if (!meta_set) throw Error("read_tally_csv: no data rows");
  const std::uint64_t expected =
      static_cast<std::uint64_t>(tally.replicas) * (tally.n_nodes - 1);
  if (tally.total_count() != expected) {
    throw Error("read_tally_csv: count conservation violated (got " +
                std::to_string(tally.total_count()) + ", expected " +
                std::to_string(expected) + ")");
  }
  return tally;
}

BootstrapTally read_tally_csv(const std::string& path,
                              const std::vector<std::string>& elements) {
  std::ifstream in(path);
  if (!in) throw Error("read_tally_csv: cannot open '" + path + "'");
  return read_tally_csv(in, elements);
}

std::vector<std::uint32_t> default_threshold_grid(std::uint32_t replicas) {
  std::vector<std::uint32_t> grid;
  if (replicas < 2) return grid;
  const std::uint32_t step = std::max<std::uint32_t>(1, replicas / 50);
  for (std::uint32_t t = replicas - step; t >= step; t -= step) {
    grid.push_back(t);
  }
  return grid;
}

}  // namespace mstboot

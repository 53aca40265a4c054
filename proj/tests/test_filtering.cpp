#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "mstboot/bootstrap.hpp"
#include "mstboot/correlation.hpp"
#include "mstboot/filtering.hpp"
#include "oracles.hpp"

using mstboot::BootstrapTally;
using mstboot::CorrelationMatrix;
using mstboot::EdgeNetwork;
using mstboot::Error;
using mstboot::Matrix;
using mstboot::ThresholdRule;

namespace {

std::set<std::pair<std::uint32_t, std::uint32_t>> edge_set(const EdgeNetwork& net) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> out;
  for (const auto& e : net.edges) out.emplace(e.i, e.j);
  return out;
}

BootstrapTally demo_tally() {
  BootstrapTally tally;
  tally.method = mstboot::BootstrapMethod::Row;
  tally.replicas = 10;
  tally.n_nodes = 5;
  tally.counts[BootstrapTally::pack(0, 1)] = 10;
  tally.counts[BootstrapTally::pack(1, 2)] = 7;
  tally.counts[BootstrapTally::pack(2, 3)] = 7;
  tally.counts[BootstrapTally::pack(0, 4)] = 1;
  return tally;
}

}  // namespace

TEST_CASE("EdgeNetwork primitives") {
  EdgeNetwork net;
  net.n_nodes = 5;
  net.edges = {{1, 3, 0.5}, {0, 1, 0.2}};
  net.sort_edges();
  CHECK(net.edges.front().i == 0);
  CHECK(net.has_edge(0, 1));
  CHECK(net.has_edge(1, 0));
  CHECK(net.has_edge(3, 1));
  CHECK_FALSE(net.has_edge(0, 3));
  CHECK_FALSE(net.has_edge(2, 2));
  CHECK(net.non_isolated_count() == 3);
  CHECK(net.non_isolated_nodes() == std::vector<std::uint32_t>{0, 1, 3});
}

TEST_CASE("mst hand cases") {
  SUBCASE("triangle keeps the two cheapest edges") {
    Matrix d(3, 3);
    d << 0, 0.5, 0.9, 0.5, 0, 0.7, 0.9, 0.7, 0;
    const auto tree = mstboot::mst(d);
    CHECK(edge_set(tree) ==
          std::set<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}, {1, 2}});
    CHECK(tree.edges[0].weight == 0.5);
    CHECK(tree.edges[1].weight == 0.7);
  }
  SUBCASE("n=2 is the single forced edge") {
    Matrix d(2, 2);
    d << 0, 1.3, 1.3, 0;
    const auto tree = mstboot::mst(d);
    REQUIRE(tree.edges.size() == 1);
    CHECK(tree.edges[0].i == 0);
    CHECK(tree.edges[0].j == 1);
  }
  SUBCASE("all-equal distances resolve to the lexicographic star") {
    Matrix d = Matrix::Constant(5, 5, 1.0);
    d.diagonal().setZero();
    const auto tree = mstboot::mst(d);
    CHECK(edge_set(tree) == std::set<std::pair<std::uint32_t, std::uint32_t>>{
                                {0, 1}, {0, 2}, {0, 3}, {0, 4}});
  }
}

TEST_CASE("mst input validation") {
  Matrix d(3, 3);
  d << 0, 1, 2, 1, 0, 3, 2, 3, 0;

  SUBCASE("nonzero diagonal") {
    d(1, 1) = 0.1;
    CHECK_THROWS_WITH_AS(mstboot::mst(d), "mst: nonzero diagonal", Error);
  }
  SUBCASE("asymmetry") {
    d(0, 1) = 1.5;
    CHECK_THROWS_WITH_AS(mstboot::mst(d), "mst: asymmetric input", Error);
  }
  SUBCASE("non-finite entry") {
    d(0, 2) = d(2, 0) = std::nan("");
    CHECK_THROWS_WITH_AS(mstboot::mst(d), "mst: non-finite entry", Error);
  }
  SUBCASE("too small") {
    CHECK_THROWS_AS(mstboot::mst(Matrix::Zero(1, 1)), Error);
  }
}

TEST_CASE("mst matches brute-force enumeration on 8 nodes") {
  std::mt19937_64 gen(505);
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = testsupport::random_distance_matrix(gen, 8);
    const auto tree = mstboot::mst(d);
    REQUIRE(tree.edges.size() == 7);
    double weight = 0.0;
    for (const auto& e : tree.edges) weight += e.weight;
    const double best = testsupport::brute_force_mst_weight(d);
    CHECK(weight == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("mst agrees with node-growing construction on 100 random instances") {
  std::mt19937_64 gen(606);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = testsupport::random_distance_matrix(gen, 30);
    const auto kruskal = mstboot::mst(d);
    const auto prim = testsupport::prim_mst(d);
    REQUIRE(kruskal.edges.size() == prim.edges.size());
    CHECK(edge_set(kruskal) == edge_set(prim));
  }
}

TEST_CASE("mst is invariant under strictly increasing transforms") {
  std::mt19937_64 gen(707);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = testsupport::random_distance_matrix(gen, 12);
    const Matrix squared = d.array().square();
    CHECK(edge_set(mstboot::mst(d)) == edge_set(mstboot::mst(squared)));
  }
}

TEST_CASE("mst structure on bootstrap replicas") {
  // every replica MST must be a spanning tree: n-1 edges, connected, acyclic
  std::mt19937_64 gen(81);
  std::normal_distribution<double> noise;
  Matrix obs(9, 25);
  for (int i = 0; i < 9; ++i) {
    for (int t = 0; t < 25; ++t) obs(i, t) = noise(gen);
  }
  std::vector<std::string> ids;
  for (int i = 0; i < 9; ++i) ids.push_back("x" + std::to_string(i));
  const mstboot::ReturnsPanel panel(ids, obs);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto replica = mstboot::row_replica(panel, seed);
    const auto tree = mstboot::mst(mstboot::to_distance(replica));
    CHECK(tree.edges.size() == 8);
    CHECK(mstboot::is_tree(tree));
    CHECK(mstboot::is_connected(tree));
  }
}

TEST_CASE("pmfg hand cases") {
  SUBCASE("n=4 gives the complete graph") {
    std::mt19937_64 gen(11);
    const CorrelationMatrix corr(testsupport::random_correlation_values(gen, 4));
    const auto net = mstboot::pmfg(corr);
    CHECK(net.edges.size() == 6);
    for (std::uint32_t i = 0; i < 4; ++i) {
      for (std::uint32_t j = i + 1; j < 4; ++j) CHECK(net.has_edge(i, j));
    }
  }
  SUBCASE("n=5 drops exactly the weakest correlation") {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 20; ++trial) {
      const auto values = testsupport::random_correlation_values(gen, 5);
      const CorrelationMatrix corr(values);
      const auto net = mstboot::pmfg(corr);
      CHECK(net.edges.size() == 9);  // 3(n-2), one short of K5
      std::uint32_t wi = 0, wj = 1;
      for (std::uint32_t i = 0; i < 5; ++i) {
        for (std::uint32_t j = i + 1; j < 5; ++j) {
          if (values(i, j) < values(wi, wj)) {
            wi = i;
            wj = j;
          }
        }
      }
      CHECK_FALSE(net.has_edge(wi, wj));
    }
  }
  SUBCASE("n < 3 is rejected") {
    Matrix m(2, 2);
    m << 1, 0.5, 0.5, 1;
    CHECK_THROWS_WITH_AS(mstboot::pmfg(CorrelationMatrix(m)),
                         "pmfg: need n >= 3", Error);
  }
}

TEST_CASE("pmfg invariants on random instances") {
  std::mt19937_64 gen(909);
  std::uniform_int_distribution<std::size_t> size_dist(5, 30);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = size_dist(gen);
    const CorrelationMatrix corr(testsupport::random_correlation_values(gen, n));
    const auto net = mstboot::pmfg(corr);

    CHECK(net.edges.size() == 3 * (n - 2));
    CHECK(testsupport::verify_planar(net));
    CHECK(mstboot::is_planar(net));

    // weights are the correlations
    for (const auto& e : net.edges) CHECK(e.weight == corr(e.i, e.j));

    // MST inclusion
    const auto tree = mstboot::mst(mstboot::to_distance(corr));
    for (const auto& e : tree.edges) CHECK(net.has_edge(e.i, e.j));
  }
}

TEST_CASE("threshold rule names") {
  CHECK(mstboot::threshold_rule_from_string("strict") == ThresholdRule::Strict);
  CHECK(mstboot::threshold_rule_from_string("inclusive") ==
        ThresholdRule::Inclusive);
  CHECK(mstboot::to_string(ThresholdRule::Strict) == "strict");
  CHECK(mstboot::to_string(ThresholdRule::Inclusive) == "inclusive");
  CHECK_THROWS_AS(mstboot::threshold_rule_from_string("loose"), Error);
}

TEST_CASE("threshold_network") {
  const auto tally = demo_tally();

  SUBCASE("strict boundary semantics") {
    // threshold = B excludes even count-B links under the strict rule
    CHECK(mstboot::threshold_network(tally, 10).edges.empty());
    // threshold = B-1 captures them
    const auto top = mstboot::threshold_network(tally, 9);
    CHECK(edge_set(top) ==
          std::set<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}});
    CHECK(top.n_nodes == 5);
    CHECK(top.non_isolated_count() == 2);
  }
  SUBCASE("inclusive boundary semantics") {
    const auto top =
        mstboot::threshold_network(tally, 10, ThresholdRule::Inclusive);
    CHECK(edge_set(top) ==
          std::set<std::pair<std::uint32_t, std::uint32_t>>{{0, 1}});
    const auto at7 =
        mstboot::threshold_network(tally, 7, ThresholdRule::Inclusive);
    CHECK(at7.edges.size() == 3);
    const auto strict7 = mstboot::threshold_network(tally, 7);
    CHECK(strict7.edges.size() == 1);
  }
  SUBCASE("threshold 0 keeps every observed link") {
    const auto all = mstboot::threshold_network(tally, 0);
    CHECK(all.edges.size() == 4);
    CHECK(all.non_isolated_count() == 5);
    // edge weights are the counts
    for (const auto& e : all.edges) {
      CHECK(e.weight == static_cast<double>(tally.value(e.i, e.j)));
    }
  }
  SUBCASE("nested monotonicity") {
    for (std::uint32_t t1 = 0; t1 < 10; ++t1) {
      const auto lo = edge_set(mstboot::threshold_network(tally, t1));
      const auto hi = edge_set(mstboot::threshold_network(tally, t1 + 1));
      CHECK(std::includes(lo.begin(), lo.end(), hi.begin(), hi.end()));
    }
  }
  SUBCASE("threshold above B is rejected") {
    CHECK_THROWS_AS(mstboot::threshold_network(tally, 11), Error);
  }
}

TEST_CASE("graph predicates") {
  SUBCASE("trees") {
    EdgeNetwork path;
    path.n_nodes = 4;
    path.edges = {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}};
    CHECK(mstboot::is_tree(path));
    CHECK(mstboot::is_connected(path));

    EdgeNetwork cycle = path;
    cycle.edges.push_back({0, 3, 1});
    cycle.sort_edges();
    CHECK_FALSE(mstboot::is_tree(cycle));
    CHECK(mstboot::is_connected(cycle));

    EdgeNetwork forest;
    forest.n_nodes = 4;
    forest.edges = {{0, 1, 1}, {2, 3, 1}};
    CHECK_FALSE(mstboot::is_tree(forest));
    CHECK_FALSE(mstboot::is_connected(forest));
  }
  SUBCASE("planarity") {
    EdgeNetwork k5;
    k5.n_nodes = 5;
    for (std::uint32_t i = 0; i < 5; ++i) {
      for (std::uint32_t j = i + 1; j < 5; ++j) k5.edges.push_back({i, j, 1});
    }
    k5.sort_edges();
    CHECK_FALSE(mstboot::is_planar(k5));
    CHECK_FALSE(testsupport::verify_planar(k5));

    EdgeNetwork k4;
    k4.n_nodes = 4;
    for (std::uint32_t i = 0; i < 4; ++i) {
      for (std::uint32_t j = i + 1; j < 4; ++j) k4.edges.push_back({i, j, 1});
    }
    k4.sort_edges();
    CHECK(mstboot::is_planar(k4));
    CHECK(testsupport::verify_planar(k4));
  }
}

TEST_CASE("edge CSV and summary JSON") {
  EdgeNetwork net;
  net.n_nodes = 4;
  net.edges = {{0, 1, 0.5}, {1, 2, 1.25}};

  const std::string edges_path = "filtering_edges_test.csv";
  mstboot::write_edges_csv(net, {"AA", "BB", "CC", "DD"}, edges_path);
  std::ifstream in(edges_path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() ==
        "element_i,element_j,weight\n"
        "AA,BB,0.5\n"
        "BB,CC,1.25\n");
  std::remove(edges_path.c_str());

  const std::string summary_path = "filtering_summary_test.json";
  mstboot::write_network_summary_json(net, summary_path);
  std::ifstream jin(summary_path);
  const auto summary = nlohmann::json::parse(jin);
  CHECK(summary["nodes"] == 4);
  CHECK(summary["non_isolated_nodes"] == 3);
  CHECK(summary["edges"] == 2);
  CHECK(summary["is_tree"] == false);
  CHECK(summary["is_planar"] == true);
  std::remove(summary_path.c_str());
}

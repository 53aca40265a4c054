#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "mstboot/partitions.hpp"
#include "oracles.hpp"

using mstboot::BootstrapMethod;
using mstboot::BootstrapTally;
using mstboot::Error;
using mstboot::Partition;
using mstboot::ScatterPoint;
using mstboot::SectorLevel;
using mstboot::SectorMap;

namespace {

Partition make_partition(std::vector<std::uint32_t> members,
                         std::vector<int> labels) {
  Partition p;
  p.members = std::move(members);
  p.labels = std::move(labels);
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("partition basics") {
  const auto p = make_partition({0, 1, 2, 3}, {4, 4, 9, 4});
  CHECK(p.size() == 4);
  CHECK(p.n_blocks() == 2);

  mstboot::ComponentsResult comps;
  comps.components = {{2, 5}, {0, 7, 9}};
  comps.isolated = {1};
  const auto from = Partition::from_components(comps);
  CHECK(from.members == std::vector<std::uint32_t>{0, 2, 5, 7, 9});
  REQUIRE(from.labels.size() == 5);
  CHECK(from.labels[0] == from.labels[3]);  // 0 and 7 share a component
  CHECK(from.labels[0] == from.labels[4]);
  CHECK(from.labels[1] == from.labels[2]);  // 2 and 5 share the other
  CHECK(from.labels[0] != from.labels[1]);
}

TEST_CASE("sector_partition") {
  SectorMap sectors;
  sectors.assignments["A"] = {"tech", "software"};
  sectors.assignments["B"] = {"tech", "hardware"};
  sectors.assignments["C"] = {"energy", "oil"};
  const std::vector<std::string> ids{"A", "B", "C"};

  const auto at_sector =
      mstboot::sector_partition(sectors, ids, SectorLevel::Sector, {0, 1, 2});
  CHECK(at_sector.labels[0] == at_sector.labels[1]);
  CHECK(at_sector.labels[0] != at_sector.labels[2]);

  const auto at_sub = mstboot::sector_partition(sectors, ids,
                                                SectorLevel::Subsector, {0, 1, 2});
  CHECK(at_sub.n_blocks() == 3);

  const auto restricted =
      mstboot::sector_partition(sectors, ids, SectorLevel::Sector, {0, 2});
  CHECK(restricted.members == std::vector<std::uint32_t>{0, 2});
  CHECK(restricted.n_blocks() == 2);

  CHECK_THROWS_AS(
      mstboot::sector_partition(sectors, ids, SectorLevel::Sector, {0, 3}),
      Error);
  SectorMap missing;
  missing.assignments["A"] = {"tech", "software"};
  CHECK_THROWS_AS(
      mstboot::sector_partition(missing, ids, SectorLevel::Sector, {0, 1}),
      Error);

  CHECK(mstboot::to_string(SectorLevel::Sector) == "sector");
  CHECK(mstboot::to_string(SectorLevel::Subsector) == "subsector");
}

TEST_CASE("ari hand values") {
  SUBCASE("identical partitions give exactly 1") {
    const auto p = make_partition({0, 1, 2, 3, 4}, {0, 0, 1, 1, 2});
    CHECK(mstboot::ari(p, p) == 1.0);
  }
  SUBCASE("single-block test gives exactly 0") {
    const auto test = make_partition({0, 1, 2, 3}, {0, 0, 0, 0});
    const auto ref = make_partition({0, 1, 2, 3}, {0, 0, 1, 1});
    CHECK(mstboot::ari(test, ref) == 0.0);
  }
  SUBCASE("crossed pairs give -0.5") {
    const auto test = make_partition({0, 1, 2, 3}, {0, 0, 1, 1});
    const auto ref = make_partition({0, 1, 2, 3}, {0, 1, 0, 1});
    CHECK(std::abs(mstboot::ari(test, ref) - (-0.5)) < 1e-12);
  }
  SUBCASE("degenerate denominator, identical singletons") {
    const auto p = make_partition({0, 1, 2}, {0, 1, 2});
    CHECK(mstboot::ari(p, p) == 1.0);
    const auto one = make_partition({0, 1, 2}, {5, 5, 5});
    CHECK(mstboot::ari(one, one) == 1.0);
    // all-singletons vs all-in-one: zero numerator, nonzero denominator
    CHECK(mstboot::ari(p, one) == 0.0);
  }
  SUBCASE("universe mismatch and tiny universes are rejected") {
    const auto p = make_partition({0, 1, 2}, {0, 0, 1});
    const auto q = make_partition({0, 1, 3}, {0, 0, 1});
    CHECK_THROWS_WITH_AS(mstboot::ari(p, q),
                         "partition comparison: universes differ", Error);
    const auto tiny = make_partition({4}, {0});
    CHECK_THROWS_AS(mstboot::ari(tiny, tiny), Error);
  }
}

TEST_CASE("ari symmetry on random partition pairs") {
  std::mt19937_64 gen(1234);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = testsupport::random_partition(gen, 25, 5);
    const auto q = testsupport::random_partition(gen, 25, 4);
    CHECK(mstboot::ari(p, q) == mstboot::ari(q, p));
    CHECK(mstboot::ari(p, p) == 1.0);
  }
}

TEST_CASE("awi hand values") {
  SUBCASE("refinement gives exactly 1") {
    const auto test = make_partition({0, 1, 2, 3}, {0, 0, 1, 2});
    const auto ref = make_partition({0, 1, 2, 3}, {0, 0, 1, 1});
    const auto result = mstboot::awi(test, ref);
    REQUIRE(result.has_value());
    CHECK(*result == 1.0);
  }
  SUBCASE("crossed pairs give -0.5") {
    const auto test = make_partition({0, 1, 2, 3}, {0, 1, 0, 1});
    const auto ref = make_partition({0, 1, 2, 3}, {0, 0, 1, 1});
    const auto result = mstboot::awi(test, ref);
    REQUIRE(result.has_value());
    CHECK(std::abs(*result - (-0.5)) < 1e-12);
  }
  SUBCASE("all-singleton test is undefined") {
    const auto test = make_partition({0, 1, 2}, {0, 1, 2});
    const auto ref = make_partition({0, 1, 2}, {0, 0, 1});
    CHECK_FALSE(mstboot::awi(test, ref).has_value());
  }
  SUBCASE("single-block reference is undefined (p = 1)") {
    const auto test = make_partition({0, 1, 2}, {0, 0, 1});
    const auto ref = make_partition({0, 1, 2}, {0, 0, 0});
    CHECK_FALSE(mstboot::awi(test, ref).has_value());
  }
}

TEST_CASE("awi is 1 on random refinements") {
  std::mt19937_64 gen(555);
  std::uniform_int_distribution<int> block_count(2, 4);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 30;
    auto ref = testsupport::random_partition(gen, n, block_count(gen));
    // split each reference block into random sub-blocks: a strict refinement
    Partition test = ref;
    std::uniform_int_distribution<int> split(0, 1);
    for (std::size_t k = 0; k < n; ++k) {
      test.labels[k] = ref.labels[k] * 2 + split(gen);
    }
    const auto result = mstboot::awi(test, ref);
    if (result.has_value()) {
      CHECK(*result == 1.0);
    } else {
      // refinement degenerated to all singletons; nothing to check
      std::size_t co_blocked = 0;
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
          if (test.labels[a] == test.labels[b]) ++co_blocked;
        }
      }
      CHECK(co_blocked == 0);
    }
  }
}

TEST_CASE("permutation null centers both indices at zero") {
  const std::size_t n = 60;
  Partition ref;
  ref.members.resize(n);
  std::iota(ref.members.begin(), ref.members.end(), 0u);
  ref.labels.resize(n);
  for (std::size_t k = 0; k < n; ++k) ref.labels[k] = static_cast<int>(k / 15);

  std::vector<int> base(n);
  for (std::size_t k = 0; k < n; ++k) base[k] = static_cast<int>(k / 10);

  std::mt19937_64 gen(31415);
  double ari_sum = 0.0;
  double awi_sum = 0.0;
  int awi_count = 0;
  for (int perm = 0; perm < 1000; ++perm) {
    Partition test = ref;
    test.labels = base;
    std::shuffle(test.labels.begin(), test.labels.end(), gen);
    ari_sum += mstboot::ari(test, ref);
    if (const auto w = mstboot::awi(test, ref)) {
      awi_sum += *w;
      ++awi_count;
    }
  }
  CHECK(awi_count == 1000);  // 6 blocks of 10 always have co-blocked pairs
  CHECK(std::abs(ari_sum / 1000.0) < 0.02);
  CHECK(std::abs(awi_sum / 1000.0) < 0.02);
}

TEST_CASE("fisher exact test") {
  SUBCASE("diagonal 10/10 table") {
    const auto result = mstboot::fisher_exact_two_sided(10, 0, 0, 10);
    CHECK(result.defined);
    // exactly 2 / C(20,10)
    CHECK(result.p_value == doctest::Approx(2.0 / 184756.0).epsilon(1e-10));
    CHECK(result.p_value == doctest::Approx(1.08e-5).epsilon(0.01));
  }
  SUBCASE("balanced table has p = 1") {
    const auto result = mstboot::fisher_exact_two_sided(5, 5, 5, 5);
    CHECK(result.defined);
    CHECK(result.p_value == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("zero margins are undefined") {
    CHECK_FALSE(mstboot::fisher_exact_two_sided(0, 0, 3, 4).defined);
    CHECK_FALSE(mstboot::fisher_exact_two_sided(3, 0, 4, 0).defined);
    CHECK(mstboot::fisher_exact_two_sided(0, 0, 3, 4).p_value == 1.0);
  }
  SUBCASE("matches exhaustive enumeration for every table with N <= 40") {
    std::size_t checked = 0;
    for (std::uint64_t n = 2; n <= 40; ++n) {
      for (std::uint64_t a = 0; a <= n; ++a) {
        for (std::uint64_t b = 0; a + b <= n; ++b) {
          for (std::uint64_t c = 0; a + b + c <= n; ++c) {
            const std::uint64_t d = n - a - b - c;
            const auto oracle = testsupport::exact_fisher(a, b, c, d);
            const auto result = mstboot::fisher_exact_two_sided(a, b, c, d);
            if (!oracle.has_value()) {
              CHECK_FALSE(result.defined);
              continue;
            }
            REQUIRE(result.defined);
            if (std::abs(result.p_value - *oracle) >
                1e-12 * std::max(1.0, *oracle)) {
              CAPTURE(a);
              CAPTURE(b);
              CAPTURE(c);
              CAPTURE(d);
              REQUIRE(result.p_value == doctest::Approx(*oracle).epsilon(1e-12));
            }
            ++checked;
          }
        }
      }
    }
    // all 2x2 tables with 2 <= a+b+c+d <= 40 and nonzero margins
    CHECK(checked > 100000);
  }
}

TEST_CASE("sector_association_test") {
  const auto point = [](std::uint32_t r, std::uint32_t p, bool same) {
    ScatterPoint sp;
    sp.i = 0;
    sp.j = 1;
    sp.row_value = r;
    sp.pair_value = p;
    sp.same_sector = same;
    return sp;
  };

  SUBCASE("table construction excludes ties") {
    std::vector<ScatterPoint> points{
        point(9, 2, true),   // r>p, same
        point(8, 1, false),  // r>p, diff
        point(1, 7, true),   // p>r, same
        point(3, 3, true),   // tie: excluded
        point(0, 5, false),  // p>r, diff
    };
    const auto result = mstboot::sector_association_test(points, 0.01);
    CHECK(result.table[0][0] == 1);
    CHECK(result.table[0][1] == 1);
    CHECK(result.table[1][0] == 1);
    CHECK(result.table[1][1] == 1);
    CHECK(result.defined);
    CHECK(result.p_value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(result.reject);
  }
  SUBCASE("strong cross-sector enrichment rejects") {
    std::vector<ScatterPoint> points;
    for (int k = 0; k < 10; ++k) points.push_back(point(9, 1, false));
    for (int k = 0; k < 10; ++k) points.push_back(point(1, 9, true));
    const auto result = mstboot::sector_association_test(points, 0.01);
    CHECK(result.table[0][1] == 10);
    CHECK(result.table[1][0] == 10);
    CHECK(result.defined);
    CHECK(result.p_value == doctest::Approx(2.0 / 184756.0).epsilon(1e-10));
    CHECK(result.reject);
    CHECK(result.direction == "row_dominant_cross_sector");
  }
  SUBCASE("same-sector enrichment flips the direction") {
    std::vector<ScatterPoint> points;
    for (int k = 0; k < 8; ++k) points.push_back(point(9, 1, true));
    for (int k = 0; k < 8; ++k) points.push_back(point(1, 9, false));
    const auto result = mstboot::sector_association_test(points, 0.01);
    CHECK(result.direction == "row_dominant_same_sector");
    CHECK(result.reject);
  }
  SUBCASE("zero margin is reported undefined") {
    std::vector<ScatterPoint> points{point(9, 2, true), point(8, 1, true)};
    const auto result = mstboot::sector_association_test(points, 0.01);
    CHECK_FALSE(result.defined);
    CHECK_FALSE(result.reject);
    CHECK(result.p_value == 1.0);
  }
  SUBCASE("alpha is honored") {
    std::vector<ScatterPoint> points;
    for (int k = 0; k < 4; ++k) points.push_back(point(9, 1, false));
    for (int k = 0; k < 4; ++k) points.push_back(point(1, 9, true));
    const auto loose = mstboot::sector_association_test(points, 0.05);
    const auto strict = mstboot::sector_association_test(points, 0.01);
    CHECK(loose.p_value == strict.p_value);
    CHECK(loose.p_value == doctest::Approx(2.0 / 70.0).epsilon(1e-10));
    CHECK(loose.reject);
    CHECK_FALSE(strict.reject);
  }
}

TEST_CASE("metric_curves") {
  // 6 nodes, two sectors {0,1,2} / {3,4,5}
  SectorMap sectors;
  const std::vector<std::string> ids{"A", "B", "C", "D", "E", "F"};
  for (int k = 0; k < 6; ++k) {
    sectors.assignments[ids[k]] = {k < 3 ? "S1" : "S2", k < 3 ? "S1" : "S2"};
  }

  BootstrapTally tally;
  tally.method = BootstrapMethod::Row;
  tally.replicas = 10;
  tally.n_nodes = 6;
  tally.counts[BootstrapTally::pack(0, 1)] = 9;
  tally.counts[BootstrapTally::pack(1, 2)] = 8;
  tally.counts[BootstrapTally::pack(3, 4)] = 8;
  tally.counts[BootstrapTally::pack(4, 5)] = 7;
  tally.counts[BootstrapTally::pack(2, 3)] = 4;
  tally.counts[BootstrapTally::pack(0, 5)] = 4;

  SUBCASE("component partitions against the planted sectors") {
    const auto rows = mstboot::metric_curves(tally, sectors, ids,
                                             SectorLevel::Sector, {9, 6, 3});
    REQUIRE(rows.size() == 3);

    // threshold 9: no link passes strictly, degenerate empty network
    CHECK(rows[0].threshold == 9);
    CHECK(rows[0].nodes == 0);
    CHECK(rows[0].degenerate);
    CHECK_FALSE(rows[0].ari.has_value());
    CHECK_FALSE(rows[0].awi.has_value());

    // threshold 6: components {0,1,2} and {3,4,5} match the sectors exactly
    CHECK(rows[1].threshold == 6);
    CHECK(rows[1].nodes == 6);
    REQUIRE(rows[1].ari.has_value());
    CHECK(*rows[1].ari == 1.0);
    REQUIRE(rows[1].awi.has_value());
    CHECK(*rows[1].awi == 1.0);

    // threshold 3: one component spanning everything, ARI 0 by convention
    CHECK(rows[2].threshold == 3);
    CHECK(rows[2].nodes == 6);
    REQUIRE(rows[2].ari.has_value());
    CHECK(*rows[2].ari == 0.0);
  }
  SUBCASE("threshold validation") {
    CHECK_THROWS_WITH_AS(mstboot::metric_curves(tally, sectors, ids,
                                                SectorLevel::Sector, {11}),
                         "metric_curves: threshold out of [0, B]", Error);
    CHECK_THROWS_WITH_AS(mstboot::metric_curves(tally, sectors, ids,
                                                SectorLevel::Sector, {3, 6}),
                         "metric_curves: thresholds must be strictly descending",
                         Error);
    CHECK_THROWS_WITH_AS(mstboot::metric_curves(tally, sectors, ids,
                                                SectorLevel::Sector, {6, 6}),
                         "metric_curves: thresholds must be strictly descending",
                         Error);
  }
  SUBCASE("one-pair network is a defined-single-block edge case") {
    const auto rows = mstboot::metric_curves(tally, sectors, ids,
                                             SectorLevel::Sector, {8});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].nodes == 2);
    // single component {0,1} vs single restricted sector block: both trivial,
    // identical partitions
    REQUIRE(rows[0].ari.has_value());
    CHECK(*rows[0].ari == 1.0);
  }
}

TEST_CASE("metrics CSV and association JSON") {
  SUBCASE("metrics.csv renders undefined as --") {
    std::vector<mstboot::MetricRow> rows(2);
    rows[0].threshold = 9;
    rows[0].nodes = 0;
    rows[0].degenerate = true;
    rows[1].threshold = 6;
    rows[1].nodes = 6;
    rows[1].ari = 1.0;
    rows[1].awi = -0.5;
    std::vector<std::tuple<BootstrapMethod, SectorLevel,
                           std::vector<mstboot::MetricRow>>>
        curves;
    curves.emplace_back(BootstrapMethod::Row, SectorLevel::Sector, rows);
    const std::string path = "partitions_metrics_test.csv";
    mstboot::write_metrics_csv(curves, path);
    CHECK(read_file(path) ==
          "method,level,threshold,nodes,ari,awi\n"
          "row,sector,9,0,--,--\n"
          "row,sector,6,6,1,-0.5\n");
    std::remove(path.c_str());
  }
  SUBCASE("association_test.json round-trips through a JSON parser") {
    mstboot::AssociationTest test;
    test.table = {{{3, 17}, {11, 2}}};
    test.defined = true;
    test.p_value = 0.0004;
    test.alpha = 0.01;
    test.reject = true;
    test.direction = "row_dominant_cross_sector";
    const std::string path = "partitions_assoc_test.json";
    mstboot::write_association_json(test, path);
    std::ifstream in(path);
    const auto parsed = nlohmann::json::parse(in);
    CHECK(parsed["table"][0][0] == 3);
    CHECK(parsed["table"][0][1] == 17);
    CHECK(parsed["table"][1][0] == 11);
    CHECK(parsed["table"][1][1] == 2);
    CHECK(parsed["defined"] == true);
    CHECK(parsed["p_value"] == 0.0004);
    CHECK(parsed["alpha"] == 0.01);
    CHECK(parsed["reject"] == true);
    CHECK(parsed["direction"] == "row_dominant_cross_sector");
    std::remove(path.c_str());
  }
}

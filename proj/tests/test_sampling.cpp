#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sparseclust/bounds.hpp"
#include "sparseclust/rng.hpp"
#include "sparseclust/sampling.hpp"
#include "sparseclust/synth.hpp"

using namespace sparseclust;

namespace {

SamplingGraph graph_of(std::size_t n, std::vector<SamplingGraph::Edge> edges) {
  return SamplingGraph(n, edges);
}

}  // namespace

TEST_CASE("sample_mask extremes and errors") {
  CHECK(sample_mask(20, 1.0, 3).observed_count() == 190);
  CHECK(sample_mask(20, 0.0, 3).observed_count() == 0);
  CHECK_THROWS_AS(sample_mask(5, -0.01, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_mask(5, 1.01, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_mask(5, NAN, 1), std::invalid_argument);
}

TEST_CASE("sample_mask is symmetric and deterministic") {
  const auto a = sample_mask(50, 0.3, 9);
  const auto b = sample_mask(50, 0.3, 9);
  const auto c = sample_mask(50, 0.3, 10);
  CHECK(a.observed_pairs() == b.observed_pairs());
  CHECK(a.observed_pairs() != c.observed_pairs());
  for (ItemId i = 0; i < 50; ++i) {
    CHECK_FALSE(a.observed(i, i));
    for (ItemId j = 0; j < 50; ++j) CHECK(a.observed(i, j) == a.observed(j, i));
  }
}

TEST_CASE("masks are nested across p for a fixed seed") {
  const auto lo = sample_mask(40, 0.2, 5);
  const auto hi = sample_mask(40, 0.6, 5);
  for (auto [i, j] : lo.observed_pairs()) CHECK(hi.observed(i, j));
}

TEST_CASE("observed count at the worked-example rate") {
  const double M = 499500.0, p = 0.5526;
  const double sigma = std::sqrt(M * p * (1 - p));
  const auto mask = sample_mask(1000, p, 3);
  CHECK(std::abs(static_cast<double>(mask.observed_count()) - 276023.0) <= 3 * sigma);
}

TEST_CASE("mean edge count matches p * M over many draws") {
  const std::size_t n = 40, draws = 200;
  const double M = n * (n - 1) / 2.0;
  for (double p : {0.1, 0.5, 0.85}) {
    double total = 0.0;
    for (std::size_t d = 0; d < draws; ++d) total += sample_mask(n, p, 1000 + d).observed_count();
    const double sigma_mean = std::sqrt(M * p * (1 - p) / draws);
    CHECK(std::abs(total / draws - p * M) <= 3 * sigma_mean);
  }
}

TEST_CASE("build_graph mirrors the mask") {
  CHECK(build_graph(ObservationMask(6, 0.0)).edge_count() == 0);
  CHECK(build_graph(ObservationMask::full(5)).edge_count() == 10);
  const auto mask = sample_mask(30, 0.4, 77);
  const auto g = build_graph(mask);
  CHECK(g.edge_count() == mask.observed_count());
  CHECK(g.edges() == mask.observed_pairs());
  for (ItemId i = 0; i < 30; ++i) {
    CHECK_FALSE(g.has_edge(i, i));
    for (ItemId j = 0; j < 30; ++j) CHECK(g.has_edge(i, j) == mask.observed(i, j));
    const auto nb = g.neighbors(i);
    CHECK(std::is_sorted(nb.begin(), nb.end()));
  }
}

TEST_CASE("edge-list graph validation") {
  const auto g = graph_of(4, {{1, 0}, {0, 1}, {2, 3}});
  CHECK(g.edge_count() == 2);
  CHECK(g.has_edge(0, 1));
  CHECK_THROWS_AS(graph_of(4, {{1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(graph_of(4, {{1, 4}}), std::invalid_argument);
}

TEST_CASE("disjoint set forest") {
  DisjointSetForest f(6);
  CHECK(f.set_count() == 6);
  CHECK(f.unite(0, 1));
  CHECK_FALSE(f.unite(1, 0));
  CHECK(f.unite(3, 4));
  CHECK(f.unite(4, 1));
  CHECK(f.set_count() == 3);
  CHECK(f.same(0, 3));
  CHECK_FALSE(f.same(0, 5));
  for (std::size_t x = 0; x < 6; ++x) CHECK(f.find(f.find(x)) == f.find(x));

  // union order does not change the resulting partition
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    rng::SplitMix64 gen(seed);
    std::vector<std::pair<std::size_t, std::size_t>> ops;
    for (int k = 0; k < 12; ++k) ops.emplace_back(gen.uniform_int(0, 19), gen.uniform_int(0, 19));
    DisjointSetForest a(20), b(20);
    for (auto [x, y] : ops) a.unite(x, y);
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) b.unite(it->second, it->first);
    CHECK(a.set_count() == b.set_count());
    for (std::size_t x = 0; x < 20; ++x)
      for (std::size_t y = 0; y < 20; ++y) CHECK(a.same(x, y) == b.same(x, y));
  }
}

TEST_CASE("is_connected examples") {
  const auto g = graph_of(4, {{0, 1}});
  const std::vector<ItemId> single{3}, three{0, 1, 2}, pair{0, 1}, dup{1, 0, 1};
  CHECK(is_connected(g, single));
  CHECK_FALSE(is_connected(g, three));
  CHECK(is_connected(g, pair));
  CHECK(is_connected(g, dup));
  CHECK_THROWS_AS(is_connected(g, std::vector<ItemId>{}), std::invalid_argument);
}

TEST_CASE("union-find connectivity agrees with breadth-first search") {
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    rng::SplitMix64 gen(seed);
    const std::size_t n = gen.uniform_int(1, 32);
    const double p = gen.uniform();
    const auto g = build_graph(sample_mask(n, p, seed));
    std::vector<ItemId> subset;
    for (ItemId v = 0; v < n; ++v)
      if (gen.uniform() < 0.5) subset.push_back(v);
    if (subset.empty()) subset.push_back(static_cast<ItemId>(gen.uniform_int(0, n - 1)));
    CHECK(is_connected(g, subset) == oracle::bfs_connected(g, subset));
  }
}

TEST_CASE("adding edges never disconnects") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t n = 12;
    std::vector<ItemId> subset{0, 2, 3, 5, 7, 8, 11};
    bool was = false;
    for (double p = 0.0; p <= 1.0001; p += 0.05) {
      const bool now = is_connected(build_graph(sample_mask(n, std::min(p, 1.0), seed)), subset);
      CHECK((!was || now));
      was = now;
    }
    CHECK(was);
  }
}

TEST_CASE("connectivity_report extremes") {
  const auto t = generate_tree({ShapeKind::random_unbalanced, 20, 4});
  const auto full = connectivity_report(t, build_graph(ObservationMask::full(20)), 1);
  CHECK(full.size() == 39);
  for (const auto& [c, ok] : full) CHECK(ok);
  const auto empty = connectivity_report(t, build_graph(ObservationMask(20, 0.0)), 2);
  CHECK(empty.size() == 19);
  for (const auto& [c, ok] : empty) CHECK_FALSE(ok);
  CHECK_THROWS_AS(connectivity_report(t, build_graph(ObservationMask(19, 0.0)), 2),
                  std::invalid_argument);
}

TEST_CASE("split left cluster scenario") {
  // Two 4-item clusters. The left one is observed as two disconnected pieces.
  const auto t = generate_tree({ShapeKind::balanced, 8, 1});
  const auto g = graph_of(8, {{0, 1}, {2, 3}, {4, 5}, {5, 6}, {6, 7}, {1, 4}, {3, 6}});
  const auto report = connectivity_report(t, g, 4);
  REQUIRE(report.size() == 3);
  CHECK_FALSE(report.at({0, 1, 2, 3}));
  CHECK(report.at({4, 5, 6, 7}));
  CHECK(report.at({0, 1, 2, 3, 4, 5, 6, 7}));
}

TEST_CASE("empirical connectivity respects the Gilbert bound") {
  const int draws = 4000;
  for (int n : {4, 8, 16}) {
    for (int k = 1; k <= 9; ++k) {
      const double p = k / 10.0;
      std::vector<ItemId> all(n);
      for (int v = 0; v < n; ++v) all[v] = v;
      int hits = 0;
      for (int d = 0; d < draws; ++d)
        hits += is_connected(build_graph(sample_mask(n, p, rng::hash(n, k, d))), all);
      const double phat = static_cast<double>(hits) / draws;
      const double bound = bounds::gilbert_lower_bound(n, p);
      const double sigma = std::sqrt(std::max(bound * (1 - bound), 0.25 / draws) / draws);
      INFO("n " << n << " p " << p << " phat " << phat << " bound " << bound);
      CHECK(phat >= bound - 3 * sigma);
    }
  }
}

#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "sparseclust/clustering.hpp"
#include "sparseclust/rng.hpp"
#include "sparseclust/sampling.hpp"
#include "sparseclust/synth.hpp"

using namespace sparseclust;

namespace {

ClusterTree any_tree(std::size_t n, std::uint64_t seed) {
  const ShapeKind kind = seed % 3 == 0 && (n & (n - 1)) == 0   ? ShapeKind::balanced
                         : seed % 3 == 1                       ? ShapeKind::caterpillar
                                                               : ShapeKind::random_unbalanced;
  return generate_tree({kind, n, seed});
}

std::set<LeafSet> forest_sets(const MergeForest& f) {
  const auto sets = f.leaf_sets();
  return {sets.begin(), sets.end()};
}

}  // namespace

TEST_CASE("tiny hand example") {
  const SimilarityMatrix s(3, oracle::dense_from(3, {{0, 1, 0.9}, {0, 2, 0.2}, {1, 2, 0.3}}));
  const auto f = incomplete_agglomerative(s, ObservationMask::full(3));
  REQUIRE(f.merges.size() == 2);
  CHECK(f.merges[0] == Merge{0, 1, 0.9});
  CHECK(f.merges[1] == Merge{3, 2, 0.3});
  CHECK(f.roots == std::vector<ClusterId>{4});
  CHECK_FALSE(f.forced_halt);
  CHECK(f.children(4) == std::pair<ClusterId, ClusterId>{3, 2});
  CHECK_THROWS_AS(f.children(1), std::out_of_range);
}

TEST_CASE("unobserved pairs are treated as zero") {
  const SimilarityMatrix s(3, oracle::dense_from(3, {{0, 1, 0.9}, {0, 2, 0.2}, {1, 2, 0.3}}));
  const std::vector<ObservationMask::Pair> pairs{{0, 2}, {1, 2}};
  const auto f = incomplete_agglomerative(s, ObservationMask::from_pairs(3, pairs, 0.6));
  REQUIRE(f.merges.size() == 2);
  CHECK(f.merges[0] == Merge{1, 2, 0.3});
  CHECK(f.merges[1] == Merge{0, 3, 0.2});
}

TEST_CASE("ties resolve to the lexicographically smallest pair") {
  const SimilarityMatrix s(4, std::vector<double>(16, 0.5));
  const auto f = incomplete_agglomerative(s, ObservationMask::full(4));
  REQUIRE(f.merges.size() == 3);
  CHECK(f.merges[0] == Merge{0, 1, 0.5});
  CHECK(f.merges[1] == Merge{4, 2, 0.5});
  CHECK(f.merges[2] == Merge{5, 3, 0.5});
  CHECK(f == incomplete_agglomerative_reference(s, ObservationMask::full(4)));
}

TEST_CASE("empty mask halts with singleton roots") {
  const auto t = any_tree(10, 2);
  const auto s = generate_tc_similarities(t, 1, 0.5);
  const auto f = incomplete_agglomerative(s, ObservationMask(10, 0.0));
  CHECK(f.forced_halt);
  CHECK(f.merges.empty());
  std::vector<ClusterId> expect(10);
  std::iota(expect.begin(), expect.end(), 0u);
  CHECK(f.roots == expect);
  const auto r = evaluate_recovery(t, f, 2);
  CHECK(r.recovered == 0);
  CHECK(r.total_clusters == 9);
  CHECK_FALSE(r.fully_recovered);
}

TEST_CASE("dimension mismatch") {
  const SimilarityMatrix s(3, std::vector<double>(9, 0.5));
  CHECK_THROWS_AS(incomplete_agglomerative(s, ObservationMask::full(4)), std::invalid_argument);
  CHECK_THROWS_AS(incomplete_agglomerative_reference(s, ObservationMask::full(4)), std::invalid_argument);
  const auto t = any_tree(4, 1);
  const auto f = incomplete_agglomerative(s, ObservationMask::full(3));
  CHECK_THROWS_AS(evaluate_recovery(t, f, 1), std::invalid_argument);
}

TEST_CASE("full observation recovers the true tree") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    rng::SplitMix64 gen(seed + 17);
    std::size_t n = gen.uniform_int(8, 128);
    if (seed % 3 == 0) n = std::size_t{1} << gen.uniform_int(3, 7);
    const auto t = any_tree(n, seed);
    const auto s = generate_tc_similarities(t, seed, 0.5);
    const auto f = incomplete_agglomerative(s, ObservationMask::full(n));
    CHECK_FALSE(f.forced_halt);
    CHECK(f.roots.size() == 1);
    CHECK(forest_sets(f) == cluster_set(t, 1));
    for (std::size_t n_min : {std::size_t{1}, std::size_t{2}, n / 4 + 1, n})
      CHECK(evaluate_recovery(t, f, n_min).fully_recovered);
  }
}

TEST_CASE("two connected clusters with a cross edge are both recovered") {
  const auto t = generate_tree({ShapeKind::balanced, 8, 1});
  const auto s = generate_tc_similarities(t, 3, 0.5);
  const std::vector<ObservationMask::Pair> pairs{{0, 1}, {1, 2}, {2, 3}, {4, 6}, {6, 5}, {5, 7}, {3, 4}};
  const auto f = incomplete_agglomerative(s, ObservationMask::from_pairs(8, pairs, 7.0 / 28));
  const auto sets = forest_sets(f);
  CHECK(sets.count({0, 1, 2, 3}));
  CHECK(sets.count({4, 5, 6, 7}));
  CHECK(f.roots.size() == 1);
  const auto r = evaluate_recovery(t, f, 4);
  CHECK(r.fully_recovered);
  CHECK(r.recovered == 3);
}

TEST_CASE("split cluster scenario is not recovered") {
  const auto t = generate_tree({ShapeKind::balanced, 8, 1});
  const auto s = generate_tc_similarities(t, 3, 0.5);
  const std::vector<ObservationMask::Pair> pairs{{0, 1}, {2, 3}, {4, 5}, {5, 6}, {6, 7}, {1, 4}, {3, 6}};
  const auto f = incomplete_agglomerative(s, ObservationMask::from_pairs(8, pairs, 7.0 / 28));
  const auto r = evaluate_recovery(t, f, 4);
  CHECK_FALSE(r.per_cluster.at({0, 1, 2, 3}));
  CHECK(r.per_cluster.at({4, 5, 6, 7}));
  CHECK_FALSE(r.fully_recovered);
  CHECK(r.recovered == 2);
}

TEST_CASE("heap and scan implementations agree") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    rng::SplitMix64 gen(seed * 31 + 1);
    const std::size_t n = gen.uniform_int(2, 60);
    const auto t = any_tree(n, seed);
    const SimilarityMatrix s = seed % 2 ? generate_tc_similarities(t, seed, seed % 4 == 1 ? 0.0 : 0.5)
                                        : SimilarityMatrix(n, oracle::quantized_random_sims(n, seed, 4));
    const auto mask = sample_mask(n, gen.uniform(), seed);
    const auto fast = incomplete_agglomerative(s, mask);
    const auto slow = incomplete_agglomerative_reference(s, mask);
    CHECK(fast == slow);
  }
}

TEST_CASE("merge sequence invariants") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    rng::SplitMix64 gen(seed + 5);
    const std::size_t n = gen.uniform_int(2, 50);
    const SimilarityMatrix s(n, oracle::quantized_random_sims(n, seed, 6));
    const auto mask = sample_mask(n, gen.uniform(), seed);
    const auto f = incomplete_agglomerative(s, mask);
    for (std::size_t k = 1; k < f.merges.size(); ++k)
      CHECK(f.merges[k].similarity <= f.merges[k - 1].similarity);
    for (const auto& m : f.merges) CHECK(m.similarity > 0.0);
    // roots correspond to connected components of the sampling graph
    DisjointSetForest dsu(n);
    for (auto [i, j] : mask.observed_pairs()) dsu.unite(i, j);
    CHECK(f.roots.size() == dsu.set_count());
    CHECK(f.forced_halt == (dsu.set_count() > 1));
    CHECK(f.cluster_count() == n + f.merges.size());
    CHECK(f.merges.size() == n - f.roots.size());
  }
}

TEST_CASE("relabeling items relabels the output") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    rng::SplitMix64 gen(seed + 99);
    const std::size_t n = gen.uniform_int(3, 40);
    const auto t = any_tree(n, seed);
    const auto s = generate_tc_similarities(t, seed, 0.5);
    const auto mask = sample_mask(n, 0.3 + 0.5 * gen.uniform(), seed);
    std::vector<ItemId> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[gen.uniform_int(0, i)]);
    std::vector<double> dense(n * n, 0.0);
    std::vector<ObservationMask::Pair> pairs;
    for (ItemId i = 0; i < n; ++i)
      for (ItemId j = 0; j < n; ++j) dense[perm[i] * n + perm[j]] = s(i, j);
    for (auto [i, j] : mask.observed_pairs()) pairs.emplace_back(perm[i], perm[j]);
    const auto f1 = incomplete_agglomerative(s, mask);
    const auto f2 = incomplete_agglomerative(SimilarityMatrix(n, dense),
                                             ObservationMask::from_pairs(n, pairs, mask.p_nominal()));
    std::set<LeafSet> mapped;
    for (auto ls : f1.leaf_sets()) {
      for (auto& v : ls) v = perm[v];
      std::sort(ls.begin(), ls.end());
      mapped.insert(ls);
    }
    CHECK(mapped == forest_sets(f2));
  }
}

namespace {

/// Checks recovered(C) == connected(C) for every true cluster of size >= 2.
int mismatches(const ClusterTree& t, const SimilarityMatrix& s, const ObservationMask& mask) {
  const auto f = incomplete_agglomerative(s, mask);
  const auto got = forest_sets(f);
  const auto g = build_graph(mask);
  int bad = 0;
  for (NodeId v = 0; v < t.node_count(); ++v) {
    if (t.node(v).size < 2) continue;
    const auto c = t.canonical_leaf_set(v);
    if ((got.count(c) > 0) != oracle::bfs_connected(g, c)) ++bad;
  }
  return bad;
}

}  // namespace

TEST_CASE("recovery of each cluster matches connectivity, exhaustive on 5 items") {
  for (const char* shape : {"((((0,1),2),3),4)", "((0,1),(2,(3,4)))", "(((3,0),(4,1)),2)"}) {
    const auto t = oracle::parse_tree(shape);
    const auto s = generate_tc_similarities(t, 42, 0.5);
    REQUIRE(check_tc(t, s).holds);
    int bad = 0;
    for (std::uint32_t bits = 0; bits < 1024; ++bits) {
      std::vector<ObservationMask::Pair> pairs;
      int e = 0;
      for (ItemId i = 0; i < 5; ++i)
        for (ItemId j = i + 1; j < 5; ++j, ++e)
          if (bits >> e & 1) pairs.emplace_back(i, j);
      bad += mismatches(t, s, ObservationMask::from_pairs(5, pairs, 0.5));
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("recovery of each cluster matches connectivity, random instances") {
  int bad = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    rng::SplitMix64 gen(seed + 7777);
    const std::size_t n = gen.uniform_int(2, 64);
    const auto t = any_tree(n, seed);
    const auto s = generate_tc_similarities(t, seed, 0.5);
    bad += mismatches(t, s, sample_mask(n, gen.uniform(), seed));
  }
  CHECK(bad == 0);
}

TEST_CASE("recovery report bookkeeping") {
  const auto t = any_tree(30, 4);
  const auto s = generate_tc_similarities(t, 4, 0.5);
  const auto f = incomplete_agglomerative(s, sample_mask(30, 0.3, 4));
  for (std::size_t n_min : {1, 2, 5, 10, 30, 31}) {
    const auto r = evaluate_recovery(t, f, n_min);
    CHECK(r.n_min == n_min);
    CHECK(r.total_clusters == cluster_set(t, n_min).size());
    CHECK(r.per_cluster.size() == r.total_clusters);
    const auto hits = std::count_if(r.per_cluster.begin(), r.per_cluster.end(),
                                    [](const auto& kv) { return kv.second; });
    CHECK(static_cast<std::size_t>(hits) == r.recovered);
    CHECK(r.fully_recovered == (r.recovered == r.total_clusters));
  }
}

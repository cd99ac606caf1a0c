#pragma once

// Bernoulli observation masks and the sampling graph they induce.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "sparseclust/core_model.hpp"

namespace sparseclust {

/// The uniform in [0, 1) that decides whether pair {i, j} is observed under
/// `seed`. Order-independent in (i, j). A pair is observed at rate p iff this
/// value is < p, so masks drawn with one seed are nested as p grows.
double pair_uniform(std::uint64_t seed, ItemId i, ItemId j) noexcept;

/// Observes each unordered pair independently with probability p.
/// Throws std::invalid_argument if p is outside [0, 1].
ObservationMask sample_mask(std::size_t n, double p, std::uint64_t seed);

/// Undirected graph on the items with an edge for every observed pair.
class SamplingGraph {
 public:
  using Edge = std::pair<ItemId, ItemId>;

  explicit SamplingGraph(const ObservationMask& mask);
  SamplingGraph(std::size_t n, std::span<const Edge> edges);

  std::size_t size() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edges_; }
  std::span<const ItemId> neighbors(ItemId v) const { return adjacency_.at(v); }
  bool has_edge(ItemId a, ItemId b) const;
  /// Edges (i < j) in lexicographic order.
  std::vector<Edge> edges() const;

 private:
  std::vector<std::vector<ItemId>> adjacency_;  // sorted, no self-loops
  std::size_t edges_ = 0;
};

inline SamplingGraph build_graph(const ObservationMask& mask) { return SamplingGraph(mask); }

/// Union-find with path compression and union by rank.
class DisjointSetForest {
 public:
  explicit DisjointSetForest(std::size_t n);

  std::size_t find(std::size_t x);
  /// Returns true if x and y were in different sets.
  bool unite(std::size_t x, std::size_t y);
  bool same(std::size_t x, std::size_t y) { return find(x) == find(y); }
  std::size_t set_count() const noexcept { return sets_; }
  std::size_t size() const noexcept { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
  std::size_t sets_;
};

/// True iff the subgraph induced on `subset` is connected. Singletons are
/// connected. Throws std::invalid_argument on an empty subset or an id out
/// of range.
bool is_connected(const SamplingGraph& graph, std::span<const ItemId> subset);

/// Connectivity verdict for every cluster of `tree` with size >= n_min.
std::map<LeafSet, bool> connectivity_report(const ClusterTree& tree, const SamplingGraph& graph,
                                            std::size_t n_min);

}  // namespace sparseclust

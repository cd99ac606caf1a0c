#include "sparseclust/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "sparseclust/rng.hpp"

namespace sparseclust {

namespace {
constexpr std::uint64_t kMaskStream = 4;
}

double pair_uniform(std::uint64_t seed, ItemId i, ItemId j) noexcept {
  return rng::to_unit(rng::hash(seed, kMaskStream, std::min(i, j), std::max(i, j)));
}

ObservationMask sample_mask(std::size_t n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_mask: p must lie in [0, 1]");
  return ObservationMask::from_predicate(
      n, p, [&](ItemId i, ItemId j) { return pair_uniform(seed, i, j) < p; });
}

// ---------------------------------------------------------------------------

SamplingGraph::SamplingGraph(const ObservationMask& mask) : adjacency_(mask.size()) {
  const std::size_t n = mask.size();
  for (ItemId i = 0; i < n; ++i)
    for (ItemId j = 0; j < n; ++j)
      if (mask.observed(i, j)) adjacency_[i].push_back(j);
  edges_ = mask.observed_count();
}

SamplingGraph::SamplingGraph(std::size_t n, std::span<const Edge> edges) : adjacency_(n) {
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) throw std::invalid_argument("SamplingGraph: edge endpoint out of range");
    if (a == b) throw std::invalid_argument("SamplingGraph: self-loop");
    adjacency_[a].push_back(b);
    adjacency_[b].push_back(a);
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    edges_ += list.size();
  }
  edges_ /= 2;
}

bool SamplingGraph::has_edge(ItemId a, ItemId b) const {
  const auto& list = adjacency_.at(a);
  return std::binary_search(list.begin(), list.end(), b);
}

std::vector<SamplingGraph::Edge> SamplingGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edges_);
  for (ItemId a = 0; a < adjacency_.size(); ++a)
    for (ItemId b : adjacency_[a])
      if (a < b) out.emplace_back(a, b);
  return out;
}

// ---------------------------------------------------------------------------

DisjointSetForest::DisjointSetForest(std::size_t n) : parent_(n), rank_(n, 0), sets_(n) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSetForest::find(std::size_t x) {
  std::size_t root = x;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[x] != root) x = std::exchange(parent_[x], root);
  return root;
}

bool DisjointSetForest::unite(std::size_t x, std::size_t y) {
  x = find(x);
  y = find(y);
  if (x == y) return false;
  if (rank_[x] < rank_[y]) std::swap(x, y);
  parent_[y] = x;
  if (rank_[x] == rank_[y]) ++rank_[x];
  --sets_;
  return true;
}

// ---------------------------------------------------------------------------

bool is_connected(const SamplingGraph& graph, std::span<const ItemId> subset) {
  if (subset.empty()) throw std::invalid_argument("is_connected: empty subset");
  std::vector<ItemId> members(subset.begin(), subset.end());
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.back() >= graph.size()) throw std::invalid_argument("is_connected: id out of range");

  constexpr std::size_t kOutside = static_cast<std::size_t>(-1);
  std::vector<std::size_t> local(graph.size(), kOutside);
  for (std::size_t k = 0; k < members.size(); ++k) local[members[k]] = k;

  DisjointSetForest forest(members.size());
  for (std::size_t k = 0; k < members.size() && forest.set_count() > 1; ++k)
    for (ItemId nb : graph.neighbors(members[k]))
      if (local[nb] != kOutside) forest.unite(k, local[nb]);
  return forest.set_count() == 1;
}

std::map<LeafSet, bool> connectivity_report(const ClusterTree& tree, const SamplingGraph& graph,
                                            std::size_t n_min) {
  if (tree.n_items() != graph.size())
    throw std::invalid_argument("connectivity_report: tree and graph sizes differ");
  std::map<LeafSet, bool> out;
  for (LeafSet cluster : cluster_set(tree, n_min)) {
    const bool connected = is_connected(graph, cluster);
    out.emplace(std::move(cluster), connected);
  }
  return out;
}

}  // namespace sparseclust

#pragma once

// Independent reference computations used only by tests. Nothing here calls
// the library routine it is meant to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <set>
#include <stdexcept>
#include <tuple>
#include <initializer_list>
#include <string_view>
#include <vector>

#include "sparseclust/core_model.hpp"
#include "sparseclust/rng.hpp"
#include "sparseclust/sampling.hpp"

namespace oracle {

using sparseclust::ClusterTree;
using sparseclust::ItemId;
using sparseclust::LeafSet;
using sparseclust::NodeId;
using sparseclust::SamplingGraph;

/// Breadth-first search restricted to `subset`.
inline bool bfs_connected(const SamplingGraph& g, const std::vector<ItemId>& subset) {
  std::vector<char> inside(g.size(), 0), seen(g.size(), 0);
  for (ItemId v : subset) inside[v] = 1;
  std::deque<ItemId> queue{subset.front()};
  seen[subset.front()] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const ItemId v = queue.front();
    queue.pop_front();
    for (ItemId w = 0; w < g.size(); ++w) {
      if (inside[w] && !seen[w] && g.has_edge(v, w)) {
        seen[w] = 1;
        ++reached;
        queue.push_back(w);
      }
    }
  }
  std::set<ItemId> distinct(subset.begin(), subset.end());
  return reached == distinct.size();
}

/// Deepest node containing both items, by scanning every node.
inline NodeId brute_force_lca(const ClusterTree& tree, ItemId i, ItemId j) {
  NodeId best = sparseclust::kNoNode;
  std::uint32_t best_size = UINT32_MAX;
  for (NodeId v = 0; v < tree.node_count(); ++v) {
    const auto leaves = tree.leaf_set(v);
    const bool has_i = std::find(leaves.begin(), leaves.end(), i) != leaves.end();
    const bool has_j = std::find(leaves.begin(), leaves.end(), j) != leaves.end();
    if (has_i && has_j && leaves.size() < best_size) {
      best = v;
      best_size = static_cast<std::uint32_t>(leaves.size());
    }
  }
  return best;
}

/// Every cluster of size >= n_min has a connected induced subgraph (BFS).
inline bool all_clusters_connected(const ClusterTree& tree, const SamplingGraph& g,
                                   std::size_t n_min) {
  for (NodeId v = 0; v < tree.node_count(); ++v) {
    if (tree.node(v).size < n_min) continue;
    const auto leaves = tree.leaf_set(v);
    if (!bfs_connected(g, std::vector<ItemId>(leaves.begin(), leaves.end()))) return false;
  }
  return true;
}

/// Connectivity of a labelled graph on n nodes given as an edge bitmask over
/// the pairs (0,1), (0,2), ..., (n-2,n-1).
inline bool bitmask_connected(int n, std::uint64_t bits) {
  std::vector<int> comp(n);
  for (int i = 0; i < n; ++i) comp[i] = i;
  int e = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++e)
      if (bits >> e & 1) {
        const int a = comp[i], b = comp[j];
        if (a != b)
          for (int& c : comp)
            if (c == b) c = a;
      }
  return std::all_of(comp.begin(), comp.end(), [&](int c) { return c == comp[0]; });
}

/// P(G(n, p) connected) by summing over all 2^(n(n-1)/2) graphs.
inline double connectivity_bruteforce(int n, double p) {
  const int m = n * (n - 1) / 2;
  double total = 0.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << m); ++bits) {
    if (!bitmask_connected(n, bits)) continue;
    const int e = __builtin_popcountll(bits);
    total += std::pow(p, e) * std::pow(1.0 - p, m - e);
  }
  return total;
}

/// P(G(n, p) connected) from the standard recurrence on the component that
/// contains vertex 1: P_n = 1 - sum_{k=1}^{n-1} C(n-1, k-1) P_k q^(k(n-k)).
inline double connectivity_recurrence(int n, double p) {
  const double q = 1.0 - p;
  std::vector<double> P(n + 1, 0.0);
  P[1] = 1.0;
  auto choose = [](int a, int b) {
    double r = 1.0;
    for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
    return r;
  };
  for (int m = 2; m <= n; ++m) {
    double disconnected = 0.0;
    for (int k = 1; k < m; ++k) disconnected += choose(m - 1, k - 1) * P[k] * std::pow(q, k * (m - k));
    P[m] = 1.0 - disconnected;
  }
  return P[n];
}

/// Builds a tree from nested-parenthesis notation such as "((0,1),2)".
inline ClusterTree parse_tree(std::string_view text) {
  ClusterTree::Builder b;
  std::size_t pos = 0;
  auto parse = [&](auto& self) -> NodeId {
    if (text.at(pos) == '(') {
      ++pos;
      const NodeId l = self(self);
      if (text.at(pos++) != ',') throw std::invalid_argument("expected ','");
      const NodeId r = self(self);
      if (text.at(pos++) != ')') throw std::invalid_argument("expected ')'");
      return b.join(l, r);
    }
    ItemId v = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') v = v * 10 + (text[pos++] - '0');
    return b.leaf(v);
  };
  const NodeId root = parse(parse);
  return b.build(root);
}

/// Symmetric dense matrix from a list of (i, j, value) triples.
inline std::vector<double> dense_from(std::size_t n,
                                      std::initializer_list<std::tuple<int, int, double>> entries) {
  std::vector<double> dense(n * n, 0.0);
  for (auto [i, j, v] : entries) dense[i * n + j] = dense[j * n + i] = v;
  return dense;
}

/// Random symmetric similarities quantized to `levels` values so ties are common.
inline std::vector<double> quantized_random_sims(std::size_t n, std::uint64_t seed, int levels) {
  sparseclust::rng::SplitMix64 gen(seed);
  std::vector<double> dense(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 1.0 + static_cast<double>(gen.uniform_int(0, levels - 1));
      dense[i * n + j] = dense[j * n + i] = v;
    }
  return dense;
}

}  // namespace oracle

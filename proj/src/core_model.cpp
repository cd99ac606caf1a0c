#include "sparseclust/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sparseclust {

// ---------------------------------------------------------------------------
// ClusterTree

NodeId ClusterTree::Builder::leaf(ItemId item) {
  raw_.push_back(Raw{kNoNode, kNoNode, item});
  return static_cast<NodeId>(raw_.size() - 1);
}

NodeId ClusterTree::Builder::join(NodeId left, NodeId right) {
  if (left >= raw_.size() || right >= raw_.size())
    throw std::invalid_argument("ClusterTree::Builder::join: unknown node");
  if (left == right)
    throw std::invalid_argument("ClusterTree::Builder::join: node joined with itself");
  raw_.push_back(Raw{left, right, kNoItem});
  return static_cast<NodeId>(raw_.size() - 1);
}

ClusterTree ClusterTree::Builder::build(NodeId root) const {
  if (root >= raw_.size()) throw std::invalid_argument("ClusterTree: unknown root");

  ClusterTree tree;
  std::vector<char> seen(raw_.size(), 0);
  struct Pending {
    NodeId raw;
    NodeId parent;
    bool is_right;
  };
  std::vector<Pending> stack{{root, kNoNode, false}};
  std::vector<ItemId> items;

  while (!stack.empty()) {
    const Pending cur = stack.back();
    stack.pop_back();
    if (seen[cur.raw]) throw std::invalid_argument("ClusterTree: node reachable twice");
    seen[cur.raw] = 1;

    const auto id = static_cast<NodeId>(tree.nodes_.size());
    TreeNode node;
    node.parent = cur.parent;
    node.leaf_begin = static_cast<std::uint32_t>(items.size());
    if (cur.parent != kNoNode) {
      TreeNode& parent = tree.nodes_[cur.parent];
      node.depth = parent.depth + 1;
      (cur.is_right ? parent.right : parent.left) = id;
    }
    const Raw& raw = raw_[cur.raw];
    if (raw.left == kNoNode) {
      node.item = raw.item;
      node.size = 1;
      items.push_back(raw.item);
    } else {
      stack.push_back({raw.right, id, true});
      stack.push_back({raw.left, id, false});
    }
    tree.nodes_.push_back(node);
  }

  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw std::invalid_argument("ClusterTree: builder holds nodes unreachable from root");

  const std::size_t n = items.size();
  tree.leaf_of_item_.assign(n, kNoNode);
  for (NodeId id = 0; id < tree.nodes_.size(); ++id) {
    const TreeNode& node = tree.nodes_[id];
    if (!node.is_leaf()) continue;
    if (node.item >= n)
      throw std::invalid_argument("ClusterTree: item id " + std::to_string(node.item) +
                                  " out of range for " + std::to_string(n) + " leaves");
    if (tree.leaf_of_item_[node.item] != kNoNode)
      throw std::invalid_argument("ClusterTree: duplicate item " + std::to_string(node.item));
    tree.leaf_of_item_[node.item] = id;
  }

  // Preorder puts children after parents, so a reverse sweep sees every
  // child before its parent.
  for (auto id = static_cast<std::int64_t>(tree.nodes_.size()) - 1; id > 0; --id) {
    const TreeNode& node = tree.nodes_[id];
    tree.nodes_[node.parent].size += node.size;
  }
  tree.leaf_order_ = std::move(items);
  return tree;
}

std::span<const ItemId> ClusterTree::leaf_set(NodeId id) const {
  const TreeNode& n = nodes_.at(id);
  return std::span<const ItemId>(leaf_order_).subspan(n.leaf_begin, n.size);
}

LeafSet ClusterTree::canonical_leaf_set(NodeId id) const {
  const auto leaves = leaf_set(id);
  LeafSet out(leaves.begin(), leaves.end());
  std::sort(out.begin(), out.end());
  return out;
}

NodeId ClusterTree::lca(ItemId i, ItemId j) const {
  if (i == j) throw std::invalid_argument("lca: items must differ");
  NodeId a = leaf_node(i);
  NodeId b = leaf_node(j);
  while (nodes_[a].depth > nodes_[b].depth) a = nodes_[a].parent;
  while (nodes_[b].depth > nodes_[a].depth) b = nodes_[b].parent;
  while (a != b) {
    a = nodes_[a].parent;
    b = nodes_[b].parent;
  }
  return a;
}

bool ClusterTree::is_ancestor(NodeId ancestor, NodeId node) const {
  const TreeNode& a = nodes_.at(ancestor);
  const TreeNode& n = nodes_.at(node);
  // Preorder ids: a subtree occupies a contiguous id range of 2*size-1 nodes.
  return node >= ancestor && node < ancestor + 2 * a.size - 1 && n.depth >= a.depth;
}

// ---------------------------------------------------------------------------
// SimilarityMatrix

SimilarityMatrix::SimilarityMatrix(std::size_t n, std::vector<double> dense)
    : n_(n), values_(std::move(dense)) {
  if (values_.size() != n * n)
    throw std::invalid_argument("SimilarityMatrix: expected " + std::to_string(n * n) +
                                " values, got " + std::to_string(values_.size()));
  for (std::size_t i = 0; i < n; ++i) {
    values_[i * n + i] = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = values_[i * n + j];
      const double b = values_[j * n + i];
      if (a != b)
        throw std::invalid_argument("SimilarityMatrix: asymmetric at (" + std::to_string(i) +
                                    "," + std::to_string(j) + ")");
      if (!std::isfinite(a) || a <= 0.0)
        throw std::invalid_argument("SimilarityMatrix: off-diagonal value at (" +
                                    std::to_string(i) + "," + std::to_string(j) +
                                    ") must be finite and > 0");
    }
  }
}

// ---------------------------------------------------------------------------
// ObservationMask

ObservationMask::ObservationMask(std::size_t n, double p_nominal)
    : n_(n), p_nominal_(p_nominal), bits_(n * n, 0) {
  if (!(p_nominal >= 0.0 && p_nominal <= 1.0))
    throw std::invalid_argument("ObservationMask: p_nominal must lie in [0, 1]");
}

ObservationMask ObservationMask::full(std::size_t n) {
  return from_predicate(n, 1.0, [](ItemId, ItemId) { return true; });
}

ObservationMask ObservationMask::from_pairs(std::size_t n, std::span<const Pair> pairs,
                                            double p_nominal) {
  ObservationMask mask(n, p_nominal);
  for (auto [i, j] : pairs) {
    if (i >= n || j >= n)
      throw std::invalid_argument("ObservationMask: pair index out of range");
    if (i == j) throw std::invalid_argument("ObservationMask: self-pair");
    mask.set(std::min(i, j), std::max(i, j));
  }
  return mask;
}

void ObservationMask::set(ItemId i, ItemId j) {
  auto& cell = bits_[i * n_ + j];
  if (cell) return;
  cell = 1;
  bits_[j * n_ + i] = 1;
  ++count_;
}

std::vector<ObservationMask::Pair> ObservationMask::observed_pairs() const {
  std::vector<Pair> out;
  out.reserve(count_);
  for (ItemId i = 0; i < n_; ++i)
    for (ItemId j = i + 1; j < n_; ++j)
      if (bits_[i * n_ + j]) out.emplace_back(i, j);
  return out;
}

// ---------------------------------------------------------------------------
// TC condition

namespace {

void require_same_size(const ClusterTree& tree, const SimilarityMatrix& sim) {
  if (tree.n_items() != sim.size())
    throw std::invalid_argument("check_tc: tree has " + std::to_string(tree.n_items()) +
                                " items but similarity matrix is " +
                                std::to_string(sim.size()) + "x" + std::to_string(sim.size()));
}

std::array<ItemId, 3> make_witness(ItemId i, ItemId j, ItemId k) {
  return {std::min(i, j), std::max(i, j), k};
}

}  // namespace

TcResult check_tc(const ClusterTree& tree, const SimilarityMatrix& sim) {
  require_same_size(tree, sim);
  const std::size_t n = tree.n_items();

  struct Level {
    double min_sim;
    ItemId min_at;
    double max_sim;
    ItemId max_at;
  };
  std::vector<Level> levels;
  std::vector<NodeId> path;

  for (ItemId i = 0; i < n; ++i) {
    // path[l] is the ancestor of i at height l (path[0] = leaf).
    path.clear();
    for (NodeId v = tree.leaf_node(i); v != kNoNode; v = tree.node(v).parent) path.push_back(v);
    const std::size_t height = path.size() - 1;
    if (height == 0) continue;

    // Partners whose LCA with i is path[l] are the leaves of path[l-1]'s sibling.
    levels.assign(height + 1, Level{});
    for (std::size_t l = 1; l <= height; ++l) {
      const TreeNode& up = tree.node(path[l]);
      const NodeId sibling = up.left == path[l - 1] ? up.right : up.left;
      Level lv{std::numeric_limits<double>::infinity(), kNoItem,
               -std::numeric_limits<double>::infinity(), kNoItem};
      for (ItemId j : tree.leaf_set(sibling)) {
        const double s = sim(i, j);
        if (s < lv.min_sim) lv.min_sim = s, lv.min_at = j;
        if (s > lv.max_sim) lv.max_sim = s, lv.max_at = j;
      }
      levels[l] = lv;
    }

    // Suffix maxima: largest similarity from i to anything outside path[m].
    std::vector<std::pair<double, ItemId>> outside(height + 2,
                                                   {-std::numeric_limits<double>::infinity(), kNoItem});
    for (std::size_t l = height; l >= 1; --l) {
      outside[l] = outside[l + 1];
      if (levels[l].max_sim > outside[l].first) outside[l] = {levels[l].max_sim, levels[l].max_at};
    }

    double inside_min = std::numeric_limits<double>::infinity();
    ItemId inside_at = kNoItem;
    for (std::size_t m = 1; m < height; ++m) {
      if (levels[m].min_sim < inside_min) inside_min = levels[m].min_sim, inside_at = levels[m].min_at;
      if (inside_min <= outside[m + 1].first)
        return TcResult{false, make_witness(i, inside_at, outside[m + 1].second)};
    }
  }
  return TcResult{};
}

TcResult check_tc_direct(const ClusterTree& tree, const SimilarityMatrix& sim) {
  require_same_size(tree, sim);
  const std::size_t n = tree.n_items();
  std::vector<char> inside(n);

  for (NodeId c = 0; c < tree.node_count(); ++c) {
    if (tree.node(c).size < 2 || tree.node(c).size == n) continue;
    const LeafSet members = tree.canonical_leaf_set(c);
    std::fill(inside.begin(), inside.end(), 0);
    for (ItemId x : members) inside[x] = 1;

    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        const ItemId i = members[a], j = members[b];
        for (ItemId k = 0; k < n; ++k) {
          if (inside[k]) continue;
          if (!(sim(i, j) > std::max(sim(i, k), sim(j, k)))) return TcResult{false, {{i, j, k}}};
        }
      }
    }
  }
  return TcResult{};
}

// ---------------------------------------------------------------------------
// Pruning

std::vector<NodeId> PrunedTree::leaf_clusters() const {
  std::vector<NodeId> out;
  for (const Node& node : nodes)
    if (!node.children) out.push_back(node.source);
  return out;
}

PrunedTree prune_to_size(const ClusterTree& tree, std::size_t n_min) {
  if (n_min < 1 || n_min > tree.n_items())
    throw std::invalid_argument("prune_to_size: n_min must lie in [1, N]");

  PrunedTree out;
  // Iterative preorder so deep caterpillars do not recurse N levels.
  struct Pending {
    NodeId source;
    std::size_t parent;
    int slot;
  };
  std::vector<Pending> stack{{tree.root(), 0, -1}};
  while (!stack.empty()) {
    const Pending cur = stack.back();
    stack.pop_back();
    const std::size_t index = out.nodes.size();
    out.nodes.push_back({cur.source, std::nullopt});
    if (cur.slot >= 0) (*out.nodes[cur.parent].children)[cur.slot] = index;

    const TreeNode& node = tree.node(cur.source);
    if (node.is_leaf()) continue;
    if (tree.node(node.left).size < n_min && tree.node(node.right).size < n_min) continue;
    out.nodes[index].children.emplace();
    stack.push_back({node.right, index, 1});
    stack.push_back({node.left, index, 0});
  }
  return out;
}

std::set<LeafSet> cluster_set(const ClusterTree& tree, std::size_t n_min) {
  std::set<LeafSet> out;
  for (NodeId id = 0; id < tree.node_count(); ++id)
    if (tree.node(id).size >= n_min) out.insert(tree.canonical_leaf_set(id));
  return out;
}

}  // namespace sparseclust

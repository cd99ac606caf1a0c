#pragma once

// Domain types: items, binary cluster hierarchies, similarity matrices and
// observation masks, plus structural queries on hierarchies.

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace sparseclust {

/// Dense zero-based item index in [0, N).
using ItemId = std::uint32_t;
/// Index of a node inside a ClusterTree.
using NodeId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr ItemId kNoItem = std::numeric_limits<ItemId>::max();

/// Canonical cluster identity: the member items in ascending order.
using LeafSet = std::vector<ItemId>;

struct TreeNode {
  NodeId left = kNoNode;
  NodeId right = kNoNode;
  NodeId parent = kNoNode;
  ItemId item = kNoItem;  // set for leaves only
  std::uint32_t size = 0;
  std::uint32_t depth = 0;
  // The node's leaves occupy leaf_order()[leaf_begin, leaf_begin + size).
  std::uint32_t leaf_begin = 0;

  bool is_leaf() const noexcept { return left == kNoNode; }
};

/// Full binary hierarchy over N items. Nodes are stored in preorder, so the
/// root is node 0 and every subtree's leaves are contiguous in leaf_order().
///
/// Immutable once built; build one with ClusterTree::Builder.
class ClusterTree {
 public:
  class Builder {
   public:
    NodeId leaf(ItemId item);
    NodeId join(NodeId left, NodeId right);
    /// Validates that `root` spans every item in [0, N) exactly once, where
    /// N is the number of leaves created, and that no node is shared.
    ClusterTree build(NodeId root) const;

   private:
    struct Raw {
      NodeId left = kNoNode;
      NodeId right = kNoNode;
      ItemId item = kNoItem;
    };
    std::vector<Raw> raw_;
  };

  std::size_t n_items() const noexcept { return leaf_of_item_.size(); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  NodeId root() const noexcept { return 0; }
  const TreeNode& node(NodeId id) const { return nodes_.at(id); }
  std::span<const TreeNode> nodes() const noexcept { return nodes_; }

  /// Items under `id`, in tree (left-to-right) order, not sorted.
  std::span<const ItemId> leaf_set(NodeId id) const;
  LeafSet canonical_leaf_set(NodeId id) const;
  std::span<const ItemId> leaf_order() const noexcept { return leaf_order_; }

  NodeId leaf_node(ItemId item) const { return leaf_of_item_.at(item); }

  /// Deepest node containing both items. Throws std::invalid_argument if i == j.
  NodeId lca(ItemId i, ItemId j) const;

  bool is_ancestor(NodeId ancestor, NodeId node) const;

 private:
  ClusterTree() = default;
  std::vector<TreeNode> nodes_;
  std::vector<ItemId> leaf_order_;
  std::vector<NodeId> leaf_of_item_;
};

/// Symmetric N x N similarity matrix with strictly positive off-diagonal
/// entries. Zero is reserved as the "unobserved" sentinel used during
/// clustering. The diagonal is stored as zero and never read.
class SimilarityMatrix {
 public:
  /// `dense` is row-major N x N. Throws std::invalid_argument on a size
  /// mismatch, asymmetry, or a non-positive / non-finite off-diagonal value.
  SimilarityMatrix(std::size_t n, std::vector<double> dense);

  std::size_t size() const noexcept { return n_; }
  double operator()(ItemId i, ItemId j) const noexcept { return values_[i * n_ + j]; }
  std::span<const double> row(ItemId i) const noexcept {
    return std::span<const double>(values_).subspan(i * n_, n_);
  }
  std::span<const double> data() const noexcept { return values_; }

 private:
  std::size_t n_;
  std::vector<double> values_;
};

/// Symmetric indicator of which pairwise similarities were observed.
class ObservationMask {
 public:
  using Pair = std::pair<ItemId, ItemId>;

  /// Nothing observed.
  ObservationMask(std::size_t n, double p_nominal);
  static ObservationMask full(std::size_t n);
  /// Pairs may be given in either orientation; self-pairs are rejected.
  static ObservationMask from_pairs(std::size_t n, std::span<const Pair> pairs,
                                    double p_nominal);
  /// Marks {i, j}, i < j, observed wherever `pred(i, j)` is true.
  template <class Pred>
  static ObservationMask from_predicate(std::size_t n, double p_nominal, Pred&& pred) {
    ObservationMask mask(n, p_nominal);
    for (ItemId i = 0; i < n; ++i)
      for (ItemId j = i + 1; j < n; ++j)
        if (pred(i, j)) mask.set(i, j);
    return mask;
  }

  std::size_t size() const noexcept { return n_; }
  double p_nominal() const noexcept { return p_nominal_; }
  bool observed(ItemId i, ItemId j) const noexcept {
    return i != j && bits_[i * n_ + j] != 0;
  }
  std::size_t observed_count() const noexcept { return count_; }
  /// Observed pairs (i < j) in lexicographic order.
  std::vector<Pair> observed_pairs() const;

 private:
  void set(ItemId i, ItemId j);

  std::size_t n_;
  double p_nominal_;
  std::vector<std::uint8_t> bits_;
  std::size_t count_ = 0;
};

struct TcResult {
  bool holds = true;
  /// (i, j, k) with i < j inside some cluster and k outside it such that
  /// s(i,j) <= max(s(i,k), s(j,k)).
  std::optional<std::array<ItemId, 3>> witness;
};

/// Tight-clustering check in O(N^2 + N * depth): for each item, walks its
/// root path and compares the smallest similarity to any partner inside each
/// enclosing cluster with the largest similarity to anything outside it.
TcResult check_tc(const ClusterTree& tree, const SimilarityMatrix& sim);

/// Direct O(N^3)-per-cluster triple enumeration. Reference oracle for check_tc.
TcResult check_tc_direct(const ClusterTree& tree, const SimilarityMatrix& sim);

/// A tree cut at a minimum cluster size. Each node refers back to a node of
/// the source tree; leaf-clusters stand for the whole collapsed subtree.
struct PrunedTree {
  struct Node {
    NodeId source = kNoNode;
    std::optional<std::array<std::size_t, 2>> children;  // indices into nodes
  };
  std::vector<Node> nodes;  // nodes[0] is the root

  std::vector<NodeId> leaf_clusters() const;
};

/// Keeps every node of size >= n_min. A kept node whose children are both
/// smaller than n_min becomes a leaf-cluster. When only one child reaches
/// n_min, the small sibling is kept as a leaf-cluster so the leaf-clusters
/// still partition [0, N).
PrunedTree prune_to_size(const ClusterTree& tree, std::size_t n_min);

/// Canonical leaf sets of every node with size >= n_min.
std::set<LeafSet> cluster_set(const ClusterTree& tree, std::size_t n_min);

}  // namespace sparseclust

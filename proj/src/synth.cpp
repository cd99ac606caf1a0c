#include "sparseclust/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sparseclust/rng.hpp"

namespace sparseclust {

namespace {

// Independent random streams derived from one user seed.
enum Stream : std::uint64_t { kTreeStream = 1, kLevelStream = 2, kJitterStream = 3 };

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

std::string_view to_string(ShapeKind kind) noexcept {
  switch (kind) {
    case ShapeKind::balanced: return "balanced";
    case ShapeKind::random_unbalanced: return "random_unbalanced";
    case ShapeKind::caterpillar: return "caterpillar";
  }
  return "unknown";
}

ShapeKind parse_shape(std::string_view name) {
  if (name == "balanced") return ShapeKind::balanced;
  if (name == "random_unbalanced" || name == "unbalanced") return ShapeKind::random_unbalanced;
  if (name == "caterpillar") return ShapeKind::caterpillar;
  throw std::invalid_argument("unknown tree shape '" + std::string(name) + "'");
}

ClusterTree generate_tree(const TreeShape& shape) {
  const std::size_t n = shape.n_items;
  if (n < 2) throw std::invalid_argument("generate_tree: n_items must be >= 2");
  if (n > std::numeric_limits<ItemId>::max() / 2)
    throw std::invalid_argument("generate_tree: n_items too large");
  if (shape.kind == ShapeKind::balanced && !is_power_of_two(n))
    throw std::invalid_argument("generate_tree: balanced shape needs a power-of-two n_items, got " +
                                std::to_string(n));

  rng::SplitMix64 gen(rng::hash(shape.seed, kTreeStream));

  // Lay out the shape in preorder first; children always get larger indices
  // than their parent, so building in reverse index order is bottom-up.
  struct Proto {
    std::size_t size;
    std::size_t left = 0, right = 0;  // 0 = none (index 0 is the root)
    ItemId item = kNoItem;
  };
  std::vector<Proto> protos{{n}};
  protos.reserve(2 * n - 1);
  std::vector<std::size_t> stack{0};
  ItemId next_label = 0;
  while (!stack.empty()) {
    const std::size_t p = stack.back();
    stack.pop_back();
    const std::size_t size = protos[p].size;
    if (size == 1) {
      protos[p].item = next_label++;
      continue;
    }
    std::size_t left_size = 0;
    switch (shape.kind) {
      case ShapeKind::balanced: left_size = size / 2; break;
      case ShapeKind::caterpillar: left_size = size - 1; break;
      case ShapeKind::random_unbalanced: left_size = gen.uniform_int(1, size - 1); break;
    }
    protos.push_back({left_size});
    protos[p].left = protos.size() - 1;
    protos.push_back({size - left_size});
    protos[p].right = protos.size() - 1;
    stack.push_back(protos[p].right);
    stack.push_back(protos[p].left);
  }

  std::vector<ItemId> label(n);
  std::iota(label.begin(), label.end(), ItemId{0});
  if (shape.kind == ShapeKind::random_unbalanced) {
    for (std::size_t i = n - 1; i > 0; --i) std::swap(label[i], label[gen.uniform_int(0, i)]);
  }

  ClusterTree::Builder builder;
  std::vector<NodeId> built(protos.size());
  for (std::size_t p = protos.size(); p-- > 0;) {
    const Proto& proto = protos[p];
    built[p] = proto.size == 1 ? builder.leaf(label[proto.item])
                               : builder.join(built[proto.left], built[proto.right]);
  }
  return builder.build(built[0]);
}

std::vector<double> random_levels(const ClusterTree& tree, std::uint64_t seed) {
  std::vector<double> level(tree.node_count(), 0.0);
  double top = 0.0;
  // Preorder: a parent's level is final before any child reads it.
  for (NodeId v = 0; v < tree.node_count(); ++v) {
    const TreeNode& node = tree.node(v);
    if (node.is_leaf()) continue;
    const double base = node.parent == kNoNode ? 0.0 : level[node.parent];
    const double step = 0.2 + 0.8 * rng::to_unit(rng::hash(seed, kLevelStream, v));
    level[v] = base + step;
    top = std::max(top, level[v]);
  }
  for (NodeId v = 0; v < tree.node_count(); ++v)
    if (!tree.node(v).is_leaf()) level[v] = 0.1 + 0.9 * level[v] / top;
  return level;
}

SimilarityMatrix similarities_from_levels(const ClusterTree& tree,
                                          std::span<const double> levels,
                                          std::uint64_t seed, double jitter) {
  if (!(jitter >= 0.0 && jitter < 1.0))
    throw std::invalid_argument("similarities: jitter must lie in [0, 1)");
  if (levels.size() != tree.node_count())
    throw std::invalid_argument("similarities: one level per tree node required");

  double min_gap = std::numeric_limits<double>::infinity();
  for (NodeId v = 0; v < tree.node_count(); ++v) {
    const TreeNode& node = tree.node(v);
    if (node.is_leaf()) continue;
    if (!(levels[v] >= kMinSimilarity))
      throw std::invalid_argument("similarities: internal levels must be >= kMinSimilarity");
    if (node.parent == kNoNode) continue;
    const double gap = levels[v] - levels[node.parent];
    if (!(gap > 0.0))
      throw std::invalid_argument("similarities: levels must increase strictly toward the leaves");
    min_gap = std::min(min_gap, gap);
  }
  // With a single internal node there is no gap to protect.
  const double g = std::isfinite(min_gap) ? 0.49 * min_gap : 0.0;

  const std::size_t n = tree.n_items();
  std::vector<double> dense(n * n, 0.0);
  for (NodeId v = 0; v < tree.node_count(); ++v) {
    const TreeNode& node = tree.node(v);
    if (node.is_leaf()) continue;
    for (ItemId a : tree.leaf_set(node.left)) {
      for (ItemId b : tree.leaf_set(node.right)) {
        const ItemId i = std::min(a, b), j = std::max(a, b);
        const double u = rng::to_unit(rng::hash(seed, kJitterStream, i, j));
        const double s = levels[v] + jitter * u * g;
        dense[i * n + j] = s;
        dense[j * n + i] = s;
      }
    }
  }
  return SimilarityMatrix(n, std::move(dense));
}

SimilarityMatrix generate_tc_similarities(const ClusterTree& tree, std::uint64_t seed,
                                          double jitter) {
  const auto levels = random_levels(tree, seed);
  return similarities_from_levels(tree, levels, seed, jitter);
}

}  // namespace sparseclust

#pragma once

// Synthetic ground truth for Monte Carlo experiments: random hierarchies and
// similarity matrices that satisfy the tight-clustering condition.
//
// The similarity model is a design choice of this library, not something the
// recovery guarantees depend on beyond the TC property itself.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "sparseclust/core_model.hpp"

namespace sparseclust {

enum class ShapeKind { balanced, random_unbalanced, caterpillar };

std::string_view to_string(ShapeKind kind) noexcept;
/// Accepts "balanced", "random_unbalanced" (or "unbalanced") and "caterpillar".
ShapeKind parse_shape(std::string_view name);

struct TreeShape {
  ShapeKind kind = ShapeKind::balanced;
  std::size_t n_items = 2;
  std::uint64_t seed = 0;
};

/// Smallest generated similarity is never below this.
inline constexpr double kMinSimilarity = 1e-6;

/// balanced: complete binary tree, items 0..N-1 left to right (N must be a
///   power of two).
/// random_unbalanced: recursive splits with the left size uniform in
///   [1, size-1]; item labels are a seeded random permutation.
/// caterpillar: every split is (size-1, 1), so clusters are {0,1}, {0,1,2}, ...
ClusterTree generate_tree(const TreeShape& shape);

/// Per-node levels indexed by NodeId. Internal nodes get strictly increasing
/// values along every root path, rescaled into (0.1, 1.0]; leaves get 0.
std::vector<double> random_levels(const ClusterTree& tree, std::uint64_t seed);

/// s(i,j) = level[lca(i,j)] + jitter * u(i,j) * g, where u is a per-pair
/// uniform keyed by (seed, min(i,j), max(i,j)) and g is 0.49 times the
/// smallest parent-to-child level gap in the tree. Throws if jitter is not in
/// [0, 1) or levels do not increase strictly from parent to internal child.
SimilarityMatrix similarities_from_levels(const ClusterTree& tree,
                                          std::span<const double> levels,
                                          std::uint64_t seed, double jitter);

SimilarityMatrix generate_tc_similarities(const ClusterTree& tree, std::uint64_t seed,
                                          double jitter);

}  // namespace sparseclust

#pragma once

// Agglomerative clustering on zero-filled incomplete similarities, and
// evaluation of the result against a known hierarchy.

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "sparseclust/core_model.hpp"

namespace sparseclust {

/// Cluster ids follow the usual linkage convention: 0..N-1 are the
/// singletons and the k-th merge creates cluster N + k.
using ClusterId = std::uint32_t;

struct Merge {
  ClusterId a;  // the side holding the smaller item id
  ClusterId b;
  double similarity;

  bool operator==(const Merge&) const = default;
};

/// Result of one clustering run. When the sampling graph is disconnected the
/// run halts with several roots and `forced_halt` set.
struct MergeForest {
  std::size_t n = 0;
  std::vector<Merge> merges;
  std::vector<ClusterId> roots;  // ordered by smallest member item
  bool forced_halt = false;

  std::size_t cluster_count() const noexcept { return n + merges.size(); }
  /// Canonical leaf set of every cluster, indexed by ClusterId.
  std::vector<LeafSet> leaf_sets() const;
  /// (left, right) children of a merged cluster.
  std::pair<ClusterId, ClusterId> children(ClusterId id) const;

  bool operator==(const MergeForest&) const = default;
};

/// Zero-fills unobserved pairs, then repeatedly merges the two clusters with
/// the largest current similarity, combining rows by entrywise max. Stops
/// once one cluster holds every item or the largest remaining similarity is
/// zero. Equal maxima go to the lexicographically smallest (min item,
/// min item) pair of clusters.
///
/// O(N^2 log N) with a lazily invalidated priority queue.
/// Throws std::invalid_argument if the matrix and mask sizes differ.
MergeForest incomplete_agglomerative(const SimilarityMatrix& sim, const ObservationMask& mask);

/// Same contract, O(N^3) full rescan each step. Kept as the reference
/// implementation for tests.
MergeForest incomplete_agglomerative_reference(const SimilarityMatrix& sim,
                                               const ObservationMask& mask);

struct RecoveryReport {
  std::size_t n_min = 0;
  std::size_t total_clusters = 0;
  std::size_t recovered = 0;
  std::map<LeafSet, bool> per_cluster;
  bool fully_recovered = false;
};

/// A true cluster of size >= n_min counts as recovered iff some cluster of
/// the forest has exactly the same members.
RecoveryReport evaluate_recovery(const ClusterTree& truth, const MergeForest& result,
                                 std::size_t n_min);

}  // namespace sparseclust

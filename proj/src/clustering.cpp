#include "sparseclust/clustering.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace sparseclust {

namespace {

void require_same_size(const SimilarityMatrix& sim, const ObservationMask& mask) {
  if (sim.size() != mask.size())
    throw std::invalid_argument("incomplete_agglomerative: similarity matrix is " +
                                std::to_string(sim.size()) + "x" + std::to_string(sim.size()) +
                                " but mask is " + std::to_string(mask.size()) + "x" +
                                std::to_string(mask.size()));
}

// Working state shared by both implementations. Every cluster is represented
// by the row of its smallest item; merging (a, b) with a < b keeps row a and
// retires row b, which keeps representatives stable.
class MergeState {
 public:
  MergeState(const SimilarityMatrix& sim, const ObservationMask& mask)
      : n_(sim.size()), s_(n_ * n_, 0.0), active_(n_, 1), id_(n_) {
    for (ItemId i = 0; i < n_; ++i) {
      id_[i] = i;
      for (ItemId j = 0; j < n_; ++j)
        if (mask.observed(i, j)) s_[i * n_ + j] = sim(i, j);
    }
    forest_.n = n_;
  }

  std::size_t n() const noexcept { return n_; }
  double at(ItemId i, ItemId j) const noexcept { return s_[i * n_ + j]; }
  bool active(ItemId i) const noexcept { return active_[i] != 0; }
  bool done() const noexcept { return forest_.merges.size() + 1 >= n_; }

  // Merges rows a < b. Calls on_raise(k, value) for each row whose
  // similarity to the merged cluster increased.
  template <class OnRaise>
  void merge(ItemId a, ItemId b, OnRaise&& on_raise) {
    const double value = at(a, b);
    for (ItemId k = 0; k < n_; ++k) {
      if (!active_[k] || k == a || k == b) continue;
      const double merged = std::max(at(a, k), at(b, k));
      if (merged > at(a, k)) {
        s_[a * n_ + k] = merged;
        s_[k * n_ + a] = merged;
        on_raise(k, merged);
      }
    }
    active_[b] = 0;
    forest_.merges.push_back({id_[a], id_[b], value});
    id_[a] = static_cast<ClusterId>(n_ + forest_.merges.size() - 1);
  }

  MergeForest finish() && {
    for (ItemId i = 0; i < n_; ++i)
      if (active_[i]) forest_.roots.push_back(id_[i]);
    forest_.forced_halt = forest_.roots.size() > 1;
    return std::move(forest_);
  }

 private:
  std::size_t n_;
  std::vector<double> s_;
  std::vector<std::uint8_t> active_;
  std::vector<ClusterId> id_;
  MergeForest forest_;
};

struct Candidate {
  double value;
  ItemId a, b;  // a < b
};

// Max-heap order: larger value first, then smaller (a, b).
struct CandidateAfter {
  bool operator()(const Candidate& x, const Candidate& y) const noexcept {
    if (x.value != y.value) return x.value < y.value;
    if (x.a != y.a) return x.a > y.a;
    return x.b > y.b;
  }
};

}  // namespace

MergeForest incomplete_agglomerative(const SimilarityMatrix& sim, const ObservationMask& mask) {
  require_same_size(sim, mask);
  MergeState state(sim, mask);
  const std::size_t n = state.n();

  std::vector<Candidate> initial;
  initial.reserve(mask.observed_count());
  for (ItemId i = 0; i < n; ++i)
    for (ItemId j = i + 1; j < n; ++j)
      if (state.at(i, j) > 0.0) initial.push_back({state.at(i, j), i, j});
  std::priority_queue<Candidate, std::vector<Candidate>, CandidateAfter> heap(
      CandidateAfter{}, std::move(initial));

  while (!state.done() && !heap.empty()) {
    const Candidate top = heap.top();
    heap.pop();
    // Stale: an endpoint was merged away, or the pair's value was raised
    // and a fresher entry exists.
    if (!state.active(top.a) || !state.active(top.b) || state.at(top.a, top.b) != top.value)
      continue;
    state.merge(top.a, top.b, [&](ItemId k, double value) {
      heap.push({value, std::min(top.a, k), std::max(top.a, k)});
    });
  }
  return std::move(state).finish();
}

MergeForest incomplete_agglomerative_reference(const SimilarityMatrix& sim,
                                               const ObservationMask& mask) {
  require_same_size(sim, mask);
  MergeState state(sim, mask);
  const std::size_t n = state.n();

  while (!state.done()) {
    double best = 0.0;
    ItemId best_a = kNoItem, best_b = kNoItem;
    for (ItemId i = 0; i < n; ++i) {
      if (!state.active(i)) continue;
      for (ItemId j = i + 1; j < n; ++j) {
        if (state.active(j) && state.at(i, j) > best) {
          best = state.at(i, j);
          best_a = i;
          best_b = j;
        }
      }
    }
    if (best_a == kNoItem) break;  // only unobserved (zero) pairs remain
    state.merge(best_a, best_b, [](ItemId, double) {});
  }
  return std::move(state).finish();
}

// ---------------------------------------------------------------------------

std::vector<LeafSet> MergeForest::leaf_sets() const {
  std::vector<LeafSet> sets(cluster_count());
  for (ItemId i = 0; i < n; ++i) sets[i] = {i};
  for (std::size_t k = 0; k < merges.size(); ++k) {
    const LeafSet& x = sets.at(merges[k].a);
    const LeafSet& y = sets.at(merges[k].b);
    LeafSet& out = sets[n + k];
    out.reserve(x.size() + y.size());
    std::merge(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
  }
  return sets;
}

std::pair<ClusterId, ClusterId> MergeForest::children(ClusterId id) const {
  if (id < n || id >= cluster_count())
    throw std::out_of_range("MergeForest::children: not a merged cluster");
  const Merge& m = merges[id - n];
  return {m.a, m.b};
}

namespace {

struct LeafSetHash {
  std::size_t operator()(const LeafSet& s) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (ItemId x : s) {
      h ^= x;
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

}  // namespace

RecoveryReport evaluate_recovery(const ClusterTree& truth, const MergeForest& result,
                                 std::size_t n_min) {
  if (truth.n_items() != result.n)
    throw std::invalid_argument("evaluate_recovery: truth has " + std::to_string(truth.n_items()) +
                                " items, forest has " + std::to_string(result.n));

  std::unordered_set<LeafSet, LeafSetHash> found;
  for (LeafSet& s : result.leaf_sets())
    if (s.size() >= n_min) found.insert(std::move(s));

  RecoveryReport report;
  report.n_min = n_min;
  for (LeafSet cluster : cluster_set(truth, n_min)) {
    const bool hit = found.count(cluster) != 0;
    report.recovered += hit ? 1 : 0;
    report.per_cluster.emplace(std::move(cluster), hit);
  }
  report.total_clusters = report.per_cluster.size();
  report.fully_recovered = report.recovered == report.total_clusters;
  return report;
}

}  // namespace sparseclust

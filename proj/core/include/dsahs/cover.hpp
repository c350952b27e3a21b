#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dsahs/graph.hpp"
#include "dsahs/matcher.hpp"

namespace dsahs {

/// Frequency-indexed buckets of live items with O(1) access to the highest
/// non-empty frequency. Each bucket is a min-heap on item index, so the top
/// item is the smallest index among those at max frequency. Entries left
/// behind by a move are discarded lazily when they surface.
class BucketList {
 public:
  explicit BucketList(std::size_t n_items);

  /// Inserts a live item; freq 0 items are tracked but never returned by top().
  void insert(int item, int freq);
  void remove(int item);
  /// Lowers the item's frequency by one and relocates it.
  void decrement(int item);

  bool contains(int item) const { return freq_[static_cast<std::size_t>(item)] >= 0; }
  int frequency(int item) const { return freq_[static_cast<std::size_t>(item)]; }
  int max_freq() const { return max_freq_; }
  /// Smallest item at max_freq(); -1 when no item has positive frequency.
  int top() const;

  std::size_t relocations() const { return relocations_; }

 private:
  void push(int item, int freq);
  void settle_max();

  mutable std::vector<std::vector<int>> heaps_;  // index = frequency; may hold stale entries
  std::vector<int> live_;                        // live items per frequency
  std::vector<int> freq_;                        // -1 when absent
  int max_freq_ = 0;
  std::size_t relocations_ = 0;
};

struct CoverStats {
  int iterations = 0;
  int invalidations = 0;
  std::size_t relocations = 0;
  /// Sum of |covers| over all candidates; bounds relocations.
  std::size_t incidences = 0;
};

struct CoverResult {
  /// Picked eliminators in pick order, state == chosen.
  std::vector<Eliminator> chosen;
  std::vector<int> covered;
  std::vector<int> residual;
  CoverStats stats;
};

struct GreedyTrace {
  std::vector<int> picks;
  std::vector<bool> covered;
  int invalidations = 0;
  std::size_t relocations = 0;
};

/// Greedy set cover over elements 0..universe-1 using the bucket list. Ties go
/// to the smaller set index. `on_pick(s, out)` may append indices of sets that
/// become unusable once s is picked.
GreedyTrace greedy_set_cover(std::size_t universe, std::span<const std::vector<int>> sets,
                             const std::function<void(int, std::vector<int>&)>& on_pick = {});

/// Greedy cover of potential hotspots. Candidates are first put in canonical
/// key order (conflict before affinity, then sorted vias), which is also the
/// tie-break. Picking an eliminator invalidates incompatible ones:
///  - conflict(a,b) kills affinity groups containing both a and b;
///  - affinity(g) kills conflicts inside g and affinities sharing a via with g.
CoverResult greedy_cover(std::span<const PotentialHotspot> hotspots, std::vector<Eliminator> candidates);

/// Chosen conflicts become added_by_cover edges, chosen affinities become
/// forced groups; components are recomputed.
LayoutGraph apply_eliminators(const LayoutGraph& graph, const CoverResult& result);

}  // namespace dsahs

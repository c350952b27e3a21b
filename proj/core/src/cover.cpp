#include "dsahs/cover.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <unordered_map>

#include "dsahs/error.hpp"

namespace dsahs {

BucketList::BucketList(std::size_t n_items) : heaps_(1), live_(1, 0), freq_(n_items, -1) {}

void BucketList::push(int item, int freq) {
  const auto f = static_cast<std::size_t>(freq);
  if (f >= heaps_.size()) {
    heaps_.resize(f + 1);
    live_.resize(f + 1, 0);
  }
  heaps_[f].push_back(item);
  std::push_heap(heaps_[f].begin(), heaps_[f].end(), std::greater<>());
  ++live_[f];
  max_freq_ = std::max(max_freq_, freq);
}

void BucketList::insert(int item, int freq) {
  assert(freq >= 0 && !contains(item));
  freq_[static_cast<std::size_t>(item)] = freq;
  if (freq > 0) push(item, freq);
}

void BucketList::remove(int item) {
  const int f = freq_[static_cast<std::size_t>(item)];
  if (f < 0) return;
  freq_[static_cast<std::size_t>(item)] = -1;
  if (f > 0) --live_[static_cast<std::size_t>(f)];
  settle_max();
}

void BucketList::decrement(int item) {
  const int f = freq_[static_cast<std::size_t>(item)];
  assert(f > 0);
  freq_[static_cast<std::size_t>(item)] = f - 1;
  --live_[static_cast<std::size_t>(f)];
  if (f > 1) push(item, f - 1);
  ++relocations_;
  settle_max();
}

void BucketList::settle_max() {
  while (max_freq_ > 0 && live_[static_cast<std::size_t>(max_freq_)] == 0) {
    heaps_[static_cast<std::size_t>(max_freq_)].clear();
    --max_freq_;
  }
}

int BucketList::top() const {
  if (max_freq_ == 0) return -1;
  // entries whose item has since moved or left are dropped on the way up
  auto& heap = heaps_[static_cast<std::size_t>(max_freq_)];
  while (freq_[static_cast<std::size_t>(heap.front())] != max_freq_) {
    std::pop_heap(heap.begin(), heap.end(), std::greater<>());
    heap.pop_back();
  }
  return heap.front();
}

GreedyTrace greedy_set_cover(std::size_t universe, std::span<const std::vector<int>> sets,
                             const std::function<void(int, std::vector<int>&)>& on_pick) {
  GreedyTrace trace;
  trace.covered.assign(universe, false);

  std::vector<std::vector<int>> members(sets.size());
  std::vector<std::vector<int>> sets_of(universe);
  for (std::size_t s = 0; s < sets.size(); ++s) {
    members[s] = sets[s];
    std::sort(members[s].begin(), members[s].end());
    members[s].erase(std::unique(members[s].begin(), members[s].end()), members[s].end());
    for (int e : members[s]) {
      if (e < 0 || static_cast<std::size_t>(e) >= universe) {
        throw Error(Errc::invalid_argument, "set " + std::to_string(s) + " references element outside universe");
      }
      sets_of[static_cast<std::size_t>(e)].push_back(static_cast<int>(s));
    }
  }

  BucketList buckets(sets.size());
  for (std::size_t s = 0; s < sets.size(); ++s) buckets.insert(static_cast<int>(s), static_cast<int>(members[s].size()));

  std::vector<int> killed;
  for (int s = buckets.top(); s >= 0; s = buckets.top()) {
    trace.picks.push_back(s);
    buckets.remove(s);
    for (int e : members[static_cast<std::size_t>(s)]) {
      if (trace.covered[static_cast<std::size_t>(e)]) continue;
      trace.covered[static_cast<std::size_t>(e)] = true;
      for (int t : sets_of[static_cast<std::size_t>(e)]) {
        if (t != s && buckets.contains(t)) buckets.decrement(t);
      }
    }
    if (on_pick) {
      killed.clear();
      on_pick(s, killed);
      for (int t : killed) {
        if (buckets.contains(t)) {
          buckets.remove(t);
          ++trace.invalidations;
        }
      }
    }
  }
  trace.relocations = buckets.relocations();
  return trace;
}

CoverResult greedy_cover(std::span<const PotentialHotspot> hotspots, std::vector<Eliminator> candidates) {
  // canonical order; duplicate keys are merged
  std::map<std::pair<int, std::vector<ViaId>>, std::size_t> by_key;
  std::vector<Eliminator> cands;
  for (Eliminator& e : candidates) {
    auto k = e.key();
    auto it = by_key.find(k);
    if (it == by_key.end()) {
      by_key.emplace(std::move(k), cands.size());
      cands.push_back(std::move(e));
    } else {
      auto& covers = cands[it->second].covers;
      covers.insert(covers.end(), e.covers.begin(), e.covers.end());
    }
  }
  std::vector<Eliminator> ordered;
  ordered.reserve(cands.size());
  for (auto& [k, idx] : by_key) ordered.push_back(std::move(cands[idx]));

  std::unordered_map<int, int> pos_of_hotspot;
  for (std::size_t i = 0; i < hotspots.size(); ++i) pos_of_hotspot[hotspots[i].id] = static_cast<int>(i);

  CoverResult result;
  std::vector<std::vector<int>> sets(ordered.size());
  std::unordered_map<ViaId, std::vector<int>> conflicts_at, affinities_at;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    Eliminator& e = ordered[i];
    e.id = static_cast<int>(i);
    e.state = EliminatorState::live;
    std::sort(e.covers.begin(), e.covers.end());
    e.covers.erase(std::unique(e.covers.begin(), e.covers.end()), e.covers.end());
    for (int h : e.covers) {
      auto it = pos_of_hotspot.find(h);
      if (it == pos_of_hotspot.end()) {
        throw Error(Errc::invalid_argument, "eliminator covers unknown hotspot " + std::to_string(h));
      }
      sets[i].push_back(it->second);
    }
    result.stats.incidences += sets[i].size();
    auto& index = e.kind == EliminatorKind::conflict ? conflicts_at : affinities_at;
    for (ViaId v : e.vias) index[v].push_back(static_cast<int>(i));
  }

  auto contains = [](const std::vector<ViaId>& vias, ViaId v) {
    return std::find(vias.begin(), vias.end(), v) != vias.end();
  };
  auto on_pick = [&](int s, std::vector<int>& killed) {
    const Eliminator& picked = ordered[static_cast<std::size_t>(s)];
    if (picked.kind == EliminatorKind::conflict) {
      const ViaId a = picked.vias[0], b = picked.vias[1];
      if (auto it = affinities_at.find(a); it != affinities_at.end()) {
        for (int t : it->second) {
          if (contains(ordered[static_cast<std::size_t>(t)].vias, b)) killed.push_back(t);
        }
      }
      return;
    }
    for (ViaId v : picked.vias) {
      if (auto it = conflicts_at.find(v); it != conflicts_at.end()) {
        for (int t : it->second) {
          const auto& pair = ordered[static_cast<std::size_t>(t)].vias;
          if (contains(picked.vias, pair[0]) && contains(picked.vias, pair[1])) killed.push_back(t);
        }
      }
      if (auto it = affinities_at.find(v); it != affinities_at.end()) {
        for (int t : it->second) {
          if (t != s) killed.push_back(t);
        }
      }
    }
  };

  std::vector<int> killed_all;
  auto tracking = [&](int s, std::vector<int>& killed) {
    const std::size_t before = killed.size();
    on_pick(s, killed);
    killed_all.insert(killed_all.end(), killed.begin() + static_cast<std::ptrdiff_t>(before), killed.end());
  };
  GreedyTrace trace = greedy_set_cover(hotspots.size(), sets, tracking);

  for (int t : killed_all) ordered[static_cast<std::size_t>(t)].state = EliminatorState::invalidated;
  for (int s : trace.picks) {
    ordered[static_cast<std::size_t>(s)].state = EliminatorState::chosen;
    result.chosen.push_back(ordered[static_cast<std::size_t>(s)]);
  }
  for (std::size_t i = 0; i < hotspots.size(); ++i) {
    (trace.covered[i] ? result.covered : result.residual).push_back(hotspots[i].id);
  }
  std::sort(result.covered.begin(), result.covered.end());
  std::sort(result.residual.begin(), result.residual.end());
  result.stats.iterations = static_cast<int>(trace.picks.size());
  result.stats.invalidations = trace.invalidations;
  result.stats.relocations = trace.relocations;
  return result;
}

LayoutGraph apply_eliminators(const LayoutGraph& graph, const CoverResult& result) {
  std::vector<std::pair<ViaId, ViaId>> conflicts;
  std::vector<GroupEdge> forced;
  for (const Eliminator& e : result.chosen) {
    if (e.kind == EliminatorKind::conflict) {
      if (e.vias.size() != 2) throw Error(Errc::invalid_argument, "conflict eliminator needs exactly two vias");
      conflicts.emplace_back(e.vias[0], e.vias[1]);
    } else {
      forced.push_back(GroupEdge{e.vias});
    }
  }
  return graph.augmented(conflicts, forced);
}

}  // namespace dsahs

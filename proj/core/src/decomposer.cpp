#include "dsahs/decomposer.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <random>
#include <unordered_map>

#include "dsahs/error.hpp"
#include "dsahs/parallel.hpp"

namespace dsahs {

std::vector<int> Decomposition::via_to_group(std::size_t n_vias) const {
  std::vector<int> out(n_vias, -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (ViaId v : groups[g].vias) {
      if (v >= 0 && static_cast<std::size_t>(v) < n_vias) out[static_cast<std::size_t>(v)] = static_cast<int>(g);
    }
  }
  return out;
}

std::vector<int> Decomposition::mask_of_via(std::size_t n_vias) const {
  std::vector<int> out(n_vias, -1);
  for (const DecompGroup& g : groups) {
    for (ViaId v : g.vias) {
      if (v >= 0 && static_cast<std::size_t>(v) < n_vias) out[static_cast<std::size_t>(v)] = g.mask;
    }
  }
  return out;
}

std::vector<const PotentialHotspot*> hotspots_within(std::span<const ViaId> component, const LayoutGraph& /*graph*/,
                                                      std::span<const PotentialHotspot> hotspots) {
  std::vector<const PotentialHotspot*> out;
  if (component.empty()) return out;
  std::vector<ViaId> sorted(component.begin(), component.end());
  std::sort(sorted.begin(), sorted.end());
  auto inside = [&](ViaId v) { return std::binary_search(sorted.begin(), sorted.end(), v); };
  for (const PotentialHotspot& ph : hotspots) {
    if (std::all_of(ph.constituents.begin(), ph.constituents.end(), inside) &&
        std::all_of(ph.non_constituents.begin(), ph.non_constituents.end(), inside)) {
      out.push_back(&ph);
    }
  }
  return out;
}

namespace {

// Realization test shared by objective_value; group_size(g) and the via maps
// describe a complete assignment of the window.
template <typename MaskOf, typename GroupOf, typename GroupSize>
bool realized(const PotentialHotspot& ph, const HotspotPattern& pat, MaskOf&& mask_of, GroupOf&& group_of,
              GroupSize&& group_size) {
  const int m = mask_of(ph.constituents[0]);
  for (ViaId c : ph.constituents) {
    if (mask_of(c) != m) return false;
  }
  for (ViaId v : ph.non_constituents) {
    if (mask_of(v) == m) return false;
  }
  for (const auto& seg : pat.segments) {
    const int g = group_of(ph.constituents[static_cast<std::size_t>(seg[0])]);
    for (int idx : seg) {
      if (group_of(ph.constituents[static_cast<std::size_t>(idx)]) != g) return false;
    }
    if (group_size(g) != seg.size()) return false;
  }
  for (int idx : pat.nodes) {
    if (group_size(group_of(ph.constituents[static_cast<std::size_t>(idx)])) != 1) return false;
  }
  return true;
}

std::vector<DecompGroup> canonical_groups(std::vector<DecompGroup> groups) {
  for (auto& g : groups) std::sort(g.vias.begin(), g.vias.end());
  std::sort(groups.begin(), groups.end(), [](const DecompGroup& l, const DecompGroup& r) { return l.vias < r.vias; });
  for (std::size_t i = 0; i < groups.size(); ++i) groups[i].id = static_cast<int>(i);
  return groups;
}

// Depth-first branch-and-bound over vias in ascending id order. Each via joins
// an open group (if the result can still become a legal template) or opens a
// new group on a mask; masks are introduced in order to break symmetry.
class ExactSolver {
 public:
  ExactSolver(std::span<const ViaId> component, const LayoutGraph& graph, const HotspotLibrary& library,
              std::span<const PotentialHotspot> hotspots, SolveMode mode)
      : comp_(component.begin(), component.end()), graph_(graph), library_(library) {
    std::sort(comp_.begin(), comp_.end());
    n_ = comp_.size();
    k_ = graph.tech().num_masks;
    std::unordered_map<ViaId, int> local;
    for (std::size_t i = 0; i < n_; ++i) local[comp_[i]] = static_cast<int>(i);
    auto loc = [&](ViaId v) {
      auto it = local.find(v);
      return it == local.end() ? -1 : it->second;
    };

    lower_conflicts_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (ViaId u : graph.conflict_neighbors(comp_[i])) {
        const int j = loc(u);
        if (j >= 0 && static_cast<std::size_t>(j) < i) lower_conflicts_[i].push_back(j);
      }
    }

    legal_with_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      for (int gi : graph.groups_of(comp_[i])) {
        std::uint64_t bits = 0;
        bool ok = true;
        for (ViaId v : graph.group_edges()[static_cast<std::size_t>(gi)].vias) {
          const int j = loc(v);
          if (j < 0) {
            ok = false;
            break;
          }
          bits |= std::uint64_t{1} << j;
        }
        if (ok) {
          legal_with_[i].push_back(bits);
          legal_.push_back(bits);
        }
      }
    }
    std::sort(legal_.begin(), legal_.end());
    legal_.erase(std::unique(legal_.begin(), legal_.end()), legal_.end());

    forced_of_.assign(n_, -1);
    for (std::size_t i = 0; i < n_; ++i) {
      const int f = graph.forced_group_of(comp_[i]);
      if (f < 0) continue;
      auto it = std::find(forced_ids_.begin(), forced_ids_.end(), f);
      if (it == forced_ids_.end()) {
        forced_ids_.push_back(f);
        it = forced_ids_.end() - 1;
      }
      forced_of_[i] = static_cast<int>(it - forced_ids_.begin());
    }

    if (mode.hotspot_aware) {
      decide_at_.resize(n_);
      for (const PotentialHotspot* ph : hotspots_within(comp_, graph, hotspots)) {
        LocalHotspot lh;
        lh.pattern = &library.patterns.at(static_cast<std::size_t>(ph->pattern_index));
        std::uint64_t relevant = 0;
        for (ViaId c : ph->constituents) {
          const int j = loc(c);
          lh.cons.push_back(j);
          relevant |= std::uint64_t{1} << j;
          for (std::uint64_t e : legal_with_[static_cast<std::size_t>(j)]) relevant |= e;
        }
        for (ViaId v : ph->non_constituents) {
          const int j = loc(v);
          lh.non_cons.push_back(j);
          relevant |= std::uint64_t{1} << j;
        }
        const int decide = 63 - std::countl_zero(relevant);
        decide_at_[static_cast<std::size_t>(decide)].push_back(std::move(lh));
      }
    }
  }

  // Returns false if no assignment strictly better than `upper_bound` exists.
  bool solve(long upper_bound, std::mt19937_64* rng = nullptr) {
    rng_ = rng;
    best_ = upper_bound;
    group_of_.assign(n_, -1);
    mask_of_.assign(n_, -1);
    forced_slot_.assign(forced_ids_.size(), -1);
    groups_.clear();
    found_ = false;
    dfs(0, 0, 0);
    return found_;
  }

  long best() const { return best_; }

  std::vector<DecompGroup> best_groups() const {
    std::vector<DecompGroup> out;
    for (const auto& [bits, mask] : best_assignment_) {
      DecompGroup g;
      g.mask = mask;
      for (std::size_t i = 0; i < n_; ++i) {
        if (bits >> i & 1) g.vias.push_back(comp_[i]);
      }
      out.push_back(std::move(g));
    }
    return canonical_groups(std::move(out));
  }

 private:
  struct LocalHotspot {
    const HotspotPattern* pattern = nullptr;
    std::vector<int> cons;
    std::vector<int> non_cons;
  };
  struct OpenGroup {
    std::uint64_t bits = 0;
    int mask = 0;
    int forced = -1;
  };

  bool is_legal(std::uint64_t bits) const {
    return std::popcount(bits) == 1 || std::binary_search(legal_.begin(), legal_.end(), bits);
  }

  // Some legal template contains `bits` and its other vias are all > last.
  bool completable(std::uint64_t bits, std::size_t last) const {
    if (is_legal(bits)) return true;
    const std::uint64_t assigned = last + 1 >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << (last + 1)) - 1;
    const auto low = static_cast<std::size_t>(std::countr_zero(bits));
    for (std::uint64_t e : legal_with_[low]) {
      if ((e & bits) == bits && (e & ~bits & assigned) == 0) return true;
    }
    return false;
  }

  long hotspots_decided_at(std::size_t i) const {
    if (decide_at_.empty()) return 0;
    long count = 0;
    for (const LocalHotspot& lh : decide_at_[i]) {
      const int m = mask_of_[static_cast<std::size_t>(lh.cons[0])];
      bool hit = true;
      for (int c : lh.cons) hit &= mask_of_[static_cast<std::size_t>(c)] == m;
      for (int v : lh.non_cons) hit &= mask_of_[static_cast<std::size_t>(v)] != m;
      if (hit) {
        for (const auto& seg : lh.pattern->segments) {
          const int g = group_of_[static_cast<std::size_t>(lh.cons[static_cast<std::size_t>(seg[0])])];
          for (int idx : seg) hit &= group_of_[static_cast<std::size_t>(lh.cons[static_cast<std::size_t>(idx)])] == g;
          hit &= static_cast<std::size_t>(std::popcount(groups_[static_cast<std::size_t>(g)].bits)) == seg.size();
        }
        for (int idx : lh.pattern->nodes) {
          const int g = group_of_[static_cast<std::size_t>(lh.cons[static_cast<std::size_t>(idx)])];
          hit &= std::popcount(groups_[static_cast<std::size_t>(g)].bits) == 1;
        }
      }
      count += hit ? 1 : 0;
    }
    return count;
  }

  void place(std::size_t i, int g, long cost, int masks_used) {
    const int mask = groups_[static_cast<std::size_t>(g)].mask;
    long delta = 0;
    for (int j : lower_conflicts_[i]) {
      if (mask_of_[static_cast<std::size_t>(j)] == mask && group_of_[static_cast<std::size_t>(j)] != g) ++delta;
    }
    if (cost + delta >= best_) return;
    group_of_[i] = g;
    mask_of_[i] = mask;
    delta += hotspots_decided_at(i);
    bool viable = cost + delta < best_;
    for (std::size_t h = 0; viable && h < groups_.size(); ++h) viable = completable(groups_[h].bits, i);
    if (viable) dfs(i + 1, cost + delta, masks_used);
    group_of_[i] = -1;
    mask_of_[i] = -1;
  }

  void dfs(std::size_t i, long cost, int masks_used) {
    if (cost >= best_) return;
    if (i == n_) {
      for (const OpenGroup& g : groups_) {
        if (!is_legal(g.bits)) return;
      }
      best_ = cost;
      found_ = true;
      best_assignment_.clear();
      for (const OpenGroup& g : groups_) best_assignment_.emplace_back(g.bits, g.mask);
      return;
    }
    const std::uint64_t bit = std::uint64_t{1} << i;
    const int f = forced_of_[i];
    if (f >= 0 && forced_slot_[static_cast<std::size_t>(f)] >= 0) {
      const int g = forced_slot_[static_cast<std::size_t>(f)];
      groups_[static_cast<std::size_t>(g)].bits |= bit;
      place(i, g, cost, masks_used);
      groups_[static_cast<std::size_t>(g)].bits &= ~bit;
      return;
    }
    // options: join open group g (g >= 0) or open a new group on mask -1-g
    std::vector<int> options;
    if (f < 0) {
      for (std::size_t g = 0; g < groups_.size(); ++g) {
        if (groups_[g].forced < 0 && completable(groups_[g].bits | bit, i)) options.push_back(static_cast<int>(g));
      }
    }
    const int mask_limit = std::min(k_, masks_used + 1);
    for (int mask = 0; mask < mask_limit; ++mask) options.push_back(-1 - mask);
    if (rng_) std::shuffle(options.begin(), options.end(), *rng_);
    for (int o : options) {
      if (o >= 0) {
        const auto g = static_cast<std::size_t>(o);
        groups_[g].bits |= bit;
        place(i, o, cost, masks_used);
        groups_[g].bits &= ~bit;
        continue;
      }
      const int mask = -1 - o;
      groups_.push_back({bit, mask, f});
      if (f >= 0) forced_slot_[static_cast<std::size_t>(f)] = static_cast<int>(groups_.size()) - 1;
      place(i, static_cast<int>(groups_.size()) - 1, cost, std::max(masks_used, mask + 1));
      if (f >= 0) forced_slot_[static_cast<std::size_t>(f)] = -1;
      groups_.pop_back();
    }
  }

  std::vector<ViaId> comp_;
  const LayoutGraph& graph_;
  const HotspotLibrary& library_;
  std::size_t n_ = 0;
  int k_ = 1;
  std::vector<std::vector<int>> lower_conflicts_;
  std::vector<std::vector<std::uint64_t>> legal_with_;
  std::vector<std::uint64_t> legal_;
  std::vector<int> forced_ids_;
  std::vector<int> forced_of_;
  std::vector<std::vector<LocalHotspot>> decide_at_;

  std::vector<int> group_of_;
  std::vector<int> mask_of_;
  std::vector<int> forced_slot_;
  std::vector<OpenGroup> groups_;
  long best_ = 0;
  bool found_ = false;
  std::vector<std::pair<std::uint64_t, int>> best_assignment_;
  std::mt19937_64* rng_ = nullptr;
};

}  // namespace

long objective_value(std::span<const DecompGroup> groups, std::span<const ViaId> scope, const LayoutGraph& graph,
                     const HotspotLibrary& library, std::span<const PotentialHotspot> hotspots, SolveMode mode) {
  struct Slot {
    int group = -1;
    int mask = -1;
  };
  std::unordered_map<ViaId, Slot> at;
  for (ViaId v : scope) at[v];
  std::vector<std::size_t> sizes(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    sizes[g] = groups[g].vias.size();
    for (ViaId v : groups[g].vias) {
      if (auto it = at.find(v); it != at.end()) it->second = {static_cast<int>(g), groups[g].mask};
    }
  }

  long total = 0;
  for (ViaId v : scope) {
    const Slot sv = at[v];
    for (ViaId u : graph.conflict_neighbors(v)) {
      if (u <= v) continue;
      auto it = at.find(u);
      if (it == at.end()) continue;
      if (sv.mask >= 0 && sv.mask == it->second.mask && sv.group != it->second.group) ++total;
    }
  }
  if (mode.hotspot_aware) {
    for (const PotentialHotspot* ph : hotspots_within(scope, graph, hotspots)) {
      const HotspotPattern& pat = library.patterns.at(static_cast<std::size_t>(ph->pattern_index));
      const bool hit = realized(
          *ph, pat, [&](ViaId v) { return at[v].mask; }, [&](ViaId v) { return at[v].group; },
          [&](int g) { return g < 0 ? std::size_t{0} : sizes[static_cast<std::size_t>(g)]; });
      total += hit ? 1 : 0;
    }
  }
  return total;
}

ComponentSolution solve_component_heuristic(std::span<const ViaId> component, const LayoutGraph& graph,
                                            SolveMode /*mode*/) {
  std::vector<ViaId> comp(component.begin(), component.end());
  std::sort(comp.begin(), comp.end());
  const int k = graph.tech().num_masks;
  std::unordered_map<ViaId, int> group_of;
  std::vector<std::vector<ViaId>> groups;

  auto take = [&](const std::vector<ViaId>& vias) {
    for (ViaId v : vias) group_of[v] = static_cast<int>(groups.size());
    groups.push_back(vias);
  };
  for (ViaId v : comp) {
    const int f = graph.forced_group_of(v);
    if (f >= 0 && !group_of.count(v)) take(graph.forced_groups()[static_cast<std::size_t>(f)].key());
  }
  // largest templates first, then canonical key order
  std::vector<std::vector<ViaId>> candidates;
  for (ViaId v : comp) {
    for (int gi : graph.groups_of(v)) {
      const GroupEdge& e = graph.group_edges()[static_cast<std::size_t>(gi)];
      auto key = e.key();
      if (key[0] == v) candidates.push_back(std::move(key));
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& l, const auto& r) {
    return l.size() != r.size() ? l.size() > r.size() : l < r;
  });
  for (const auto& c : candidates) {
    const bool free = std::none_of(c.begin(), c.end(), [&](ViaId v) { return group_of.count(v) > 0; });
    if (free) take(c);
  }
  for (ViaId v : comp) {
    if (!group_of.count(v)) take({v});
  }
  std::sort(groups.begin(), groups.end());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (ViaId v : groups[g]) group_of[v] = static_cast<int>(g);
  }

  std::vector<int> mask(groups.size(), -1);
  auto cost_on = [&](std::size_t g, int m) {
    int c = 0;
    for (ViaId v : groups[g]) {
      for (ViaId u : graph.conflict_neighbors(v)) {
        auto it = group_of.find(u);
        if (it == group_of.end() || static_cast<std::size_t>(it->second) == g) continue;
        if (mask[static_cast<std::size_t>(it->second)] == m) ++c;
      }
    }
    return c;
  };
  auto best_mask = [&](std::size_t g) {
    int best = 0, best_cost = cost_on(g, 0);
    for (int m = 1; m < k; ++m) {
      const int c = cost_on(g, m);
      if (c < best_cost) {
        best = m;
        best_cost = c;
      }
    }
    return std::pair{best, best_cost};
  };
  for (std::size_t g = 0; g < groups.size(); ++g) mask[g] = best_mask(g).first;
  // recolor sweeps while any group strictly improves
  for (int sweep = 0; sweep < 16; ++sweep) {
    bool improved = false;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const int current = cost_on(g, mask[g]);
      auto [m, c] = best_mask(g);
      if (c < current) {
        mask[g] = m;
        improved = true;
      }
    }
    if (!improved) break;
  }

  ComponentSolution sol;
  for (std::size_t g = 0; g < groups.size(); ++g) sol.groups.push_back({0, groups[g], mask[g]});
  sol.groups = canonical_groups(std::move(sol.groups));
  long conflicts = 0;
  for (ViaId v : comp) {
    for (ViaId u : graph.conflict_neighbors(v)) {
      if (u > v && group_of[u] != group_of[v] &&
          mask[static_cast<std::size_t>(group_of[u])] == mask[static_cast<std::size_t>(group_of[v])]) {
        ++conflicts;
      }
    }
  }
  sol.objective = conflicts;
  return sol;
}

ComponentSolution solve_component_exact(std::span<const ViaId> component, const LayoutGraph& graph,
                                        const HotspotLibrary& library, std::span<const PotentialHotspot> hotspots,
                                        SolveMode mode) {
  if (mode.exact_limit < 1) throw Error(Errc::invalid_argument, "exact_limit must be >= 1");
  if (component.size() > static_cast<std::size_t>(std::min(mode.exact_limit, 64))) {
    throw Error(Errc::too_large, "component of " + std::to_string(component.size()) +
                                     " vias exceeds exact_limit " + std::to_string(mode.exact_limit));
  }
  ComponentSolution sol;
  sol.exact = true;
  if (component.empty()) return sol;

  ComponentSolution seed = solve_component_heuristic(component, graph, mode);
  const long seed_value = objective_value(seed.groups, component, graph, library, hotspots, mode);

  ExactSolver solver(component, graph, library, hotspots, mode);
  if (!solver.solve(seed_value + 1)) {
    sol.groups = std::move(seed.groups);
    sol.objective = seed_value;
    return sol;
  }
  sol.objective = solver.best();
  if (mode.tie_seed != 0) {
    // every assignment reachable under best + 1 is optimal; the shuffle picks which
    const auto first = static_cast<std::uint64_t>(*std::min_element(component.begin(), component.end()));
    std::mt19937_64 rng(mode.tie_seed ^ (0x9e3779b97f4a7c15ull * (first + 1)));
    solver.solve(sol.objective + 1, &rng);
  }
  sol.groups = solver.best_groups();
  return sol;
}

std::vector<std::vector<ViaId>> solve_units(const LayoutGraph& graph, std::span<const PotentialHotspot> hotspots,
                                            SolveMode mode) {
  const auto& comps = graph.components();
  if (!mode.hotspot_aware) return comps;
  std::vector<int> parent(comps.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int c) {
    while (parent[static_cast<std::size_t>(c)] != c) {
      parent[static_cast<std::size_t>(c)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(c)])];
      c = parent[static_cast<std::size_t>(c)];
    }
    return c;
  };
  for (const PotentialHotspot& ph : hotspots) {
    const int anchor = graph.component_of(ph.constituents[0]);
    auto join = [&](ViaId v) {
      const int a = find(anchor), b = find(graph.component_of(v));
      if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    };
    for (ViaId v : ph.constituents) join(v);
    for (ViaId v : ph.non_constituents) join(v);
  }
  const std::size_t limit = static_cast<std::size_t>(std::min(mode.exact_limit, 64));
  std::vector<std::size_t> size(comps.size(), 0);
  for (std::size_t c = 0; c < comps.size(); ++c) size[static_cast<std::size_t>(find(static_cast<int>(c)))] += comps[c].size();
  // roots are the smallest component index of each class, so unit order follows
  std::vector<std::vector<ViaId>> units;
  std::vector<int> unit_of(comps.size(), -1);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    const auto r = static_cast<std::size_t>(find(static_cast<int>(c)));
    if (size[r] > limit) {
      units.push_back(comps[c]);
      continue;
    }
    if (unit_of[r] < 0) {
      unit_of[r] = static_cast<int>(units.size());
      units.emplace_back();
    }
    auto& u = units[static_cast<std::size_t>(unit_of[r])];
    u.insert(u.end(), comps[c].begin(), comps[c].end());
  }
  for (auto& u : units) std::sort(u.begin(), u.end());
  return units;
}

Decomposition decompose(const LayoutGraph& graph, const HotspotLibrary& library,
                        std::span<const PotentialHotspot> hotspots, SolveMode mode, int threads) {
  if (mode.exact_limit < 1) throw Error(Errc::invalid_argument, "exact_limit must be >= 1");
  const auto units = solve_units(graph, hotspots, mode);
  std::vector<int> unit_of(graph.layout().size(), -1);
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (ViaId v : units[u]) unit_of[static_cast<std::size_t>(v)] = static_cast<int>(u);
  }

  // hotspots bucketed by the unit holding their whole window
  std::vector<std::vector<PotentialHotspot>> local(mode.hotspot_aware ? units.size() : 0);
  if (mode.hotspot_aware) {
    for (const PotentialHotspot& ph : hotspots) {
      local[static_cast<std::size_t>(unit_of[static_cast<std::size_t>(ph.constituents[0])])].push_back(ph);
    }
  }
  const std::size_t limit = static_cast<std::size_t>(std::min(mode.exact_limit, 64));
  std::vector<ComponentSolution> solved(units.size());
  parallel_for(units.size(), threads, [&](std::size_t c) {
    if (units[c].size() <= limit) {
      std::span<const PotentialHotspot> mine;
      if (mode.hotspot_aware) mine = local[c];
      solved[c] = solve_component_exact(units[c], graph, library, mine, mode);
    } else {
      solved[c] = solve_component_heuristic(units[c], graph, mode);
    }
  });

  Decomposition out;
  for (auto& sol : solved) {
    (sol.exact ? out.exact_components : out.fallback_components) += 1;
    for (auto& g : sol.groups) {
      g.id = static_cast<int>(out.groups.size());
      out.groups.push_back(std::move(g));
    }
  }
  return out;
}

Decomposition decompose(const LayoutGraph& graph, const HotspotLibrary& library, SolveMode mode, int threads) {
  if (!mode.hotspot_aware) return decompose(graph, library, {}, mode, threads);
  const auto hotspots = find_potential_hotspots(graph, library, threads);
  return decompose(graph, library, hotspots, mode, threads);
}

}  // namespace dsahs

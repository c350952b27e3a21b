#include "dsahs/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "dsahs/error.hpp"
#include "dsahs/spatial.hpp"

namespace dsahs {

std::vector<ViaId> GroupEdge::key() const {
  std::vector<ViaId> k = vias;
  std::sort(k.begin(), k.end());
  return k;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // smaller root wins so roots are deterministic
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<int> parent_;
};

void sort_by_key(std::vector<GroupEdge>& edges) {
  std::vector<std::pair<std::vector<ViaId>, GroupEdge>> keyed;
  keyed.reserve(edges.size());
  for (GroupEdge& e : edges) keyed.emplace_back(e.key(), std::move(e));
  std::sort(keyed.begin(), keyed.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  edges.clear();
  for (auto& [k, e] : keyed) edges.push_back(std::move(e));
}

// Contiguous sub-runs of length 2..max_g over maximal legal runs of one line.
void emit_runs(const std::vector<ViaId>& line, const Layout& layout, bool horizontal, const TechParams& tech,
               std::vector<GroupEdge>& out) {
  std::size_t start = 0;
  auto coord = [&](ViaId id) { return horizontal ? layout.via(id).x : layout.via(id).y; };
  for (std::size_t i = 1; i <= line.size(); ++i) {
    bool extends = false;
    if (i < line.size()) {
      const Coord gap = coord(line[i]) - coord(line[i - 1]);
      extends = gap >= tech.min_group_pitch && gap <= tech.max_dsa_pitch;
    }
    if (extends) continue;
    // run is line[start, i)
    for (std::size_t a = start; a < i; ++a) {
      for (std::size_t len = 2; len <= static_cast<std::size_t>(tech.max_g) && a + len <= i; ++len) {
        out.push_back({std::vector<ViaId>(line.begin() + static_cast<std::ptrdiff_t>(a),
                                          line.begin() + static_cast<std::ptrdiff_t>(a + len))});
      }
    }
    start = i;
  }
}

}  // namespace

std::span<const ViaId> LayoutGraph::conflict_neighbors(ViaId v) const {
  const auto i = static_cast<std::size_t>(v);
  return std::span<const ViaId>(conflict_adj_).subspan(conflict_offsets_[i],
                                                       conflict_offsets_[i + 1] - conflict_offsets_[i]);
}

std::span<const int> LayoutGraph::groups_of(ViaId v) const {
  const auto i = static_cast<std::size_t>(v);
  return std::span<const int>(group_adj_).subspan(group_offsets_[i], group_offsets_[i + 1] - group_offsets_[i]);
}

bool LayoutGraph::has_conflict(ViaId a, ViaId b) const {
  auto nb = conflict_neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

std::size_t LayoutGraph::num_added_conflicts() const {
  return static_cast<std::size_t>(std::count_if(conflicts_.begin(), conflicts_.end(), [](const ConflictEdge& e) {
    return e.origin == EdgeOrigin::added_by_cover;
  }));
}

void LayoutGraph::rebuild_indexes() {
  const std::size_t n = layout_.size();

  std::vector<std::vector<ViaId>> cadj(n);
  for (const ConflictEdge& e : conflicts_) {
    cadj[static_cast<std::size_t>(e.a)].push_back(e.b);
    cadj[static_cast<std::size_t>(e.b)].push_back(e.a);
  }
  conflict_offsets_.assign(n + 1, 0);
  conflict_adj_.clear();
  for (std::size_t v = 0; v < n; ++v) {
    std::sort(cadj[v].begin(), cadj[v].end());
    conflict_adj_.insert(conflict_adj_.end(), cadj[v].begin(), cadj[v].end());
    conflict_offsets_[v + 1] = conflict_adj_.size();
  }

  std::vector<std::vector<int>> gadj(n);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    for (ViaId v : groups_[g].vias) gadj[static_cast<std::size_t>(v)].push_back(static_cast<int>(g));
  }
  group_offsets_.assign(n + 1, 0);
  group_adj_.clear();
  for (std::size_t v = 0; v < n; ++v) {
    group_adj_.insert(group_adj_.end(), gadj[v].begin(), gadj[v].end());
    group_offsets_[v + 1] = group_adj_.size();
  }

  forced_of_.assign(n, -1);
  for (std::size_t f = 0; f < forced_.size(); ++f) {
    for (ViaId v : forced_[f].vias) forced_of_[static_cast<std::size_t>(v)] = static_cast<int>(f);
  }

  DisjointSets ds(n);
  for (const ConflictEdge& e : conflicts_) ds.unite(e.a, e.b);
  for (const GroupEdge& g : groups_) {
    for (std::size_t i = 1; i < g.vias.size(); ++i) ds.unite(g.vias[0], g.vias[i]);
  }
  for (const GroupEdge& g : forced_) {
    for (std::size_t i = 1; i < g.vias.size(); ++i) ds.unite(g.vias[0], g.vias[i]);
  }
  components_.clear();
  component_of_.assign(n, -1);
  std::vector<int> comp_of_root(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    const auto root = static_cast<std::size_t>(ds.find(static_cast<int>(v)));
    if (comp_of_root[root] < 0) {
      comp_of_root[root] = static_cast<int>(components_.size());
      components_.emplace_back();
    }
    component_of_[v] = comp_of_root[root];
    components_[static_cast<std::size_t>(comp_of_root[root])].push_back(static_cast<ViaId>(v));
  }
}

LayoutGraph build_graph(const Layout& layout, const TechParams& tech) {
  tech.validate();
  if (auto errs = validate_layout(layout, tech); !errs.empty()) {
    throw Error(Errc::unvalidated_layout, "layout has " + std::to_string(errs.size()) +
                                              " via pairs closer than min_pitch_diff_mask (first: " +
                                              std::to_string(errs[0].a) + "," + std::to_string(errs[0].b) + ")");
  }
  LayoutGraph g;
  g.layout_ = layout;
  g.tech_ = tech;

  SpatialGrid grid(layout.vias(), std::max<Coord>(tech.min_pitch_same_mask, 1));
  grid.for_each_close_pair(tech.min_pitch_same_mask,
                           [&](ViaId a, ViaId b) { g.conflicts_.push_back({a, b, EdgeOrigin::native}); });
  std::sort(g.conflicts_.begin(), g.conflicts_.end(),
            [](const ConflictEdge& l, const ConflictEdge& r) { return std::tie(l.a, l.b) < std::tie(r.a, r.b); });

  if (tech.max_g >= 2) {
    std::map<Coord, std::vector<ViaId>> rows, cols;
    for (const Via& v : layout.vias()) {
      rows[v.y].push_back(v.id);
      cols[v.x].push_back(v.id);
    }
    for (auto& [y, line] : rows) {
      std::sort(line.begin(), line.end(), [&](ViaId a, ViaId b) { return layout.via(a).x < layout.via(b).x; });
      emit_runs(line, layout, true, tech, g.groups_);
    }
    for (auto& [x, line] : cols) {
      std::sort(line.begin(), line.end(), [&](ViaId a, ViaId b) { return layout.via(a).y < layout.via(b).y; });
      emit_runs(line, layout, false, tech, g.groups_);
    }
    sort_by_key(g.groups_);
  }
  g.rebuild_indexes();
  return g;
}

LayoutGraph LayoutGraph::augmented(std::span<const std::pair<ViaId, ViaId>> extra_conflicts,
                                   std::span<const GroupEdge> extra_forced) const {
  LayoutGraph g = *this;
  for (auto [a, b] : extra_conflicts) {
    if (!layout_.contains(a) || !layout_.contains(b) || a == b) {
      throw Error(Errc::unknown_via, "added conflict edge references an invalid via pair");
    }
    if (b < a) std::swap(a, b);
    if (!g.has_conflict(a, b)) g.conflicts_.push_back({a, b, EdgeOrigin::added_by_cover});
  }
  std::sort(g.conflicts_.begin(), g.conflicts_.end(),
            [](const ConflictEdge& l, const ConflictEdge& r) { return std::tie(l.a, l.b) < std::tie(r.a, r.b); });
  g.conflicts_.erase(std::unique(g.conflicts_.begin(), g.conflicts_.end(),
                                 [](const ConflictEdge& l, const ConflictEdge& r) { return l.a == r.a && l.b == r.b; }),
                     g.conflicts_.end());

  std::vector<int> owner = forced_of_;
  for (const GroupEdge& f : extra_forced) {
    const auto k = f.key();
    if (f.vias.empty() || !layout_.contains(f.vias[0])) throw Error(Errc::infeasible, "forced group is empty or unknown");
    auto cands = groups_of(f.vias[0]);
    const bool exists = std::any_of(cands.begin(), cands.end(), [&](int gi) {
      return groups_[static_cast<std::size_t>(gi)].key() == k;
    });
    if (!exists) throw Error(Errc::infeasible, "forced group is not a legal group edge of the graph");
    for (ViaId v : f.vias) {
      if (owner[static_cast<std::size_t>(v)] >= 0) {
        throw Error(Errc::infeasible, "forced groups overlap at via " + std::to_string(v));
      }
    }
    for (ViaId v : f.vias) owner[static_cast<std::size_t>(v)] = static_cast<int>(g.forced_.size());
    g.forced_.push_back(f);
  }
  sort_by_key(g.forced_);

  // a via belongs to at most one template once forced
  std::vector<std::vector<ViaId>> forced_keys;
  for (const GroupEdge& f : g.forced_) forced_keys.push_back(f.key());
  std::erase_if(g.groups_, [&](const GroupEdge& e) {
    bool touches = false;
    for (ViaId v : e.vias) touches |= owner[static_cast<std::size_t>(v)] >= 0;
    if (!touches) return false;
    return !std::binary_search(forced_keys.begin(), forced_keys.end(), e.key());
  });
  g.rebuild_indexes();
  return g;
}

bool is_groupable(std::span<const ViaId> vias, const LayoutGraph& graph) {
  for (ViaId v : vias) {
    if (!graph.layout().contains(v)) throw Error(Errc::unknown_via, "unknown via id " + std::to_string(v));
  }
  if (vias.empty()) return false;
  for (int gi : graph.groups_of(vias[0])) {
    const auto& members = graph.group_edges()[static_cast<std::size_t>(gi)].vias;
    const bool all = std::all_of(vias.begin(), vias.end(), [&](ViaId v) {
      return std::find(members.begin(), members.end(), v) != members.end();
    });
    if (all) return true;
  }
  return false;
}

std::vector<std::vector<ViaId>> connected_components(const LayoutGraph& graph) { return graph.components(); }

}  // namespace dsahs

#include "dsahs/matcher.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "dsahs/parallel.hpp"
#include "dsahs/spatial.hpp"

namespace dsahs {

std::pair<int, std::vector<ViaId>> Eliminator::key() const {
  std::vector<ViaId> k = vias;
  std::sort(k.begin(), k.end());
  return {kind == EliminatorKind::conflict ? 0 : 1, std::move(k)};
}

namespace {

struct PointHash {
  std::size_t operator()(Point p) const noexcept {
    const auto h = static_cast<std::uint64_t>(p.x) * 0x9E3779B97F4A7C15ull ^ static_cast<std::uint64_t>(p.y);
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

bool segment_is_group_edge(std::vector<ViaId> members, const LayoutGraph& graph) {
  std::sort(members.begin(), members.end());
  for (int gi : graph.groups_of(members[0])) {
    if (graph.group_edges()[static_cast<std::size_t>(gi)].key() == members) return true;
  }
  return false;
}

bool blocked_by_conflict(const std::vector<ViaId>& constituents, const HotspotPattern& pat, const LayoutGraph& graph) {
  std::vector<int> part(constituents.size(), -1);
  for (std::size_t s = 0; s < pat.segments.size(); ++s) {
    for (int idx : pat.segments[s]) part[static_cast<std::size_t>(idx)] = static_cast<int>(s);
  }
  for (std::size_t i = 0; i < constituents.size(); ++i) {
    for (std::size_t j = i + 1; j < constituents.size(); ++j) {
      if (part[i] >= 0 && part[i] == part[j]) continue;
      if (graph.has_conflict(constituents[i], constituents[j])) return true;
    }
  }
  return false;
}

constexpr std::size_t kAnchorChunk = 2048;

}  // namespace

std::vector<PotentialHotspot> find_potential_hotspots(const LayoutGraph& graph, const HotspotLibrary& library,
                                                      int threads) {
  const Layout& layout = graph.layout();
  const auto vias = layout.vias();
  if (vias.empty() || library.patterns.empty()) return {};

  std::unordered_map<Point, ViaId, PointHash> at;
  at.reserve(vias.size() * 2);
  for (const Via& v : vias) at.emplace(v.pos(), v.id);
  SpatialGrid grid(vias, std::max<Coord>(graph.tech().min_pitch_same_mask, 1));

  const std::size_t chunks = (vias.size() + kAnchorChunk - 1) / kAnchorChunk;
  const std::size_t items = library.patterns.size() * chunks;
  std::vector<std::vector<PotentialHotspot>> found(items);

  parallel_for(items, threads, [&](std::size_t item) {
    const std::size_t pi = item / chunks;
    const HotspotPattern& pat = library.patterns[pi];
    const std::size_t lo = (item % chunks) * kAnchorChunk;
    const std::size_t hi = std::min(vias.size(), lo + kAnchorChunk);
    const Point anchor = pat.offsets.front();
    for (std::size_t vi = lo; vi < hi; ++vi) {
      const Point origin{vias[vi].x - anchor.x, vias[vi].y - anchor.y};
      PotentialHotspot ph;
      ph.constituents.reserve(pat.offsets.size());
      bool ok = true;
      for (const Point& o : pat.offsets) {
        auto it = at.find({origin.x + o.x, origin.y + o.y});
        if (it == at.end()) {
          ok = false;
          break;
        }
        ph.constituents.push_back(it->second);
      }
      if (!ok) continue;
      for (const auto& seg : pat.segments) {
        std::vector<ViaId> members;
        for (int idx : seg) members.push_back(ph.constituents[static_cast<std::size_t>(idx)]);
        if (!segment_is_group_edge(std::move(members), graph)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      std::vector<ViaId> cons_sorted = ph.constituents;
      std::sort(cons_sorted.begin(), cons_sorted.end());
      for (ViaId id : grid.query({origin.x, origin.y, origin.x + pat.window_w, origin.y + pat.window_h})) {
        if (!std::binary_search(cons_sorted.begin(), cons_sorted.end(), id)) ph.non_constituents.push_back(id);
      }
      ph.blocked = blocked_by_conflict(ph.constituents, pat, graph);
      ph.pattern_id = pat.id;
      ph.pattern_index = static_cast<int>(pi);
      ph.origin = origin;
      found[item].push_back(std::move(ph));
    }
  });

  std::vector<PotentialHotspot> out;
  for (auto& batch : found) {
    for (auto& ph : batch) out.push_back(std::move(ph));
  }
  auto order = [](const PotentialHotspot& l, const PotentialHotspot& r) {
    return std::tie(l.pattern_id, l.origin) < std::tie(r.pattern_id, r.origin);
  };
  std::sort(out.begin(), out.end(), order);
  out.erase(std::unique(out.begin(), out.end(),
                        [](const PotentialHotspot& l, const PotentialHotspot& r) {
                          return l.pattern_id == r.pattern_id && l.origin == r.origin;
                        }),
            out.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

std::vector<Eliminator> enumerate_eliminators(std::span<const PotentialHotspot> hotspots, const LayoutGraph& graph) {
  std::map<std::pair<ViaId, ViaId>, std::vector<int>> conflicts;
  std::map<int, std::vector<int>> affinities;  // group edge index -> hotspots

  for (const PotentialHotspot& ph : hotspots) {
    if (ph.blocked) continue;
    const auto& cons = ph.constituents;
    for (std::size_t i = 0; i < cons.size(); ++i) {
      for (std::size_t j = i + 1; j < cons.size(); ++j) {
        const ViaId a = std::min(cons[i], cons[j]);
        const ViaId b = std::max(cons[i], cons[j]);
        if (graph.has_conflict(a, b)) continue;
        const ViaId pair[2] = {a, b};
        if (is_groupable(pair, graph)) continue;
        conflicts[{a, b}].push_back(ph.id);
      }
    }
    for (ViaId c : cons) {
      for (int gi : graph.groups_of(c)) {
        const GroupEdge& g = graph.group_edges()[static_cast<std::size_t>(gi)];
        if (graph.forced_group_of(g.vias[0]) >= 0) continue;
        const bool has_non_constituent = std::any_of(g.vias.begin(), g.vias.end(), [&](ViaId v) {
          return std::binary_search(ph.non_constituents.begin(), ph.non_constituents.end(), v);
        });
        if (has_non_constituent) affinities[gi].push_back(ph.id);
      }
    }
  }

  auto finish = [](std::vector<int>& covers) {
    std::sort(covers.begin(), covers.end());
    covers.erase(std::unique(covers.begin(), covers.end()), covers.end());
  };

  std::vector<Eliminator> out;
  out.reserve(conflicts.size() + affinities.size());
  for (auto& [pair, covers] : conflicts) {
    Eliminator e;
    e.kind = EliminatorKind::conflict;
    e.vias = {pair.first, pair.second};
    e.covers = std::move(covers);
    finish(e.covers);
    out.push_back(std::move(e));
  }
  // group edge indices follow key order already
  for (auto& [gi, covers] : affinities) {
    Eliminator e;
    e.kind = EliminatorKind::affinity;
    e.vias = graph.group_edges()[static_cast<std::size_t>(gi)].vias;
    e.covers = std::move(covers);
    finish(e.covers);
    out.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

}  // namespace dsahs

#include "dsahs/verifier.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "dsahs/error.hpp"
#include "dsahs/spatial.hpp"

namespace dsahs {

namespace {

struct Assignment {
  std::vector<int> group;
  std::vector<int> mask;
  std::vector<std::size_t> group_size;
};

Assignment checked_assignment(const Layout& layout, const Decomposition& d) {
  const std::size_t n = layout.size();
  Assignment a{std::vector<int>(n, -1), std::vector<int>(n, -1), {}};
  a.group_size.reserve(d.groups.size());
  for (std::size_t g = 0; g < d.groups.size(); ++g) {
    a.group_size.push_back(d.groups[g].vias.size());
    for (ViaId v : d.groups[g].vias) {
      if (!layout.contains(v)) throw Error(Errc::unknown_via, "decomposition names unknown via " + std::to_string(v));
      if (a.group[static_cast<std::size_t>(v)] >= 0) {
        throw Error(Errc::invalid_argument, "via " + std::to_string(v) + " appears in two groups");
      }
      a.group[static_cast<std::size_t>(v)] = static_cast<int>(g);
      a.mask[static_cast<std::size_t>(v)] = d.groups[g].mask;
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (a.group[v] < 0) throw Error(Errc::invalid_argument, "incomplete decomposition: via " + std::to_string(v) + " has no group");
  }
  return a;
}

}  // namespace

std::vector<ConflictViolation> count_conflicts(const Layout& layout, const Decomposition& decomposition,
                                               const TechParams& tech) {
  const Assignment a = checked_assignment(layout, decomposition);
  std::vector<ConflictViolation> out;
  if (layout.size() < 2) return out;
  SpatialGrid grid(layout.vias(), std::max<Coord>(tech.min_pitch_same_mask, 1));
  grid.for_each_close_pair(tech.min_pitch_same_mask, [&](ViaId u, ViaId v) {
    const auto ui = static_cast<std::size_t>(u), vi = static_cast<std::size_t>(v);
    if (a.mask[ui] == a.mask[vi] && a.group[ui] != a.group[vi]) {
      out.push_back({u, v, distance(layout.via(u).pos(), layout.via(v).pos())});
    }
  });
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) { return std::tie(l.a, l.b) < std::tie(r.a, r.b); });
  return out;
}

std::vector<HotspotViolation> find_realized_hotspots(const Layout& layout, const Decomposition& decomposition,
                                                     const HotspotLibrary& library) {
  const Assignment a = checked_assignment(layout, decomposition);
  std::vector<HotspotViolation> out;
  if (layout.empty()) return out;

  std::map<Point, ViaId> at;
  for (const Via& v : layout.vias()) at.emplace(v.pos(), v.id);
  SpatialGrid grid(layout.vias(), std::max<Coord>(library.tech.min_pitch_same_mask, 1));

  for (const HotspotPattern& pat : library.patterns) {
    for (const Via& anchor : layout.vias()) {
      const Point origin{anchor.x - pat.offsets[0].x, anchor.y - pat.offsets[0].y};
      std::vector<ViaId> cons;
      for (const Point& o : pat.offsets) {
        auto it = at.find({origin.x + o.x, origin.y + o.y});
        if (it == at.end()) break;
        cons.push_back(it->second);
      }
      if (cons.size() != pat.offsets.size()) continue;

      // (1) one mask for every constituent
      const int m = a.mask[static_cast<std::size_t>(cons[0])];
      bool hit = std::all_of(cons.begin(), cons.end(), [&](ViaId c) { return a.mask[static_cast<std::size_t>(c)] == m; });
      // (2) no other window via on that mask
      if (hit) {
        grid.visit({origin.x, origin.y, origin.x + pat.window_w, origin.y + pat.window_h}, [&](ViaId v) {
          if (a.mask[static_cast<std::size_t>(v)] == m && std::find(cons.begin(), cons.end(), v) == cons.end()) {
            hit = false;
          }
        });
      }
      // (3) printed templates equal the pattern's segments and nodes
      for (std::size_t s = 0; hit && s < pat.segments.size(); ++s) {
        const auto& seg = pat.segments[s];
        const int g = a.group[static_cast<std::size_t>(cons[static_cast<std::size_t>(seg[0])])];
        for (int idx : seg) hit &= a.group[static_cast<std::size_t>(cons[static_cast<std::size_t>(idx)])] == g;
        hit &= a.group_size[static_cast<std::size_t>(g)] == seg.size();
      }
      for (std::size_t i = 0; hit && i < pat.nodes.size(); ++i) {
        const ViaId c = cons[static_cast<std::size_t>(pat.nodes[i])];
        hit &= a.group_size[static_cast<std::size_t>(a.group[static_cast<std::size_t>(c)])] == 1;
      }
      if (hit) out.push_back({pat.id, origin, m, cons});
    }
  }
  std::sort(out.begin(), out.end(), [](const HotspotViolation& l, const HotspotViolation& r) {
    return std::tie(l.pattern_id, l.origin) < std::tie(r.pattern_id, r.origin);
  });
  return out;
}

ViolationReport verify(const Layout& layout, const Decomposition& decomposition, const TechParams& tech,
                       const HotspotLibrary& library, std::string mode) {
  ViolationReport r;
  r.conflicts = count_conflicts(layout, decomposition, tech);
  r.hotspots = find_realized_hotspots(layout, decomposition, library);
  r.n_conflicts = static_cast<int>(r.conflicts.size());
  r.n_hotspots = static_cast<int>(r.hotspots.size());
  r.n_violations = r.n_conflicts + r.n_hotspots;
  r.mode = std::move(mode);
  return r;
}

std::string report_text(const ViolationReport& report) {
  std::ostringstream os;
  os << "violations: " << report.n_violations << " (conflicts " << report.n_conflicts << ", hotspots "
     << report.n_hotspots << ")";
  if (!report.mode.empty()) os << " mode=" << report.mode;
  os << '\n';
  char buf[64];
  for (const auto& c : report.conflicts) {
    std::snprintf(buf, sizeof buf, "%.2f", c.distance);
    os << "  conflict " << c.a << " " << c.b << " distance " << buf << " nm\n";
  }
  for (const auto& h : report.hotspots) {
    os << "  hotspot " << h.pattern_id << " at (" << h.origin.x << "," << h.origin.y << ") mask " << h.mask << '\n';
  }
  return os.str();
}

}  // namespace dsahs

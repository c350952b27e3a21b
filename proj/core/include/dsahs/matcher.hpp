#pragma once

#include <span>
#include <string>
#include <vector>

#include "dsahs/graph.hpp"
#include "dsahs/hotspot.hpp"

namespace dsahs {

/// A layout window where a library pattern could print after grouping and
/// coloring: every pattern offset has a via at the translated position.
struct PotentialHotspot {
  int id = 0;
  std::string pattern_id;
  int pattern_index = 0;  // into HotspotLibrary::patterns
  Point origin;
  /// constituents[i] is the via matched to pattern offset i.
  std::vector<ViaId> constituents;
  /// Other vias in the closed window rectangle, ascending.
  std::vector<ViaId> non_constituents;
  /// Two constituents the pattern keeps in different groups already share a
  /// conflict edge, so printing the pattern needs that conflict unresolved.
  /// Blocked windows get no eliminator candidates.
  bool blocked = false;

  friend bool operator==(const PotentialHotspot&, const PotentialHotspot&) = default;
};

enum class EliminatorKind { conflict, affinity };
enum class EliminatorState { live, chosen, invalidated };

/// A way to kill potential hotspots: add a conflict edge between two
/// constituents, or force a group joining a constituent and a non-constituent.
struct Eliminator {
  int id = 0;
  EliminatorKind kind = EliminatorKind::conflict;
  /// conflict: {a, b} with a < b; affinity: the group's vias in run order.
  std::vector<ViaId> vias;
  /// Potential hotspot ids, ascending.
  std::vector<int> covers;
  EliminatorState state = EliminatorState::live;

  /// Canonical identity: kind first (conflict < affinity), then sorted vias.
  std::pair<int, std::vector<ViaId>> key() const;

  friend bool operator==(const Eliminator&, const Eliminator&) = default;
};

/// Via-anchored exact translation matching, parallel over patterns. Windows
/// whose pattern segments are not group edges of `graph` are dropped. Output
/// is sorted by (pattern id, origin) with ids 0..n-1 in that order.
std::vector<PotentialHotspot> find_potential_hotspots(const LayoutGraph& graph, const HotspotLibrary& library,
                                                      int threads = 1);

/// Candidates deduplicated across hotspots, in canonical key order with ids
/// 0..n-1 in that order.
std::vector<Eliminator> enumerate_eliminators(std::span<const PotentialHotspot> hotspots, const LayoutGraph& graph);

}  // namespace dsahs

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dsahs/graph.hpp"
#include "dsahs/hotspot.hpp"
#include "dsahs/matcher.hpp"

namespace dsahs {

/// One guiding template: its vias (ascending) and the mask it prints on.
struct DecompGroup {
  int id = 0;
  std::vector<ViaId> vias;
  int mask = 0;

  friend bool operator==(const DecompGroup&, const DecompGroup&) = default;
};

struct Decomposition {
  std::vector<DecompGroup> groups;
  int exact_components = 0;
  int fallback_components = 0;

  /// via id -> index into groups; -1 for vias no group mentions.
  std::vector<int> via_to_group(std::size_t n_vias) const;
  /// via id -> mask; -1 for unassigned vias.
  std::vector<int> mask_of_via(std::size_t n_vias) const;

  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

struct SolveMode {
  bool hotspot_aware = false;
  /// Components up to this many vias go to branch-and-bound. Capped at 64.
  int exact_limit = 14;
  /// Nonzero: among optimal assignments, return one reached by a branching
  /// order shuffled from this seed and the component's smallest via id,
  /// instead of the canonical first one.
  std::uint64_t tie_seed = 0;
};

struct ComponentSolution {
  std::vector<DecompGroup> groups;  // ids are local, 0..k-1
  long objective = 0;
  bool exact = false;
};

/// Hotspots that count toward a component's objective: every constituent and
/// every non-constituent belongs to the component.
std::vector<const PotentialHotspot*> hotspots_within(std::span<const ViaId> component, const LayoutGraph& graph,
                                                      std::span<const PotentialHotspot> hotspots);

/// Conflicts (graph edges, including cover-added ones) between same-mask vias
/// in different groups, plus, when hotspot_aware, realized hotspots from
/// `hotspots` whose window lies wholly inside `scope`.
long objective_value(std::span<const DecompGroup> groups, std::span<const ViaId> scope, const LayoutGraph& graph,
                     const HotspotLibrary& library, std::span<const PotentialHotspot> hotspots, SolveMode mode);

/// Minimum-objective grouping and coloring of one component by depth-first
/// branch-and-bound. Throws Error(too_large) above exact_limit.
ComponentSolution solve_component_exact(std::span<const ViaId> component, const LayoutGraph& graph,
                                        const HotspotLibrary& library, std::span<const PotentialHotspot> hotspots,
                                        SolveMode mode);

/// Deterministic greedy grouping and coloring; always feasible, not optimal.
ComponentSolution solve_component_heuristic(std::span<const ViaId> component, const LayoutGraph& graph,
                                            SolveMode mode);

/// Partition the decomposer solves independently: the graph's components,
/// merged in hotspot-aware mode wherever a potential hotspot's window spans
/// several of them, so every window is scored by exactly one unit. A merged
/// unit larger than exact_limit is split back into its components. Units are
/// ascending and ordered by smallest member.
std::vector<std::vector<ViaId>> solve_units(const LayoutGraph& graph, std::span<const PotentialHotspot> hotspots,
                                            SolveMode mode);

/// Solves every unit of solve_units (in parallel) and merges in unit order.
/// `hotspots` must come from find_potential_hotspots on the same layout; they
/// are only consulted in hotspot-aware mode.
Decomposition decompose(const LayoutGraph& graph, const HotspotLibrary& library,
                        std::span<const PotentialHotspot> hotspots, SolveMode mode, int threads = 1);

/// Convenience overload that runs the matcher itself when hotspot_aware.
Decomposition decompose(const LayoutGraph& graph, const HotspotLibrary& library, SolveMode mode, int threads = 1);

}  // namespace dsahs

#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dsahs/model.hpp"

namespace dsahs {

enum class EdgeOrigin { native, added_by_cover };

/// Vias that may not share a mask unless co-grouped. Stored with a < b.
struct ConflictEdge {
  ViaId a = 0;
  ViaId b = 0;
  EdgeOrigin origin = EdgeOrigin::native;

  friend bool operator==(const ConflictEdge&, const ConflictEdge&) = default;
};

/// A legal DSA template: 2..max_g collinear vias in run order.
struct GroupEdge {
  std::vector<ViaId> vias;

  /// Member ids ascending; the canonical identity of the group.
  std::vector<ViaId> key() const;

  friend bool operator==(const GroupEdge&, const GroupEdge&) = default;
};

/// Hybrid hypergraph over a layout: conflict edges, grouping hyper-edges and
/// forced (affinity) groups, plus the component partition over all three.
///
/// Built once by build_graph(); the only way to change it afterwards is
/// augmented(), which returns a new graph.
class LayoutGraph {
 public:
  const Layout& layout() const { return layout_; }
  const TechParams& tech() const { return tech_; }

  /// Sorted by (a, b).
  std::span<const ConflictEdge> conflict_edges() const { return conflicts_; }
  /// Sorted by key().
  std::span<const GroupEdge> group_edges() const { return groups_; }
  /// Pairwise via-disjoint, sorted by key(); each is also in group_edges().
  std::span<const GroupEdge> forced_groups() const { return forced_; }
  /// Each component ascending; components ordered by smallest member.
  const std::vector<std::vector<ViaId>>& components() const { return components_; }

  std::span<const ViaId> conflict_neighbors(ViaId v) const;
  /// Indices into group_edges() of every group containing v.
  std::span<const int> groups_of(ViaId v) const;
  bool has_conflict(ViaId a, ViaId b) const;
  int component_of(ViaId v) const { return component_of_[static_cast<std::size_t>(v)]; }
  /// Index into forced_groups(), or -1.
  int forced_group_of(ViaId v) const { return forced_of_[static_cast<std::size_t>(v)]; }

  std::size_t num_added_conflicts() const;

  /// New graph with extra conflict edges (origin added_by_cover) and forced
  /// groups. Group edges that share a via with a forced group without being
  /// that group are dropped. Throws Error(infeasible) if forced groups overlap
  /// or are not existing group edges.
  LayoutGraph augmented(std::span<const std::pair<ViaId, ViaId>> extra_conflicts,
                        std::span<const GroupEdge> extra_forced) const;

 private:
  friend LayoutGraph build_graph(const Layout& layout, const TechParams& tech);

  void rebuild_indexes();

  Layout layout_;
  TechParams tech_;
  std::vector<ConflictEdge> conflicts_;
  std::vector<GroupEdge> groups_;
  std::vector<GroupEdge> forced_;
  std::vector<std::vector<ViaId>> components_;

  std::vector<std::size_t> conflict_offsets_;
  std::vector<ViaId> conflict_adj_;
  std::vector<std::size_t> group_offsets_;
  std::vector<int> group_adj_;
  std::vector<int> component_of_;
  std::vector<int> forced_of_;
};

/// Throws Error(unvalidated_layout) if any pair is closer than
/// min_pitch_diff_mask.
LayoutGraph build_graph(const Layout& layout, const TechParams& tech);

/// True iff some group edge of the graph contains every given via.
bool is_groupable(std::span<const ViaId> vias, const LayoutGraph& graph);

std::vector<std::vector<ViaId>> connected_components(const LayoutGraph& graph);

}  // namespace dsahs

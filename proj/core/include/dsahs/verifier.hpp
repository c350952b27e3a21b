#pragma once

#include <string>
#include <vector>

#include "dsahs/decomposer.hpp"
#include "dsahs/hotspot.hpp"
#include "dsahs/model.hpp"

namespace dsahs {

struct ConflictViolation {
  ViaId a = 0;
  ViaId b = 0;
  double distance = 0.0;

  friend bool operator==(const ConflictViolation&, const ConflictViolation&) = default;
};

struct HotspotViolation {
  std::string pattern_id;
  Point origin;
  int mask = 0;
  std::vector<ViaId> constituents;

  friend bool operator==(const HotspotViolation&, const HotspotViolation&) = default;
};

struct ViolationReport {
  std::vector<ConflictViolation> conflicts;
  std::vector<HotspotViolation> hotspots;
  int n_conflicts = 0;
  int n_hotspots = 0;
  int n_violations = 0;
  std::string mode;

  friend bool operator==(const ViolationReport&, const ViolationReport&) = default;
};

// Everything here is recomputed from geometry; nothing reads a LayoutGraph.

/// Same-mask pairs in different groups closer than min_pitch_same_mask,
/// sorted by (a, b). Throws Error(invalid_argument) if any via lacks a group.
std::vector<ConflictViolation> count_conflicts(const Layout& layout, const Decomposition& decomposition,
                                               const TechParams& tech);

/// Windows where a library pattern prints: all constituents on one mask, no
/// other window via on it, and the pattern's segments/nodes are exactly the
/// decomposition's groups. Sorted by (pattern id, origin).
std::vector<HotspotViolation> find_realized_hotspots(const Layout& layout, const Decomposition& decomposition,
                                                     const HotspotLibrary& library);

ViolationReport verify(const Layout& layout, const Decomposition& decomposition, const TechParams& tech,
                       const HotspotLibrary& library, std::string mode = {});

/// Human-readable summary: counts, then one line per violation.
std::string report_text(const ViolationReport& report);

}  // namespace dsahs

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dsahs/model.hpp"

namespace dsahs {

/// A hotspot as a via pattern relative to its window origin. Segments are the
/// pattern's DSA groups (offset indices in run order); nodes are singletons.
struct HotspotPattern {
  std::string id;
  Coord window_w = 0;
  Coord window_h = 0;
  std::vector<Point> offsets;
  std::vector<std::vector<int>> segments;
  std::vector<int> nodes;

  std::size_t size() const { return offsets.size(); }
  friend bool operator==(const HotspotPattern&, const HotspotPattern&) = default;
};

struct HotspotLibrary {
  TechParams tech;
  std::vector<HotspotPattern> patterns;

  friend bool operator==(const HotspotLibrary&, const HotspotLibrary&) = default;
};

/// Throws Error(invalid_pattern) naming the pattern id and the failed rule.
void validate_pattern(const HotspotPattern& pattern, const TechParams& tech);

/// Sorts offsets lexicographically (so the anchor offset comes first) and
/// rewrites segment/node indices; segments are kept in run order and sorted.
HotspotPattern normalize_pattern(HotspotPattern pattern);

/// Validates every pattern against `tech` and checks id uniqueness.
HotspotLibrary make_library(std::vector<HotspotPattern> patterns, const TechParams& tech);

HotspotLibrary parse_library(std::string_view json_text, const TechParams& tech);
HotspotLibrary load_library(const std::filesystem::path& path, const TechParams& tech);
std::string library_to_json(const HotspotLibrary& library);
void save_library(const std::filesystem::path& path, const HotspotLibrary& library);

struct PatternGenSpec {
  int rows = 4;
  int cols = 2;
  Coord cell_pitch_x = 70;
  Coord cell_pitch_y = 45;
  double occupancy = 0.5;
  int min_vias = 1;  // draws with fewer occupied cells are redrawn
};

/// Random rows x cols cell patterns. Vertical runs of occupied cells are cut
/// into segments of at most max_g; leftover single cells become nodes.
/// Distinct patterns only; empty patterns are redrawn.
HotspotLibrary gen_random_patterns(std::uint64_t seed, int count, const TechParams& tech,
                                   const PatternGenSpec& spec = {});

}  // namespace dsahs

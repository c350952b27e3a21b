#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dsahs {

/// Integer nanometers.
using Coord = std::int64_t;
using ViaId = std::int32_t;

/// Largest accepted coordinate. Keeps squared distances well inside int64.
inline constexpr Coord kMaxCoord = Coord{1} << 30;

struct Point {
  Coord x = 0;
  Coord y = 0;

  friend auto operator<=>(const Point&, const Point&) = default;
};

inline Coord dist2(Point a, Point b) {
  const Coord dx = a.x - b.x;
  const Coord dy = a.y - b.y;
  return dx * dx + dy * dy;
}

double distance(Point a, Point b);

struct Rect {
  Coord xlo = 0;
  Coord ylo = 0;
  Coord xhi = 0;
  Coord yhi = 0;

  bool contains(Point p) const { return p.x >= xlo && p.x <= xhi && p.y >= ylo && p.y <= yhi; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Via {
  ViaId id = 0;
  Coord x = 0;
  Coord y = 0;

  Point pos() const { return {x, y}; }
};

/// Technology constants. Defaults are the reference 193i DSA values with
/// triple patterning.
struct TechParams {
  Coord l0 = 30;  // BCP natural pitch; carried but not consumed by any rule
  Coord max_dsa_pitch = 51;
  int max_g = 2;
  Coord min_pitch_same_mask = 75;
  Coord min_pitch_diff_mask = 10;
  Coord via_width = 15;
  int num_masks = 3;
  Coord min_group_pitch = 15;

  /// Throws Error(invalid_argument) naming the first broken ordering.
  void validate() const;

  friend bool operator==(const TechParams&, const TechParams&) = default;
};

/// A via layer. Ids are dense and follow insertion order; coordinates are
/// unique and within [0, kMaxCoord].
class Layout {
 public:
  Layout() = default;

  /// Assigns ids 0..n-1 in order. Throws on duplicate or out-of-range points.
  static Layout from_points(std::span<const Point> points);

  std::span<const Via> vias() const { return vias_; }
  std::size_t size() const { return vias_.size(); }
  bool empty() const { return vias_.empty(); }
  const Via& via(ViaId id) const;
  bool contains(ViaId id) const { return id >= 0 && static_cast<std::size_t>(id) < vias_.size(); }

  /// Bounding box of via centers; all zeros when empty.
  Rect bbox() const;

 private:
  std::vector<Via> vias_;
};

enum class LayoutFormat { json, csv };

LayoutFormat layout_format_from_path(const std::filesystem::path& path);

Layout parse_layout_json(std::string_view text);
Layout parse_layout_csv(std::string_view text);
Layout load_layout(const std::filesystem::path& path, LayoutFormat format);
Layout load_layout(const std::filesystem::path& path);

std::string layout_to_json(const Layout& layout);
std::string layout_to_csv(const Layout& layout);
void save_layout(const std::filesystem::path& path, const Layout& layout, LayoutFormat format);

struct SpacingViolation {
  ViaId a = 0;
  ViaId b = 0;
  double distance = 0.0;

  friend bool operator==(const SpacingViolation&, const SpacingViolation&) = default;
};

/// Pairs closer than min_pitch_diff_mask, sorted by (a, b) with a < b.
std::vector<SpacingViolation> validate_layout(const Layout& layout, const TechParams& tech);

/// Grid layout: each of rows x cols sites is occupied independently with
/// probability `density`. Identical arguments give identical layouts.
Layout gen_random_layout(std::uint64_t seed, int rows, int cols, Coord pitch_x, Coord pitch_y,
                         double density, const TechParams& tech = {});

/// Geometry-only DSA template legality for points given in run order:
/// 2..max_g points sharing x or y, strictly increasing along the run, each
/// consecutive gap in [min_group_pitch, max_dsa_pitch].
bool legal_group_geometry(std::span<const Point> run_ordered, const TechParams& tech);

/// Orders points along their common axis. Precondition: collinear on x or y.
void sort_along_run(std::vector<Point>& pts);

/// Bernoulli draw from raw 64-bit generator output; identical across standard
/// libraries, unlike std::bernoulli_distribution.
bool bernoulli_from_bits(std::uint64_t bits, double p);

}  // namespace dsahs

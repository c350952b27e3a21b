#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "dsahs/model.hpp"

namespace dsahs {

/// Uniform bucket grid over via centers for radius and rectangle queries.
class SpatialGrid {
 public:
  SpatialGrid(std::span<const Via> vias, Coord cell_size);

  /// Ids of vias whose centers lie in the closed rectangle, ascending.
  std::vector<ViaId> query(const Rect& r) const;

  /// Calls fn(a, b) once per unordered pair with a < b and dist2 < radius^2.
  template <typename Fn>
  void for_each_close_pair(Coord radius, Fn&& fn) const {
    const Coord r2 = radius * radius;
    for (const Via& v : vias_) {
      const Rect r{v.x - radius, v.y - radius, v.x + radius, v.y + radius};
      visit(r, [&](ViaId other) {
        if (other > v.id && dist2(v.pos(), vias_[other].pos()) < r2) fn(v.id, other);
      });
    }
  }

  template <typename Fn>
  void visit(const Rect& r, Fn&& fn) const {
    const Coord cx0 = cell_of(r.xlo), cx1 = cell_of(r.xhi);
    const Coord cy0 = cell_of(r.ylo), cy1 = cell_of(r.yhi);
    for (Coord cx = cx0; cx <= cx1; ++cx) {
      for (Coord cy = cy0; cy <= cy1; ++cy) {
        auto it = cells_.find(key(cx, cy));
        if (it == cells_.end()) continue;
        for (ViaId id : it->second) {
          if (r.contains(vias_[id].pos())) fn(id);
        }
      }
    }
  }

 private:
  Coord cell_of(Coord c) const { return c >= 0 ? c / cell_ : -((-c + cell_ - 1) / cell_); }
  static std::uint64_t key(Coord cx, Coord cy) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
           static_cast<std::uint32_t>(cy);
  }

  std::span<const Via> vias_;
  Coord cell_;
  std::unordered_map<std::uint64_t, std::vector<ViaId>> cells_;
};

}  // namespace dsahs

#include "dsahs/spatial.hpp"

#include <algorithm>

#include "dsahs/error.hpp"

namespace dsahs {

SpatialGrid::SpatialGrid(std::span<const Via> vias, Coord cell_size) : vias_(vias), cell_(cell_size) {
  if (cell_size <= 0) throw Error(Errc::invalid_argument, "spatial grid cell size must be positive");
  cells_.reserve(vias.size());
  for (const Via& v : vias) cells_[key(cell_of(v.x), cell_of(v.y))].push_back(v.id);
}

std::vector<ViaId> SpatialGrid::query(const Rect& r) const {
  std::vector<ViaId> out;
  visit(r, [&](ViaId id) { out.push_back(id); });
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dsahs

#include "dsahs/svg.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "dsahs/serialize.hpp"

namespace dsahs {

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

const char* color(int mask) {
  return kPalette[static_cast<std::size_t>(mask < 0 ? 0 : mask) % kPalette.size()];
}

}  // namespace

std::string render_svg(const Layout& layout, const Decomposition& decomposition, const ViolationReport& report,
                       const TechParams& tech) {
  const Coord half = std::max<Coord>(tech.via_width / 2, 1);
  const Coord pad = 2 * tech.via_width + 10;
  const Rect box = layout.bbox();
  const Coord width = box.xhi - box.xlo + 2 * pad;
  const Coord height = box.yhi - box.ylo + 2 * pad;
  // layout y grows upward; SVG y grows downward
  auto sx = [&](Coord x) { return x - box.xlo + pad; };
  auto sy = [&](Coord y) { return box.yhi - y + pad; };
  const auto masks = decomposition.mask_of_via(layout.size());

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<style>.conflict{stroke:#000;stroke-width:2;stroke-dasharray:4 2}"
        ".hotspot{fill:none;stroke:#e00;stroke-width:3}.group{fill-opacity:0.15;stroke-width:1.5}</style>\n";
  os << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"#fff\"/>\n";

  os << "<g id=\"templates\">\n";
  for (const DecompGroup& g : decomposition.groups) {
    if (g.vias.empty()) continue;
    Rect r{kMaxCoord, kMaxCoord, 0, 0};
    for (ViaId v : g.vias) {
      const Via& via = layout.via(v);
      r.xlo = std::min(r.xlo, via.x);
      r.ylo = std::min(r.ylo, via.y);
      r.xhi = std::max(r.xhi, via.x);
      r.yhi = std::max(r.yhi, via.y);
    }
    const Coord grow = half + 4;
    os << "<rect class=\"group mask-" << g.mask << "\" data-group=\"" << g.id << "\" x=\"" << sx(r.xlo) - grow
       << "\" y=\"" << sy(r.yhi) - grow << "\" width=\"" << r.xhi - r.xlo + 2 * grow << "\" height=\""
       << r.yhi - r.ylo + 2 * grow << "\" rx=\"" << grow << "\" fill=\"" << color(g.mask) << "\" stroke=\""
       << color(g.mask) << "\"/>\n";
  }
  os << "</g>\n<g id=\"vias\">\n";
  for (const Via& v : layout.vias()) {
    const int m = masks[static_cast<std::size_t>(v.id)];
    os << "<rect class=\"via mask-" << m << "\" data-via=\"" << v.id << "\" x=\"" << sx(v.x) - half << "\" y=\""
       << sy(v.y) - half << "\" width=\"" << 2 * half << "\" height=\"" << 2 * half << "\" fill=\"" << color(m)
       << "\"/>\n";
  }
  os << "</g>\n<g id=\"violations\">\n";
  for (const ConflictViolation& c : report.conflicts) {
    const Via& a = layout.via(c.a);
    const Via& b = layout.via(c.b);
    os << "<line class=\"conflict\" x1=\"" << sx(a.x) << "\" y1=\"" << sy(a.y) << "\" x2=\"" << sx(b.x) << "\" y2=\""
       << sy(b.y) << "\"/>\n";
  }
  for (const HotspotViolation& h : report.hotspots) {
    Rect r{kMaxCoord, kMaxCoord, 0, 0};
    for (ViaId v : h.constituents) {
      const Via& via = layout.via(v);
      r.xlo = std::min(r.xlo, via.x);
      r.ylo = std::min(r.ylo, via.y);
      r.xhi = std::max(r.xhi, via.x);
      r.yhi = std::max(r.yhi, via.y);
    }
    const Coord grow = half + 8;
    os << "<rect class=\"hotspot\" data-pattern=\"" << h.pattern_id << "\" x=\"" << sx(r.xlo) - grow << "\" y=\""
       << sy(r.yhi) - grow << "\" width=\"" << r.xhi - r.xlo + 2 * grow << "\" height=\"" << r.yhi - r.ylo + 2 * grow
       << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

void write_svg(const std::filesystem::path& path, const Layout& layout, const Decomposition& decomposition,
               const ViolationReport& report, const TechParams& tech) {
  write_text_file(path, render_svg(layout, decomposition, report, tech));
}

}  // namespace dsahs

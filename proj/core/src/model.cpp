#include "dsahs/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include <json.hpp>

#include "dsahs/error.hpp"
#include "dsahs/io.hpp"
#include "dsahs/spatial.hpp"

namespace dsahs {

using nlohmann::json;

double distance(Point a, Point b) { return std::sqrt(static_cast<double>(dist2(a, b))); }

void TechParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::invalid_argument, "tech: " + msg); };
  if (num_masks < 1) fail("num_masks must be >= 1");
  if (max_g < 1) fail("max_g must be >= 1");
  if (min_pitch_diff_mask < 0) fail("min_pitch_diff_mask must be >= 0");
  if (min_pitch_diff_mask > via_width) fail("min_pitch_diff_mask must be <= via_width");
  if (via_width > min_group_pitch) fail("via_width must be <= min_group_pitch");
  if (min_group_pitch > max_dsa_pitch) fail("min_group_pitch must be <= max_dsa_pitch");
  if (max_dsa_pitch >= min_pitch_same_mask) fail("max_dsa_pitch must be < min_pitch_same_mask");
  if (min_pitch_same_mask > kMaxCoord) fail("min_pitch_same_mask out of range");
}

Layout Layout::from_points(std::span<const Point> points) {
  Layout out;
  out.vias_.reserve(points.size());
  for (const Point& p : points) {
    if (p.x < 0 || p.y < 0 || p.x > kMaxCoord || p.y > kMaxCoord) {
      throw Error(Errc::bad_coordinate, "via " + std::to_string(out.vias_.size()) + " at (" +
                                            std::to_string(p.x) + "," + std::to_string(p.y) +
                                            ") is outside [0, " + std::to_string(kMaxCoord) + "]");
    }
    out.vias_.push_back({static_cast<ViaId>(out.vias_.size()), p.x, p.y});
  }
  std::vector<Point> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) {
    throw Error(Errc::duplicate_coordinate, "duplicate via coordinate (" + std::to_string(dup->x) +
                                                "," + std::to_string(dup->y) + ")");
  }
  return out;
}

const Via& Layout::via(ViaId id) const {
  if (!contains(id)) throw Error(Errc::unknown_via, "unknown via id " + std::to_string(id));
  return vias_[static_cast<std::size_t>(id)];
}

Rect Layout::bbox() const {
  if (vias_.empty()) return {};
  Rect r{vias_[0].x, vias_[0].y, vias_[0].x, vias_[0].y};
  for (const Via& v : vias_) {
    r.xlo = std::min(r.xlo, v.x);
    r.ylo = std::min(r.ylo, v.y);
    r.xhi = std::max(r.xhi, v.x);
    r.yhi = std::max(r.yhi, v.y);
  }
  return r;
}

LayoutFormat layout_format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv" ? LayoutFormat::csv : LayoutFormat::json;
}

namespace {

Coord json_coord(const json& v, const char* name, std::size_t index) {
  if (!v.contains(name)) {
    throw Error(Errc::parse, "via " + std::to_string(index) + ": missing \"" + name + "\"");
  }
  const json& c = v.at(name);
  if (!c.is_number_integer()) {
    throw Error(Errc::parse, "via " + std::to_string(index) + ": \"" + name + "\" must be an integer");
  }
  if (c.is_number_unsigned()) {
    auto u = c.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(kMaxCoord)) {
      throw Error(Errc::bad_coordinate, "via " + std::to_string(index) + ": coordinate overflows");
    }
    return static_cast<Coord>(u);
  }
  return c.get<Coord>();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_int(std::string_view s, Coord& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

}  // namespace

Layout parse_layout_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse, std::string("layout json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vias") || !doc["vias"].is_array()) {
    throw Error(Errc::parse, "layout json: expected object with \"vias\" array");
  }
  if (doc.contains("units") && doc["units"] != "nm") {
    throw Error(Errc::parse, "layout json: units must be \"nm\"");
  }
  std::vector<Point> pts;
  pts.reserve(doc["vias"].size());
  std::size_t i = 0;
  for (const json& v : doc["vias"]) {
    if (!v.is_object()) throw Error(Errc::parse, "via " + std::to_string(i) + ": expected object");
    pts.push_back({json_coord(v, "x", i), json_coord(v, "y", i)});
    ++i;
  }
  return Layout::from_points(pts);
}

Layout parse_layout_csv(std::string_view text) {
  std::vector<Point> pts;
  std::size_t line_no = 0;
  bool first_content = true;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    auto comma = line.find(',');
    Point p;
    bool ok = comma != std::string_view::npos && parse_int(line.substr(0, comma), p.x) &&
              parse_int(line.substr(comma + 1), p.y);
    if (!ok) {
      // a first line with any non-numeric character is a header
      const bool numeric = std::all_of(line.begin(), line.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) || std::isspace(static_cast<unsigned char>(c)) ||
               c == ',' || c == '-' || c == '+';
      });
      if (first_content && !numeric) {
        first_content = false;
        continue;
      }
      if (comma != std::string_view::npos) {
        // distinguish overflow from garbage
        auto xs = trim(line.substr(0, comma));
        auto ys = trim(line.substr(comma + 1));
        bool digits = !xs.empty() && !ys.empty() &&
                      std::all_of(xs.begin(), xs.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '-'; }) &&
                      std::all_of(ys.begin(), ys.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == '-'; });
        if (digits) throw Error(Errc::bad_coordinate, "csv line " + std::to_string(line_no) + ": coordinate overflows");
      }
      throw Error(Errc::parse, "csv line " + std::to_string(line_no) + ": expected \"x,y\"");
    }
    first_content = false;
    pts.push_back(p);
  }
  return Layout::from_points(pts);
}

Layout load_layout(const std::filesystem::path& path, LayoutFormat format) {
  const std::string text = read_text_file(path);
  return format == LayoutFormat::csv ? parse_layout_csv(text) : parse_layout_json(text);
}

Layout load_layout(const std::filesystem::path& path) {
  return load_layout(path, layout_format_from_path(path));
}

std::string layout_to_json(const Layout& layout) {
  json vias = json::array();
  for (const Via& v : layout.vias()) vias.push_back({{"x", v.x}, {"y", v.y}});
  json doc = {{"units", "nm"}, {"vias", std::move(vias)}};
  return doc.dump(1) + "\n";
}

std::string layout_to_csv(const Layout& layout) {
  std::string out = "x,y\n";
  for (const Via& v : layout.vias()) {
    out += std::to_string(v.x);
    out += ',';
    out += std::to_string(v.y);
    out += '\n';
  }
  return out;
}

void save_layout(const std::filesystem::path& path, const Layout& layout, LayoutFormat format) {
  write_text_file(path, format == LayoutFormat::csv ? layout_to_csv(layout) : layout_to_json(layout));
}

std::vector<SpacingViolation> validate_layout(const Layout& layout, const TechParams& tech) {
  std::vector<SpacingViolation> out;
  if (layout.size() < 2 || tech.min_pitch_diff_mask <= 0) return out;
  SpatialGrid grid(layout.vias(), std::max<Coord>(tech.min_pitch_diff_mask, 1));
  grid.for_each_close_pair(tech.min_pitch_diff_mask, [&](ViaId a, ViaId b) {
    out.push_back({a, b, distance(layout.via(a).pos(), layout.via(b).pos())});
  });
  std::sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    return std::tie(l.a, l.b) < std::tie(r.a, r.b);
  });
  return out;
}

bool bernoulli_from_bits(std::uint64_t bits, double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  // 53 high bits form a uniform double in [0, 1)
  const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
  return u < p;
}

Layout gen_random_layout(std::uint64_t seed, int rows, int cols, Coord pitch_x, Coord pitch_y,
                         double density, const TechParams& tech) {
  if (rows < 0 || cols < 0) throw Error(Errc::invalid_argument, "rows and cols must be >= 0");
  if (pitch_x < tech.min_pitch_diff_mask || pitch_y < tech.min_pitch_diff_mask || pitch_x <= 0 ||
      pitch_y <= 0) {
    throw Error(Errc::invalid_argument, "grid pitches must be positive and >= min_pitch_diff_mask");
  }
  if (!(density > 0.0 && density <= 1.0)) throw Error(Errc::invalid_argument, "density must lie in (0, 1]");
  if ((rows > 0 && (rows - 1) * pitch_y > kMaxCoord) || (cols > 0 && (cols - 1) * pitch_x > kMaxCoord)) {
    throw Error(Errc::invalid_argument, "grid extent exceeds coordinate range");
  }
  std::mt19937_64 rng(seed);
  std::vector<Point> pts;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (bernoulli_from_bits(rng(), density)) pts.push_back({c * pitch_x, r * pitch_y});
    }
  }
  return Layout::from_points(pts);
}

void sort_along_run(std::vector<Point>& pts) {
  std::sort(pts.begin(), pts.end());
}

bool legal_group_geometry(std::span<const Point> run, const TechParams& tech) {
  if (run.size() < 2 || run.size() > static_cast<std::size_t>(tech.max_g)) return false;
  const bool horizontal = std::all_of(run.begin(), run.end(), [&](Point p) { return p.y == run[0].y; });
  const bool vertical = std::all_of(run.begin(), run.end(), [&](Point p) { return p.x == run[0].x; });
  if (horizontal == vertical) return false;
  for (std::size_t i = 1; i < run.size(); ++i) {
    const Coord gap = horizontal ? run[i].x - run[i - 1].x : run[i].y - run[i - 1].y;
    if (gap < tech.min_group_pitch || gap > tech.max_dsa_pitch || gap <= 0) return false;
  }
  return true;
}

}  // namespace dsahs

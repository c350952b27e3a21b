#include "dsahs/hotspot.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <set>

#include <json.hpp>

#include "dsahs/error.hpp"
#include "dsahs/io.hpp"
#include "dsahs/serialize.hpp"

namespace dsahs {

using nlohmann::json;

namespace {

[[noreturn]] void pattern_fail(const HotspotPattern& p, const std::string& rule) {
  throw Error(Errc::invalid_pattern, "pattern " + p.id + ": " + rule);
}

}  // namespace

void validate_pattern(const HotspotPattern& p, const TechParams& tech) {
  if (p.id.empty()) pattern_fail(p, "id must be non-empty");
  if (p.offsets.empty()) pattern_fail(p, "pattern has no vias");
  if (p.window_w < 0 || p.window_h < 0) pattern_fail(p, "window extent must be non-negative");
  const Rect window{0, 0, p.window_w, p.window_h};
  for (const Point& o : p.offsets) {
    if (!window.contains(o)) {
      pattern_fail(p, "offset (" + std::to_string(o.x) + "," + std::to_string(o.y) + ") lies outside the window");
    }
  }
  std::vector<Point> sorted = p.offsets;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) pattern_fail(p, "duplicate offsets");

  const int n = static_cast<int>(p.offsets.size());
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  auto mark = [&](int idx) {
    if (idx < 0 || idx >= n) pattern_fail(p, "index " + std::to_string(idx) + " out of range");
    ++seen[static_cast<std::size_t>(idx)];
  };
  for (const auto& seg : p.segments) {
    for (int idx : seg) mark(idx);
  }
  for (int idx : p.nodes) mark(idx);
  for (int i = 0; i < n; ++i) {
    if (seen[static_cast<std::size_t>(i)] != 1) {
      pattern_fail(p, "segments and nodes must partition the vias (offset " + std::to_string(i) + " used " +
                          std::to_string(seen[static_cast<std::size_t>(i)]) + " times)");
    }
  }

  for (const auto& seg : p.segments) {
    std::vector<Point> run;
    for (int idx : seg) run.push_back(p.offsets[static_cast<std::size_t>(idx)]);
    sort_along_run(run);
    if (!legal_group_geometry(run, tech)) {
      pattern_fail(p, "segment of " + std::to_string(seg.size()) +
                          " vias is not a legal DSA group (collinear, size <= max_g, gaps within "
                          "[min_group_pitch, max_dsa_pitch])");
    }
    // no pattern via may sit between two consecutive segment members
    for (std::size_t i = 1; i < run.size(); ++i) {
      for (const Point& o : p.offsets) {
        const bool between = (o.x == run[i].x && o.x == run[i - 1].x && o.y > run[i - 1].y && o.y < run[i].y) ||
                             (o.y == run[i].y && o.y == run[i - 1].y && o.x > run[i - 1].x && o.x < run[i].x);
        if (between) pattern_fail(p, "segment skips over another pattern via");
      }
    }
  }
}

HotspotPattern normalize_pattern(HotspotPattern p) {
  const std::size_t n = p.offsets.size();
  std::vector<int> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return p.offsets[static_cast<std::size_t>(a)] < p.offsets[static_cast<std::size_t>(b)];
  });
  std::vector<int> new_index(n, -1);
  std::vector<Point> offsets(n);
  for (std::size_t i = 0; i < n; ++i) {
    new_index[static_cast<std::size_t>(order[i])] = static_cast<int>(i);
    offsets[i] = p.offsets[static_cast<std::size_t>(order[i])];
  }
  auto remap = [&](int idx) {
    return idx >= 0 && static_cast<std::size_t>(idx) < n ? new_index[static_cast<std::size_t>(idx)] : idx;
  };
  for (auto& seg : p.segments) {
    for (int& idx : seg) idx = remap(idx);
    // lexicographic offset order is run order for collinear points
    std::sort(seg.begin(), seg.end());
  }
  std::sort(p.segments.begin(), p.segments.end());
  for (int& idx : p.nodes) idx = remap(idx);
  std::sort(p.nodes.begin(), p.nodes.end());
  p.offsets = std::move(offsets);
  return p;
}

HotspotLibrary make_library(std::vector<HotspotPattern> patterns, const TechParams& tech) {
  tech.validate();
  HotspotLibrary lib;
  lib.tech = tech;
  std::set<std::string> ids;
  for (auto& p : patterns) {
    validate_pattern(p, tech);
    if (!ids.insert(p.id).second) throw Error(Errc::invalid_pattern, "duplicate pattern id " + p.id);
    lib.patterns.push_back(normalize_pattern(std::move(p)));
  }
  return lib;
}

HotspotLibrary parse_library(std::string_view text, const TechParams& tech) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse, std::string("library json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("patterns") || !doc["patterns"].is_array()) {
    throw Error(Errc::parse, "library json: expected object with \"patterns\" array");
  }
  std::vector<HotspotPattern> patterns;
  try {
    for (const json& jp : doc["patterns"]) patterns.push_back(jp.get<HotspotPattern>());
  } catch (const json::exception& e) {
    throw Error(Errc::parse, std::string("library json: ") + e.what());
  }
  return make_library(std::move(patterns), tech);
}

HotspotLibrary load_library(const std::filesystem::path& path, const TechParams& tech) {
  return parse_library(read_text_file(path), tech);
}

std::string library_to_json(const HotspotLibrary& library) { return json(library).dump(1) + "\n"; }

void save_library(const std::filesystem::path& path, const HotspotLibrary& library) {
  write_text_file(path, library_to_json(library));
}

HotspotLibrary gen_random_patterns(std::uint64_t seed, int count, const TechParams& tech, const PatternGenSpec& spec) {
  tech.validate();
  if (count < 0) throw Error(Errc::invalid_argument, "pattern count must be >= 0");
  if (spec.rows < 1 || spec.cols < 1 || spec.rows * spec.cols > 20) {
    throw Error(Errc::invalid_argument, "pattern grid must have 1..20 cells");
  }
  if (spec.cell_pitch_x < tech.min_pitch_diff_mask || spec.cell_pitch_x <= 0 ||
      spec.cell_pitch_y < tech.min_group_pitch || spec.cell_pitch_y > tech.max_dsa_pitch) {
    throw Error(Errc::infeasible,
                "cell pitches must give legal vertical group gaps (min_group_pitch <= cell_pitch_y <= "
                "max_dsa_pitch) and cell_pitch_x >= min_pitch_diff_mask");
  }
  if (!(spec.occupancy > 0.0 && spec.occupancy <= 1.0)) {
    throw Error(Errc::invalid_argument, "occupancy must lie in (0, 1]");
  }
  const int cells = spec.rows * spec.cols;
  const int min_vias = std::max(spec.min_vias, 1);
  std::uint64_t distinct = 0;
  for (std::uint64_t b = 1; b < (std::uint64_t{1} << cells); ++b) distinct += std::popcount(b) >= min_vias;
  if (static_cast<std::uint64_t>(count) > distinct) {
    throw Error(Errc::infeasible, "cannot draw " + std::to_string(count) + " distinct " + std::to_string(spec.rows) +
                                      "x" + std::to_string(spec.cols) + " patterns with at least " +
                                      std::to_string(min_vias) + " vias");
  }

  std::mt19937_64 rng(seed);
  std::set<std::uint32_t> used;
  std::vector<HotspotPattern> patterns;
  const std::size_t max_g = static_cast<std::size_t>(std::max(tech.max_g, 1));
  std::uint64_t attempts = 0;
  while (static_cast<int>(patterns.size()) < count) {
    if (++attempts > 1'000'000) throw Error(Errc::infeasible, "pattern generation did not converge");
    std::uint32_t bits = 0;
    for (int c = 0; c < cells; ++c) {
      if (bernoulli_from_bits(rng(), spec.occupancy)) bits |= 1u << c;
    }
    if (std::popcount(bits) < min_vias || !used.insert(bits).second) continue;

    HotspotPattern p;
    p.id = "h" + std::to_string(patterns.size() + 1);
    p.window_w = (spec.cols - 1) * spec.cell_pitch_x;
    p.window_h = (spec.rows - 1) * spec.cell_pitch_y;
    std::vector<std::vector<int>> index(static_cast<std::size_t>(spec.rows),
                                        std::vector<int>(static_cast<std::size_t>(spec.cols), -1));
    for (int r = 0; r < spec.rows; ++r) {
      for (int c = 0; c < spec.cols; ++c) {
        if (bits & (1u << (r * spec.cols + c))) {
          index[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = static_cast<int>(p.offsets.size());
          p.offsets.push_back({c * spec.cell_pitch_x, r * spec.cell_pitch_y});
        }
      }
    }
    for (int c = 0; c < spec.cols; ++c) {
      std::vector<int> run;
      auto flush = [&] {
        for (std::size_t s = 0; s < run.size(); s += max_g) {
          const std::size_t len = std::min(max_g, run.size() - s);
          if (len == 1) {
            p.nodes.push_back(run[s]);
          } else {
            p.segments.emplace_back(run.begin() + static_cast<std::ptrdiff_t>(s),
                                    run.begin() + static_cast<std::ptrdiff_t>(s + len));
          }
        }
        run.clear();
      };
      for (int r = 0; r < spec.rows; ++r) {
        const int idx = index[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        if (idx < 0) {
          flush();
        } else {
          run.push_back(idx);
        }
      }
      flush();
    }
    validate_pattern(p, tech);
    patterns.push_back(normalize_pattern(std::move(p)));
  }
  HotspotLibrary lib;
  lib.tech = tech;
  lib.patterns = std::move(patterns);
  return lib;
}

}  // namespace dsahs

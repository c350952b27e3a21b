#include "dsahs/serialize.hpp"

namespace dsahs {

using nlohmann::json;

void to_json(json& j, const Point& p) { j = json{{"x", p.x}, {"y", p.y}}; }
void from_json(const json& j, Point& p) {
  j.at("x").get_to(p.x);
  j.at("y").get_to(p.y);
}

void to_json(json& j, const TechParams& t) {
  j = json{{"l0", t.l0},
           {"max_dsa_pitch", t.max_dsa_pitch},
           {"max_g", t.max_g},
           {"min_pitch_same_mask", t.min_pitch_same_mask},
           {"min_pitch_diff_mask", t.min_pitch_diff_mask},
           {"via_width", t.via_width},
           {"num_masks", t.num_masks},
           {"min_group_pitch", t.min_group_pitch}};
}

void from_json(const json& j, TechParams& t) {
  if (!j.is_object()) throw Error(Errc::parse, "tech: expected object");
  auto opt = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  opt("l0", t.l0);
  opt("max_dsa_pitch", t.max_dsa_pitch);
  opt("max_g", t.max_g);
  opt("min_pitch_same_mask", t.min_pitch_same_mask);
  opt("min_pitch_diff_mask", t.min_pitch_diff_mask);
  opt("via_width", t.via_width);
  opt("num_masks", t.num_masks);
  // min_group_pitch follows via_width unless given
  if (j.contains("min_group_pitch")) {
    j.at("min_group_pitch").get_to(t.min_group_pitch);
  } else if (j.contains("via_width")) {
    t.min_group_pitch = t.via_width;
  }
  t.validate();
}

void to_json(json& j, const HotspotPattern& p) {
  json vias = json::array();
  for (const Point& o : p.offsets) vias.push_back({{"dx", o.x}, {"dy", o.y}});
  j = json{{"id", p.id},
           {"window", {{"w", p.window_w}, {"h", p.window_h}}},
           {"vias", std::move(vias)},
           {"segments", p.segments},
           {"nodes", p.nodes}};
}

void from_json(const json& j, HotspotPattern& p) {
  j.at("id").get_to(p.id);
  j.at("window").at("w").get_to(p.window_w);
  j.at("window").at("h").get_to(p.window_h);
  p.offsets.clear();
  for (const json& v : j.at("vias")) p.offsets.push_back({v.at("dx").get<Coord>(), v.at("dy").get<Coord>()});
  p.segments = j.value("segments", std::vector<std::vector<int>>{});
  p.nodes = j.value("nodes", std::vector<int>{});
}

void to_json(json& j, const HotspotLibrary& lib) { j = json{{"tech", lib.tech}, {"patterns", lib.patterns}}; }

void to_json(json& j, const PotentialHotspot& ph) {
  j = json{{"id", ph.id},
           {"pattern", ph.pattern_id},
           {"pattern_index", ph.pattern_index},
           {"origin", ph.origin},
           {"constituents", ph.constituents},
           {"non_constituents", ph.non_constituents},
           {"blocked", ph.blocked}};
}

void from_json(const json& j, PotentialHotspot& ph) {
  j.at("id").get_to(ph.id);
  j.at("pattern").get_to(ph.pattern_id);
  j.at("pattern_index").get_to(ph.pattern_index);
  j.at("origin").get_to(ph.origin);
  j.at("constituents").get_to(ph.constituents);
  j.at("non_constituents").get_to(ph.non_constituents);
  ph.blocked = j.value("blocked", false);
}

namespace {

const char* kind_name(EliminatorKind k) { return k == EliminatorKind::conflict ? "conflict" : "affinity"; }

const char* state_name(EliminatorState s) {
  switch (s) {
    case EliminatorState::live: return "live";
    case EliminatorState::chosen: return "chosen";
    case EliminatorState::invalidated: return "invalidated";
  }
  return "live";
}

}  // namespace

void to_json(json& j, const Eliminator& e) {
  j = json{{"id", e.id}, {"kind", kind_name(e.kind)}, {"vias", e.vias}, {"covers", e.covers}, {"state", state_name(e.state)}};
}

void from_json(const json& j, Eliminator& e) {
  j.at("id").get_to(e.id);
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "conflict") {
    e.kind = EliminatorKind::conflict;
  } else if (kind == "affinity") {
    e.kind = EliminatorKind::affinity;
  } else {
    throw Error(Errc::parse, "eliminator kind must be conflict or affinity, got " + kind);
  }
  j.at("vias").get_to(e.vias);
  e.covers = j.value("covers", std::vector<int>{});
  const auto state = j.value("state", std::string("live"));
  e.state = state == "chosen" ? EliminatorState::chosen
            : state == "invalidated" ? EliminatorState::invalidated
                                     : EliminatorState::live;
}

void to_json(json& j, const CoverResult& r) {
  j = json{{"chosen", r.chosen},
           {"covered", r.covered},
           {"residual", r.residual},
           {"stats",
            {{"iterations", r.stats.iterations},
             {"invalidations", r.stats.invalidations},
             {"relocations", r.stats.relocations},
             {"incidences", r.stats.incidences}}}};
}

void from_json(const json& j, CoverResult& r) {
  j.at("chosen").get_to(r.chosen);
  j.at("covered").get_to(r.covered);
  j.at("residual").get_to(r.residual);
  const json& s = j.at("stats");
  s.at("iterations").get_to(r.stats.iterations);
  s.at("invalidations").get_to(r.stats.invalidations);
  s.at("relocations").get_to(r.stats.relocations);
  s.at("incidences").get_to(r.stats.incidences);
}

void to_json(json& j, const DecompGroup& g) { j = json{{"id", g.id}, {"vias", g.vias}, {"mask", g.mask}}; }
void from_json(const json& j, DecompGroup& g) {
  j.at("id").get_to(g.id);
  j.at("vias").get_to(g.vias);
  j.at("mask").get_to(g.mask);
}

void to_json(json& j, const Decomposition& d) {
  j = json{{"groups", d.groups},
           {"meta", {{"exact_components", d.exact_components}, {"fallback_components", d.fallback_components}}}};
}

void from_json(const json& j, Decomposition& d) {
  j.at("groups").get_to(d.groups);
  if (j.contains("meta")) {
    d.exact_components = j["meta"].value("exact_components", 0);
    d.fallback_components = j["meta"].value("fallback_components", 0);
  }
}

void to_json(json& j, const ViolationReport& r) {
  json conflicts = json::array();
  for (const auto& c : r.conflicts) conflicts.push_back({{"a", c.a}, {"b", c.b}, {"distance", c.distance}});
  json hotspots = json::array();
  for (const auto& h : r.hotspots) {
    hotspots.push_back({{"pattern", h.pattern_id}, {"origin", h.origin}, {"mask", h.mask}, {"constituents", h.constituents}});
  }
  j = json{{"mode", r.mode},
           {"n_conflicts", r.n_conflicts},
           {"n_hotspots", r.n_hotspots},
           {"n_violations", r.n_violations},
           {"conflicts", std::move(conflicts)},
           {"hotspots", std::move(hotspots)}};
}

void from_json(const json& j, ViolationReport& r) {
  r.mode = j.value("mode", std::string{});
  j.at("n_conflicts").get_to(r.n_conflicts);
  j.at("n_hotspots").get_to(r.n_hotspots);
  j.at("n_violations").get_to(r.n_violations);
  r.conflicts.clear();
  for (const json& c : j.at("conflicts")) {
    r.conflicts.push_back({c.at("a").get<ViaId>(), c.at("b").get<ViaId>(), c.at("distance").get<double>()});
  }
  r.hotspots.clear();
  for (const json& h : j.at("hotspots")) {
    r.hotspots.push_back({h.at("pattern").get<std::string>(), h.at("origin").get<Point>(), h.at("mask").get<int>(),
                          h.at("constituents").get<std::vector<ViaId>>()});
  }
}

json graph_to_json(const LayoutGraph& graph) {
  json vias = json::array();
  for (const Via& v : graph.layout().vias()) vias.push_back({{"id", v.id}, {"x", v.x}, {"y", v.y}});
  json conflicts = json::array();
  for (const ConflictEdge& e : graph.conflict_edges()) {
    conflicts.push_back({{"a", e.a}, {"b", e.b}, {"origin", e.origin == EdgeOrigin::native ? "native" : "added_by_cover"}});
  }
  json groups = json::array();
  for (const GroupEdge& g : graph.group_edges()) groups.push_back(g.vias);
  json forced = json::array();
  for (const GroupEdge& g : graph.forced_groups()) forced.push_back(g.vias);
  return json{{"tech", graph.tech()},
              {"vias", std::move(vias)},
              {"conflict_edges", std::move(conflicts)},
              {"group_edges", std::move(groups)},
              {"forced_groups", std::move(forced)},
              {"components", graph.components()}};
}

json detection_to_json(std::span<const PotentialHotspot> hotspots, std::span<const Eliminator> candidates) {
  json hs = json::array();
  for (const auto& h : hotspots) hs.push_back(h);
  json cs = json::array();
  for (const auto& c : candidates) cs.push_back(c);
  return json{{"potential_hotspots", std::move(hs)}, {"candidates", std::move(cs)}};
}

}  // namespace dsahs

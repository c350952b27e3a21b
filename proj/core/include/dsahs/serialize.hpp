#pragma once

// JSON encodings of every artifact the pipeline reads or writes.

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dsahs/cover.hpp"
#include "dsahs/decomposer.hpp"
#include "dsahs/error.hpp"
#include "dsahs/graph.hpp"
#include "dsahs/hotspot.hpp"
#include "dsahs/io.hpp"
#include "dsahs/matcher.hpp"
#include "dsahs/model.hpp"
#include "dsahs/verifier.hpp"

namespace dsahs {

void to_json(nlohmann::json& j, const Point& p);
void from_json(const nlohmann::json& j, Point& p);

/// Missing keys keep their defaults; the result is validated.
void to_json(nlohmann::json& j, const TechParams& t);
void from_json(const nlohmann::json& j, TechParams& t);

void to_json(nlohmann::json& j, const HotspotPattern& p);
void from_json(const nlohmann::json& j, HotspotPattern& p);

void to_json(nlohmann::json& j, const HotspotLibrary& lib);

void to_json(nlohmann::json& j, const PotentialHotspot& ph);
void from_json(const nlohmann::json& j, PotentialHotspot& ph);

void to_json(nlohmann::json& j, const Eliminator& e);
void from_json(const nlohmann::json& j, Eliminator& e);

void to_json(nlohmann::json& j, const CoverResult& r);
void from_json(const nlohmann::json& j, CoverResult& r);

void to_json(nlohmann::json& j, const DecompGroup& g);
void from_json(const nlohmann::json& j, DecompGroup& g);
void to_json(nlohmann::json& j, const Decomposition& d);
void from_json(const nlohmann::json& j, Decomposition& d);

void to_json(nlohmann::json& j, const ViolationReport& r);
void from_json(const nlohmann::json& j, ViolationReport& r);

/// Debug dump: vias, conflict pairs (with origin), group and forced edges.
nlohmann::json graph_to_json(const LayoutGraph& graph);

/// Hotspots plus eliminator candidates, as written by `detect`.
nlohmann::json detection_to_json(std::span<const PotentialHotspot> hotspots, std::span<const Eliminator> candidates);

/// Stable text form used for every artifact file.
inline std::string dump_json(const nlohmann::json& j) { return j.dump(1) + "\n"; }

template <typename T>
T parse_json_as(std::string_view text, std::string_view what) {
  try {
    return nlohmann::json::parse(text).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, std::string(what) + ": " + e.what());
  }
}

template <typename T>
T load_json_as(const std::filesystem::path& path) {
  return parse_json_as<T>(read_text_file(path), path.string());
}

}  // namespace dsahs

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsahs/cover.hpp"
#include "dsahs/decomposer.hpp"
#include "dsahs/graph.hpp"
#include "dsahs/hotspot.hpp"
#include "dsahs/matcher.hpp"
#include "dsahs/model.hpp"
#include "dsahs/verifier.hpp"

namespace dsahs {

enum class RunMode {
  aware,          // exact hotspot-aware decomposition, no cover pass
  unaware,        // hotspot-unaware decomposition, no cover pass
  cover_unaware,  // greedy cover pre-pass, then hotspot-unaware decomposition
};

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& text);

struct LayoutGenSpec {
  std::uint64_t seed = 1;
  int rows = 100;
  int cols = 100;
  Coord pitch_x = 70;
  Coord pitch_y = 45;
  double density = 0.4;
};

struct RunConfig {
  std::optional<std::filesystem::path> layout_path;  // otherwise generated
  LayoutGenSpec layout_gen;
  std::optional<std::filesystem::path> library_path;  // otherwise generated
  std::uint64_t library_seed = 1;
  int library_count = 36;
  PatternGenSpec pattern_gen;
  TechParams tech;
  RunMode mode = RunMode::cover_unaware;
  int exact_limit = 14;
  std::uint64_t tie_seed = 1;  // see SolveMode::tie_seed
  int threads = 1;
  std::filesystem::path out_dir;                  // empty: write nothing
  std::optional<std::filesystem::path> svg_path;  // relative paths land in out_dir
  bool dump_graph = false;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineResult {
  Layout layout;
  HotspotLibrary library;
  std::vector<PotentialHotspot> hotspots;
  std::vector<Eliminator> candidates;
  std::optional<CoverResult> cover;
  Decomposition decomposition;
  ViolationReport report;
  std::vector<StageTiming> timings;
};

/// build_graph -> find_potential_hotspots -> enumerate_eliminators ->
/// greedy_cover -> apply_eliminators -> decompose -> verify, with the cover
/// stages skipped outside cover_unaware mode. Stage errors are rethrown with
/// the stage name prefixed. With out_dir set, writes layout.json,
/// library.json, hotspots.json, cover.json, decomposition.json, report.json,
/// report.txt and timings.json (graph.json when dump_graph).
PipelineResult run_pipeline(const RunConfig& config);

/// Deterministic artifact text of a run (everything except timings).
std::string pipeline_report_json(const PipelineResult& result);

/// Chosen eliminators the decomposition honors (conflict endpoints on
/// different masks; forced group printed as one template) whose covered
/// hotspot windows nevertheless appear in `realized`.
int elimination_exceptions(const CoverResult& cover, std::span<const PotentialHotspot> hotspots,
                           const Decomposition& decomposition, std::size_t n_vias,
                           std::span<const HotspotViolation> realized);

struct ExperimentConfig {
  TechParams tech;
  int instances = 200;
  std::uint64_t seed = 1;
  int rows = 8;
  int cols = 8;
  Coord pitch_x = 70;
  Coord pitch_y = 45;
  double density = 0.3;
  int library_count = 36;
  /// Single-via patterns are left out: both eliminator kinds need a second
  /// constituent or a groupable neighbour to act on.
  PatternGenSpec pattern_gen{.min_vias = 2};
  /// Each instance draws its own library from its seed; otherwise one
  /// library from `seed` serves every instance.
  bool library_per_instance = true;
  int exact_limit = 14;
  int threads = 1;
  int max_attempts = 0;  // 0: 20 x instances
};

struct ExperimentInstance {
  std::uint64_t seed = 0;
  int n_vias = 0;
  int n_components = 0;
  int potential_hotspots = 0;
  int chosen_eliminators = 0;
  int optimal_aware = 0;
  int unaware = 0;
  int cover_unaware = 0;
  int elimination_exceptions = 0;
};

struct ExperimentTable {
  std::vector<ExperimentInstance> rows;
  int skipped = 0;  // draws with a component over exact_limit
  long total_optimal_aware = 0;
  long total_unaware = 0;
  long total_cover_unaware = 0;
  int elimination_exceptions = 0;
  double ratio_unaware = 0.0;        // normalized to optimal_aware
  double ratio_cover_unaware = 0.0;  // normalized to optimal_aware
  /// (unaware - cover_unaware) / (unaware - optimal_aware).
  double gap_closure = 0.0;
};

/// Three-way comparison on seeded random instances whose components all fit
/// exact_limit (before and after the cover pass).
ExperimentTable run_experiment(const ExperimentConfig& config);

nlohmann::json experiment_to_json(const ExperimentTable& table);
std::string experiment_table_text(const ExperimentTable& table);

}  // namespace dsahs

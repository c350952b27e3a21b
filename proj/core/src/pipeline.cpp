#include "dsahs/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "dsahs/error.hpp"
#include "dsahs/serialize.hpp"
#include "dsahs/svg.hpp"

namespace dsahs {

using nlohmann::json;

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::aware: return "aware";
    case RunMode::unaware: return "unaware";
    case RunMode::cover_unaware: return "cover+unaware";
  }
  return "cover+unaware";
}

RunMode run_mode_from_string(const std::string& text) {
  if (text == "aware") return RunMode::aware;
  if (text == "unaware") return RunMode::unaware;
  if (text == "cover+unaware" || text == "cover") return RunMode::cover_unaware;
  throw Error(Errc::invalid_argument, "unknown mode '" + text + "' (expected aware, unaware or cover+unaware)");
}

namespace {

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

  template <typename Fn>
  auto run(const std::string& stage, Fn&& fn) {
    const auto start = std::chrono::steady_clock::now();
    auto record = [&] {
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
      sink_.push_back({stage, dt.count()});
    };
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record();
      } else {
        auto out = fn();
        record();
        return out;
      }
    } catch (const Error& e) {
      throw Error(e.code(), "stage " + stage + ": " + e.what());
    }
  }

 private:
  std::vector<StageTiming>& sink_;
};

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
  PipelineResult res;
  StageClock clock(res.timings);
  const TechParams& tech = config.tech;
  clock.run("config", [&] { tech.validate(); });

  res.layout = clock.run("load_layout", [&] {
    if (config.layout_path) return load_layout(*config.layout_path);
    const auto& g = config.layout_gen;
    return gen_random_layout(g.seed, g.rows, g.cols, g.pitch_x, g.pitch_y, g.density, tech);
  });
  res.library = clock.run("load_library", [&] {
    if (config.library_path) return load_library(*config.library_path, tech);
    return gen_random_patterns(config.library_seed, config.library_count, tech, config.pattern_gen);
  });

  const LayoutGraph graph = clock.run("build_graph", [&] { return build_graph(res.layout, tech); });
  const bool need_hotspots = config.mode != RunMode::unaware;
  if (need_hotspots) {
    res.hotspots = clock.run("detect", [&] { return find_potential_hotspots(graph, res.library, config.threads); });
  }

  const LayoutGraph* solve_graph = &graph;
  LayoutGraph covered_graph;
  if (config.mode == RunMode::cover_unaware) {
    res.candidates = clock.run("enumerate", [&] { return enumerate_eliminators(res.hotspots, graph); });
    res.cover = clock.run("cover", [&] { return greedy_cover(res.hotspots, res.candidates); });
    covered_graph = clock.run("apply", [&] { return apply_eliminators(graph, *res.cover); });
    solve_graph = &covered_graph;
  }

  const SolveMode mode{config.mode == RunMode::aware, config.exact_limit, config.tie_seed};
  res.decomposition = clock.run("decompose", [&] {
    return decompose(*solve_graph, res.library, res.hotspots, mode, config.threads);
  });
  res.report = clock.run("verify", [&] {
    return verify(res.layout, res.decomposition, tech, res.library, to_string(config.mode));
  });

  if (!config.out_dir.empty()) {
    clock.run("write", [&] {
      const auto& dir = config.out_dir;
      std::filesystem::create_directories(dir);
      save_layout(dir / "layout.json", res.layout, LayoutFormat::json);
      save_library(dir / "library.json", res.library);
      if (config.dump_graph) write_text_file(dir / "graph.json", dump_json(graph_to_json(*solve_graph)));
      write_text_file(dir / "hotspots.json", dump_json(detection_to_json(res.hotspots, res.candidates)));
      if (res.cover) write_text_file(dir / "cover.json", dump_json(*res.cover));
      write_text_file(dir / "decomposition.json", dump_json(res.decomposition));
      write_text_file(dir / "report.json", pipeline_report_json(res));
      write_text_file(dir / "report.txt", report_text(res.report));
      if (config.svg_path) {
        const auto svg = config.svg_path->is_absolute() ? *config.svg_path : dir / *config.svg_path;
        write_svg(svg, res.layout, res.decomposition, res.report, tech);
      }
    });
    json timings = json::array();
    for (const auto& t : res.timings) timings.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
    write_text_file(config.out_dir / "timings.json", dump_json(json{{"stages", timings}}));
  } else if (config.svg_path) {
    write_svg(*config.svg_path, res.layout, res.decomposition, res.report, tech);
  }
  return res;
}

std::string pipeline_report_json(const PipelineResult& r) {
  json doc = r.report;
  doc["layout"] = {{"n_vias", r.layout.size()}};
  doc["library"] = {{"n_patterns", r.library.patterns.size()}};
  doc["potential_hotspots"] = r.hotspots.size();
  doc["candidates"] = r.candidates.size();
  if (r.cover) {
    doc["cover"] = {{"chosen", r.cover->chosen.size()},
                    {"covered", r.cover->covered.size()},
                    {"residual", r.cover->residual.size()},
                    {"iterations", r.cover->stats.iterations},
                    {"invalidations", r.cover->stats.invalidations},
                    {"relocations", r.cover->stats.relocations},
                    {"incidences", r.cover->stats.incidences}};
  }
  doc["decomposition"] = {{"groups", r.decomposition.groups.size()},
                          {"exact_components", r.decomposition.exact_components},
                          {"fallback_components", r.decomposition.fallback_components}};
  return dump_json(doc);
}

int elimination_exceptions(const CoverResult& cover, std::span<const PotentialHotspot> hotspots,
                           const Decomposition& decomposition, std::size_t n_vias,
                           std::span<const HotspotViolation> realized) {
  const auto group_of = decomposition.via_to_group(n_vias);
  const auto mask_of = decomposition.mask_of_via(n_vias);
  std::set<std::pair<std::string, Point>> realized_windows;
  for (const auto& h : realized) realized_windows.emplace(h.pattern_id, h.origin);
  std::unordered_map<int, const PotentialHotspot*> by_id;
  for (const auto& ph : hotspots) by_id[ph.id] = &ph;

  int exceptions = 0;
  for (const Eliminator& e : cover.chosen) {
    bool honored = false;
    if (e.kind == EliminatorKind::conflict) {
      honored = mask_of[static_cast<std::size_t>(e.vias[0])] != mask_of[static_cast<std::size_t>(e.vias[1])];
    } else {
      const int g = group_of[static_cast<std::size_t>(e.vias[0])];
      honored = g >= 0 && decomposition.groups[static_cast<std::size_t>(g)].vias.size() == e.vias.size() &&
                std::all_of(e.vias.begin(), e.vias.end(),
                            [&](ViaId v) { return group_of[static_cast<std::size_t>(v)] == g; });
    }
    if (!honored) continue;
    for (int h : e.covers) {
      auto it = by_id.find(h);
      if (it == by_id.end()) continue;
      if (realized_windows.count({it->second->pattern_id, it->second->origin})) ++exceptions;
    }
  }
  return exceptions;
}

namespace {

bool fits(const std::vector<std::vector<ViaId>>& units, int limit) {
  for (const auto& c : units) {
    if (c.size() > static_cast<std::size_t>(limit)) return false;
  }
  return true;
}

}  // namespace

ExperimentTable run_experiment(const ExperimentConfig& cfg) {
  cfg.tech.validate();
  if (cfg.instances < 1) throw Error(Errc::invalid_argument, "experiment needs at least one instance");
  HotspotLibrary library;
  if (!cfg.library_per_instance) library = gen_random_patterns(cfg.seed, cfg.library_count, cfg.tech, cfg.pattern_gen);
  const int max_attempts = cfg.max_attempts > 0 ? cfg.max_attempts : 20 * cfg.instances;
  const SolveMode aware{true, cfg.exact_limit};
  SolveMode unaware{false, cfg.exact_limit};

  ExperimentTable table;
  for (int attempt = 0; attempt < max_attempts && static_cast<int>(table.rows.size()) < cfg.instances; ++attempt) {
    const std::uint64_t seed = cfg.seed * 1'000'003ull + static_cast<std::uint64_t>(attempt);
    if (cfg.library_per_instance) library = gen_random_patterns(seed, cfg.library_count, cfg.tech, cfg.pattern_gen);
    const Layout layout = gen_random_layout(seed, cfg.rows, cfg.cols, cfg.pitch_x, cfg.pitch_y, cfg.density, cfg.tech);
    const LayoutGraph graph = build_graph(layout, cfg.tech);
    const auto hotspots = find_potential_hotspots(graph, library, cfg.threads);
    // the aware optimum is only global when no unit had to be split
    if (!fits(solve_units(graph, hotspots, SolveMode{true, 64}), cfg.exact_limit)) {
      ++table.skipped;
      continue;
    }
    const auto candidates = enumerate_eliminators(hotspots, graph);
    const CoverResult cover = greedy_cover(hotspots, candidates);
    const LayoutGraph covered = apply_eliminators(graph, cover);
    if (!fits(covered.components(), cfg.exact_limit)) {
      ++table.skipped;
      continue;
    }

    ExperimentInstance row;
    row.seed = seed;
    row.n_vias = static_cast<int>(layout.size());
    row.n_components = static_cast<int>(graph.components().size());
    row.potential_hotspots = static_cast<int>(hotspots.size());
    row.chosen_eliminators = static_cast<int>(cover.chosen.size());

    const Decomposition da = decompose(graph, library, hotspots, aware, cfg.threads);
    unaware.tie_seed = seed;
    const Decomposition db = decompose(graph, library, hotspots, unaware, cfg.threads);
    const Decomposition dc = decompose(covered, library, hotspots, unaware, cfg.threads);
    row.optimal_aware = verify(layout, da, cfg.tech, library).n_violations;
    row.unaware = verify(layout, db, cfg.tech, library).n_violations;
    const ViolationReport rc = verify(layout, dc, cfg.tech, library);
    row.cover_unaware = rc.n_violations;
    row.elimination_exceptions = elimination_exceptions(cover, hotspots, dc, layout.size(), rc.hotspots);

    table.total_optimal_aware += row.optimal_aware;
    table.total_unaware += row.unaware;
    table.total_cover_unaware += row.cover_unaware;
    table.elimination_exceptions += row.elimination_exceptions;
    table.rows.push_back(row);
  }
  const double base = static_cast<double>(table.total_optimal_aware);
  const double inf = std::numeric_limits<double>::infinity();
  table.ratio_unaware = base > 0 ? table.total_unaware / base : (table.total_unaware > 0 ? inf : 1.0);
  table.ratio_cover_unaware = base > 0 ? table.total_cover_unaware / base : (table.total_cover_unaware > 0 ? inf : 1.0);
  const long gap = table.total_unaware - table.total_optimal_aware;
  table.gap_closure = gap > 0 ? static_cast<double>(table.total_unaware - table.total_cover_unaware) / static_cast<double>(gap)
                              : 1.0;
  return table;
}

json experiment_to_json(const ExperimentTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"seed", r.seed},
                    {"n_vias", r.n_vias},
                    {"n_components", r.n_components},
                    {"potential_hotspots", r.potential_hotspots},
                    {"chosen_eliminators", r.chosen_eliminators},
                    {"optimal_aware", r.optimal_aware},
                    {"unaware", r.unaware},
                    {"cover_unaware", r.cover_unaware},
                    {"elimination_exceptions", r.elimination_exceptions}});
  }
  return json{{"instances", rows},
              {"skipped", t.skipped},
              {"totals",
               {{"optimal_aware", t.total_optimal_aware},
                {"unaware", t.total_unaware},
                {"cover_unaware", t.total_cover_unaware}}},
              {"ratio", {{"optimal_aware", 1.0}, {"unaware", t.ratio_unaware}, {"cover_unaware", t.ratio_cover_unaware}}},
              {"gap_closure", t.gap_closure},
              {"elimination_exceptions", t.elimination_exceptions},
              {"reference_ratio",
               {{"max_g_2", {{"unaware", 5.13}, {"cover_unaware", 1.18}}},
                {"max_g_3", {{"unaware", 6.52}, {"cover_unaware", 1.34}}}}}};
}

std::string experiment_table_text(const ExperimentTable& t) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %8s %14s %10s %14s\n", "", "N", "optimal-aware", "unaware", "cover+unaware");
  os << buf;
  std::snprintf(buf, sizeof buf, "%-10s %8zu %14ld %10ld %14ld\n", "violations", t.rows.size(), t.total_optimal_aware,
                t.total_unaware, t.total_cover_unaware);
  os << buf;
  std::snprintf(buf, sizeof buf, "%-10s %8s %14.2f %10.2f %14.2f\n", "ratio", "--", 1.0, t.ratio_unaware,
                t.ratio_cover_unaware);
  os << buf;
  std::snprintf(buf, sizeof buf, "gap closed by cover: %.1f%%  skipped draws: %d  elimination exceptions: %d\n",
                100.0 * t.gap_closure, t.skipped, t.elimination_exceptions);
  os << buf;
  os << "reference ratios: max_g=2 1 / 5.13 / 1.18, max_g=3 1 / 6.52 / 1.34\n";
  return os.str();
}

}  // namespace dsahs

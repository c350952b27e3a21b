// dsahs: command-line front end. Every subcommand reads and writes the JSON
// artifact formats of the core library, so stages can be chained by hand.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsahs/pipeline.hpp"
#include "dsahs/serialize.hpp"
#include "dsahs/svg.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using dsahs::Coord;
using dsahs::Layout;
using dsahs::TechParams;

namespace {

// Settings shared by all subcommands. Filled from the config file first, then
// overwritten by any flag given on the command line.
struct Settings {
  std::string config_path;
  std::string tech_path;
  std::optional<int> masks;
  std::optional<int> max_g;
  std::string mode = "cover+unaware";
  int exact_limit = 14;
  int threads = 1;
  std::uint64_t seed = 1;
  std::string layout;
  std::string library;
  std::string out_dir;
  std::string svg;

  // generators and experiment; unset sizes fall back to each command's defaults
  std::optional<int> rows;
  std::optional<int> cols;
  std::optional<double> density;
  Coord pitch_x = 70;
  Coord pitch_y = 45;
  int library_count = 36;
  std::optional<int> min_vias;
  int instances = 200;

  // stage inputs and output
  std::string hotspots;
  std::string cover;
  std::string decomposition;
  std::string output;
  bool dump_graph = false;
};

template <typename T>
void take(const json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

template <typename T>
void take(const json& j, const char* key, std::optional<T>& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

// Config keys use the long flag names with '-' replaced by '_'. Only keys
// whose flag was not given are applied.
void apply_config(const CLI::App& app, Settings& s) {
  if (s.config_path.empty()) return;
  const json j = dsahs::parse_json_as<json>(dsahs::read_text_file(s.config_path), s.config_path);
  if (!j.is_object()) throw dsahs::Error(dsahs::Errc::parse, s.config_path + ": expected a JSON object");
  const auto unset = [&](const char* flag) { return app.count(flag) == 0; };
  try {
    if (unset("--tech")) take(j, "tech", s.tech_path);
    if (unset("--masks")) take(j, "masks", s.masks);
    if (unset("--max-g")) take(j, "max_g", s.max_g);
    if (unset("--mode")) take(j, "mode", s.mode);
    if (unset("--exact-limit")) take(j, "exact_limit", s.exact_limit);
    if (unset("--threads")) take(j, "threads", s.threads);
    if (unset("--seed")) take(j, "seed", s.seed);
    if (unset("--layout")) take(j, "layout", s.layout);
    if (unset("--library")) take(j, "library", s.library);
    if (unset("--out-dir")) take(j, "out_dir", s.out_dir);
    if (unset("--svg")) take(j, "svg", s.svg);
    if (unset("--rows")) take(j, "rows", s.rows);
    if (unset("--cols")) take(j, "cols", s.cols);
    if (unset("--density")) take(j, "density", s.density);
    if (unset("--pitch-x")) take(j, "pitch_x", s.pitch_x);
    if (unset("--pitch-y")) take(j, "pitch_y", s.pitch_y);
    if (unset("--count")) take(j, "count", s.library_count);
    if (unset("--min-vias")) take(j, "min_vias", s.min_vias);
    if (unset("--instances")) take(j, "instances", s.instances);
  } catch (const json::exception& e) {
    throw dsahs::Error(dsahs::Errc::parse, s.config_path + ": " + e.what());
  }
}

TechParams tech_of(const Settings& s) {
  TechParams t;
  if (!s.tech_path.empty()) t = dsahs::load_json_as<TechParams>(s.tech_path);
  if (s.masks) t.num_masks = *s.masks;
  if (s.max_g) t.max_g = *s.max_g;
  t.validate();
  return t;
}

dsahs::PatternGenSpec pattern_spec(const Settings& s) {
  dsahs::PatternGenSpec spec;
  if (s.min_vias) spec.min_vias = *s.min_vias;
  return spec;
}

Layout layout_of(const Settings& s, const TechParams& t) {
  if (!s.layout.empty()) return dsahs::load_layout(s.layout);
  const dsahs::LayoutGenSpec g;
  return dsahs::gen_random_layout(s.seed, s.rows.value_or(g.rows), s.cols.value_or(g.cols), s.pitch_x, s.pitch_y,
                                  s.density.value_or(g.density), t);
}

dsahs::HotspotLibrary library_of(const Settings& s, const TechParams& t) {
  if (!s.library.empty()) return dsahs::load_library(s.library, t);
  return dsahs::gen_random_patterns(s.seed, s.library_count, t, pattern_spec(s));
}

std::string require(const std::string& value, const char* flag) {
  if (value.empty()) throw dsahs::Error(dsahs::Errc::invalid_argument, std::string(flag) + " is required");
  return value;
}

// --output, else out_dir/default_name, else stdout
void emit(const Settings& s, const std::string& default_name, const std::string& text) {
  if (!s.output.empty()) {
    dsahs::write_text_file(s.output, text);
  } else if (!s.out_dir.empty()) {
    dsahs::write_text_file(fs::path(s.out_dir) / default_name, text);
  } else {
    std::cout << text;
  }
}

struct Detection {
  std::vector<dsahs::PotentialHotspot> hotspots;
  std::vector<dsahs::Eliminator> candidates;
};

Detection detection_of(const Settings& s, const dsahs::LayoutGraph& graph, const dsahs::HotspotLibrary& lib) {
  Detection d;
  if (!s.hotspots.empty()) {
    const json j = dsahs::load_json_as<json>(s.hotspots);
    try {
      d.hotspots = j.at("potential_hotspots").get<std::vector<dsahs::PotentialHotspot>>();
      d.candidates = j.at("candidates").get<std::vector<dsahs::Eliminator>>();
    } catch (const json::exception& e) {
      throw dsahs::Error(dsahs::Errc::parse, s.hotspots + ": " + e.what());
    }
    return d;
  }
  d.hotspots = dsahs::find_potential_hotspots(graph, lib, s.threads);
  d.candidates = dsahs::enumerate_eliminators(d.hotspots, graph);
  return d;
}

int cmd_decompose(const Settings& s) {
  const TechParams t = tech_of(s);
  const Layout layout = layout_of(s, t);
  const auto lib = library_of(s, t);
  const auto graph = dsahs::build_graph(layout, t);
  const auto mode = dsahs::run_mode_from_string(s.mode);
  Detection det;
  if (mode != dsahs::RunMode::unaware) det = detection_of(s, graph, lib);
  dsahs::LayoutGraph solve_graph = graph;
  if (mode == dsahs::RunMode::cover_unaware) {
    const auto cover = s.cover.empty() ? dsahs::greedy_cover(det.hotspots, det.candidates)
                                       : dsahs::load_json_as<dsahs::CoverResult>(s.cover);
    solve_graph = dsahs::apply_eliminators(graph, cover);
  }
  const dsahs::SolveMode sm{mode == dsahs::RunMode::aware, s.exact_limit, 1};
  const auto d = dsahs::decompose(solve_graph, lib, det.hotspots, sm, s.threads);
  emit(s, "decomposition.json", dsahs::dump_json(d));
  return 0;
}

int cmd_run(const Settings& s) {
  dsahs::RunConfig rc;
  rc.tech = tech_of(s);
  if (!s.layout.empty()) rc.layout_path = s.layout;
  rc.layout_gen.seed = s.seed;
  rc.layout_gen.rows = s.rows.value_or(rc.layout_gen.rows);
  rc.layout_gen.cols = s.cols.value_or(rc.layout_gen.cols);
  rc.layout_gen.pitch_x = s.pitch_x;
  rc.layout_gen.pitch_y = s.pitch_y;
  rc.layout_gen.density = s.density.value_or(rc.layout_gen.density);
  if (!s.library.empty()) rc.library_path = s.library;
  rc.library_seed = s.seed;
  rc.library_count = s.library_count;
  rc.pattern_gen = pattern_spec(s);
  rc.mode = dsahs::run_mode_from_string(s.mode);
  rc.exact_limit = s.exact_limit;
  rc.threads = s.threads;
  rc.out_dir = s.out_dir;
  if (!s.svg.empty()) rc.svg_path = s.svg;
  rc.dump_graph = s.dump_graph;
  const auto res = dsahs::run_pipeline(rc);
  std::cout << dsahs::report_text(res.report);
  return 0;
}

int cmd_experiment(const Settings& s) {
  dsahs::ExperimentConfig ec;
  ec.tech = tech_of(s);
  ec.instances = s.instances;
  ec.seed = s.seed;
  ec.exact_limit = s.exact_limit;
  ec.threads = s.threads;
  ec.library_count = s.library_count;
  ec.rows = s.rows.value_or(ec.rows);
  ec.cols = s.cols.value_or(ec.cols);
  ec.pitch_x = s.pitch_x;
  ec.pitch_y = s.pitch_y;
  ec.density = s.density.value_or(ec.density);
  ec.pattern_gen.min_vias = s.min_vias.value_or(ec.pattern_gen.min_vias);
  const auto table = dsahs::run_experiment(ec);
  std::cout << dsahs::experiment_table_text(table);
  if (!s.output.empty() || !s.out_dir.empty()) {
    emit(s, "experiment.json", dsahs::dump_json(dsahs::experiment_to_json(table)));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hotspot-aware DSA grouping and multiple-patterning mask assignment"};
  app.require_subcommand(1);
  app.fallthrough();
  Settings s;

  const char* env = std::getenv("DSAHS_CONFIG");
  if (env) s.config_path = env;
  app.add_option("--config", s.config_path, "JSON config file (default: $DSAHS_CONFIG)");
  app.add_option("--tech", s.tech_path, "technology parameters JSON");
  app.add_option("--masks", s.masks, "number of masks");
  app.add_option("--max-g", s.max_g, "largest DSA group");
  app.add_option("--mode", s.mode, "aware, unaware or cover+unaware");
  app.add_option("--exact-limit", s.exact_limit, "largest unit solved exactly");
  app.add_option("--threads", s.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", s.seed, "generator seed");
  app.add_option("--layout", s.layout, "layout file (.json or .csv)");
  app.add_option("--library", s.library, "hotspot library JSON");
  app.add_option("--out-dir", s.out_dir, "directory for artifacts");
  app.add_option("--svg", s.svg, "SVG output path");
  app.add_option("--rows", s.rows, "generated layout rows");
  app.add_option("--cols", s.cols, "generated layout columns");
  app.add_option("--density", s.density, "generated layout occupancy");
  app.add_option("--pitch-x", s.pitch_x, "generated layout x pitch");
  app.add_option("--pitch-y", s.pitch_y, "generated layout y pitch");
  app.add_option("--count", s.library_count, "generated library size");
  app.add_option("--min-vias", s.min_vias, "fewest vias per generated pattern");
  app.add_option("--instances", s.instances, "experiment instances");
  app.add_option("-o,--output", s.output, "output file (default: stdout or --out-dir)");

  auto* gen_layout = app.add_subcommand("gen-layout", "random grid layout");
  auto* gen_hotspots = app.add_subcommand("gen-hotspots", "random hotspot library");
  auto* build = app.add_subcommand("build-graph", "conflict and group edges of a layout");
  auto* detect = app.add_subcommand("detect", "potential hotspots and eliminator candidates");
  auto* cover = app.add_subcommand("cover", "greedy eliminator cover");
  cover->add_option("--hotspots", s.hotspots, "output of detect (recomputed if absent)");
  auto* decomp = app.add_subcommand("decompose", "DSA groups and masks");
  decomp->add_option("--hotspots", s.hotspots, "output of detect (recomputed if absent)");
  decomp->add_option("--cover", s.cover, "output of cover (recomputed if absent)");
  auto* verify = app.add_subcommand("verify", "count violations of a decomposition");
  verify->add_option("--decomposition", s.decomposition, "output of decompose")->required();
  auto* run = app.add_subcommand("run", "full pipeline");
  run->add_flag("--dump-graph", s.dump_graph, "also write graph.json");
  auto* experiment = app.add_subcommand("experiment", "three-way comparison on random instances");
  auto* render = app.add_subcommand("render", "SVG picture of a decomposition");
  render->add_option("--decomposition", s.decomposition, "output of decompose")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    apply_config(app, s);
    if (*gen_layout) {
      const TechParams t = tech_of(s);
      emit(s, "layout.json", dsahs::layout_to_json(layout_of(s, t)));
    } else if (*gen_hotspots) {
      const TechParams t = tech_of(s);
      emit(s, "library.json", dsahs::library_to_json(dsahs::gen_random_patterns(s.seed, s.library_count, t,
                                                                                pattern_spec(s))));
    } else if (*build) {
      const TechParams t = tech_of(s);
      const auto graph = dsahs::build_graph(dsahs::load_layout(require(s.layout, "--layout")), t);
      emit(s, "graph.json", dsahs::dump_json(dsahs::graph_to_json(graph)));
    } else if (*detect) {
      const TechParams t = tech_of(s);
      const auto graph = dsahs::build_graph(dsahs::load_layout(require(s.layout, "--layout")), t);
      const auto lib = dsahs::load_library(require(s.library, "--library"), t);
      const auto det = detection_of(s, graph, lib);
      emit(s, "hotspots.json", dsahs::dump_json(dsahs::detection_to_json(det.hotspots, det.candidates)));
    } else if (*cover) {
      const TechParams t = tech_of(s);
      const auto graph = dsahs::build_graph(dsahs::load_layout(require(s.layout, "--layout")), t);
      Detection det;
      if (s.hotspots.empty()) {
        det = detection_of(s, graph, dsahs::load_library(require(s.library, "--library"), t));
      } else {
        det = detection_of(s, graph, {});
      }
      emit(s, "cover.json", dsahs::dump_json(dsahs::greedy_cover(det.hotspots, det.candidates)));
    } else if (*decomp) {
      require(s.layout, "--layout");
      require(s.library, "--library");
      return cmd_decompose(s);
    } else if (*verify) {
      const TechParams t = tech_of(s);
      const Layout layout = dsahs::load_layout(require(s.layout, "--layout"));
      const auto lib = dsahs::load_library(require(s.library, "--library"), t);
      const auto d = dsahs::load_json_as<dsahs::Decomposition>(s.decomposition);
      const auto report = dsahs::verify(layout, d, t, lib);
      std::cerr << dsahs::report_text(report);
      emit(s, "report.json", dsahs::dump_json(report));
    } else if (*run) {
      return cmd_run(s);
    } else if (*experiment) {
      return cmd_experiment(s);
    } else if (*render) {
      const TechParams t = tech_of(s);
      const Layout layout = dsahs::load_layout(require(s.layout, "--layout"));
      const auto lib = dsahs::load_library(require(s.library, "--library"), t);
      const auto d = dsahs::load_json_as<dsahs::Decomposition>(s.decomposition);
      dsahs::write_svg(require(s.svg, "--svg"), layout, d, dsahs::verify(layout, d, t, lib), t);
    }
  } catch (const dsahs::Error& e) {
    std::cerr << "dsahs: " << dsahs::to_string(e.code()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "dsahs: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

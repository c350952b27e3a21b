#include <benchmark/benchmark.h>

#include "dsahs/cover.hpp"
#include "dsahs/decomposer.hpp"
#include "dsahs/graph.hpp"
#include "dsahs/hotspot.hpp"
#include "dsahs/matcher.hpp"

namespace {

struct Fixture {
  dsahs::TechParams tech;
  dsahs::Layout layout;
  dsahs::HotspotLibrary library;
  dsahs::LayoutGraph graph;
  std::vector<dsahs::PotentialHotspot> hotspots;
  std::vector<dsahs::Eliminator> candidates;

  explicit Fixture(int side)
      : layout(dsahs::gen_random_layout(3, side, side, 70, 45, 0.4, tech)),
        library(dsahs::gen_random_patterns(3, 36, tech)),
        graph(dsahs::build_graph(layout, tech)),
        hotspots(dsahs::find_potential_hotspots(graph, library)),
        candidates(dsahs::enumerate_eliminators(hotspots, graph)) {}
};

void BM_BuildGraph(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dsahs::build_graph(f.layout, f.tech));
  state.counters["vias"] = static_cast<double>(f.layout.size());
}
BENCHMARK(BM_BuildGraph)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_Detect(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(dsahs::find_potential_hotspots(f.graph, f.library, threads));
  state.counters["hotspots"] = static_cast<double>(f.hotspots.size());
}
BENCHMARK(BM_Detect)->Args({100, 1})->Args({300, 1})->Args({300, 4})->Unit(benchmark::kMillisecond);

void BM_Cover(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dsahs::greedy_cover(f.hotspots, f.candidates));
  state.counters["candidates"] = static_cast<double>(f.candidates.size());
}
BENCHMARK(BM_Cover)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_DecomposeUnaware(benchmark::State& state) {
  const Fixture f(static_cast<int>(state.range(0)));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsahs::decompose(f.graph, f.library, f.hotspots, dsahs::SolveMode{}, threads));
  }
}
BENCHMARK(BM_DecomposeUnaware)->Args({100, 1})->Args({100, 4})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

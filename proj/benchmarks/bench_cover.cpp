#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <vector>

#include "dsahs/cover.hpp"
#include "dsahs/matcher.hpp"

namespace {

// Random instance: each set covers up to 8 elements drawn uniformly.
std::vector<std::vector<int>> random_sets(std::size_t universe, std::size_t n_sets, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> elem(0, static_cast<int>(universe) - 1);
  std::uniform_int_distribution<int> size(1, 8);
  std::vector<std::vector<int>> sets(n_sets);
  for (auto& s : sets) {
    for (int k = size(rng); k > 0; --k) s.push_back(elem(rng));
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return sets;
}

void BM_GreedySetCover(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sets = random_sets(n, 2 * n, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dsahs::greedy_set_cover(n, sets));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GreedySetCover)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity();

}  // namespace

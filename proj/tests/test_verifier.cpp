#include <doctest.h>

#include <algorithm>
#include <random>

#include "dsahs/decomposer.hpp"
#include "dsahs/error.hpp"
#include "dsahs/verifier.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace dsahs;

namespace {

Decomposition make(std::vector<std::pair<std::vector<ViaId>, int>> groups) {
  Decomposition d;
  for (auto& [vias, mask] : groups) d.groups.push_back({static_cast<int>(d.groups.size()), vias, mask});
  return d;
}

Decomposition random_decomposition(const Layout& l, const TechParams& t, std::mt19937_64& rng) {
  auto groups = oracle::group_edges(l, t);
  std::vector<oracle::Group> pool(groups.begin(), groups.end());
  std::shuffle(pool.begin(), pool.end(), rng);
  std::vector<bool> used(l.size(), false);
  Decomposition d;
  auto mask = [&] { return static_cast<int>(rng() % static_cast<std::uint64_t>(t.num_masks)); };
  for (const auto& g : pool) {
    if (rng() % 2) continue;
    if (std::any_of(g.begin(), g.end(), [&](ViaId v) { return used[static_cast<std::size_t>(v)]; })) continue;
    for (ViaId v : g) used[static_cast<std::size_t>(v)] = true;
    d.groups.push_back({static_cast<int>(d.groups.size()), g, mask()});
  }
  for (ViaId v = 0; v < static_cast<ViaId>(l.size()); ++v) {
    if (!used[static_cast<std::size_t>(v)]) d.groups.push_back({static_cast<int>(d.groups.size()), {v}, mask()});
  }
  return d;
}

}  // namespace

TEST_CASE("60 nm same-mask pair is one conflict") {
  TechParams t;
  const std::vector<Point> pts{{0, 0}, {60, 0}};
  const Layout l = Layout::from_points(pts);
  const auto c = count_conflicts(l, make({{{0}, 0}, {{1}, 0}}), t);
  REQUIRE(c.size() == 1);
  CHECK(c[0].a == 0);
  CHECK(c[0].b == 1);
  CHECK(c[0].distance == doctest::Approx(60.0));
  CHECK(count_conflicts(l, make({{{0, 1}, 0}}), t).empty());
  CHECK(count_conflicts(l, make({{{0}, 0}, {{1}, 1}}), t).empty());
}

TEST_CASE("75 nm is not a conflict") {
  TechParams t;
  const std::vector<Point> pts{{0, 0}, {45, 60}};
  CHECK(count_conflicts(Layout::from_points(pts), make({{{0}, 0}, {{1}, 0}}), t).empty());
}

TEST_CASE("elimination example realization") {
  const auto inst = testkit::elimination_example();
  // a,b grouped on mask 0, c on mask 1, d alone on mask 0
  const auto prints = make({{{0, 1}, 0}, {{2}, 1}, {{3}, 0}});
  const auto hs = find_realized_hotspots(inst.layout, prints, inst.library);
  REQUIRE(hs.size() == 1);
  CHECK(hs[0].pattern_id == "x1");
  CHECK(hs[0].origin == Point{0, 0});
  CHECK(hs[0].mask == 0);
  CHECK(hs[0].constituents == std::vector<ViaId>{0, 1, 3});

  CHECK(find_realized_hotspots(inst.layout, make({{{0, 1}, 0}, {{2}, 0}, {{3}, 0}}), inst.library).empty());
  CHECK(find_realized_hotspots(inst.layout, make({{{0}, 0}, {{1}, 0}, {{2}, 1}, {{3}, 0}}), inst.library).empty());
  CHECK(find_realized_hotspots(inst.layout, make({{{0, 1}, 0}, {{2, 3}, 0}}), inst.library).empty());
  CHECK(find_realized_hotspots(inst.layout, make({{{0, 1}, 0}, {{2}, 1}, {{3}, 2}}), inst.library).empty());

  const auto r = verify(inst.layout, prints, inst.tech, inst.library, "aware");
  CHECK(r.n_hotspots == 1);
  CHECK(r.n_violations == r.n_conflicts + r.n_hotspots);
  CHECK(r.mode == "aware");
  const auto text = report_text(r);
  CHECK(text.find("x1") != std::string::npos);
}

TEST_CASE("incomplete or inconsistent decompositions are rejected") {
  const auto inst = testkit::elimination_example();
  CHECK_THROWS_AS(count_conflicts(inst.layout, make({{{0, 1}, 0}}), inst.tech), Error);
  CHECK_THROWS_AS(count_conflicts(inst.layout, make({{{0, 1}, 0}, {{1, 2, 3}, 1}}), inst.tech), Error);
  CHECK_THROWS_AS(count_conflicts(inst.layout, make({{{0, 1, 2, 3, 9}, 0}}), inst.tech), Error);
}

TEST_CASE("clean decomposition") {
  TechParams t;
  const std::vector<Point> pts{{0, 0}, {500, 500}};
  const Layout l = Layout::from_points(pts);
  const auto r = verify(l, make({{{0}, 0}, {{1}, 0}}), t, HotspotLibrary{t, {}});
  CHECK(r.n_conflicts == 0);
  CHECK(r.n_hotspots == 0);
  CHECK(r.n_violations == 0);
}

TEST_CASE("random decompositions agree with the definitional oracles") {
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    const auto inst = testkit::random_small_instance(seed, 2 + static_cast<int>(seed % 2), 8, 1 + static_cast<int>(seed % 3));
    std::mt19937_64 rng(seed);
    const auto windows = oracle::match(inst.layout, inst.library, oracle::group_edges(inst.layout, inst.tech), 1, 1);
    const std::vector<oracle::Match> wl(windows.begin(), windows.end());
    for (int trial = 0; trial < 20; ++trial) {
      const auto d = random_decomposition(inst.layout, inst.tech, rng);
      const auto mask = d.mask_of_via(inst.layout.size());
      const auto group = d.via_to_group(inst.layout.size());
      std::set<oracle::Pair> got;
      for (const auto& c : count_conflicts(inst.layout, d, inst.tech)) got.insert({c.a, c.b});
      CHECK(got == oracle::unresolved_conflicts(inst.layout, mask, group, inst.tech));
      std::set<std::pair<std::string, Point>> real;
      for (const auto& h : find_realized_hotspots(inst.layout, d, inst.library)) real.insert({h.pattern_id, h.origin});
      CHECK(real == oracle::realized(inst.layout, inst.library, wl, mask, group));
      const auto r = verify(inst.layout, d, inst.tech, inst.library);
      CHECK(r.n_violations == static_cast<int>(got.size() + real.size()));
    }
  }
}

TEST_CASE("larger random layouts agree with brute force conflicts") {
  TechParams t;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Layout l = gen_random_layout(seed, 20, 20, 70, 45, 0.5, t);
    std::mt19937_64 rng(seed);
    Decomposition d;
    for (const Via& v : l.vias()) d.groups.push_back({v.id, {v.id}, static_cast<int>(rng() % 3)});
    const auto mask = d.mask_of_via(l.size());
    const auto group = d.via_to_group(l.size());
    std::set<oracle::Pair> got;
    for (const auto& c : count_conflicts(l, d, t)) got.insert({c.a, c.b});
    CHECK(got == oracle::unresolved_conflicts(l, mask, group, t));
  }
}

TEST_CASE("unaware solving does not beat aware solving in aggregate") {
  long aware = 0, unaware = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto inst = testkit::random_small_instance(seed, 2);
    const auto g = build_graph(inst.layout, inst.tech);
    aware += verify(inst.layout, decompose(g, inst.library, SolveMode{true, 14}), inst.tech, inst.library).n_violations;
    unaware += verify(inst.layout, decompose(g, inst.library, SolveMode{false, 14}), inst.tech, inst.library).n_violations;
  }
  CHECK(aware <= unaware);
}

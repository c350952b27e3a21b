#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "dsahs/cover.hpp"
#include "dsahs/decomposer.hpp"
#include "dsahs/error.hpp"
#include "dsahs/verifier.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace dsahs;

namespace {

oracle::DecomposeInput oracle_input(const Layout& layout, const TechParams& tech, const HotspotLibrary& lib,
                                    const LayoutGraph& g, std::span<const ViaId> comp, bool aware) {
  oracle::DecomposeInput in;
  in.layout = &layout;
  in.tech = tech;
  in.component.assign(comp.begin(), comp.end());
  in.groups = oracle::group_edges(layout, tech);
  for (const auto& f : g.forced_groups()) in.forced.insert(f.key());
  for (const auto& e : g.conflict_edges()) {
    if (e.origin == EdgeOrigin::added_by_cover) in.extra_conflicts.insert({e.a, e.b});
  }
  in.library = &lib;
  const auto all = oracle::match(layout, lib, in.groups, 1, 1);
  in.hotspots.assign(all.begin(), all.end());
  in.aware = aware;
  return in;
}

oracle::Assignment as_assignment(const std::vector<DecompGroup>& groups) {
  oracle::Assignment a;
  for (const auto& g : groups) {
    a.groups.push_back(g.vias);
    a.masks.push_back(g.mask);
  }
  return a;
}

Decomposition whole(const std::vector<DecompGroup>& groups) {
  Decomposition d;
  d.groups = groups;
  for (std::size_t i = 0; i < d.groups.size(); ++i) d.groups[i].id = static_cast<int>(i);
  return d;
}

}  // namespace

TEST_CASE("two vias 60 nm apart take different masks") {
  TechParams t;
  t.num_masks = 2;
  const std::vector<Point> pts{{0, 0}, {60, 0}};
  const Layout l = Layout::from_points(pts);
  const auto d = decompose(build_graph(l, t), HotspotLibrary{t, {}}, SolveMode{});
  const auto m = d.mask_of_via(2);
  CHECK(m[0] != m[1]);
  CHECK(verify(l, d, t, HotspotLibrary{t, {}}).n_violations == 0);
}

TEST_CASE("two vias 40 nm apart share one group on one mask") {
  TechParams t;
  t.num_masks = 1;
  const std::vector<Point> pts{{0, 0}, {40, 0}};
  const Layout l = Layout::from_points(pts);
  const auto d = decompose(build_graph(l, t), HotspotLibrary{t, {}}, SolveMode{});
  REQUIRE(d.groups.size() == 1);
  CHECK(d.groups[0].vias == std::vector<ViaId>{0, 1});
  CHECK(d.groups[0].mask == 0);
  CHECK(d.exact_components == 1);
  CHECK(verify(l, d, t, HotspotLibrary{t, {}}).n_violations == 0);
}

TEST_CASE("single via") {
  const std::vector<Point> pts{{5, 5}};
  const auto g = build_graph(Layout::from_points(pts), TechParams{});
  const auto s = solve_component_exact(g.components()[0], g, HotspotLibrary{}, {}, SolveMode{});
  REQUIRE(s.groups.size() == 1);
  CHECK(s.groups[0].vias == std::vector<ViaId>{0});
  CHECK(s.groups[0].mask == 0);
  CHECK(s.objective == 0);
  CHECK(s.exact);
}

TEST_CASE("chain of three with max_g 2 and two masks") {
  TechParams t;
  t.num_masks = 2;
  const std::vector<Point> pts{{0, 0}, {0, 40}, {0, 80}};
  const Layout l = Layout::from_points(pts);
  const auto d = decompose(build_graph(l, t), HotspotLibrary{t, {}}, SolveMode{});
  REQUIRE(d.groups.size() == 2);
  const bool first = d.groups[0].vias == std::vector<ViaId>{0, 1} && d.groups[1].vias == std::vector<ViaId>{2};
  const bool second = d.groups[0].vias == std::vector<ViaId>{0} && d.groups[1].vias == std::vector<ViaId>{1, 2};
  CHECK((first || second));
  CHECK(verify(l, d, t, HotspotLibrary{t, {}}).n_violations == 0);
}

TEST_CASE("elimination example optimum") {
  {
    const auto inst = testkit::elimination_example(2);
    const auto g = build_graph(inst.layout, inst.tech);
    const auto hs = find_potential_hotspots(g, inst.library);
    const auto s = solve_component_exact(g.components()[0], g, inst.library, hs, SolveMode{true, 14});
    CHECK(s.objective == 0);
  }
  {
    // one mask with the pattern's own group forced: the window prints
    const auto inst = testkit::elimination_example(1);
    const auto g = build_graph(inst.layout, inst.tech);
    const auto hs = find_potential_hotspots(g, inst.library);
    const std::vector<GroupEdge> forced{GroupEdge{{0, 1}}};
    const auto gf = g.augmented({}, forced);
    const auto s = solve_component_exact(gf.components()[0], gf, inst.library, hs, SolveMode{true, 14});
    const auto in = oracle_input(inst.layout, inst.tech, inst.library, gf, gf.components()[0], true);
    CHECK(s.objective == oracle::decompose(in));
    CHECK(s.objective == 1);
  }
}

TEST_CASE("added cover edge separates its endpoints") {
  TechParams t;
  t.num_masks = 2;
  // a and b are 100 nm apart: no native conflict
  const std::vector<Point> pts{{0, 0}, {100, 0}};
  const auto g = build_graph(Layout::from_points(pts), t);
  const std::vector<std::pair<ViaId, ViaId>> extra{{0, 1}};
  const auto ga = g.augmented(extra, {});
  const auto d = decompose(ga, HotspotLibrary{t, {}}, SolveMode{});
  const auto m = d.mask_of_via(2);
  CHECK(m[0] != m[1]);
}

TEST_CASE("exact solver equals exhaustive enumeration") {
  int components = 0;
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    const int max_g = seed % 2 ? 2 : 3;
    const auto inst = testkit::random_small_instance(seed, max_g);
    const auto g0 = build_graph(inst.layout, inst.tech);
    const auto hs = find_potential_hotspots(g0, inst.library);
    const auto g = seed % 3 == 0 ? apply_eliminators(g0, greedy_cover(hs, enumerate_eliminators(hs, g0))) : g0;
    for (bool aware : {false, true}) {
      const SolveMode mode{aware, 14};
      for (const auto& comp : g.components()) {
        const auto s = solve_component_exact(comp, g, inst.library, hs, mode);
        const auto in = oracle_input(inst.layout, inst.tech, inst.library, g, comp, aware);
        CHECK(s.objective == oracle::decompose(in));
        CHECK(oracle::score(in, as_assignment(s.groups)) == s.objective);
        CHECK(objective_value(s.groups, comp, g, inst.library, hs, mode) == s.objective);
        const auto h = solve_component_heuristic(comp, g, mode);
        CHECK(objective_value(h.groups, comp, g, inst.library, hs, mode) >= s.objective);
        for (const auto& f : g.forced_groups()) {
          if (!std::binary_search(comp.begin(), comp.end(), f.vias[0])) continue;
          CHECK(std::any_of(s.groups.begin(), s.groups.end(), [&](const DecompGroup& dg) { return dg.vias == f.key(); }));
          CHECK(std::any_of(h.groups.begin(), h.groups.end(), [&](const DecompGroup& dg) { return dg.vias == f.key(); }));
        }
        ++components;
      }
    }
  }
  CHECK(components > 200);
}

TEST_CASE("decompose output is a legal partition") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TechParams t;
    t.max_g = 3;
    const Layout l = gen_random_layout(seed, 12, 12, 70, 45, 0.4, t);
    const auto g = build_graph(l, t);
    const auto lib = gen_random_patterns(seed, 36, t);
    for (int limit : {1, 6, 14}) {
      const auto d = decompose(g, lib, SolveMode{true, limit}, 2);
      std::vector<int> seen(l.size(), 0);
      const auto groups = oracle::group_edges(l, t);
      for (std::size_t i = 0; i < d.groups.size(); ++i) {
        const auto& dg = d.groups[i];
        CHECK(dg.id == static_cast<int>(i));
        CHECK(dg.mask >= 0);
        CHECK(dg.mask < t.num_masks);
        CHECK(std::is_sorted(dg.vias.begin(), dg.vias.end()));
        if (dg.vias.size() > 1) CHECK(groups.count(dg.vias) == 1);
        for (ViaId v : dg.vias) ++seen[static_cast<std::size_t>(v)];
      }
      CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
      const auto hs = find_potential_hotspots(g, lib);
      CHECK(d.exact_components + d.fallback_components ==
            static_cast<int>(solve_units(g, hs, SolveMode{true, limit}).size()));
    }
  }
}

TEST_CASE("aware solve units close over hotspot windows") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    TechParams t;
    const Layout l = gen_random_layout(seed, 10, 10, 70, 45, 0.35, t);
    const auto g = build_graph(l, t);
    const auto hs = find_potential_hotspots(g, gen_random_patterns(seed, 36, t));
    CHECK(solve_units(g, hs, SolveMode{false, 14}) == g.components());
    std::set<oracle::Pair> edges;
    for (const auto& e : g.conflict_edges()) edges.insert({e.a, e.b});
    std::set<oracle::Group> hyper;
    for (const auto& e : g.group_edges()) hyper.insert(e.key());
    for (const auto& h : hs) {
      oracle::Group w = h.constituents;
      w.insert(w.end(), h.non_constituents.begin(), h.non_constituents.end());
      std::sort(w.begin(), w.end());
      hyper.insert(w);
    }
    const auto closed = oracle::components(l.size(), edges, hyper);
    CHECK(solve_units(g, hs, SolveMode{true, 64}) == closed);
    // too-large closures fall back to plain components
    const auto& comps = g.components();
    for (const auto& u : solve_units(g, hs, SolveMode{true, 14})) {
      const bool whole = std::find(closed.begin(), closed.end(), u) != closed.end();
      const bool single = std::find(comps.begin(), comps.end(), u) != comps.end();
      const bool ok = (whole && u.size() <= 14) || single;
      CHECK(ok);
    }
  }
}

TEST_CASE("aware decomposition is optimal over the whole layout") {
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    const auto inst = testkit::random_small_instance(seed, 2 + static_cast<int>(seed % 2));
    const auto g = build_graph(inst.layout, inst.tech);
    const auto hs = find_potential_hotspots(g, inst.library);
    std::vector<ViaId> all(inst.layout.size());
    for (std::size_t v = 0; v < all.size(); ++v) all[v] = static_cast<ViaId>(v);
    const auto in = oracle_input(inst.layout, inst.tech, inst.library, g, all, true);
    const auto d = decompose(g, inst.library, hs, SolveMode{true, 14});
    CHECK(verify(inst.layout, d, inst.tech, inst.library).n_violations == oracle::decompose(in));
  }
}

TEST_CASE("shuffled tie-breaking keeps the optimum") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto inst = testkit::random_small_instance(seed, 2);
    const auto g = build_graph(inst.layout, inst.tech);
    const auto hs = find_potential_hotspots(g, inst.library);
    for (bool aware : {false, true}) {
      for (const auto& comp : g.components()) {
        const auto base = solve_component_exact(comp, g, inst.library, hs, SolveMode{aware, 14});
        const auto a = solve_component_exact(comp, g, inst.library, hs, SolveMode{aware, 14, seed});
        const auto b = solve_component_exact(comp, g, inst.library, hs, SolveMode{aware, 14, seed});
        CHECK(a.objective == base.objective);
        CHECK(objective_value(a.groups, comp, g, inst.library, hs, SolveMode{aware, 14}) == base.objective);
        CHECK(a.groups == b.groups);
      }
    }
  }
}

TEST_CASE("objective_value matches the verifier per component") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto inst = testkit::random_small_instance(seed, 2);
    const auto g = build_graph(inst.layout, inst.tech);
    const auto hs = find_potential_hotspots(g, inst.library);
    const auto d = decompose(g, inst.library, hs, SolveMode{false, 14});
    const auto report = verify(inst.layout, d, inst.tech, inst.library);
    long total = 0;
    for (const auto& comp : g.components()) {
      std::vector<DecompGroup> mine;
      for (const auto& dg : d.groups) {
        if (std::binary_search(comp.begin(), comp.end(), dg.vias[0])) mine.push_back(dg);
      }
      total += objective_value(mine, comp, g, inst.library, hs, SolveMode{false, 14});
    }
    CHECK(total == report.n_conflicts);
  }
}

TEST_CASE("aware optimum never loses to unaware optimum on the full count") {
  long aware_total = 0, unaware_total = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto inst = testkit::random_small_instance(seed, 2 + static_cast<int>(seed % 2));
    const auto g = build_graph(inst.layout, inst.tech);
    const auto hs = find_potential_hotspots(g, inst.library);
    for (const auto& comp : g.components()) {
      const auto a = solve_component_exact(comp, g, inst.library, hs, SolveMode{true, 14});
      const auto u = solve_component_exact(comp, g, inst.library, hs, SolveMode{false, 14});
      const long ua = objective_value(u.groups, comp, g, inst.library, hs, SolveMode{true, 14});
      CHECK(a.objective <= ua);
      aware_total += a.objective;
      unaware_total += ua;
    }
  }
  CHECK(aware_total <= unaware_total);
}

TEST_CASE("thread count does not change the decomposition") {
  TechParams t;
  const Layout l = gen_random_layout(3, 30, 30, 70, 45, 0.4, t);
  const auto g = build_graph(l, t);
  const auto lib = gen_random_patterns(3, 36, t);
  const auto hs = find_potential_hotspots(g, lib);
  const auto one = decompose(g, lib, hs, SolveMode{true, 10}, 1);
  CHECK(decompose(g, lib, hs, SolveMode{true, 10}, 4) == one);
  CHECK(decompose(g, lib, hs, SolveMode{true, 10}, 3) == one);
}

TEST_CASE("size guard") {
  TechParams t;
  const Layout l = gen_random_layout(1, 4, 4, 40, 40, 1.0, t);
  const auto g = build_graph(l, t);
  REQUIRE(g.components().size() == 1);
  try {
    solve_component_exact(g.components()[0], g, HotspotLibrary{}, {}, SolveMode{false, 8});
    FAIL("expected too_large");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::too_large);
  }
  const auto d = decompose(g, HotspotLibrary{}, SolveMode{false, 8});
  CHECK(d.fallback_components == 1);
  CHECK_THROWS_AS(decompose(g, HotspotLibrary{}, SolveMode{false, 0}), Error);
}

TEST_CASE("whole-layout helper maps") {
  const auto d = whole({DecompGroup{0, {0, 2}, 1}, DecompGroup{0, {1}, 2}});
  CHECK(d.via_to_group(4) == std::vector<int>{0, 1, 0, -1});
  CHECK(d.mask_of_via(4) == std::vector<int>{1, 2, 1, -1});
}

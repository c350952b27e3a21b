#include <doctest.h>

#include <algorithm>
#include <random>

#include "dsahs/graph.hpp"
#include "dsahs/matcher.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace dsahs;

namespace {

std::set<oracle::Match> as_matches(const std::vector<PotentialHotspot>& hs) {
  std::set<oracle::Match> out;
  for (const auto& h : hs) out.insert({h.pattern_id, h.origin, h.constituents, h.non_constituents});
  return out;
}

std::set<oracle::Candidate> as_candidates(const std::vector<Eliminator>& es) {
  std::set<oracle::Candidate> out;
  for (const auto& e : es) {
    auto vias = e.vias;
    std::sort(vias.begin(), vias.end());
    out.insert({e.kind == EliminatorKind::conflict ? 0 : 1, vias, {e.covers.begin(), e.covers.end()}});
  }
  return out;
}

std::set<oracle::Group> groups_of(const LayoutGraph& g) {
  std::set<oracle::Group> out;
  for (const auto& e : g.group_edges()) out.insert(e.key());
  return out;
}

std::set<oracle::Pair> conflicts_of(const LayoutGraph& g) {
  std::set<oracle::Pair> out;
  for (const auto& e : g.conflict_edges()) out.insert({e.a, e.b});
  return out;
}

}  // namespace

TEST_CASE("empty layout has no potential hotspots") {
  const auto g = build_graph(Layout(), TechParams{});
  const auto lib = gen_random_patterns(1, 36, TechParams{});
  CHECK(find_potential_hotspots(g, lib).empty());
}

TEST_CASE("elimination example window") {
  const auto inst = testkit::elimination_example();
  const auto g = build_graph(inst.layout, inst.tech);
  const auto hs = find_potential_hotspots(g, inst.library);
  REQUIRE(hs.size() == 1);
  CHECK(hs[0].id == 0);
  CHECK(hs[0].origin == Point{0, 0});
  CHECK(hs[0].constituents == std::vector<ViaId>{0, 1, 3});
  CHECK(hs[0].non_constituents == std::vector<ViaId>{2});

  const auto cands = enumerate_eliminators(hs, g);
  REQUIRE(cands.size() == 3);
  CHECK(cands[0].kind == EliminatorKind::conflict);
  CHECK(cands[0].vias == std::vector<ViaId>{0, 3});
  CHECK(cands[1].kind == EliminatorKind::conflict);
  CHECK(cands[1].vias == std::vector<ViaId>{1, 3});
  CHECK(cands[2].kind == EliminatorKind::affinity);
  CHECK(cands[2].vias == std::vector<ViaId>{3, 2});  // run order: d below c
  for (std::size_t i = 0; i < cands.size(); ++i) {
    CHECK(cands[i].id == static_cast<int>(i));
    CHECK(cands[i].covers == std::vector<int>{0});
    CHECK(cands[i].state == EliminatorState::live);
  }
}

TEST_CASE("pattern segments without a group edge are pruned") {
  // a legal segment whose layout vias are split by a third via on the run
  TechParams t;
  const std::vector<Point> split{{0, 0}, {0, 40}, {0, 20}};
  HotspotPattern s{"seg", 0, 40, {{0, 0}, {0, 40}}, {{0, 1}}, {}};
  const auto g2 = build_graph(Layout::from_points(split), t);
  CHECK(find_potential_hotspots(g2, make_library({s}, t)).empty());
}

TEST_CASE("uncoverable hotspot yields no candidates") {
  TechParams t;
  const std::vector<Point> pts{{0, 0}, {0, 40}};
  HotspotPattern p{"pair", 0, 40, {{0, 0}, {0, 40}}, {{0, 1}}, {}};
  const auto g = build_graph(Layout::from_points(pts), t);
  const auto hs = find_potential_hotspots(g, make_library({p}, t));
  REQUIRE(hs.size() == 1);
  CHECK(hs[0].non_constituents.empty());
  CHECK(enumerate_eliminators(hs, g).empty());
}

TEST_CASE("shared pair covers both overlapping hotspots") {
  TechParams t;
  const std::vector<Point> pts{{0, 0}, {0, 90}, {80, 0}};
  HotspotPattern p1{"p1", 0, 90, {{0, 0}, {0, 90}}, {}, {0, 1}};
  HotspotPattern p2{"p2", 80, 90, {{0, 0}, {0, 90}, {80, 0}}, {}, {0, 1, 2}};
  const auto g = build_graph(Layout::from_points(pts), t);
  const auto hs = find_potential_hotspots(g, make_library({p1, p2}, t));
  REQUIRE(hs.size() == 2);
  const auto cands = enumerate_eliminators(hs, g);
  const auto it = std::find_if(cands.begin(), cands.end(), [](const Eliminator& e) {
    return e.kind == EliminatorKind::conflict && e.vias == std::vector<ViaId>{0, 1};
  });
  REQUIRE(it != cands.end());
  CHECK(it->covers == std::vector<int>{0, 1});
}

TEST_CASE("window already blocked by a native conflict gets no candidates") {
  TechParams t;
  // two vias 45 nm apart printed as separate singletons: same mask would be a conflict
  const std::vector<Point> pts{{0, 0}, {0, 45}, {0, 135}};
  HotspotPattern split{"split", 0, 90, {{0, 0}, {0, 45}}, {}, {0, 1}};
  HotspotPattern joined{"joined", 0, 90, {{0, 0}, {0, 45}}, {{0, 1}}, {}};
  const auto g = build_graph(Layout::from_points(pts), t);
  const auto hs = find_potential_hotspots(g, make_library({split, joined}, t));
  std::vector<int> blocked, open;
  for (const auto& h : hs) (h.blocked ? blocked : open).push_back(h.id);
  REQUIRE_FALSE(blocked.empty());
  REQUIRE_FALSE(open.empty());
  for (const auto& e : enumerate_eliminators(hs, g)) {
    for (int h : e.covers) CHECK(std::find(blocked.begin(), blocked.end(), h) == blocked.end());
  }
  for (int h : blocked) CHECK(hs[static_cast<std::size_t>(h)].pattern_id == "split");
}

TEST_CASE("matcher and eliminators agree with the oracles on random grids") {
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    TechParams t;
    t.max_g = seed % 2 ? 2 : 3;
    const Layout l = gen_random_layout(seed, 12, 14, 70, 45, 0.45, t);
    const auto lib = gen_random_patterns(seed, 36, t);
    const auto g = build_graph(l, t);
    const auto hs = find_potential_hotspots(g, lib, 3);
    const auto expect = oracle::match(l, lib, oracle::group_edges(l, t), 70, 45);
    CHECK(as_matches(hs) == expect);
    for (std::size_t i = 0; i < hs.size(); ++i) CHECK(hs[i].id == static_cast<int>(i));

    std::vector<oracle::Match> by_id;
    for (const auto& h : hs) by_id.push_back({h.pattern_id, h.origin, h.constituents, h.non_constituents});
    const auto native = oracle::conflicts(l, t);
    for (std::size_t i = 0; i < hs.size(); ++i) CHECK(hs[i].blocked == oracle::blocked(by_id[i], lib, native));
    const auto cands = enumerate_eliminators(hs, g);
    const auto want = oracle::eliminators(by_id, lib, native, groups_of(g));
    CHECK(as_candidates(cands) == std::set<oracle::Candidate>(want.begin(), want.end()));
    for (std::size_t i = 1; i < cands.size(); ++i) CHECK(cands[i - 1].key() < cands[i].key());
  }
}

TEST_CASE("derived libraries match the full integer-translation scan") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto inst = testkit::random_small_instance(seed, 2 + static_cast<int>(seed % 2));
    const auto g = build_graph(inst.layout, inst.tech);
    const auto hs = find_potential_hotspots(g, inst.library);
    CHECK(as_matches(hs) == oracle::match(inst.layout, inst.library, oracle::group_edges(inst.layout, inst.tech), 1, 1));
    CHECK_FALSE(hs.empty());
  }
}

TEST_CASE("output does not depend on via order or thread count") {
  TechParams t;
  const Layout l = gen_random_layout(9, 15, 15, 70, 45, 0.5, t);
  const auto lib = gen_random_patterns(9, 36, t);
  const auto base = find_potential_hotspots(build_graph(l, t), lib, 1);
  CHECK(find_potential_hotspots(build_graph(l, t), lib, 4) == base);

  std::vector<Point> pts;
  for (const Via& v : l.vias()) pts.push_back(v.pos());
  std::mt19937_64 rng(4);
  std::shuffle(pts.begin(), pts.end(), rng);
  const Layout shuffled = Layout::from_points(pts);
  const auto other = find_potential_hotspots(build_graph(shuffled, t), lib, 2);
  REQUIRE(other.size() == base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(other[i].pattern_id == base[i].pattern_id);
    CHECK(other[i].origin == base[i].origin);
    for (std::size_t k = 0; k < base[i].constituents.size(); ++k) {
      CHECK(shuffled.via(other[i].constituents[k]).pos() == l.via(base[i].constituents[k]).pos());
    }
  }
}

#include <doctest.h>

#include <random>

#include "dsahs/error.hpp"
#include "dsahs/graph.hpp"
#include "oracles.hpp"

using namespace dsahs;

namespace {

LayoutGraph graph_of(const std::vector<Point>& pts, const TechParams& t = {}) {
  return build_graph(Layout::from_points(pts), t);
}

std::set<oracle::Group> group_set(const LayoutGraph& g) {
  std::set<oracle::Group> out;
  for (const auto& e : g.group_edges()) out.insert(e.key());
  return out;
}

std::set<oracle::Pair> conflict_set(const LayoutGraph& g) {
  std::set<oracle::Pair> out;
  for (const auto& e : g.conflict_edges()) out.insert({e.a, e.b});
  return out;
}

}  // namespace

TEST_CASE("60 nm pair conflicts but cannot group") {
  const auto g = graph_of({{0, 0}, {60, 0}});
  CHECK(g.conflict_edges().size() == 1);
  CHECK(g.group_edges().empty());
  CHECK(g.components().size() == 1);
}

TEST_CASE("40 nm pair conflicts and groups") {
  const auto g = graph_of({{0, 0}, {40, 0}});
  REQUIRE(g.conflict_edges().size() == 1);
  CHECK(g.conflict_edges()[0] == ConflictEdge{0, 1, EdgeOrigin::native});
  REQUIRE(g.group_edges().size() == 1);
  CHECK(g.group_edges()[0].vias == std::vector<ViaId>{0, 1});
}

TEST_CASE("three collinear vias at 40 nm gaps") {
  const std::vector<Point> pts{{0, 0}, {0, 40}, {0, 80}};
  TechParams t;
  CHECK(group_set(graph_of(pts, t)) == std::set<oracle::Group>{{0, 1}, {1, 2}});
  t.max_g = 3;
  CHECK(group_set(graph_of(pts, t)) == std::set<oracle::Group>{{0, 1}, {1, 2}, {0, 1, 2}});
}

TEST_CASE("group edges list vias in run order") {
  // ids deliberately out of run order
  const auto g = graph_of({{0, 80}, {0, 0}, {0, 40}}, [] {
    TechParams t;
    t.max_g = 3;
    return t;
  }());
  for (const auto& e : g.group_edges()) {
    for (std::size_t i = 1; i < e.vias.size(); ++i) {
      CHECK(g.layout().via(e.vias[i - 1]).y < g.layout().via(e.vias[i]).y);
    }
  }
}

TEST_CASE("is_groupable") {
  const auto g = graph_of({{0, 0}, {0, 40}, {200, 0}, {200, 60}});
  const std::vector<ViaId> ab{0, 1};
  const std::vector<ViaId> ac{0, 2};
  CHECK(is_groupable(ab, g));
  CHECK_FALSE(is_groupable(ac, g));
  const std::vector<ViaId> bad{0, 9};
  CHECK_THROWS_AS(is_groupable(bad, g), Error);
}

TEST_CASE("unvalidated layout is rejected") {
  try {
    graph_of({{0, 0}, {5, 0}});
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unvalidated_layout);
  }
}

TEST_CASE("components") {
  const auto g = graph_of({{0, 0}, {40, 0}, {1000, 1000}, {1000, 1040}});
  REQUIRE(g.components().size() == 2);
  CHECK(g.components()[0] == std::vector<ViaId>{0, 1});
  CHECK(g.components()[1] == std::vector<ViaId>{2, 3});
  CHECK(connected_components(g) == g.components());

  const std::vector<std::pair<ViaId, ViaId>> bridge{{1, 2}};
  const auto merged = g.augmented(bridge, {});
  CHECK(merged.components().size() == 1);
  CHECK(merged.num_added_conflicts() == 1);
  CHECK(merged.has_conflict(1, 2));
  CHECK(merged.has_conflict(2, 1));
}

TEST_CASE("augmented forced groups") {
  TechParams t;
  t.max_g = 3;
  const auto g = graph_of({{0, 0}, {0, 40}, {0, 80}, {0, 120}}, t);
  const std::vector<GroupEdge> forced{GroupEdge{{1, 2}}};
  const auto a = g.augmented({}, forced);
  REQUIRE(a.forced_groups().size() == 1);
  CHECK(a.forced_group_of(1) == 0);
  CHECK(a.forced_group_of(0) == -1);
  // every surviving edge touching 1 or 2 is the forced group itself
  for (const auto& e : a.group_edges()) {
    const bool touches = std::count(e.vias.begin(), e.vias.end(), 1) || std::count(e.vias.begin(), e.vias.end(), 2);
    if (touches) CHECK(e.key() == std::vector<ViaId>{1, 2});
  }
  CHECK(group_set(a).count({1, 2}) == 1);
  CHECK(group_set(a).count({0, 1}) == 0);

  const std::vector<GroupEdge> overlap{GroupEdge{{0, 1}}, GroupEdge{{1, 2}}};
  CHECK_THROWS_AS(g.augmented({}, overlap), Error);
  const std::vector<GroupEdge> illegal{GroupEdge{{0, 3}}};
  CHECK_THROWS_AS(g.augmented({}, illegal), Error);
}

TEST_CASE("random layouts agree with brute force") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    std::mt19937_64 rng(seed);
    TechParams t;
    t.max_g = 2 + static_cast<int>(seed % 3);
    const Coord px = 35 + static_cast<Coord>(rng() % 40);
    const Coord py = 35 + static_cast<Coord>(rng() % 40);
    const Layout l = gen_random_layout(seed, 9, 11, px, py, 0.6, t);
    const auto g = build_graph(l, t);
    const auto groups = oracle::group_edges(l, t);
    const auto conflicts = oracle::conflicts(l, t);
    CHECK(group_set(g) == groups);
    CHECK(conflict_set(g) == conflicts);
    CHECK(g.components() == oracle::components(l.size(), conflicts, groups));
    for (const auto& e : g.group_edges()) {
      std::vector<Point> run;
      for (ViaId v : e.vias) run.push_back(l.via(v).pos());
      CHECK(legal_group_geometry(run, t));
    }
    // is_groupable agrees with a direct search of the oracle's groups
    for (ViaId a = 0; a < static_cast<ViaId>(std::min<std::size_t>(l.size(), 15)); ++a) {
      for (ViaId b = a + 1; b < static_cast<ViaId>(std::min<std::size_t>(l.size(), 15)); ++b) {
        const bool expect = std::any_of(groups.begin(), groups.end(), [&](const oracle::Group& gr) {
          return std::count(gr.begin(), gr.end(), a) && std::count(gr.begin(), gr.end(), b);
        });
        const std::vector<ViaId> ab{a, b};
        CHECK(is_groupable(ab, g) == expect);
      }
    }
  }
}

TEST_CASE("gridless layouts agree with brute force") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(seed);
    TechParams t;
    t.max_g = 3;
    std::uniform_int_distribution<int> c(0, 8);
    std::set<Point> pts;
    while (pts.size() < 60) pts.insert({c(rng) * 20 + (c(rng) == 0 ? 7 : 0), c(rng) * 20});
    // drop anything too close to an earlier point
    std::vector<Point> kept;
    for (const Point& p : pts) {
      if (std::all_of(kept.begin(), kept.end(), [&](Point q) { return dist2(p, q) >= 100; })) kept.push_back(p);
    }
    const Layout l = Layout::from_points(kept);
    const auto g = build_graph(l, t);
    const auto groups = oracle::group_edges(l, t);
    CHECK(group_set(g) == groups);
    CHECK(conflict_set(g) == oracle::conflicts(l, t));
  }
}

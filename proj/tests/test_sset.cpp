#include <set>

#include "doctest.h"
#include "finmodel/model.hpp"
#include "finmodel/sset.hpp"

using namespace finmodel;
using fincat::Budget;
using fincat::Presheaf;
using fincat::PresheafMorphism;
using fincat::share;

TEST_CASE("standard objects") {
  SUBCASE("level-1 objects are plain sets") {
    CHECK(sset::delta(1, 0).card(0) == 1);
    CHECK(sset::delta(1, 1).card(0) == 2);
    CHECK(sset::boundary(1, 0).card(0) == 0);
  }
  SUBCASE("the edge in level 2 has two vertices and one nondegenerate edge") {
    Presheaf d1 = sset::delta(2, 1);
    CHECK(d1.card(0) == 2);
    CHECK(d1.card(1) == 3);
    int nondeg = 0;
    for (int e = 0; e < d1.card(1); ++e)
      if (!sset::edge_is_degenerate(d1, e)) ++nondeg;
    CHECK(nondeg == 1);
    CHECK(d1.validate().empty());
  }
  SUBCASE("the outer horn at the top level-2 cell is the pictured wedge") {
    Presheaf h = sset::horn(2, 2, 0);
    CHECK(h.card(0) == 3);
    std::set<std::pair<int, int>> nondeg;
    for (int e = 0; e < h.card(1); ++e)
      if (!sset::edge_is_degenerate(h, e))
        nondeg.insert({sset::edge_source(h, e), sset::edge_target(h, e)});
    CHECK(nondeg == std::set<std::pair<int, int>>{{0, 1}, {0, 2}});
    CHECK(sset::pi0(h) == 1);
  }
  SUBCASE("the top truncated simplex omits exactly the top cell") {
    Presheaf d2 = sset::delta(2, 2);
    CHECK(d2.card(0) == 3);
    CHECK(d2.card(1) == 6);
    // in level 3 the representable at 3 keeps its top cell
    Presheaf d2_full = sset::delta(3, 2);
    CHECK(d2_full.card(0) == 3);
    CHECK(d2_full.card(1) == 6);
    CHECK(d2_full.card(2) == 10);
    Presheaf b2 = sset::boundary(3, 2);
    CHECK(b2.card(2) == 9);  // all level-3 cells except the identity simplex
    Presheaf d3 = sset::delta(3, 3);
    CHECK(d3.card(0) == 4);
    CHECK(d3.card(1) == 10);
    CHECK(d3.card(2) == 20);
    CHECK(d3.validate().empty());
  }
  SUBCASE("out-of-range indices are rejected") {
    CHECK_THROWS_AS((void)sset::delta(2, 3), std::out_of_range);
    CHECK_THROWS_AS((void)sset::horn(2, 1, 2), std::out_of_range);
  }
}

TEST_CASE("generators") {
  SUBCASE("level 1: a single boundary and the point inclusion 1 -> 2") {
    auto g = sset::generators(1);
    REQUIRE(g.cof.size() == 1);
    CHECK(g.cof[0].source().card(0) == 0);
    CHECK(g.cof[0].target().card(0) == 1);
    REQUIRE(g.triv_cof.size() == 1);
    CHECK(g.triv_cof[0].source().card(0) == 1);
    CHECK(g.triv_cof[0].target().card(0) == 2);
  }
  SUBCASE("level 2: two boundaries, four horns") {
    auto g = sset::generators(2);
    CHECK(g.cof.size() == 2);
    CHECK(g.triv_cof.size() == 4);
    for (const auto& m : g.triv_cof) {
      CHECK(m.is_mono());
      CHECK(m.is_natural());
    }
  }
  SUBCASE("level 3: three boundaries, all nine horns") {
    auto g = sset::generators(3);
    CHECK(g.cof.size() == 3);
    CHECK(g.triv_cof.size() == 9);
  }
}

TEST_CASE("weak equivalence oracles") {
  auto s1 = sset::make_instance(1);
  auto s2 = sset::make_instance(2);
  Budget b;

  SUBCASE("level 1: maps between nonempty sets, and the empty identity") {
    auto f =
        fincat::enumerate_maps(share(sset::finite_set(2)), share(sset::finite_set(3)), b).front();
    CHECK(sset::weq_oracle(s1, f));
    auto g =
        fincat::enumerate_maps(share(sset::finite_set(0)), share(sset::finite_set(1)), b).front();
    CHECK(!sset::weq_oracle(s1, g));
    auto e = PresheafMorphism::identity(share(sset::finite_set(0)));
    CHECK(sset::weq_oracle(s1, e));
  }
  SUBCASE("level 2: component-count mismatch fails") {
    auto pt = share(sset::point(2));
    auto two = share(sset::graph(2, {}));
    auto f = fincat::enumerate_maps(pt, two, b).front();
    CHECK(!sset::weq_oracle(s2, f));
  }
  SUBCASE("level 2: collapsing a connected graph onto a point passes") {
    auto wedge = share(sset::graph(3, {{0, 1}, {0, 2}}));
    auto pt = share(sset::point(2));
    auto f = fincat::enumerate_maps(wedge, pt, b).front();
    CHECK(sset::weq_oracle(s2, f));
  }
}

TEST_CASE("pi0") {
  CHECK(sset::pi0(sset::graph(3, {})) == 3);
  CHECK(sset::pi0(sset::graph(3, {{0, 1}, {0, 2}})) == 1);
  CHECK(sset::pi0(sset::graph(0, {})) == 0);
  // orientation does not matter for reachability
  CHECK(sset::pi0(sset::graph(2, {{1, 0}})) == 1);
}

TEST_CASE("complex builder") {
  SUBCASE("a built triangle matches the representable") {
    // vertices 0,1,2; edges 01, 02, 12 at carrier indices 3, 4, 5; one
    // triangle with faces d0 = 12, d1 = 02, d2 = 01
    Presheaf t = sset::build_complex({3, 3, {{0, 1}, {0, 2}, {1, 2}}, {{5, 4, 3}}});
    CHECK(t.validate().empty());
    Presheaf d2 = sset::delta(3, 2);
    Budget b;
    CHECK(sset::isomorphic(t, d2, b));
  }
  SUBCASE("degenerate faces are allowed in triangles") {
    // a loop composed with itself filling against the degenerate loop
    Presheaf n = sset::nerve_z2();
    CHECK(n.card(0) == 1);
    CHECK(n.card(1) == 2);
    CHECK(n.card(2) == 4);
    CHECK(n.validate().empty());
  }
  SUBCASE("incompatible triangle faces are rejected") {
    CHECK_THROWS_AS((void)sset::build_complex({3, 3, {{0, 1}, {0, 2}, {2, 1}}, {{5, 4, 3}}}),
                    fincat::ShapeError);
  }
  SUBCASE("the nerve of Z/2 is fibrant") {
    auto s3 = sset::make_instance(3);
    CHECK(model::is_fibrant(sset::nerve_z2(), s3.model));
  }
  SUBCASE("loop objects are not fibrant, the bare point is") {
    auto s3 = sset::make_instance(3);
    CHECK(!model::is_fibrant(sset::point_with_loops(3, 1), s3.model));
    CHECK(model::is_fibrant(sset::point(3), s3.model));
  }
}

TEST_CASE("multigraph corpus") {
  auto corpus = sset::multigraph_corpus(3, 3);
  // isomorphism-class counts per vertex number: 1 + 4 + 19 + 44
  CHECK(corpus.size() == 68);
  for (const auto& x : corpus) CHECK(x.validate().empty());
  CHECK(corpus.front().total_cells() == 0);

  SUBCASE("small representatives are pairwise non-isomorphic") {
    auto small = sset::multigraph_corpus(2, 2);
    Budget b(100'000'000);
    for (std::size_t i = 0; i < small.size(); ++i)
      for (std::size_t j = i + 1; j < small.size(); ++j)
        CHECK(!sset::isomorphic(small[i], small[j], b));
  }
}

TEST_CASE("fibrancy on the corpus is componentwise completeness") {
  auto s2 = sset::make_instance(2);
  auto corpus = sset::multigraph_corpus(2, 2);
  for (const auto& x : corpus) {
    auto labels = sset::pi0_labels(x);
    std::set<std::pair<int, int>> joined;
    for (int e = 0; e < x.card(1); ++e)
      joined.insert({sset::edge_source(x, e), sset::edge_target(x, e)});
    bool complete = true;
    for (int a = 0; a < x.card(0) && complete; ++a)
      for (int b2 = 0; b2 < x.card(0) && complete; ++b2)
        if (a != b2 && labels[a] == labels[b2] && !joined.count({a, b2})) complete = false;
    CHECK(model::is_fibrant(x, s2.model) == complete);
  }
}

TEST_CASE("monomorphisms coincide with maps lifting against trivial fibration probes") {
  auto s1 = sset::make_instance(1);
  // probe: the fold collapse 2 -> 1, a surjection and hence a trivial fibration
  auto cyl = model::cylinder(sset::finite_set(1), s1.model);
  Budget budget;
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; b <= 3; ++b) {
      auto x = share(sset::finite_set(a));
      auto y = share(sset::finite_set(b));
      for (const auto& f : fincat::enumerate_maps(x, y, budget)) {
        bool lifts_all = true;
        auto tops = fincat::enumerate_maps(x, share(cyl.object), budget);
        for (const auto& u : tops) {
          auto bottoms = fincat::enumerate_maps(y, cyl.collapse.target_ptr(), budget);
          for (const auto& v : bottoms) {
            if (!(fincat::compose(cyl.collapse, u) == fincat::compose(v, f))) continue;
            fincat::LiftingProblem p{f, cyl.collapse, u, v};
            if (!fincat::find_lift(p, budget).has_value()) lifts_all = false;
          }
        }
        CHECK(lifts_all == f.is_mono());
      }
    }
}

TEST_CASE("forest invariant") {
  auto s1 = sset::make_instance(1);
  auto s2 = sset::make_instance(2);
  auto s3 = sset::make_instance(3);

  SUBCASE("level 1: empty against nonempty") {
    CHECK(sset::forest_invariant(s1, sset::finite_set(0)).serialize() == "");
    CHECK(sset::forest_invariant(s1, sset::finite_set(1)).serialize() == "()");
    CHECK(sset::forest_invariant(s1, sset::finite_set(4)).serialize() == "()");
  }
  SUBCASE("level 2: one root per component") {
    CHECK(sset::forest_invariant(s2, sset::graph(2, {})).serialize() == "()()");
    CHECK(sset::forest_invariant(s2, sset::graph(3, {{0, 1}, {0, 2}})).serialize() == "()");
  }
  SUBCASE("level 3: the three pictured shapes have distinct forests") {
    auto bare = sset::forest_invariant(s3, sset::point(3));
    auto one = sset::forest_invariant(s3, sset::point_with_loops(3, 1));
    auto two = sset::forest_invariant(s3, sset::point_with_loops(3, 2));
    CHECK(bare.serialize() == "()");
    CHECK(one.serialize() == "(())");
    CHECK(two.serialize() == "(()())");
  }
  SUBCASE("level 3: disjoint unions map to multiset unions") {
    auto cop = fincat::coproduct(sset::simplex_category(3),
                                 {sset::point(3), sset::point_with_loops(3, 1)});
    // trees sort ascending, so the two-node tree precedes the bare root
    CHECK(sset::forest_invariant(s3, cop.object).serialize() == "(())()");
  }
  SUBCASE("level 3: unclassified components are refused") {
    CHECK_THROWS_AS((void)sset::forest_invariant(s3, sset::point_with_loops(3, 3)),
                    sset::CorpusBoundError);
  }
}

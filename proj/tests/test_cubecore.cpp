#include <gtest/gtest.h>

#include "mf/cubecore/maps.hpp"
#include "mf/cubecore/special.hpp"
#include "oracles.hpp"

using namespace mf;
namespace fx = mf::fixtures;

namespace {

std::vector<Vid> ids(const CubeComplex& X, std::initializer_list<const char*> names) {
  std::vector<Vid> out;
  for (auto n : names) out.push_back(X.vertex(n));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Vid> grid_block(const CubeComplex& X, int imax, int jmax) {
  std::vector<Vid> out;
  for (int i = 0; i <= imax; ++i)
    for (int j = 0; j <= jmax; ++j) out.push_back(X.vertex(fx::grid_id(i, j)));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(Build, GridCounts) {
  CubeComplex X = fx::grid(2, 2);
  EXPECT_EQ(X.vertex_count(), 9u);
  EXPECT_EQ(X.edge_count(), 12u);
  EXPECT_EQ(X.squares.size(), 4u);
}

TEST(Build, TorusCounts) {
  CubeComplex X = fx::torus();
  EXPECT_EQ(X.vertex_count(), 1u);
  EXPECT_EQ(X.edge_count(), 2u);
  EXPECT_EQ(X.squares.size(), 1u);
}

TEST(Build, DanglingReferenceRejected) {
  ComplexBuilder b("bad");
  Vid a = b.add_vertex("a"), c = b.add_vertex("c");
  b.add_edge(a, c);
  EXPECT_THROW(b.vertex("nowhere"), InputError);
  // a square whose sides were never declared
  Vid d = b.add_vertex("d"), e = b.add_vertex("e");
  b.add_square({a, c, d, e});
  EXPECT_THROW(b.build(), InputError);
}

TEST(Build, DimensionCapRejected) {
  ComplexBuilder b("flat", 1);
  Vid a = b.add_vertex("a"), c = b.add_vertex("c"), d = b.add_vertex("d"), e = b.add_vertex("e");
  b.add_edge(a, c);
  b.add_edge(a, d);
  b.add_edge(c, e);
  b.add_edge(d, e);
  EXPECT_THROW(b.add_square({a, c, d, e}), InputError);
}

TEST(Npc, Examples) {
  CubeComplex g = fx::grid(2, 2), t = fx::torus(), c = fx::three_squares_corner();
  EXPECT_TRUE(validate_npc(g).ok);
  EXPECT_TRUE(validate_npc(t).ok);
  NpcReport r = validate_npc(c);
  ASSERT_FALSE(r.ok);
  EXPECT_EQ(c.vertex_ids[r.issues.front().vertex], "o");
}

TEST(Hyperplanes, Examples) {
  CubeComplex g = fx::grid(2, 2), t = fx::torus();
  EXPECT_EQ(compute_hyperplanes(g).count(), 4u);
  HyperplaneData H = compute_hyperplanes(t);
  EXPECT_EQ(H.count(), 2u);
  EXPECT_TRUE(H.two_sided[0] && H.two_sided[1]);
  CubeComplex sq = fx::grid(1, 1);
  HyperplaneData S = compute_hyperplanes(sq);
  ASSERT_EQ(S.count(), 2u);
  EXPECT_EQ(S.dual_edges[0].size(), 2u);
  EXPECT_EQ(S.dual_edges[1].size(), 2u);
}

TEST(Hyperplanes, MatchParallelClasses) {
  for (CubeComplex X : {fx::grid(3, 2), fx::ladder(), fx::comb(), fx::torus(), fx::klein()}) {
    HyperplaneData H = compute_hyperplanes(X);
    auto classes = oracle::parallel_classes(X);
    ASSERT_EQ(H.count(), classes.size()) << X.name;
    for (const auto& cls : classes) {
      std::set<std::uint32_t> owners;
      for (auto e : cls) owners.insert(H.of_edge[e]);
      EXPECT_EQ(owners.size(), 1u) << X.name;
      EXPECT_EQ(H.dual_edges[*owners.begin()].size(), cls.size());
    }
  }
}

TEST(Cat0, Examples) {
  CubeComplex g = fx::grid(2, 2), t = fx::torus(), st = fx::subdivided_torus(3), d = fx::doubled_square();
  EXPECT_TRUE(analyze_cat0(g).ok);
  Cat0Result rt = analyze_cat0(t);
  EXPECT_FALSE(rt.ok);
  ASSERT_TRUE(rt.witness);
  Cat0Result rs = analyze_cat0(st);
  EXPECT_FALSE(rs.ok);
  EXPECT_TRUE(rs.witness);
  EXPECT_FALSE(analyze_cat0(d).ok);
}

TEST(Metric, GridExamples) {
  CubeComplex X = fx::grid(2, 2);
  auto M = median_space(X);
  auto v = [&](int i, int j) { return X.vertex(fx::grid_id(i, j)); };
  EXPECT_EQ(M->distance(v(0, 0), v(2, 1)), 3);
  EXPECT_EQ(M->distance(v(1, 1), v(1, 1)), 0);
  EXPECT_EQ(M->distance(v(0, 0), v(2, 2)), 4);
  EXPECT_EQ(M->median(v(0, 0), v(2, 0), v(0, 2)), v(0, 0));
  EXPECT_EQ(M->median(v(0, 0), v(2, 2), v(2, 0)), v(2, 0));
  EXPECT_EQ(M->median(v(1, 2), v(1, 2), v(0, 0)), v(1, 2));
}

TEST(Metric, MedianMatchesBruteForce) {
  CubeComplex X = fx::grid(3, 3);
  auto M = median_space(X);
  auto d = oracle::all_pairs(X);
  oracle::Gen gen(7);
  for (int trial = 0; trial < 300; ++trial) {
    Vid p = gen.vertex(X.vertex_count()), q = gen.vertex(X.vertex_count()), r = gen.vertex(X.vertex_count());
    std::vector<Vid> hits;
    for (Vid m = 0; m < X.vertex_count(); ++m)
      if (d[p][m] + d[m][q] == d[p][q] && d[q][m] + d[m][r] == d[q][r] && d[p][m] + d[m][r] == d[p][r])
        hits.push_back(m);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(M->median(p, q, r), hits.front());
  }
}

TEST(Hull, GridExamples) {
  CubeComplex X = fx::grid(2, 2);
  auto M = median_space(X);
  EXPECT_EQ(M->hull(ids(X, {"(0,0)", "(2,1)"})), grid_block(X, 2, 1));
  EXPECT_EQ(M->hull(ids(X, {"(1,1)"})), ids(X, {"(1,1)"}));
  EXPECT_EQ(M->hull(ids(X, {"(0,0)", "(1,1)"})), grid_block(X, 1, 1));
  EXPECT_TRUE(M->is_convex(ids(X, {"(0,0)", "(0,1)", "(0,2)"})));
  EXPECT_FALSE(M->is_convex(ids(X, {"(0,0)", "(1,0)", "(1,1)"})));
  EXPECT_TRUE(M->is_convex(grid_block(X, 2, 2)));
}

TEST(Special, Examples) {
  CubeComplex t = fx::torus(), k = fx::klein(), g = fx::grid(2, 2);
  EXPECT_TRUE(check_special(t).special);
  EXPECT_TRUE(check_special(g).special);
  SpecialnessReport r = check_special(k);
  EXPECT_FALSE(r.special);
  bool one_sided = false;
  for (const auto& h : r.hyperplanes) one_sided |= h.one_sided.has_value();
  EXPECT_TRUE(one_sided);
}

TEST(Special, NonSpecialNeedsNpc) {
  CubeComplex c = fx::three_squares_corner();
  EXPECT_THROW(check_special(c), PreconditionError);
}

TEST(LocalIsometry, Examples) {
  auto T = fx::shared(fx::torus());
  auto circle = fx::shared(fx::cycle(1, "circle"));
  CombinatorialMap f{circle, T, {0}, {EdgeRef{0, false}}, {}, {}};
  complete_map(f);
  EXPECT_TRUE(check_local_isometry(f).ok);

  // a two-edge circle folded onto one loop: the link map at the vertex is not injective
  auto c2 = fx::shared(fx::cycle(2, "c2"));
  CombinatorialMap fold{c2, T, {0, 0}, {EdgeRef{0, false}, EdgeRef{0, true}}, {}, {}};
  complete_map(fold);
  EXPECT_FALSE(check_local_isometry(fold).ok);

  ComplexBuilder pb("point");
  pb.add_vertex("p");
  auto point = fx::shared(pb.build());
  CombinatorialMap incl{point, T, {0}, {}, {}, {}};
  complete_map(incl);
  EXPECT_TRUE(check_local_isometry(incl).ok);
}

TEST(Develop, Examples) {
  auto circle = fx::shared(fx::cycle(1, "circle"));
  auto B = develop_ball(circle, 0, 3);
  EXPECT_EQ(B->size(), 7u);
  EXPECT_EQ(B->complex->edge_count(), 6u);

  auto T = develop_ball(fx::shared(fx::torus()), 0, 2);
  EXPECT_EQ(T->size(), 13u);

  auto G = develop_ball(fx::shared(fx::grid(2, 2)), 0, 10);
  EXPECT_EQ(G->size(), 9u);
  EXPECT_EQ(G->complex->squares.size(), 4u);
  EXPECT_TRUE(G->boundary().empty());
}

TEST(Develop, SmallerRadiusIsPrefix) {
  for (auto X : {fx::shared(fx::torus()), fx::shared(fx::ladder()), fx::shared(fx::klein())}) {
    auto big = develop_ball(X, 0, 6), small = develop_ball(X, 0, 3);
    ASSERT_LE(small->size(), big->size());
    for (Vid v = 0; v < small->size(); ++v) {
      EXPECT_EQ(small->proj_vertex[v], big->proj_vertex[v]);
      EXPECT_EQ(small->level[v], big->level[v]);
    }
    for (Eid e = 0; e < small->complex->edge_count(); ++e) {
      EXPECT_EQ(small->complex->edges[e].tail, big->complex->edges[e].tail);
      EXPECT_EQ(small->complex->edges[e].head, big->complex->edges[e].head);
      EXPECT_EQ(small->proj_edge[e], big->proj_edge[e]);
    }
  }
}

TEST(Deck, TorusShift) {
  auto B = develop_ball(fx::shared(fx::torus()), 0, 6);
  Vid east = B->ports[0][0];
  Automorphism g = deck_search(*B, 0, east);
  EXPECT_FALSE(g.is_identity());
  for (Vid v = 0; v < B->size(); ++v) {
    if (B->interior(v)) {
      EXPECT_NE(g.image[v], kNone);
    }
    if (g.image[v] == kNone) continue;
    EXPECT_EQ(B->proj_vertex[g.image[v]], B->proj_vertex[v]);
  }
  EXPECT_TRUE(deck_search(*B, 0, 0).is_identity());
  EXPECT_EQ(translation_length(*B, g).length, 1);
}

TEST(Deck, WrongFibreRejected) {
  auto B = develop_ball(fx::shared(fx::ladder()), 0, 4);
  Vid other = kNone;
  for (Vid v = 0; v < B->size(); ++v)
    if (B->proj_vertex[v] != B->proj_vertex[0]) other = v;
  ASSERT_NE(other, kNone);
  EXPECT_THROW(deck_search(*B, 0, other), PreconditionError);
}

TEST(Deck, DiagonalTranslationLength) {
  auto B = develop_ball(fx::shared(fx::torus()), 0, 6);
  Automorphism g = lift_loop(*B, {{0, false}, {1, false}});
  EXPECT_EQ(translation_length(*B, g).length, 2);
  auto circle = develop_ball(fx::shared(fx::cycle(1, "circle")), 0, 6);
  EXPECT_EQ(translation_length(*circle, deck_search(*circle, 0, circle->ports[0][0])).length, 1);
  EXPECT_THROW(translation_length(*circle, deck_search(*circle, 0, 0)), PreconditionError);
}

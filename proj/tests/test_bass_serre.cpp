#include <gtest/gtest.h>

#include "mf/bass_serre/gog_fixtures.hpp"
#include "mf/bass_serre/stature.hpp"

using namespace mf;
namespace fx = mf::fixtures;

namespace {

std::shared_ptr<const GraphOfComplexes> share(GraphOfComplexes G) {
  return std::make_shared<const GraphOfComplexes>(std::move(G));
}

// Pointwise equality of two deck maps wherever both are defined.
bool agree(const Automorphism& a, const Automorphism& b) {
  std::size_t common = 0;
  for (Vid v = 0; v < a.image.size(); ++v) {
    if (a.image[v] == kNone || b.image[v] == kNone) continue;
    if (a.image[v] != b.image[v]) return false;
    ++common;
  }
  return common > 0;
}

}  // namespace

TEST(Gog, TotalSpaceOfTori) {
  auto G = fx::tori_gog();
  EXPECT_EQ(G.vertex_count(), 2u);
  EXPECT_EQ(G.edge_count(), 1u);
  CubeComplex T = total_space(G);
  EXPECT_EQ(T.vertex_count(), 2u);
  EXPECT_EQ(T.edge_count(), 5u);
  EXPECT_EQ(T.squares.size(), 3u);
  EXPECT_TRUE(validate_npc(T).ok);
}

TEST(Gog, FoldingAttachmentRejected) {
  GogInput in;
  in.vertex_names = {"a", "b"};
  in.vertex_spaces = {fx::shared(fx::torus()), fx::shared(fx::torus())};
  GogInput::EdgeInput e;
  e.name = "e";
  e.minus_vertex = "a";
  e.plus_vertex = "b";
  e.space = fx::shared(fx::cycle(2, "c2"));
  e.minus_vertices = {0, 0};
  e.minus_edges = {{0, false}, {0, true}};
  e.plus_vertices = {0, 0};
  e.plus_edges = {{0, false}, {0, false}};
  in.edges.push_back(e);
  EXPECT_THROW(build_gog(in), InputError);
}

TEST(Window, Sizes) {
  auto G = share(fx::tori_gog());
  TreeWindow W0 = tree_window(G, 0, 0, 6, 5);
  EXPECT_EQ(W0.chambers.size(), 1u);
  EXPECT_EQ(W0.strips.size(), 0u);
  TreeWindow W1 = tree_window(G, 0, 1, 6, 5);
  EXPECT_EQ(W1.chambers.size(), 6u);
  EXPECT_EQ(W1.strips.size(), 5u);
  EXPECT_TRUE(W1.truncated());
}

TEST(PathGate, TwoTermMatchesFullChain) {
  for (auto G : {share(fx::tori_gog()), share(fx::transverse_gog())}) {
    TreeWindow W = tree_window(G, 0, 2, 8, 3);
    std::size_t compared = 0;
    for (int L = 1; L <= 2; ++L)
      for (const TreePath& rho : paths_from(W, 0, L)) {
        PathGate g = path_gate(W, rho);
        EXPECT_TRUE(g.complete_transport);
        if (!g.cross_check) continue;
        EXPECT_TRUE(*g.cross_check);
        ++compared;
      }
    EXPECT_GT(compared, 0u);
  }
}

TEST(PathStabilizer, ToriPathsAreCyclic) {
  auto G = share(fx::tori_gog());
  TreeWindow W = tree_window(G, 0, 2, 8, 3);
  for (const TreePath& rho : paths_from(W, 0, 2)) {
    PathStabilizerApprox ps = path_stabilizer(W, rho);
    EXPECT_EQ(ps.stab.verdict, CyclicVerdict::cyclic);
    EXPECT_EQ(ps.stab.quotient.complex.vertex_count(), 1u);
    EXPECT_EQ(ps.stab.quotient.complex.edge_count(), 1u);
  }
}

TEST(PathStabilizer, GeneratorsPermuteTheGate) {
  auto G = share(fx::transverse_gog());
  TreeWindow W = tree_window(G, 0, 2, 8, 3);
  for (const TreePath& rho : paths_from(W, 0, 1)) {
    PathStabilizerApprox ps = path_stabilizer(W, rho);
    const Ball& B = *W.chambers[ps.stab.chamber].ball;
    std::set<Vid> interior;
    for (Vid v : ps.stab.gate.members)
      if (B.interior(v)) interior.insert(v);
    for (const Automorphism& g : ps.stab.elements)
      for (Vid v : interior) {
        Vid w = g.image[v];
        if (w == kNone || !B.interior(w)) continue;
        EXPECT_TRUE(ps.stab.gate.contains(w));
      }
    // injective on the gate
    for (const Automorphism& g : ps.stab.elements) {
      std::set<Vid> images;
      std::size_t defined = 0;
      for (Vid v : ps.stab.gate.members)
        if (g.image[v] != kNone) {
          images.insert(g.image[v]);
          ++defined;
        }
      EXPECT_EQ(images.size(), defined);
    }
  }
}

TEST(PathStabilizer, ExtensionNeverEnlarges) {
  auto G = share(fx::tori_gog());
  TreeWindow W = tree_window(G, 0, 2, 8, 3);
  auto shorts = paths_from(W, 0, 1);
  for (const TreePath& longer : paths_from(W, 0, 2)) {
    TreePath prefix{{longer.strips.front()}};
    PathStabilizerApprox a = path_stabilizer(W, prefix), b = path_stabilizer(W, longer);
    ASSERT_EQ(a.stab.verdict, CyclicVerdict::cyclic);
    ASSERT_TRUE(a.stab.primitive);
    for (const Automorphism& g : b.stab.elements) {
      bool generated = false;
      for (long k = -6; k <= 6 && !generated; ++k) {
        if (k == 0) continue;
        try {
          generated = agree(g, power(*a.stab.primitive, k));
        } catch (const BudgetError&) {
        }
      }
      EXPECT_TRUE(generated);
    }
  }
  EXPECT_FALSE(shorts.empty());
}

TEST(PathStabilizer, TransverseThroughPathIsTrivial) {
  auto G = share(fx::transverse_gog());
  TreeWindow W = tree_window(G, 0, 2, 8, 6);
  std::size_t through = 0;
  for (const TreePath& rho : paths_from(W, 0, 2)) {
    const Chamber& end = W.chambers[W.strips[rho.strips.back()].far_chamber];
    if (G->vertex_names[end.gamma_vertex] != "w") continue;
    ++through;
    PathStabilizerApprox ps = path_stabilizer(W, rho);
    EXPECT_EQ(ps.stab.verdict, CyclicVerdict::trivial);
    EXPECT_EQ(ps.gate.gate.size(), 1u);
  }
  EXPECT_GT(through, 0u);
}

TEST(Cyclonormal, ToriPass) {
  auto G = share(fx::tori_gog());
  CyclonormalReport edges = check_cyclonormal(G, 0, 2, 8, 6);
  EXPECT_TRUE(edges.pass);
  EXPECT_EQ(edges.counts[static_cast<int>(CyclicVerdict::higher)], 0u);
  EXPECT_EQ(edges.counts[static_cast<int>(CyclicVerdict::undecided)], 0u);
  EXPECT_GT(edges.counts[static_cast<int>(CyclicVerdict::cyclic)], 0u);
  CyclonormalReport paths = check_cyclonormal(G, 1, 2, 8, 6);
  ASSERT_EQ(paths.triples.size(), edges.triples.size());
  for (std::size_t i = 0; i < paths.triples.size(); ++i) EXPECT_EQ(paths.triples[i].verdict, edges.triples[i].verdict);
}

TEST(Cyclonormal, FreeGogFailsWithRankTwoWitness) {
  auto G = share(fx::free_gog());
  CyclonormalReport r = check_cyclonormal(G, 0, 2, 8, 6);
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.witness);
  const TripleRecord& t = r.triples[*r.witness];
  EXPECT_EQ(t.verdict, CyclicVerdict::higher);
  EXPECT_EQ(t.witness_words.size(), 2u);
  EXPECT_NE(t.witness_words[0], t.witness_words[1]);
}

TEST(Cyclonormal, TransverseTriplesAreSmall) {
  auto G = share(fx::transverse_gog());
  CyclonormalReport r = check_cyclonormal(G, 0, 2, 8, 6);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.counts[static_cast<int>(CyclicVerdict::trivial)], 0u);
}

TEST(Cyclonormal, TripleQuasilineOnTori) {
  auto G = share(fx::tori_gog());
  TreeWindow W = tree_window(G, 0, 1, 8, 6);
  const Ball& B = *W.chambers[0].ball;
  Automorphism g = deck_search(B, 0, W.strips[2].near.pairs[0].second);
  TripleQuasiline tq = triple_quasiline(W, 0, 1, g);
  EXPECT_EQ(tq.stab.verdict, CyclicVerdict::cyclic);
  ASSERT_TRUE(tq.quasiline);
  EXPECT_EQ(tq.quasiline->phi_length, 1);
  EXPECT_FALSE(tq.violation);
}

TEST(Canonical, InvariantUnderRelabelling) {
  auto label = [](CubeComplex X) {
    LabelledComplex L{std::move(X), {}, {}, {}, {}};
    L.vertex_label.assign(L.complex.vertex_count(), 0);
    L.edge_label.assign(L.complex.edge_count(), 0);
    L.square_label.assign(L.complex.squares.size(), 0);
    return L;
  };
  // the same directed 4-cycle with vertices declared in different orders
  ComplexBuilder a("a"), b("b");
  BuildOptions keep;
  keep.normalize_edges = false;
  for (auto s : {"0", "1", "2", "3"}) a.add_vertex(s);
  for (auto s : {"2", "0", "3", "1"}) b.add_vertex(s);
  for (int i = 0; i < 4; ++i) {
    a.add_edge(a.vertex(std::to_string(i)), a.vertex(std::to_string((i + 1) % 4)));
    b.add_edge(b.vertex(std::to_string((i + 1) % 4)), b.vertex(std::to_string(i)));
  }
  EXPECT_EQ(canonical_form(label(a.build(keep))), canonical_form(label(b.build(keep))));
  EXPECT_NE(canonical_form(label(fx::cycle(4))), canonical_form(label(fx::cycle(3))));
  EXPECT_NE(canonical_form(label(fx::cycle(4))), canonical_form(label(fx::grid(1, 1))));
}

TEST(Stature, EmptyProbe) {
  auto G = share(fx::tori_gog());
  StatureReport r = stature_probe(G, 0, 0, 8, 3);
  EXPECT_TRUE(r.tallies.empty());
  EXPECT_FALSE(r.stabilization);
}

TEST(Stature, ToriSettleAtOneClass) {
  auto G = share(fx::tori_gog());
  StatureReport r = stature_probe(G, 0, 3, 8, 3);
  EXPECT_EQ(r.tallies, (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_TRUE(r.stabilization);
  EXPECT_EQ(r.stabilization_length, 1);
  ASSERT_TRUE(r.budget.R.value);
  EXPECT_EQ(*r.budget.R.value, 3 * *r.budget.B.value * (*r.budget.h.value + 1) + *r.budget.h.value);
}

TEST(Stature, WiseTalliesKeepGrowing) {
  auto G = share(fx::wise_gog());
  StatureReport r = stature_probe(G, 0, 3, 40, 3);
  EXPECT_EQ(r.tallies, (std::vector<std::size_t>{1, 2, 3}));
  EXPECT_FALSE(r.stabilization);
  EXPECT_EQ(r.budget.T.status, ValueStatus::symbolic);
  EXPECT_FALSE(r.budget.P.value);
}

// Randomized properties checked against the oracles in oracles.hpp.

#include <gtest/gtest.h>

#include "mf/cubecore/special.hpp"
#include "mf/gates/gates.hpp"
#include "oracles.hpp"

using namespace mf;

namespace {

struct Window {
  std::shared_ptr<Ball> ball;
  const MedianSpace* M;
  oracle::Dist d;
};

Window window(oracle::Gen& gen) {
  Window w{gen.window(), nullptr, {}};
  w.M = &w.ball->metric();
  w.d = oracle::all_pairs(*w.ball->complex);
  return w;
}

ConvexSet random_convex(oracle::Gen& gen, const Window& w) { return convex_set(*w.M, gen.convex(w.d)); }

}  // namespace

TEST(MetricProperty, DistanceMatchesBfsAndSeparation) {
  oracle::Gen gen(11);
  for (int t = 0; t < 40; ++t) {
    Window w = window(gen);
    auto H = oracle::halfspaces(*w.ball->complex);
    const std::size_t n = w.ball->size();
    for (Vid p = 0; p < n; ++p)
      for (Vid q = 0; q < n; ++q) {
        ASSERT_EQ(w.M->distance(p, q), w.d[p][q]);
        ASSERT_EQ(H.separating_count(p, q), w.d[p][q]);
      }
  }
}

TEST(MetricProperty, GeodesicsCrossDistinctHyperplanes) {
  oracle::Gen gen(12);
  for (int t = 0; t < 40; ++t) {
    Window w = window(gen);
    for (int k = 0; k < 20; ++k) {
      Vid p = gen.vertex(w.ball->size()), q = gen.vertex(w.ball->size());
      Geodesic g = w.M->geodesic(p, q);
      ASSERT_EQ(g.length(), w.d[p][q]);
      std::set<std::uint32_t> crossed(g.crossed.begin(), g.crossed.end());
      EXPECT_EQ(crossed.size(), g.crossed.size());
      for (std::size_t i = 0; i + 1 < g.vertices.size(); ++i) EXPECT_EQ(w.d[g.vertices[i]][g.vertices[i + 1]], 1);
    }
  }
}

TEST(MetricProperty, HyperplanesHaveTwoHalfspaces) {
  oracle::Gen gen(13);
  for (int t = 0; t < 40; ++t) {
    Window w = window(gen);
    const CubeComplex& X = *w.ball->complex;
    auto H = oracle::halfspaces(X);
    const HyperplaneData& HD = w.M->hyperplanes();
    for (std::size_t c = 0; c < H.classes.size(); ++c) {
      EXPECT_EQ(H.components[c], 2);
      std::uint32_t h = HD.of_edge[H.classes[c].front()];
      std::set<Vid> carrier;
      for (auto e : H.classes[c]) {
        carrier.insert(X.edges[e].tail);
        carrier.insert(X.edges[e].head);
        for (auto [sq, slot] : X.squares_on(static_cast<Eid>(e)))
          for (int k = 0; k < 4; ++k) carrier.insert(X.squares[sq].corners[k]);
      }
      for (const auto& cube : X.cubes3) {
        bool meets = false;
        for (int s = 0; s < 12; ++s)
          meets |= std::find(H.classes[c].begin(), H.classes[c].end(), cube.edges[s].edge) != H.classes[c].end();
        if (meets)
          for (int k = 0; k < 8; ++k) carrier.insert(cube.corners[k]);
      }
      EXPECT_EQ(carrier_vertices(X, HD, h), std::vector<Vid>(carrier.begin(), carrier.end()));
    }
  }
}

TEST(HullProperty, ClosureLaws) {
  oracle::Gen gen(14);
  for (int t = 0; t < 40; ++t) {
    Window w = window(gen);
    for (int k = 0; k < 10; ++k) {
      auto S = gen.sample(w.ball->size(), gen.uniform(1, 4));
      auto T = S;
      T.push_back(gen.vertex(w.ball->size()));
      auto hs = w.M->hull(S), ht = w.M->hull(T);
      ASSERT_EQ(hs, oracle::hull(w.d, S));
      EXPECT_EQ(w.M->hull(hs), hs);
      EXPECT_TRUE(std::includes(ht.begin(), ht.end(), hs.begin(), hs.end()));
      for (Vid v : S) EXPECT_TRUE(std::binary_search(hs.begin(), hs.end(), v));
      EXPECT_TRUE(w.M->is_convex(hs));
    }
  }
}

TEST(GateProperty, GateIsNearestPoint) {
  oracle::Gen gen(15);
  for (int t = 0; t < 40; ++t) {
    Window w = window(gen);
    for (int k = 0; k < 25; ++k) {
      ConvexSet Y = random_convex(gen, w);
      Vid x = gen.vertex(w.ball->size());
      auto brute = oracle::nearest(w.d, x, Y.members);
      ASSERT_TRUE(brute.has_value());
      GateResult r = gate_vertex(*w.M, x, Y);
      EXPECT_EQ(r.image, *brute);
      EXPECT_EQ(r.distance, w.d[x][*brute]);
      if (Y.contains(x)) {
        EXPECT_EQ(r.image, x);
      }
    }
  }
}

TEST(GateProperty, PitchforkIsPointwiseImage) {
  oracle::Gen gen(16);
  for (int t = 0; t < 40; ++t) {
    Window w = window(gen);
    for (int k = 0; k < 10; ++k) {
      ConvexSet A = random_convex(gen, w), B = random_convex(gen, w);
      ConvexSet P = pitchfork(*w.M, A, B);
      EXPECT_EQ(P.members, oracle::gate_image(w.d, A.members, B.members));
      EXPECT_TRUE(oracle::is_convex(w.d, P.members));
      EXPECT_TRUE(std::includes(A.members.begin(), A.members.end(), P.members.begin(), P.members.end()));
    }
  }
}

TEST(GateProperty, ProjectionAlgebra) {
  oracle::Gen gen(17);
  for (int t = 0; t < 40; ++t) {
    Window w = window(gen);
    for (int k = 0; k < 5; ++k) {
      ConvexSet A = random_convex(gen, w), B = random_convex(gen, w), C = random_convex(gen, w);
      auto AB = pitchfork(*w.M, A, B), AC = pitchfork(*w.M, A, C), BC = pitchfork(*w.M, B, C);
      auto left = pitchfork(*w.M, AB, C), right = pitchfork(*w.M, A, BC);
      EXPECT_EQ(left.members, right.members);
      EXPECT_EQ(pitchfork_chain(*w.M, {A, B, C}).members, right.members);
      std::vector<Vid> both;
      std::set_intersection(AB.members.begin(), AB.members.end(), AC.members.begin(), AC.members.end(),
                            std::back_inserter(both));
      EXPECT_TRUE(std::includes(right.members.begin(), right.members.end(), both.begin(), both.end()));
    }
  }
}

TEST(GateProperty, BridgeLaws) {
  oracle::Gen gen(18);
  for (int t = 0; t < 40; ++t) {
    Window w = window(gen);
    auto H = oracle::halfspaces(*w.ball->complex);
    for (int k = 0; k < 5; ++k) {
      ConvexSet A = random_convex(gen, w), B = random_convex(gen, w);
      BridgeDecomposition d = bridge(*w.M, A, B);
      ASSERT_TRUE(d.verified());
      for (std::size_t c = 0; c < H.classes.size(); ++c) {
        EXPECT_EQ(H.crosses(c, d.a_side.members), H.crosses(c, A.members) && H.crosses(c, B.members));
        EXPECT_EQ(H.separates(c, d.a_side.members, d.b_side.members), H.separates(c, A.members, B.members));
      }
      // the gate map A⊤B -> B⊤A is an isometry onto
      std::set<Vid> image;
      for (Vid a : d.a_side.members) image.insert(*oracle::nearest(w.d, a, B.members));
      EXPECT_EQ(std::vector<Vid>(image.begin(), image.end()), d.b_side.members);
      for (Vid a1 : d.a_side.members)
        for (Vid a2 : d.a_side.members)
          EXPECT_EQ(w.d[a1][a2], w.d[*oracle::nearest(w.d, a1, B.members)][*oracle::nearest(w.d, a2, B.members)]);
      // product witness: distinct bridge vertices get distinct coordinates, and distance adds up
      const int sep = w.d[d.a][d.b];
      EXPECT_EQ(static_cast<int>(d.connector.size()) >= sep + 1, true);
      std::set<std::pair<Vid, Vid>> coords;
      for (const auto& [v, ca] : d.witness) {
        coords.insert(ca);
        EXPECT_EQ(w.d[v][d.a], w.d[ca.first][d.a] + w.d[ca.second][d.a]);
      }
      EXPECT_EQ(coords.size(), d.bridge.size());
      EXPECT_EQ(coords.size(), d.connector.size() * d.a_side.size());
    }
  }
}

TEST(SpecialProperty, WindowsAreSpecial) {
  oracle::Gen gen(19);
  for (int t = 0; t < 30; ++t) {
    Window w = window(gen);
    CubeComplex X = *w.ball->complex;
    ASSERT_TRUE(analyze_cat0(X).ok);
    EXPECT_TRUE(check_special(X).special);
  }
}

TEST(DeckProperty, CommutesWithProjection) {
  oracle::Gen gen(20);
  for (int t = 0; t < 30; ++t) {
    Window w = window(gen);
    const Ball& B = *w.ball;
    Vid target = kNone;
    for (int k = 0; k < 50 && target == kNone; ++k) {
      Vid v = gen.vertex(B.size());
      if (B.proj_vertex[v] == B.proj_vertex[0]) target = v;
    }
    if (target == kNone) continue;
    Automorphism g = deck_search(B, 0, target);
    for (Vid v = 0; v < B.size(); ++v)
      if (g.image[v] != kNone) {
        EXPECT_EQ(B.proj_vertex[g.image[v]], B.proj_vertex[v]);
        for (Vid u : w.M->neighbors(v))
          if (g.image[u] != kNone) {
            EXPECT_EQ(w.d[g.image[u]][g.image[v]], 1);
          }
      }
  }
}

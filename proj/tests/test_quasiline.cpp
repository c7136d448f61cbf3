#include <gtest/gtest.h>

#include "mf/quasiline/quasiline.hpp"
#include "oracles.hpp"

using namespace mf;
namespace fx = mf::fixtures;

namespace {

struct Fixture {
  std::shared_ptr<Ball> ball;
  Quasiline Q;
  Classification C;
};

std::vector<Vid> all_of(const Ball& B) {
  std::vector<Vid> v(B.size());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

// φ is the lift of loop e0 at the basepoint; the window is the whole ball.
Fixture quasiline(CubeComplex X, int R, std::vector<std::pair<Eid, bool>> word = {{0, false}}) {
  Fixture s;
  s.ball = develop_ball(fx::shared(std::move(X)), 0, R);
  s.Q = validate_quasiline(s.ball, all_of(*s.ball), lift_loop(*s.ball, word));
  s.C = classify_or_throw(s.Q);
  return s;
}

Geodesic orbit_segment(const Quasiline& Q, int length) {
  Automorphism inv = inverse(Q.phi);
  Vid s = Q.x0;
  for (int i = 0; i < length / 2; ++i) s = inv.image[s];
  Vid t = s;
  for (int i = 0; i < length; ++i) t = Q.phi.image[t];
  return Q.metric().geodesic(s, t);
}

}  // namespace

TEST(Validate, LineWindow) {
  Fixture s = quasiline(fx::line(), 20);
  EXPECT_EQ(s.ball->size(), 41u);
  EXPECT_EQ(s.Q.fundamental_domain.size(), 1u);
  EXPECT_EQ(s.Q.period_count, 40);
  EXPECT_EQ(s.Q.phi_length, 1);
}

TEST(Validate, LadderWindow) {
  Fixture s = quasiline(fx::ladder(), 12);
  EXPECT_EQ(s.Q.fundamental_domain.size(), 2u);
}

TEST(Validate, Rejections) {
  auto B = develop_ball(fx::shared(fx::line()), 0, 20);
  EXPECT_THROW(validate_quasiline(B, all_of(*B), deck_search(*B, 0, 0)), PreconditionError);
  auto small = develop_ball(fx::shared(fx::line()), 0, 3);
  EXPECT_THROW(validate_quasiline(small, all_of(*small), lift_loop(*small, {{0, false}})), PreconditionError);
  auto T = develop_ball(fx::shared(fx::torus()), 0, 8);
  EXPECT_THROW(validate_quasiline(T, all_of(*T), lift_loop(*T, {{0, false}})), PreconditionError);
}

TEST(Classify, Line) {
  Fixture s = quasiline(fx::line(), 20);
  EXPECT_EQ(s.C.count(HyperplaneKind::trivial), 0u);
  EXPECT_EQ(s.C.count(HyperplaneKind::half_essential), 0u);
  EXPECT_EQ(s.C.count(HyperplaneKind::essential), s.C.classes.size());
  EXPECT_EQ(s.C.classes.size(), 40u);
}

TEST(Classify, Ladder) {
  Fixture s = quasiline(fx::ladder(), 12);
  EXPECT_EQ(s.C.count(HyperplaneKind::trivial), 1u);
  EXPECT_EQ(s.C.count(HyperplaneKind::half_essential), 0u);
  EXPECT_EQ(s.C.count(HyperplaneKind::essential) + 1, s.C.classes.size());
}

TEST(Classify, CombPendantsAreHalfEssential) {
  Fixture s = quasiline(fx::comb(), 12);
  const HyperplaneData& H = s.Q.metric().hyperplanes();
  std::size_t pendants = 0;
  for (const auto& c : s.C.classes) {
    const Eid e = H.dual_edges[c.id].front();
    const bool pendant = s.ball->proj_edge[e] == 1;
    EXPECT_EQ(c.kind, pendant ? HyperplaneKind::half_essential : HyperplaneKind::essential);
    if (!pendant) continue;
    ++pendants;
    // the shallow side is the leaf
    auto shallow = window_halfspace(s.Q, c.id, *c.shallow_side);
    ASSERT_EQ(shallow.size(), 1u);
    EXPECT_EQ(s.ball->base->vertex_ids[s.ball->proj_vertex[shallow.front()]], "t");
  }
  EXPECT_GT(pendants, 0u);
}

TEST(Classify, StableUnderWindowGrowth) {
  for (auto make : {fx::line, fx::ladder, fx::comb}) {
    Fixture small = quasiline(make(), 12), big = quasiline(make(), 24);
    const HyperplaneData& Hs = small.Q.metric().hyperplanes();
    const HyperplaneData& Hb = big.Q.metric().hyperplanes();
    for (const auto& c : small.C.classes) {
      const Eid e = Hs.dual_edges[c.id].front();  // edge ids agree across radii
      EXPECT_EQ(big.C.of(Hb.of_edge[e]).kind, c.kind) << make().name;
    }
  }
}

TEST(Constants, Line) {
  Fixture s = quasiline(fx::line(), 20);
  QuasilineConstants K = quasiline_constants(s.Q, s.C);
  EXPECT_EQ(K.D, 0);
  EXPECT_EQ(K.K, 0);
  EXPECT_EQ(K.d, 3);
  EXPECT_EQ(K.N, 1);
  EXPECT_EQ(K.M, 5);
  EXPECT_EQ(K.h, 0);
  EXPECT_EQ(K.n, 6);
  EXPECT_EQ(K.B0, 120);
}

TEST(Constants, LadderAndComb) {
  Fixture l = quasiline(fx::ladder(), 12);
  QuasilineConstants KL = quasiline_constants(l.Q, l.C);
  EXPECT_EQ(KL.D, 1);
  EXPECT_EQ(KL.h, 1);
  EXPECT_EQ(KL.n, 2 * KL.d);
  EXPECT_GT(KL.d * KL.phi_length, 3 * KL.D + 2);
  EXPECT_EQ(KL.M, (KL.d + 2) * KL.N);

  Fixture c = quasiline(fx::comb(), 12);
  EXPECT_EQ(quasiline_constants(c.Q, c.C).K, 1);
}

TEST(Constants, SeparationByDTranslates) {
  for (auto make : {fx::line, fx::ladder, fx::comb}) {
    Fixture s = quasiline(make(), 16);
    QuasilineConstants K = quasiline_constants(s.Q, s.C);
    const HyperplaneData& H = s.Q.metric().hyperplanes();
    auto window = window_hyperplanes(s.Q);
    for (const auto& c : s.C.classes) {
      if (c.kind != HyperplaneKind::essential) continue;
      auto hd = orbit_member(s.Q, s.C, c.id, K.d);
      if (!hd) continue;
      EXPECT_NE(*hd, c.id);
      EXPECT_FALSE(H.cross(c.id, *hd));
      for (auto j : window)
        if (H.cross(j, c.id) && H.cross(j, *hd)) {
          EXPECT_EQ(s.C.of(j).kind, HyperplaneKind::trivial);
        }
    }
  }
}

TEST(Constants, OverlapGrowsAtMostLinearly) {
  for (auto make : {fx::line, fx::ladder, fx::comb}) {
    Fixture s = quasiline(make(), 16);
    QuasilineConstants K = quasiline_constants(s.Q, s.C);
    for (auto r : s.C.reps) {
      if (s.C.of(r).kind != HyperplaneKind::essential) continue;
      for (long k = 1; k <= 6; ++k)
        for (long sign : {1L, -1L}) {
          if (!orbit_member(s.Q, s.C, r, sign * k)) continue;
          EXPECT_LE(overlap_diameter(s.Q, s.C, r, sign * k), k * K.N) << make().name << " k=" << sign * k;
        }
    }
  }
}

TEST(Constants, FarCrossingsPropagate) {
  oracle::Gen gen(31);
  for (auto make : {fx::line, fx::ladder, fx::comb}) {
    Fixture s = quasiline(make(), 40);
    QuasilineConstants K = quasiline_constants(s.Q, s.C);
    for (int trial = 0; trial < 30; ++trial) {
      Vid p = gen.vertex(s.ball->size()), q = gen.vertex(s.ball->size());
      Geodesic g = s.Q.metric().geodesic(p, q);
      std::set<std::uint32_t> crossed(g.crossed.begin(), g.crossed.end());
      const long len = g.length();
      for (long i = 0; i < len; ++i) {
        const auto h = g.crossed[i];
        if (s.C.of(h).kind != HyperplaneKind::essential) continue;
        for (long k = 1; k * K.M <= std::min(i, len - 1 - i); ++k)
          for (long sign : {1L, -1L}) {
            auto hk = orbit_member(s.Q, s.C, h, sign * k);
            ASSERT_TRUE(hk) << "window too short";
            EXPECT_TRUE(crossed.count(*hk)) << make().name;
          }
      }
    }
  }
}

TEST(Block, LineUnions) {
  Fixture s = quasiline(fx::line(), 30);
  std::uint32_t h = s.Q.metric().hyperplanes().of_edge[0];
  BlockCheck b = block_check(s.Q, s.C, h, 10);
  EXPECT_TRUE(b.ok());
  EXPECT_EQ(b.C.size(), 3u);
  ASSERT_EQ(b.union_equals_hull.size(), 11u);
  for (bool ok : b.union_equals_hull) EXPECT_TRUE(ok);
  EXPECT_GT(b.sandwich_samples, 0u);
  BlockCheck zero = block_check(s.Q, s.C, h, 0);
  EXPECT_TRUE(zero.ok());
}

TEST(Block, LadderHypothesisRejected) {
  Fixture s = quasiline(fx::ladder(), 12);
  std::uint32_t essential = kNone;
  for (auto r : s.C.reps)
    if (s.C.of(r).kind == HyperplaneKind::essential) essential = r;
  ASSERT_NE(essential, kNone);
  auto witness = block_hypothesis_witness(s.Q, s.C, essential);
  ASSERT_TRUE(witness);
  EXPECT_EQ(s.C.of(*witness).kind, HyperplaneKind::trivial);
  EXPECT_THROW(block_check(s.Q, s.C, essential, 3), PreconditionError);
}

TEST(Fellow, LineContract) {
  Fixture s = quasiline(fx::line(), 400);
  QuasilineConstants K = quasiline_constants(s.Q, s.C);
  Geodesic g = orbit_segment(s.Q, 360);
  FellowTravelResult f = fellow_travel(s.Q, s.C, K, s.Q.window, g, 120);
  EXPECT_TRUE(f.ok());
  EXPECT_GT(f.gamma_hat.length(), 120);
  EXPECT_GT(f.l, 3);
  EXPECT_TRUE(oracle::is_convex(oracle::all_pairs(*s.ball->complex), f.translates_union));
  EXPECT_THROW(fellow_travel(s.Q, s.C, K, s.Q.window, orbit_segment(s.Q, 359), 120), PreconditionError);
  EXPECT_THROW(fellow_travel(s.Q, s.C, K, s.Q.window, g, 119), PreconditionError);
}

TEST(Fellow, LadderTrivialCrossingRejected) {
  Fixture s = quasiline(fx::ladder(), 12);
  QuasilineConstants K = quasiline_constants(s.Q, s.C);
  const HyperplaneData& H = s.Q.metric().hyperplanes();
  const std::uint32_t rung = s.C.trivial.front();
  const Eid e = H.dual_edges[rung].front();
  Geodesic g = s.Q.metric().geodesic(s.ball->complex->edges[e].tail, s.ball->complex->edges[e].head);
  EXPECT_THROW(fellow_travel(s.Q, s.C, K, s.Q.window, g, K.B0), PreconditionError);
}

TEST(Commensurate, LineShifts) {
  auto B = develop_ball(fx::shared(fx::line()), 0, 40);
  auto all = all_of(*B);
  Automorphism shift = lift_loop(*B, {{0, false}});
  Quasiline Q1 = validate_quasiline(B, all, shift);
  Quasiline Q2 = validate_quasiline(B, all, power(shift, 2));
  CommensurationResult r = commensurate(Q1, Q2, 10);
  EXPECT_TRUE(r.related);
  EXPECT_EQ(r.d1, 2);
  EXPECT_EQ(r.d2, 1);
  EXPECT_EQ(r.d1 * Q1.phi_length, r.d2 * Q2.phi_length);
  Quasiline Q3 = validate_quasiline(B, all, inverse(shift));
  r = commensurate(Q1, Q3, 10);
  EXPECT_TRUE(r.related);
  EXPECT_EQ(r.d1, 1);
  EXPECT_EQ(r.d2, -1);
}

TEST(Commensurate, ParallelRails) {
  auto B = develop_ball(fx::shared(fx::ladder()), 0, 20);
  std::vector<Vid> bottom, top;
  for (Vid v = 0; v < B->size(); ++v) (B->proj_vertex[v] == 0 ? bottom : top).push_back(v);
  Automorphism shift = lift_loop(*B, {{0, false}});
  Quasiline Q1 = validate_quasiline(B, bottom, shift), Q2 = validate_quasiline(B, top, shift);
  CommensurationResult r = commensurate(Q1, Q2, 5);
  EXPECT_TRUE(r.decided);
  EXPECT_TRUE(r.related);
  EXPECT_EQ(r.d1, 1);
  EXPECT_EQ(r.d2, 1);
}

TEST(Commensurate, SmallProjectionMakesNoClaim) {
  auto B = develop_ball(fx::shared(fx::line()), 0, 20);
  Quasiline Q = validate_quasiline(B, all_of(*B), lift_loop(*B, {{0, false}}));
  CommensurationResult r = commensurate(Q, Q, 1000);
  EXPECT_FALSE(r.decided);
  EXPECT_FALSE(r.related);
}

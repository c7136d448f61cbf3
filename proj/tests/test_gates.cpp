#include <gtest/gtest.h>

#include "mf/gates/gates.hpp"
#include "oracles.hpp"

using namespace mf;
namespace fx = mf::fixtures;

namespace {

struct Grid {
  CubeComplex X = fx::grid(2, 2);
  std::shared_ptr<MedianSpace> M = median_space(X);

  Vid v(int i, int j) const { return X.vertex(fx::grid_id(i, j)); }
  ConvexSet column(int i) const { return convex_set(*M, {v(i, 0), v(i, 1), v(i, 2)}); }
  ConvexSet row(int j) const { return convex_set(*M, {v(0, j), v(1, j), v(2, j)}); }
  ConvexSet set(std::vector<Vid> S) const { return convex_set(*M, std::move(S)); }
  std::vector<Vid> sorted(std::vector<Vid> S) const {
    std::sort(S.begin(), S.end());
    return S;
  }
};

}  // namespace

TEST(Gate, Examples) {
  Grid g;
  EXPECT_EQ(gate_vertex(*g.M, g.v(2, 1), g.column(0)).image, g.v(0, 1));
  EXPECT_EQ(gate_vertex(*g.M, g.v(2, 1), g.column(0)).distance, 2);
  EXPECT_EQ(gate_vertex(*g.M, g.v(0, 2), g.column(0)).image, g.v(0, 2));
  std::vector<Vid> all(g.X.vertex_count());
  std::iota(all.begin(), all.end(), 0);
  EXPECT_EQ(gate_vertex(*g.M, g.v(1, 1), g.set(all)).image, g.v(1, 1));
}

TEST(Gate, RejectsNonConvexAndEmpty) {
  Grid g;
  EXPECT_THROW(g.set({}), PreconditionError);
  EXPECT_THROW(g.set({g.v(0, 0), g.v(1, 1)}), PreconditionError);
}

TEST(Pitchfork, Examples) {
  Grid g;
  EXPECT_EQ(pitchfork(*g.M, g.column(0), g.column(2)).members, g.column(0).members);
  EXPECT_EQ(pitchfork(*g.M, g.row(1), g.row(1)).members, g.row(1).members);
  EXPECT_EQ(pitchfork(*g.M, g.row(0), g.column(2)).members, std::vector<Vid>{g.v(2, 0)});
}

TEST(PitchforkChain, Examples) {
  Grid g;
  EXPECT_EQ(pitchfork_chain(*g.M, {g.column(1)}).members, g.column(1).members);
  EXPECT_EQ(pitchfork_chain(*g.M, {g.column(0), g.column(2), g.row(0)}).members, std::vector<Vid>{g.v(0, 0)});
  EXPECT_EQ(pitchfork_chain(*g.M, {g.row(2), g.row(2), g.row(2)}).members, g.row(2).members);
  EXPECT_THROW(pitchfork_chain(*g.M, {}), PreconditionError);
}

TEST(Bridge, ParallelColumns) {
  Grid g;
  BridgeDecomposition d = bridge(*g.M, g.column(0), g.column(2));
  EXPECT_TRUE(d.verified());
  EXPECT_EQ(d.bridge.size(), 9u);
  EXPECT_EQ(d.a, g.v(0, 0));
  EXPECT_EQ(d.b, g.v(2, 0));
  EXPECT_EQ(d.connector.members, g.row(0).members);
  EXPECT_EQ(d.witness.size(), 9u);
  // every grid vertex (i, j) splits as ((i, 0), (0, j))
  for (int i = 0; i <= 2; ++i)
    for (int j = 0; j <= 2; ++j) {
      auto [c, a] = d.witness.at(g.v(i, j));
      EXPECT_EQ(c, g.v(i, 0));
      EXPECT_EQ(a, g.v(0, j));
    }
}

TEST(Bridge, IntersectingSets) {
  Grid g;
  BridgeDecomposition d = bridge(*g.M, g.column(1), g.row(1));
  EXPECT_TRUE(d.verified());
  EXPECT_EQ(d.connector.size(), 1u);
  EXPECT_EQ(d.a, g.v(1, 1));
}

TEST(Bridge, ColumnAndCorner) {
  Grid g;
  BridgeDecomposition d = bridge(*g.M, g.column(0), g.set({g.v(2, 0)}));
  EXPECT_TRUE(d.verified());
  EXPECT_EQ(d.a_side.members, std::vector<Vid>{g.v(0, 0)});
  EXPECT_EQ(d.connector.members, g.row(0).members);
}

TEST(Bridge, HyperplaneLawsAgainstOracle) {
  Grid g;
  auto H = oracle::halfspaces(g.X);
  const auto& HD = g.M->hyperplanes();
  auto A = g.column(0), B = g.set({g.v(2, 1), g.v(2, 2)});
  BridgeDecomposition d = bridge(*g.M, A, B);
  for (std::size_t c = 0; c < H.classes.size(); ++c) {
    std::uint32_t h = HD.of_edge[H.classes[c].front()];
    const bool crosses_ab = H.crosses(c, d.a_side.members);
    EXPECT_EQ(crosses_ab, H.crosses(c, A.members) && H.crosses(c, B.members)) << h;
    EXPECT_EQ(H.separates(c, d.a_side.members, d.b_side.members), H.separates(c, A.members, B.members)) << h;
  }
}

#pragma once

// Reference computations for the tests. They use only the 1-skeleton and the raw
// square/cube corner data, never MedianSpace, HyperplaneData or the gate code.

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "mf/cubecore/ball.hpp"
#include "mf/io/fixtures.hpp"

namespace oracle {

using mf::CubeComplex;
using mf::Vid;
using Dist = std::vector<std::vector<int>>;

inline std::vector<std::vector<Vid>> adjacency(const CubeComplex& X, const std::vector<bool>* removed = nullptr) {
  std::vector<std::vector<Vid>> adj(X.vertex_count());
  for (std::size_t e = 0; e < X.edge_count(); ++e) {
    if (removed && (*removed)[e]) continue;
    const auto& ed = X.edges[e];
    if (ed.tail == ed.head) continue;
    adj[ed.tail].push_back(ed.head);
    adj[ed.head].push_back(ed.tail);
  }
  return adj;
}

inline std::vector<int> bfs(const std::vector<std::vector<Vid>>& adj, Vid s) {
  std::vector<int> d(adj.size(), -1);
  std::deque<Vid> q{s};
  d[s] = 0;
  while (!q.empty()) {
    Vid u = q.front();
    q.pop_front();
    for (Vid w : adj[u])
      if (d[w] < 0) {
        d[w] = d[u] + 1;
        q.push_back(w);
      }
  }
  return d;
}

inline Dist all_pairs(const CubeComplex& X) {
  auto adj = adjacency(X);
  Dist d;
  for (Vid v = 0; v < X.vertex_count(); ++v) d.push_back(bfs(adj, v));
  return d;
}

// Edge classes under "opposite sides of a square" (and parallel edges of a 3-cube).
inline std::vector<std::vector<std::size_t>> parallel_classes(const CubeComplex& X) {
  std::vector<std::size_t> parent(X.edge_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };
  auto glue = [&](const mf::Cube& q) {
    const int per_axis = 1 << (q.dim - 1);
    for (int axis = 0; axis < q.dim; ++axis)
      for (int r = 1; r < per_axis; ++r) unite(q.edges[axis * per_axis].edge, q.edges[axis * per_axis + r].edge);
  };
  for (const auto& q : X.squares) glue(q);
  for (const auto& q : X.cubes3) glue(q);
  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t e = 0; e < X.edge_count(); ++e) by_root[find(e)].push_back(e);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [r, es] : by_root) out.push_back(std::move(es));
  return out;
}

// For each edge class: the component label of every vertex once the class is deleted.
struct Halfspaces {
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::vector<int>> side;  // side[c][v]
  std::vector<int> components;         // component count per class

  bool crosses(std::size_t c, const std::vector<Vid>& S) const {
    for (Vid v : S)
      if (side[c][v] != side[c][S.front()]) return true;
    return false;
  }
  bool separates(std::size_t c, const std::vector<Vid>& A, const std::vector<Vid>& B) const {
    if (crosses(c, A) || crosses(c, B)) return false;
    return side[c][A.front()] != side[c][B.front()];
  }
  int separating_count(Vid p, Vid q) const {
    int n = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) n += side[c][p] != side[c][q];
    return n;
  }
};

inline Halfspaces halfspaces(const CubeComplex& X) {
  Halfspaces H;
  H.classes = parallel_classes(X);
  for (const auto& cls : H.classes) {
    std::vector<bool> removed(X.edge_count(), false);
    for (auto e : cls) removed[e] = true;
    auto adj = adjacency(X, &removed);
    std::vector<int> label(X.vertex_count(), -1);
    int comps = 0;
    for (Vid v = 0; v < X.vertex_count(); ++v) {
      if (label[v] >= 0) continue;
      auto d = bfs(adj, v);
      for (Vid w = 0; w < X.vertex_count(); ++w)
        if (d[w] >= 0) label[w] = comps;
      ++comps;
    }
    H.side.push_back(std::move(label));
    H.components.push_back(comps);
  }
  return H;
}

inline std::vector<Vid> interval(const Dist& d, Vid p, Vid q) {
  std::vector<Vid> out;
  for (Vid v = 0; v < d.size(); ++v)
    if (d[p][v] + d[v][q] == d[p][q]) out.push_back(v);
  return out;
}

// Smallest set containing S and closed under geodesic intervals.
inline std::vector<Vid> hull(const Dist& d, std::vector<Vid> S) {
  std::set<Vid> in(S.begin(), S.end());
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Vid> cur(in.begin(), in.end());
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (std::size_t j = i + 1; j < cur.size(); ++j)
        for (Vid v : interval(d, cur[i], cur[j])) grew |= in.insert(v).second;
  }
  return {in.begin(), in.end()};
}

inline bool is_convex(const Dist& d, const std::vector<Vid>& S) { return hull(d, S).size() == S.size(); }

// Nearest vertex of Y to x, if unique.
inline std::optional<Vid> nearest(const Dist& d, Vid x, const std::vector<Vid>& Y) {
  int best = std::numeric_limits<int>::max();
  std::optional<Vid> arg;
  bool tie = false;
  for (Vid y : Y) {
    if (d[x][y] < best) {
      best = d[x][y];
      arg = y;
      tie = false;
    } else if (d[x][y] == best) {
      tie = true;
    }
  }
  if (tie) return std::nullopt;
  return arg;
}

inline std::vector<Vid> gate_image(const Dist& d, const std::vector<Vid>& A, const std::vector<Vid>& B) {
  std::set<Vid> out;
  for (Vid b : B) out.insert(*nearest(d, b, A));
  return {out.begin(), out.end()};
}

inline int diameter(const Dist& d, const std::vector<Vid>& S) {
  int best = 0;
  for (Vid a : S)
    for (Vid b : S) best = std::max(best, d[a][b]);
  return best;
}

// Hand-rolled generators, seeded per test.
struct Gen {
  std::mt19937 rng;
  explicit Gen(unsigned seed) : rng(seed) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  Vid vertex(std::size_t n) { return static_cast<Vid>(uniform(0, static_cast<int>(n) - 1)); }

  std::vector<Vid> sample(std::size_t n, int k) {
    std::vector<Vid> out;
    for (int i = 0; i < k; ++i) out.push_back(vertex(n));
    return out;
  }

  // Hull of a few random points; small sets are favoured so pitchforks are not trivial.
  std::vector<Vid> convex(const Dist& d, int max_points = 3) { return hull(d, sample(d.size(), uniform(1, max_points))); }

  // A developed ball of one of the CAT(0)-covered fixtures at a random basepoint and radius.
  std::shared_ptr<mf::Ball> window(bool with_klein = true) {
    using namespace mf::fixtures;
    std::shared_ptr<const CubeComplex> X;
    int R = 0;
    switch (uniform(0, with_klein ? 3 : 2)) {
      case 0: X = shared(torus()), R = uniform(1, 5); break;
      case 1: X = shared(ladder()), R = uniform(2, 9); break;
      case 2: X = shared(comb()), R = uniform(2, 9); break;
      default: X = shared(klein()), R = uniform(1, 5); break;
    }
    return mf::develop_ball(X, vertex(X->vertex_count()), R);
  }
};

}  // namespace oracle

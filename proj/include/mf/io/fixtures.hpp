#pragma once

#include <memory>
#include <string>

#include "mf/cubecore/complex.hpp"

// Small complexes used throughout the examples and tests.
namespace mf::fixtures {

inline std::string grid_id(int i, int j) { return "(" + std::to_string(i) + "," + std::to_string(j) + ")"; }

// m x n grid of unit squares with vertices (i,j), 0 <= i <= m, 0 <= j <= n.
inline CubeComplex grid(int m, int n) {
  if (m < 0 || n < 0) throw InputError("grid dimensions must be nonnegative");
  ComplexBuilder b("grid" + std::to_string(m) + std::to_string(n));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= m; ++i) b.add_vertex(grid_id(i, j));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= m; ++i) {
      if (i < m) b.add_edge(b.vertex(grid_id(i, j)), b.vertex(grid_id(i + 1, j)));
      if (j < n) b.add_edge(b.vertex(grid_id(i, j)), b.vertex(grid_id(i, j + 1)));
    }
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < m; ++i)
      b.add_square({b.vertex(grid_id(i, j)), b.vertex(grid_id(i + 1, j)), b.vertex(grid_id(i, j + 1)),
                    b.vertex(grid_id(i + 1, j + 1))});
  return b.build();
}

// Circle with one vertex o and one loop a; its universal cover is the line.
inline CubeComplex line() {
  ComplexBuilder b("line");
  Vid o = b.add_vertex("o");
  b.add_edge(o, o);
  return b.build();
}

// Circle of length k (vertices c0..c{k-1}, edge i from ci to c{i+1}).
inline CubeComplex cycle(int k, const std::string& name = "cycle") {
  if (k < 1) throw InputError("cycle length must be positive");
  ComplexBuilder b(name);
  for (int i = 0; i < k; ++i) b.add_vertex("c" + std::to_string(i));
  for (int i = 0; i < k; ++i) b.add_edge(static_cast<Vid>(i), static_cast<Vid>((i + 1) % k));
  return b.build({.normalize_edges = false});
}

// Two circles a (at p) and a' (at q) joined by a rung r and one square; the cover is a strip.
inline CubeComplex ladder() {
  ComplexBuilder b("ladder");
  Vid p = b.add_vertex("p"), q = b.add_vertex("q");
  Eid a = b.add_edge(p, p), a2 = b.add_edge(q, q), r = b.add_edge(p, q);
  b.add_square({p, p, q, q}, std::array<EdgeRef, 4>{EdgeRef{a, false}, {a2, false}, {r, false}, {r, false}});
  return b.build();
}

// Circle with a pendant edge; the cover is a line with a pendant edge at every vertex.
inline CubeComplex comb() {
  ComplexBuilder b("comb");
  Vid o = b.add_vertex("o"), t = b.add_vertex("t");
  b.add_edge(o, o);
  b.add_edge(o, t);
  return b.build();
}

// One vertex, loops a and b, one square with boundary a b a^-1 b^-1.
inline CubeComplex torus() {
  ComplexBuilder b("torus");
  Vid w = b.add_vertex("w");
  Eid a = b.add_edge(w, w), c = b.add_edge(w, w);
  b.add_square({w, w, w, w}, std::array<EdgeRef, 4>{EdgeRef{a, false}, {a, false}, {c, false}, {c, false}});
  return b.build();
}

// As the torus, but the top side runs against a: the a-hyperplane is one-sided.
inline CubeComplex klein() {
  ComplexBuilder b("klein");
  Vid w = b.add_vertex("w");
  Eid a = b.add_edge(w, w), c = b.add_edge(w, w);
  b.add_square({w, w, w, w}, std::array<EdgeRef, 4>{EdgeRef{a, false}, {a, true}, {c, false}, {c, false}});
  return b.build();
}

// k x k grid with opposite sides identified: a torus with k^2 vertices.
inline CubeComplex subdivided_torus(int k) {
  if (k < 3) throw InputError("subdivided torus needs k >= 3 to stay simplicial");
  ComplexBuilder b("torus" + std::to_string(k));
  auto id = [&](int i, int j) { return grid_id((i % k + k) % k, (j % k + k) % k); };
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) b.add_vertex(id(i, j));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) {
      b.add_edge(b.vertex(id(i, j)), b.vertex(id(i + 1, j)));
      b.add_edge(b.vertex(id(i, j)), b.vertex(id(i, j + 1)));
    }
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i)
      b.add_square({b.vertex(id(i, j)), b.vertex(id(i + 1, j)), b.vertex(id(i, j + 1)), b.vertex(id(i + 1, j + 1))});
  return b.build();
}

// Wedge of two circles (loops a, b at one vertex).
inline CubeComplex rose2() {
  ComplexBuilder b("rose2");
  Vid v = b.add_vertex("v");
  b.add_edge(v, v);
  b.add_edge(v, v);
  return b.build();
}

// Connected double cover of the rose: x0, x1; the a-lifts swap them, each carries a b-loop.
inline CubeComplex rose2_double_cover() {
  ComplexBuilder b("rose2x2");
  Vid x0 = b.add_vertex("x0"), x1 = b.add_vertex("x1");
  b.add_edge(x0, x1);
  b.add_edge(x1, x0);
  b.add_edge(x0, x0);
  b.add_edge(x1, x1);
  return b.build({.normalize_edges = false});
}

// Three squares sharing a corner pairwise along edges, with no 3-cube: the corner's
// link is an empty triangle.
inline CubeComplex three_squares_corner() {
  ComplexBuilder b("corner");
  Vid o = b.add_vertex("o"), x = b.add_vertex("x"), y = b.add_vertex("y"), z = b.add_vertex("z");
  Vid xy = b.add_vertex("xy"), yz = b.add_vertex("yz"), xz = b.add_vertex("xz");
  for (Vid v : {x, y, z}) b.add_edge(o, v);
  b.add_edge(x, xy);
  b.add_edge(y, xy);
  b.add_edge(y, yz);
  b.add_edge(z, yz);
  b.add_edge(x, xz);
  b.add_edge(z, xz);
  b.add_square({o, x, y, xy});
  b.add_square({o, y, z, yz});
  b.add_square({o, x, z, xz});
  return b.build();
}

// A single square glued twice along its boundary (a 2-sphere made of two squares).
inline CubeComplex doubled_square() {
  ComplexBuilder b("doubled");
  Vid v00 = b.add_vertex("00"), v10 = b.add_vertex("10"), v01 = b.add_vertex("01"), v11 = b.add_vertex("11");
  b.add_edge(v00, v10);
  b.add_edge(v01, v11);
  b.add_edge(v00, v01);
  b.add_edge(v10, v11);
  b.add_square({v00, v10, v01, v11});
  b.add_square({v00, v10, v01, v11});
  return b.build({.normalize_edges = true, .allow_duplicate_cells = true});
}

inline std::shared_ptr<const CubeComplex> shared(CubeComplex X) {
  return std::make_shared<const CubeComplex>(std::move(X));
}

}  // namespace mf::fixtures

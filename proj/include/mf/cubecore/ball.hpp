#pragma once

#include <cstdlib>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mf/cubecore/cat0.hpp"
#include "mf/cubecore/npc.hpp"

namespace mf {

inline std::size_t cell_budget() {
  if (const char* s = std::getenv("MF_CELL_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(s, &end, 10);
    if (end != s && v > 0) return static_cast<std::size_t>(v);
  }
  return 2'000'000;
}

// Radius-R ball of the universal cover of a base complex, developed breadth first.
// Vertex u sits over proj_vertex[u]; ports[u][k] is the neighbour reached through the
// k-th edge end at proj_vertex[u] (kNone when that neighbour lies outside the ball).
class Ball {
 public:
  std::shared_ptr<CubeComplex> complex;
  std::shared_ptr<const CubeComplex> base;
  Vid base_vertex = 0;
  int radius = 0;
  std::vector<Vid> proj_vertex;
  std::vector<Eid> proj_edge;
  std::vector<Cid> proj_square;
  std::vector<Cid> proj_cube;
  std::vector<int> level;
  std::vector<std::vector<Vid>> ports;

  Vid basepoint() const { return 0; }
  std::size_t size() const { return proj_vertex.size(); }
  bool on_boundary(Vid v) const { return level[v] == radius; }
  // Vertices whose closed cubes all lie in the ball, so their links map isomorphically.
  bool interior(Vid v) const { return level[v] <= radius - std::max(base->dim(), 1); }

  std::vector<Vid> boundary() const {
    std::vector<Vid> out;
    for (Vid v = 0; v < size(); ++v)
      if (on_boundary(v)) out.push_back(v);
    return out;
  }

  Vid port(Vid u, EdgeEnd base_end) const { return ports[u][base->port_of(base_end)]; }

  // Median structure of the window; computed on first use.
  const MedianSpace& metric() const {
    if (!space_) space_ = median_space(*complex);
    return *space_;
  }
  bool has_metric() const {
    if (space_) return true;
    Cat0Result r = analyze_cat0(*complex);
    if (r.ok) space_ = r.space;
    return r.ok;
  }

 private:
  mutable std::shared_ptr<MedianSpace> space_;
};

namespace detail {

// Lift of a cube with corner 0 at ball vertex u; empty when a corner is missing.
inline std::optional<Cube> lift_cube(const Ball& B, const std::vector<std::vector<Eid>>& port_edge, const Cube& q,
                                     Vid u) {
  Cube out;
  out.dim = q.dim;
  out.corners[0] = u;
  for (int c = 1; c < q.corner_count(); ++c) {
    int low = 0;
    while (!((c >> low) & 1)) ++low;
    int from = c & ~(1 << low);
    EdgeEnd x = cube_edge_end(q, from, low);
    Vid w = B.port(out.corners[from], x);
    if (w == kNone) return std::nullopt;
    out.corners[c] = w;
  }
  for (int s = 0; s < q.edge_count(); ++s) {
    auto [a, b] = slot_corners(q.dim, s);
    (void)b;
    int axis = 0;
    while (((a ^ b) >> axis) != 1) ++axis;
    EdgeEnd x = cube_edge_end(q, a, axis);
    Eid e = port_edge[out.corners[a]][B.base->port_of(x)];
    if (e == kNone) return std::nullopt;
    out.edges[s] = {e, q.edges[s].reversed};
  }
  return out;
}

}  // namespace detail

inline std::shared_ptr<Ball> develop_ball(std::shared_ptr<const CubeComplex> X, Vid base_vertex, int R,
                                          std::size_t budget = cell_budget()) {
  if (R < 0) throw InputError("radius must be nonnegative");
  if (base_vertex >= X->vertex_count()) throw InputError("basepoint not in complex");
  auto B = std::make_shared<Ball>();
  B->base = X;
  B->base_vertex = base_vertex;
  B->radius = R;
  B->complex = std::make_shared<CubeComplex>();
  CubeComplex& C = *B->complex;
  C.name = X->name + "~" + X->vertex_ids[base_vertex] + "/" + std::to_string(R);
  C.dim_cap = X->dim_cap;
  std::vector<std::vector<Eid>> port_edge;
  auto charge = [&] {
    if (C.vertex_count() + C.edges.size() + C.squares.size() + C.cubes3.size() > budget)
      throw BudgetError("ball of radius " + std::to_string(R) + " exceeds the cell budget of " +
                        std::to_string(budget) + " (set MF_CELL_BUDGET)");
  };
  auto new_vertex = [&](Vid p, int lvl) {
    Vid v = static_cast<Vid>(B->proj_vertex.size());
    B->proj_vertex.push_back(p);
    B->level.push_back(lvl);
    B->ports.emplace_back(X->ends_at(p).size(), kNone);
    port_edge.emplace_back(X->ends_at(p).size(), kNone);
    C.vertex_ids.push_back(std::to_string(v));
    charge();
    return v;
  };
  auto connect = [&](Vid u, EdgeEnd x, Vid w) {
    Eid e = static_cast<Eid>(C.edges.size());
    C.edges.push_back(x.end == 0 ? Edge{u, w} : Edge{w, u});
    B->proj_edge.push_back(x.edge);
    B->ports[u][X->port_of(x)] = w;
    port_edge[u][X->port_of(x)] = e;
    EdgeEnd back = CubeComplex::opposite(x);
    B->ports[w][X->port_of(back)] = u;
    port_edge[w][X->port_of(back)] = e;
    charge();
  };
  // squares at each base vertex, keyed by the unordered pair of link nodes they join
  auto links = compute_links(*X);

  new_vertex(base_vertex, 0);
  std::size_t level_start = 0;
  for (int L = 0; L < R; ++L) {
    const std::size_t level_end = B->size();
    for (Vid u = static_cast<Vid>(level_start); u < level_end; ++u) {
      const Vid pu = B->proj_vertex[u];
      const auto& ends = X->ends_at(pu);
      for (std::uint32_t k = 0; k < ends.size(); ++k) {
        if (B->ports[u][k] != kNone) continue;
        const EdgeEnd x = ends[k];
        Vid found = kNone;
        // an existing vertex one level up is the far corner of a square on a down edge
        for (std::uint32_t j = 0; j < ends.size() && found == kNone; ++j) {
          Vid d = B->ports[u][j];
          if (d == kNone || B->level[d] != L - 1) continue;
          const EdgeEnd y = ends[j];
          auto it = links[pu].edges.find(ordered_pair(x.key(), y.key()));
          if (it == links[pu].edges.end()) continue;
          for (auto [s, corner] : it->second) {
            const Cube& q = X->squares[s];
            int ax = cube_edge_end(q, corner, 0) == x ? 0 : 1;
            int c_d = corner ^ (1 << (1 - ax));
            Vid c = B->port(d, cube_edge_end(q, c_d, ax));
            if (c == kNone || B->level[c] != L) continue;
            Vid w = B->port(c, cube_edge_end(q, c_d ^ (1 << ax), 1 - ax));
            if (w != kNone && B->level[w] == L + 1) {
              found = w;
              break;
            }
          }
        }
        if (found == kNone) found = new_vertex(X->far_vertex(x), L + 1);
        connect(u, x, found);
      }
    }
    level_start = level_end;
  }
  for (Vid u = 0; u < B->size(); ++u) {
    for (Cid s = 0; s < X->squares.size(); ++s) {
      if (X->squares[s].corners[0] != B->proj_vertex[u]) continue;
      if (auto q = detail::lift_cube(*B, port_edge, X->squares[s], u)) {
        C.squares.push_back(*q);
        B->proj_square.push_back(s);
        charge();
      }
    }
    for (Cid s = 0; s < X->cubes3.size(); ++s) {
      if (X->cubes3[s].corners[0] != B->proj_vertex[u]) continue;
      if (auto q = detail::lift_cube(*B, port_edge, X->cubes3[s], u)) {
        C.cubes3.push_back(*q);
        B->proj_cube.push_back(s);
        charge();
      }
    }
  }
  C.finalize();
  return B;
}

// A deck transformation restricted to a ball; image[v] is kNone where the image
// leaves the window or could not be reached.
struct Automorphism {
  const Ball* ball = nullptr;
  std::vector<Vid> image;

  Vid operator()(Vid v) const { return image[v]; }
  std::size_t defined_count() const {
    std::size_t n = 0;
    for (Vid w : image)
      if (w != kNone) ++n;
    return n;
  }
  bool is_identity() const {
    for (Vid v = 0; v < image.size(); ++v)
      if (image[v] != kNone && image[v] != v) return false;
    return true;
  }
};

inline Automorphism deck_search(const Ball& B, Vid from, Vid to) {
  if (from >= B.size() || to >= B.size()) throw InputError("seed vertex not in ball");
  if (B.proj_vertex[from] != B.proj_vertex[to])
    throw PreconditionError("seed vertices lie over different base vertices");
  Automorphism phi{&B, std::vector<Vid>(B.size(), kNone)};
  std::vector<Vid> preimage(B.size(), kNone);
  phi.image[from] = to;
  preimage[to] = from;
  std::deque<Vid> q{from};
  while (!q.empty()) {
    Vid u = q.front();
    q.pop_front();
    Vid gu = phi.image[u];
    for (std::size_t k = 0; k < B.ports[u].size(); ++k) {
      Vid w = B.ports[u][k], gw = B.ports[gu][k];
      if (w == kNone || gw == kNone) continue;
      if (phi.image[w] == kNone) {
        if (preimage[gw] != kNone) throw InconsistencyError("seed does not extend to an injective deck map");
        phi.image[w] = gw;
        preimage[gw] = w;
        q.push_back(w);
      } else if (phi.image[w] != gw) {
        throw InconsistencyError("seed does not extend consistently through the ball");
      }
    }
  }
  return phi;
}

// Re-extends from the defined vertex closest to the basepoint so composites keep the
// largest domain the window allows.
inline Automorphism compose(const Automorphism& g, const Automorphism& h) {
  const Ball& B = *h.ball;
  Vid best = kNone;
  for (Vid v = 0; v < B.size(); ++v) {
    Vid hv = h.image[v];
    if (hv == kNone || g.image[hv] == kNone) continue;
    if (best == kNone || B.level[v] < B.level[best]) best = v;
  }
  if (best == kNone) throw BudgetError("composite deck map leaves the window");
  return deck_search(B, best, g.image[h.image[best]]);
}

inline Automorphism inverse(const Automorphism& g) {
  const Ball& B = *g.ball;
  for (Vid v = 0; v < B.size(); ++v)
    if (g.image[v] != kNone) return deck_search(B, g.image[v], v);
  throw BudgetError("deck map has empty domain");
}

inline Automorphism identity_map(const Ball& B) { return deck_search(B, 0, 0); }

inline Automorphism power(const Automorphism& g, long k) {
  if (k == 0) return identity_map(*g.ball);
  const Automorphism step = k > 0 ? g : inverse(g);
  const Ball& B = *g.ball;
  // track the orbit of the most central vertex with a defined image
  Vid x0 = kNone;
  for (Vid v = 0; v < B.size(); ++v)
    if (step.image[v] != kNone && (x0 == kNone || B.level[v] < B.level[x0])) x0 = v;
  if (x0 == kNone) throw BudgetError("deck map has empty domain");
  Vid x = x0;
  for (long i = 0; i < std::labs(k); ++i) {
    x = step.image[x];
    if (x == kNone) throw BudgetError("power " + std::to_string(k) + " leaves the window");
  }
  return deck_search(B, x0, x);
}

inline std::vector<int> bfs_distances(const CubeComplex& X, Vid s) {
  std::vector<int> d(X.vertex_count(), -1);
  std::deque<Vid> q{s};
  d[s] = 0;
  while (!q.empty()) {
    Vid u = q.front();
    q.pop_front();
    for (EdgeEnd x : X.ends_at(u)) {
      Vid w = X.far_vertex(x);
      if (d[w] < 0) {
        d[w] = d[u] + 1;
        q.push_back(w);
      }
    }
  }
  return d;
}

struct TranslationLength {
  int length = 0;
  Vid attained_at = kNone;
  bool boundary_limited = false;  // no vertex in the inner half of the ball had a defined image
};

inline TranslationLength translation_length(const Ball& B, const Automorphism& phi) {
  if (phi.is_identity()) throw PreconditionError("translation length needs a nontrivial deck map");
  TranslationLength t;
  t.length = -1;
  bool inner = false;
  for (Vid v = 0; v < B.size(); ++v) {
    if (!B.interior(v) || phi.image[v] == kNone) continue;
    int d = bfs_distances(*B.complex, v)[phi.image[v]];
    if (t.length < 0 || d < t.length) {
      t.length = d;
      t.attained_at = v;
    }
    if (2 * B.level[v] <= B.radius) inner = true;
    if (t.length == 1) break;
  }
  if (t.length < 0) throw BudgetError("deck map is undefined on the interior of the ball");
  t.boundary_limited = !inner;
  return t;
}

// Lift a word in base edges (entries "e" or "~e") from the basepoint and return the
// deck map carrying the basepoint to the lift's endpoint.
inline Automorphism lift_loop(const Ball& B, const std::vector<std::pair<Eid, bool>>& word) {
  const CubeComplex& X = *B.base;
  Vid u = B.basepoint();
  for (auto [e, rev] : word) {
    if (e >= X.edge_count()) throw InputError("loop word names a missing edge");
    EdgeEnd x{e, static_cast<std::uint8_t>(rev ? 1 : 0)};
    if (X.vertex_at(x) != B.proj_vertex[u]) throw InputError("loop word is not a path in the base complex");
    u = B.port(u, x);
    if (u == kNone) throw BudgetError("loop word leaves the ball");
  }
  if (B.proj_vertex[u] != B.base_vertex) throw InputError("loop word does not close up");
  return deck_search(B, B.basepoint(), u);
}

}  // namespace mf

#pragma once

#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "mf/cubecore/maps.hpp"
#include "mf/cubecore/npc.hpp"

namespace mf {

// Edge of the underlying graph. The edge space maps to the vertex space of
// `minus_vertex` by `minus` and to that of `plus_vertex` by `plus`.
struct GogEdge {
  std::string name;
  std::uint32_t minus_vertex = 0;
  std::uint32_t plus_vertex = 0;
};

struct GraphOfComplexes {
  std::vector<std::string> vertex_names;
  std::vector<GogEdge> edges;
  std::vector<std::shared_ptr<const CubeComplex>> vertex_spaces;
  std::vector<std::shared_ptr<const CubeComplex>> edge_spaces;
  std::vector<CombinatorialMap> minus;
  std::vector<CombinatorialMap> plus;
  std::vector<std::string> notes;  // normalizations applied on ingest

  std::size_t vertex_count() const { return vertex_names.size(); }
  std::size_t edge_count() const { return edges.size(); }

  // Attaching map of edge e into the space of its endpoint on `side` (0 = minus, 1 = plus).
  const CombinatorialMap& attachment(std::uint32_t e, int side) const { return side == 0 ? minus[e] : plus[e]; }
  std::uint32_t endpoint(std::uint32_t e, int side) const {
    return side == 0 ? edges[e].minus_vertex : edges[e].plus_vertex;
  }

  // (edge, side) pairs whose endpoint on that side is v, in edge order.
  std::vector<std::pair<std::uint32_t, int>> incident(std::uint32_t v) const {
    std::vector<std::pair<std::uint32_t, int>> out;
    for (std::uint32_t e = 0; e < edges.size(); ++e) {
      if (edges[e].minus_vertex == v) out.emplace_back(e, 0);
      if (edges[e].plus_vertex == v) out.emplace_back(e, 1);
    }
    return out;
  }
};

// Unvalidated description, as read from a file or assembled by hand. Maps refer to
// the spaces by index and are completed during build_gog.
struct GogInput {
  struct EdgeInput {
    std::string name;
    std::string minus_vertex, plus_vertex;
    std::shared_ptr<const CubeComplex> space;
    std::vector<Vid> minus_vertices, plus_vertices;
    std::vector<EdgeRef> minus_edges, plus_edges;
  };
  std::vector<std::string> vertex_names;
  std::vector<std::shared_ptr<const CubeComplex>> vertex_spaces;
  std::vector<EdgeInput> edges;
};

inline CombinatorialMap identity_combinatorial_map(std::shared_ptr<const CubeComplex> X) {
  CombinatorialMap f;
  f.source = X;
  f.target = X;
  f.vertex_map.resize(X->vertex_count());
  std::iota(f.vertex_map.begin(), f.vertex_map.end(), 0);
  for (Eid e = 0; e < X->edge_count(); ++e) f.edge_map.push_back({e, false});
  complete_map(f);
  return f;
}

namespace detail {

inline void require_npc(const CubeComplex& X, const std::string& role) {
  CubeComplex copy = X;
  NpcReport r = validate_npc(copy);
  if (!r.ok) throw InputError(role + " '" + X.name + "' is not nonpositively curved");
}

inline CombinatorialMap attach(std::shared_ptr<const CubeComplex> source, std::shared_ptr<const CubeComplex> target,
                               std::vector<Vid> vertices, std::vector<EdgeRef> edges, const std::string& what) {
  CombinatorialMap f;
  f.source = std::move(source);
  f.target = std::move(target);
  f.vertex_map = std::move(vertices);
  f.edge_map = std::move(edges);
  complete_map(f);
  LocalIsometryResult li = check_local_isometry(f);
  if (!li.ok)
    throw InputError(what + " is not a local isometry (" + li.kind + " at edge-space vertex '" +
                     f.source->vertex_ids[li.vertex] + "')");
  return f;
}

}  // namespace detail

// Validates every space and attaching map. A loop edge of the graph is subdivided: a
// midpoint vertex carrying a copy of the edge space is inserted, and the two halves
// attach to it by the identity.
inline GraphOfComplexes build_gog(const GogInput& in) {
  if (in.vertex_names.size() != in.vertex_spaces.size()) throw InputError("every graph vertex needs a space");
  GraphOfComplexes G;
  G.vertex_names = in.vertex_names;
  for (std::size_t v = 0; v < in.vertex_spaces.size(); ++v) {
    if (!in.vertex_spaces[v]) throw InputError("dangling vertex space for '" + in.vertex_names[v] + "'");
    detail::require_npc(*in.vertex_spaces[v], "vertex space");
    G.vertex_spaces.push_back(in.vertex_spaces[v]);
  }
  auto vertex_index = [&](const std::string& name) -> std::uint32_t {
    for (std::uint32_t v = 0; v < G.vertex_names.size(); ++v)
      if (G.vertex_names[v] == name) return v;
    throw InputError("edge references unknown graph vertex '" + name + "'");
  };
  for (const auto& e : in.edges) {
    if (!e.space) throw InputError("dangling edge space for edge '" + e.name + "'");
    detail::require_npc(*e.space, "edge space");
    const std::uint32_t u = vertex_index(e.minus_vertex), w = vertex_index(e.plus_vertex);
    CombinatorialMap fm = detail::attach(e.space, G.vertex_spaces[u], e.minus_vertices, e.minus_edges,
                                         "minus attachment of '" + e.name + "'");
    CombinatorialMap fp = detail::attach(e.space, G.vertex_spaces[w], e.plus_vertices, e.plus_edges,
                                         "plus attachment of '" + e.name + "'");
    if (u != w) {
      G.edges.push_back({e.name, u, w});
      G.edge_spaces.push_back(e.space);
      G.minus.push_back(std::move(fm));
      G.plus.push_back(std::move(fp));
      continue;
    }
    const std::uint32_t mid = static_cast<std::uint32_t>(G.vertex_names.size());
    G.vertex_names.push_back(e.name + ".mid");
    G.vertex_spaces.push_back(e.space);
    CombinatorialMap id = identity_combinatorial_map(e.space);
    G.edges.push_back({e.name + ".0", u, mid});
    G.edge_spaces.push_back(e.space);
    G.minus.push_back(std::move(fm));
    G.plus.push_back(id);
    G.edges.push_back({e.name + ".1", mid, w});
    G.edge_spaces.push_back(e.space);
    G.minus.push_back(id);
    G.plus.push_back(std::move(fp));
    G.notes.push_back("loop edge '" + e.name + "' subdivided at '" + e.name + ".mid'");
  }
  return G;
}

// Vertex spaces joined by edge-space cylinders: each edge-space vertex y gives an edge
// from minus(y) to plus(y), each edge-space edge a square, each square a 3-cube.
inline CubeComplex total_space(const GraphOfComplexes& G) {
  std::size_t dim_cap = 0;
  for (const auto& X : G.vertex_spaces) dim_cap = std::max<std::size_t>(dim_cap, X->dim_cap);
  ComplexBuilder b("total", static_cast<int>(std::max<std::size_t>(dim_cap, 3)));
  std::vector<Vid> vertex_offset;
  std::vector<Eid> edge_offset;
  Eid edges_so_far = 0;
  for (std::uint32_t v = 0; v < G.vertex_count(); ++v) {
    const CubeComplex& X = *G.vertex_spaces[v];
    vertex_offset.push_back(0);
    for (Vid x = 0; x < X.vertex_count(); ++x) {
      Vid id = b.add_vertex(G.vertex_names[v] + ":" + X.vertex_ids[x]);
      if (x == 0) vertex_offset.back() = id;
    }
  }
  for (std::uint32_t v = 0; v < G.vertex_count(); ++v) {
    const CubeComplex& X = *G.vertex_spaces[v];
    edge_offset.push_back(edges_so_far);
    for (const Edge& e : X.edges) b.add_edge(vertex_offset[v] + e.tail, vertex_offset[v] + e.head);
    edges_so_far += static_cast<Eid>(X.edge_count());
  }
  auto lift = [&](std::uint32_t v, const Cube& q) {
    std::vector<Vid> corners;
    std::vector<EdgeRef> refs;
    for (int c = 0; c < q.corner_count(); ++c) corners.push_back(vertex_offset[v] + q.corners[c]);
    for (int s = 0; s < q.edge_count(); ++s) refs.push_back({edge_offset[v] + q.edges[s].edge, q.edges[s].reversed});
    b.add_cell(q.dim, corners, refs);
  };
  for (std::uint32_t v = 0; v < G.vertex_count(); ++v) {
    for (const Cube& q : G.vertex_spaces[v]->squares) lift(v, q);
    for (const Cube& q : G.vertex_spaces[v]->cubes3) lift(v, q);
  }
  for (std::uint32_t e = 0; e < G.edge_count(); ++e) {
    const CubeComplex& Y = *G.edge_spaces[e];
    const std::uint32_t u = G.edges[e].minus_vertex, w = G.edges[e].plus_vertex;
    const CombinatorialMap &fm = G.minus[e], &fp = G.plus[e];
    std::vector<Eid> rung;
    for (Vid y = 0; y < Y.vertex_count(); ++y) {
      b.add_edge(vertex_offset[u] + fm.vertex_map[y], vertex_offset[w] + fp.vertex_map[y]);
      rung.push_back(edges_so_far++);
    }
    auto side = [&](const CombinatorialMap& f, std::uint32_t v, EdgeRef r) {
      EdgeRef img = f.edge_map[r.edge];
      return EdgeRef{edge_offset[v] + img.edge, img.reversed != r.reversed};
    };
    for (Eid f = 0; f < Y.edge_count(); ++f) {
      const Edge& ed = Y.edges[f];
      b.add_cell(2,
                 {vertex_offset[u] + fm.vertex_map[ed.tail], vertex_offset[u] + fm.vertex_map[ed.head],
                  vertex_offset[w] + fp.vertex_map[ed.tail], vertex_offset[w] + fp.vertex_map[ed.head]},
                 std::vector<EdgeRef>{side(fm, u, {f, false}), side(fp, w, {f, false}), {rung[ed.tail], false},
                                      {rung[ed.head], false}});
    }
    if (!Y.cubes3.empty()) throw InputError("edge spaces of dimension 3 would need 4-cubes in the total space");
    for (const Cube& q : Y.squares) {
      // axes 0 and 1 from the square, axis 2 across the cylinder
      std::vector<Vid> corners(8);
      std::vector<EdgeRef> refs(12);
      for (int c = 0; c < 8; ++c) {
        Vid y = q.corners[c & 3];
        corners[c] = (c & 4) ? vertex_offset[w] + fp.vertex_map[y] : vertex_offset[u] + fm.vertex_map[y];
      }
      for (int axis = 0; axis < 2; ++axis)
        for (int c = 0; c < 8; ++c) {
          if ((c >> axis) & 1) continue;
          EdgeRef r = q.edges[edge_slot(2, axis, c & 3)];
          refs[edge_slot(3, axis, c)] = (c & 4) ? side(fp, w, r) : side(fm, u, r);
        }
      for (int c = 0; c < 4; ++c) refs[edge_slot(3, 2, c)] = {rung[q.corners[c]], false};
      b.add_cell(3, corners, refs);
    }
  }
  CubeComplex T;
  try {
    T = b.build();
  } catch (const InputError& err) {
    throw InconsistencyError(std::string("gluing the total space failed: ") + err.what());
  }
  return T;
}

}  // namespace mf

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mf/cubecore/npc.hpp"

namespace mf {

// Cellular map between cube complexes. An edge image with edge == kNone collapses the
// edge to a vertex; such maps are structurally valid but never local isometries.
struct CombinatorialMap {
  std::shared_ptr<const CubeComplex> source;
  std::shared_ptr<const CubeComplex> target;
  std::vector<Vid> vertex_map;
  std::vector<EdgeRef> edge_map;
  std::vector<Cid> square_map;  // kNone for squares whose image degenerates
  std::vector<Cid> cube_map;

  EdgeEnd image(EdgeEnd x) const {
    const EdgeRef& r = edge_map[x.edge];
    return {r.edge, static_cast<std::uint8_t>(x.end ^ (r.reversed ? 1 : 0))};
  }
};

namespace detail {

inline Cube image_cube(const CombinatorialMap& f, const Cube& q) {
  Cube out;
  out.dim = q.dim;
  for (int c = 0; c < q.corner_count(); ++c) out.corners[c] = f.vertex_map[q.corners[c]];
  for (int s = 0; s < q.edge_count(); ++s) {
    EdgeRef r = f.edge_map[q.edges[s].edge];
    out.edges[s] = {r.edge, q.edges[s].reversed != r.reversed};
  }
  return out;
}

inline std::map<std::vector<std::uint64_t>, Cid> cell_index(const std::vector<Cube>& cells) {
  std::map<std::vector<std::uint64_t>, Cid> idx;
  for (Cid c = 0; c < cells.size(); ++c) idx.emplace(cube_key(normalize_cube(cells[c])), c);
  return idx;
}

}  // namespace detail

// Checks that vertices and edges commute with the boundary, then derives the images
// of squares and 3-cubes. Throws InputError on a malformed map.
inline void complete_map(CombinatorialMap& f) {
  const CubeComplex& S = *f.source;
  const CubeComplex& T = *f.target;
  if (f.vertex_map.size() != S.vertex_count()) throw InputError("map does not assign every source vertex");
  if (f.edge_map.size() != S.edge_count()) throw InputError("map does not assign every source edge");
  for (Vid v : f.vertex_map)
    if (v >= T.vertex_count()) throw InputError("map sends a vertex outside the target");
  bool collapses = false;
  for (Eid e = 0; e < S.edge_count(); ++e) {
    Vid a = f.vertex_map[S.edges[e].tail], b = f.vertex_map[S.edges[e].head];
    const EdgeRef& r = f.edge_map[e];
    if (r.edge == kNone) {
      if (a != b) throw InputError("collapsed edge " + std::to_string(e) + " has distinct endpoint images");
      collapses = true;
      continue;
    }
    if (r.edge >= T.edge_count()) throw InputError("map sends an edge outside the target");
    const Edge& t = T.edges[r.edge];
    const bool ok = r.reversed ? (t.tail == b && t.head == a) : (t.tail == a && t.head == b);
    if (!ok) throw InputError("edge " + std::to_string(e) + " image does not match its endpoint images");
  }
  f.square_map.assign(S.squares.size(), kNone);
  f.cube_map.assign(S.cubes3.size(), kNone);
  if (collapses) return;
  auto sq = detail::cell_index(T.squares);
  for (Cid s = 0; s < S.squares.size(); ++s) {
    auto it = sq.find(cube_key(normalize_cube(detail::image_cube(f, S.squares[s]))));
    if (it == sq.end()) throw InputError("square " + std::to_string(s) + " has no image square");
    f.square_map[s] = it->second;
  }
  auto cu = detail::cell_index(T.cubes3);
  for (Cid s = 0; s < S.cubes3.size(); ++s) {
    auto it = cu.find(cube_key(normalize_cube(detail::image_cube(f, S.cubes3[s]))));
    if (it == cu.end()) throw InputError("3-cube " + std::to_string(s) + " has no image 3-cube");
    f.cube_map[s] = it->second;
  }
}

struct LocalIsometryResult {
  bool ok = true;
  std::string kind;  // collapsed_edge, not_injective, not_full
  Vid vertex = kNone;
  std::vector<EdgeEnd> ends;
};

// Local isometry: at every source vertex the link map is injective and its image is
// a full subcomplex (image ends adjacent in the target link are adjacent in the source).
inline LocalIsometryResult check_local_isometry(const CombinatorialMap& f) {
  const CubeComplex& S = *f.source;
  const CubeComplex& T = *f.target;
  for (Eid e = 0; e < S.edge_count(); ++e)
    if (f.edge_map[e].edge == kNone) return {false, "collapsed_edge", S.edges[e].tail, {{e, 0}}};
  auto sl = compute_links(S);
  auto tl = compute_links(T);
  for (Vid v = 0; v < S.vertex_count(); ++v) {
    const auto& ends = S.ends_at(v);
    std::map<EdgeEnd, EdgeEnd> seen;
    for (EdgeEnd x : ends) {
      EdgeEnd y = f.image(x);
      auto [it, fresh] = seen.emplace(y, x);
      if (!fresh) return {false, "not_injective", v, {it->second, x}};
    }
    const VertexLink& L = tl[f.vertex_map[v]];
    for (std::size_t i = 0; i < ends.size(); ++i)
      for (std::size_t j = i + 1; j < ends.size(); ++j) {
        const bool src = sl[v].adjacent(ends[i], ends[j]);
        const bool tgt = L.adjacent(f.image(ends[i]), f.image(ends[j]));
        if (tgt && !src) return {false, "not_full", v, {ends[i], ends[j]}};
      }
    for (std::size_t i = 0; i < ends.size(); ++i)
      for (std::size_t j = i + 1; j < ends.size(); ++j)
        for (std::size_t k = j + 1; k < ends.size(); ++k) {
          std::array<std::uint32_t, 3> t{f.image(ends[i]).key(), f.image(ends[j]).key(), f.image(ends[k]).key()};
          std::sort(t.begin(), t.end());
          if (!L.triangles.count(t)) continue;
          std::array<std::uint32_t, 3> s{ends[i].key(), ends[j].key(), ends[k].key()};
          std::sort(s.begin(), s.end());
          if (!sl[v].triangles.count(s)) return {false, "not_full", v, {ends[i], ends[j], ends[k]}};
        }
  }
  return {};
}

}  // namespace mf

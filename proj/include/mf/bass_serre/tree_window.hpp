#pragma once

#include <deque>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

#include "mf/bass_serre/gog.hpp"
#include "mf/cubecore/ball.hpp"
#include "mf/gates/gates.hpp"

namespace mf {

// An elevation of an edge space inside a chamber window: the connected component of
// pairs (y, x) with y an edge-space vertex and x a window vertex over its image.
struct Section {
  std::vector<std::pair<Vid, Vid>> pairs;  // breadth-first from the seed
  std::unordered_map<std::uint64_t, std::uint32_t> index;

  static std::uint64_t key(Vid y, Vid x) { return (static_cast<std::uint64_t>(y) << 32) | x; }
  bool contains(Vid y, Vid x) const { return index.count(key(y, x)) > 0; }
  std::uint32_t find(Vid y, Vid x) const {
    auto it = index.find(key(y, x));
    return it == index.end() ? kNone : it->second;
  }
  std::vector<Vid> vertices() const {
    std::vector<Vid> out;
    for (auto [y, x] : pairs) out.push_back(x);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

// Lifts the edge space through the attaching map from the seed pair, following ports.
inline Section develop_section(const Ball& B, const CombinatorialMap& f, Vid y0, Vid x0) {
  const CubeComplex& Y = *f.source;
  if (f.vertex_map[y0] != B.proj_vertex[x0]) throw PreconditionError("section seed is not over the attaching map");
  Section S;
  S.pairs.push_back({y0, x0});
  S.index.emplace(Section::key(y0, x0), 0);
  for (std::size_t i = 0; i < S.pairs.size(); ++i) {
    auto [y, x] = S.pairs[i];
    for (EdgeEnd e : Y.ends_at(y)) {
      Vid x2 = B.port(x, f.image(e));
      if (x2 == kNone) continue;
      Vid y2 = Y.far_vertex(e);
      if (S.index.emplace(Section::key(y2, x2), static_cast<std::uint32_t>(S.pairs.size())).second)
        S.pairs.push_back({y2, x2});
    }
  }
  return S;
}

struct Chamber {
  std::uint32_t gamma_vertex = 0;
  std::shared_ptr<const Ball> ball;
  int depth = 0;
  std::uint32_t parent_strip = kNone;
  std::vector<std::uint32_t> strips;  // outgoing, in enumeration order
  bool truncated = false;             // some graph edge had more elevations than the cap
};

// A strip joins an elevation in the near chamber to the matching elevation in the far
// chamber; far_of and near_of translate between the two sections pair by pair.
struct Strip {
  std::uint32_t gamma_edge = 0;
  int near_side = 0;  // which attaching map lands in the near chamber
  std::uint32_t near_chamber = 0;
  std::uint32_t far_chamber = kNone;
  Section near;
  Section far;
  std::vector<Vid> far_of;   // per near pair: far window vertex or kNone
  std::vector<Vid> near_of;  // per far pair: near window vertex or kNone

  std::optional<Vid> to_far(Vid x) const {
    for (std::size_t i = 0; i < near.pairs.size(); ++i)
      if (near.pairs[i].second == x && far_of[i] != kNone) return far_of[i];
    return std::nullopt;
  }
};

struct TreeWindow {
  std::shared_ptr<const GraphOfComplexes> gog;
  std::uint32_t base_vertex = 0;
  int depth = 0;
  int radius = 0;
  int coset_cap = 0;
  std::vector<Chamber> chambers;
  std::vector<Strip> strips;

  bool truncated() const {
    for (const auto& c : chambers)
      if (c.truncated) return true;
    return false;
  }
};

namespace detail {

// Walks the edge space from the seed in both sections at once, recording which far
// vertex each near pair corresponds to.
inline void match_sections(const Ball& near_ball, const Ball& far_ball, const CombinatorialMap& fn,
                           const CombinatorialMap& ff, Strip& s) {
  const CubeComplex& Y = *fn.source;
  s.far_of.assign(s.near.pairs.size(), kNone);
  s.near_of.assign(s.far.pairs.size(), kNone);
  s.far_of[0] = s.far.pairs[0].second;
  s.near_of[0] = s.near.pairs[0].second;
  std::deque<std::uint32_t> q{0};
  while (!q.empty()) {
    std::uint32_t i = q.front();
    q.pop_front();
    auto [y, xn] = s.near.pairs[i];
    Vid xf = s.far_of[i];
    for (EdgeEnd e : Y.ends_at(y)) {
      Vid yn = Y.far_vertex(e);
      Vid xn2 = near_ball.port(xn, fn.image(e));
      Vid xf2 = far_ball.port(xf, ff.image(e));
      if (xn2 == kNone || xf2 == kNone) continue;
      std::uint32_t j = s.near.find(yn, xn2), k = s.far.find(yn, xf2);
      if (j == kNone || k == kNone || s.far_of[j] != kNone) continue;
      s.far_of[j] = xf2;
      s.near_of[k] = xn2;
      q.push_back(j);
    }
  }
}

}  // namespace detail

// Truncated Bass-Serre tree: chambers are developed vertex-space balls, strips are
// elevations of edge spaces. Chambers are created breadth first; out of each chamber
// the elevations of every incident edge space are enumerated by the creation index of
// their seed window vertex and capped at coset_cap per graph edge.
inline TreeWindow tree_window(std::shared_ptr<const GraphOfComplexes> G, std::uint32_t base_vertex, int depth,
                              int radius, int coset_cap) {
  if (base_vertex >= G->vertex_count()) throw InputError("base vertex not in graph");
  if (depth < 0 || radius < 0 || coset_cap < 1) throw InputError("depth, radius and coset cap must be nonnegative");
  TreeWindow W;
  W.gog = G;
  W.base_vertex = base_vertex;
  W.depth = depth;
  W.radius = radius;
  W.coset_cap = coset_cap;
  std::map<std::pair<std::uint32_t, Vid>, std::shared_ptr<const Ball>> cache;
  auto ball_at = [&](std::uint32_t v, Vid centre) {
    auto& slot = cache[{v, centre}];
    if (!slot) slot = develop_ball(G->vertex_spaces[v], centre, radius);
    return slot;
  };
  W.chambers.push_back({base_vertex, ball_at(base_vertex, 0), 0, kNone, {}, false});
  for (std::size_t ci = 0; ci < W.chambers.size(); ++ci) {
    if (W.chambers[ci].depth >= depth) continue;
    const std::uint32_t v = W.chambers[ci].gamma_vertex;
    std::shared_ptr<const Ball> B = W.chambers[ci].ball;
    for (auto [e, side] : G->incident(v)) {
      const CombinatorialMap& f = G->attachment(e, side);
      const CombinatorialMap& g = G->attachment(e, 1 - side);
      const CubeComplex& Y = *G->edge_spaces[e];
      std::unordered_map<std::uint64_t, bool> covered;
      const std::uint32_t ps = W.chambers[ci].parent_strip;
      if (ps != kNone && W.strips[ps].gamma_edge == e)
        for (auto [y, x] : W.strips[ps].far.pairs) covered[Section::key(y, x)] = true;
      int made = 0;
      bool capped = false;
      for (Vid x = 0; x < B->size() && !capped; ++x) {
        for (Vid y = 0; y < Y.vertex_count(); ++y) {
          if (f.vertex_map[y] != B->proj_vertex[x] || covered.count(Section::key(y, x))) continue;
          if (made == coset_cap) {
            capped = true;
            break;
          }
          Strip s;
          s.gamma_edge = e;
          s.near_side = side;
          s.near_chamber = static_cast<std::uint32_t>(ci);
          s.near = develop_section(*B, f, y, x);
          for (auto [yy, xx] : s.near.pairs) covered[Section::key(yy, xx)] = true;
          const std::uint32_t w = G->endpoint(e, 1 - side);
          std::shared_ptr<const Ball> F = ball_at(w, g.vertex_map[y]);
          s.far = develop_section(*F, g, y, F->basepoint());
          detail::match_sections(*B, *F, f, g, s);
          const std::uint32_t sid = static_cast<std::uint32_t>(W.strips.size());
          s.far_chamber = static_cast<std::uint32_t>(W.chambers.size());
          W.chambers.push_back({w, F, W.chambers[ci].depth + 1, sid, {}, false});
          W.strips.push_back(std::move(s));
          W.chambers[ci].strips.push_back(sid);
          ++made;
        }
      }
      if (capped) W.chambers[ci].truncated = true;
    }
  }
  return W;
}

// Alternating chamber/strip path leaving the root; stored as its strips.
struct TreePath {
  std::vector<std::uint32_t> strips;
  int length() const { return static_cast<int>(strips.size()); }
};

// All outward paths of the given length from a chamber, in enumeration order.
inline std::vector<TreePath> paths_from(const TreeWindow& W, std::uint32_t chamber, int length) {
  std::vector<TreePath> out;
  if (length <= 0) return out;
  std::vector<std::uint32_t> cur;
  auto rec = [&](auto&& self, std::uint32_t c) -> void {
    if (static_cast<int>(cur.size()) == length) {
      out.push_back({cur});
      return;
    }
    for (std::uint32_t s : W.chambers[c].strips) {
      cur.push_back(s);
      self(self, W.strips[s].far_chamber);
      cur.pop_back();
    }
  };
  rec(rec, chamber);
  return out;
}

inline void check_path(const TreeWindow& W, const TreePath& rho) {
  if (rho.strips.empty()) throw PreconditionError("path must have length at least 1");
  for (std::size_t j = 0; j < rho.strips.size(); ++j) {
    if (rho.strips[j] >= W.strips.size()) throw InputError("path names a strip outside the window");
    if (j > 0 && W.strips[rho.strips[j]].near_chamber != W.strips[rho.strips[j - 1]].far_chamber)
      throw InputError("path strips are not consecutive");
  }
}

// Graph edge sequence of a path; paths with equal types are candidates for one orbit.
inline std::vector<std::uint32_t> path_type(const TreeWindow& W, const TreePath& rho) {
  std::vector<std::uint32_t> t;
  for (std::uint32_t s : rho.strips) t.push_back(W.strips[s].gamma_edge * 2 + W.strips[s].near_side);
  return t;
}

}  // namespace mf

#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "mf/cubecore/cat0.hpp"

namespace mf {

// A vertex set known to be convex, with its halfspace profile cached.
struct ConvexSet {
  std::vector<Vid> members;  // sorted
  MedianSpace::Profile profile;

  bool contains(Vid v) const { return std::binary_search(members.begin(), members.end(), v); }
  std::size_t size() const { return members.size(); }
};

inline ConvexSet convex_set(const MedianSpace& M, std::vector<Vid> S) {
  if (S.empty()) throw PreconditionError("convex set must be nonempty");
  std::sort(S.begin(), S.end());
  S.erase(std::unique(S.begin(), S.end()), S.end());
  ConvexSet C{std::move(S), {}};
  C.profile = M.profile(C.members);
  std::size_t count = 0;
  for (Vid v = 0; v < M.size(); ++v)
    if (M.in_hull(C.profile, v)) ++count;
  if (count != C.members.size()) throw PreconditionError("vertex set is not convex");
  return C;
}

inline ConvexSet hull_set(const MedianSpace& M, const std::vector<Vid>& S) {
  ConvexSet C{M.hull(S), {}};
  C.profile = M.profile(C.members);
  return C;
}

struct GateResult {
  Vid source = kNone;
  Vid image = kNone;
  int distance = 0;
};

// The gate keeps x's side of every hyperplane that crosses Y and takes Y's side of
// every other hyperplane.
inline GateResult gate_vertex(const MedianSpace& M, Vid x, const ConvexSet& Y) {
  const Sig& s = M.signature(x);
  Sig keep, g;
  std::set_intersection(s.begin(), s.end(), Y.profile.any.begin(), Y.profile.any.end(), std::back_inserter(keep));
  std::set_union(keep.begin(), keep.end(), Y.profile.all.begin(), Y.profile.all.end(), std::back_inserter(g));
  auto v = M.vertex_of(g);
  if (!v) throw InconsistencyError("gate signature has no vertex; the target set is not convex");
  return {x, *v, M.distance(x, *v)};
}

// Π_A(B): the image of B under the gate map onto A.
inline ConvexSet pitchfork(const MedianSpace& M, const ConvexSet& A, const ConvexSet& B) {
  std::vector<Vid> img;
  img.reserve(B.size());
  for (Vid b : B.members) img.push_back(gate_vertex(M, b, A).image);
  std::sort(img.begin(), img.end());
  img.erase(std::unique(img.begin(), img.end()), img.end());
  ConvexSet out{std::move(img), {}};
  out.profile = M.profile(out.members);
  return out;
}

// A1 ⊤ (A2 ⊤ (... ⊤ An)).
inline ConvexSet pitchfork_chain(const MedianSpace& M, const std::vector<ConvexSet>& sets) {
  if (sets.empty()) throw PreconditionError("pitchfork chain needs at least one set");
  ConvexSet acc = sets.back();
  for (std::size_t i = sets.size() - 1; i-- > 0;) acc = pitchfork(M, sets[i], acc);
  return acc;
}

// Hyperplanes with vertices of the set on both sides.
inline Sig crossing_hyperplanes(const ConvexSet& S) { return MedianSpace::crossing(S.profile); }

// Hyperplanes with P and Q entirely on opposite sides.
inline Sig separating_hyperplanes(const ConvexSet& P, const ConvexSet& Q) {
  Sig a, b, out;
  std::set_difference(P.profile.all.begin(), P.profile.all.end(), Q.profile.any.begin(), Q.profile.any.end(),
                      std::back_inserter(a));
  std::set_difference(Q.profile.all.begin(), Q.profile.all.end(), P.profile.any.begin(), P.profile.any.end(),
                      std::back_inserter(b));
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

struct BridgeDecomposition {
  ConvexSet a_side;     // A ⊤ B
  ConvexSet b_side;     // B ⊤ A
  ConvexSet connector;  // Hull{a, b}
  ConvexSet bridge;     // Hull(A⊤B ∪ B⊤A)
  Vid a = kNone, b = kNone;
  // product witness: bridge vertex -> (connector vertex, A⊤B vertex)
  std::map<Vid, std::pair<Vid, Vid>> witness;

  bool product_bijective = false;
  bool product_isometric = false;
  bool sides_isometric = false;   // the gate map A⊤B -> B⊤A preserves distances and is onto
  bool crossing_law = false;      // H crosses A⊤B iff it crosses A and B
  bool separation_law = false;    // H separates A⊤B from B⊤A iff it separates A from B

  bool verified() const {
    return product_bijective && product_isometric && sides_isometric && crossing_law && separation_law;
  }
};

inline BridgeDecomposition bridge(const MedianSpace& M, const ConvexSet& A, const ConvexSet& B) {
  BridgeDecomposition r;
  r.a_side = pitchfork(M, A, B);
  r.b_side = pitchfork(M, B, A);
  r.a = r.a_side.members.front();
  r.b = gate_vertex(M, r.a, B).image;
  r.connector = hull_set(M, {r.a, r.b});
  std::vector<Vid> both = r.a_side.members;
  both.insert(both.end(), r.b_side.members.begin(), r.b_side.members.end());
  r.bridge = hull_set(M, both);

  std::map<std::pair<Vid, Vid>, Vid> seen;
  bool injective = true;
  for (Vid v : r.bridge.members) {
    std::pair<Vid, Vid> w{gate_vertex(M, v, r.connector).image, gate_vertex(M, v, r.a_side).image};
    r.witness.emplace(v, w);
    if (!seen.emplace(w, v).second) injective = false;
  }
  r.product_bijective = injective && r.bridge.size() == r.connector.size() * r.a_side.size();
  r.product_isometric = true;
  for (auto i = r.witness.begin(); i != r.witness.end() && r.product_isometric; ++i)
    for (auto j = std::next(i); j != r.witness.end(); ++j) {
      int lhs = M.distance(i->first, j->first);
      int rhs = M.distance(i->second.first, j->second.first) + M.distance(i->second.second, j->second.second);
      if (lhs != rhs) {
        r.product_isometric = false;
        break;
      }
    }

  std::vector<Vid> image;
  for (Vid x : r.a_side.members) image.push_back(gate_vertex(M, x, r.b_side).image);
  std::vector<Vid> sorted = image;
  std::sort(sorted.begin(), sorted.end());
  r.sides_isometric = std::unique(sorted.begin(), sorted.end()) == sorted.end() && sorted == r.b_side.members;
  for (std::size_t i = 0; i < image.size() && r.sides_isometric; ++i)
    for (std::size_t j = i + 1; j < image.size(); ++j)
      if (M.distance(r.a_side.members[i], r.a_side.members[j]) != M.distance(image[i], image[j])) {
        r.sides_isometric = false;
        break;
      }

  Sig ca = crossing_hyperplanes(A), cb = crossing_hyperplanes(B), both_cross;
  std::set_intersection(ca.begin(), ca.end(), cb.begin(), cb.end(), std::back_inserter(both_cross));
  r.crossing_law = crossing_hyperplanes(r.a_side) == both_cross;
  r.separation_law = separating_hyperplanes(r.a_side, r.b_side) == separating_hyperplanes(A, B);
  return r;
}

}  // namespace mf

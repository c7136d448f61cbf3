#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mf/cubecore/ball.hpp"
#include "mf/gates/gates.hpp"

namespace mf {

// A convex window of a developed ball together with a deck map φ acting on it by
// translation. The window is finite, so φ-orbits are chains that run off its ends.
struct Quasiline {
  std::shared_ptr<const Ball> ball;
  ConvexSet window;
  Automorphism phi;
  int phi_length = 0;
  std::vector<Vid> fundamental_domain;  // chain heads: window vertices with no φ-preimage in the window
  std::vector<std::vector<Vid>> chains;
  int period_count = 0;
  Vid x0 = kNone;  // middle of the first chain, used to track the two ends

  const MedianSpace& metric() const { return ball->metric(); }
  bool in_window(Vid v) const { return v != kNone && window.contains(v); }
};

inline constexpr int kMinPeriods = 8;

inline Quasiline validate_quasiline(std::shared_ptr<const Ball> ball, const std::vector<Vid>& window,
                                    const Automorphism& phi, int min_periods = kMinPeriods) {
  if (phi.ball != ball.get()) throw PreconditionError("deck map belongs to a different ball");
  if (phi.is_identity()) throw PreconditionError("phi is trivial");
  Quasiline Q;
  Q.ball = ball;
  const MedianSpace& M = ball->metric();
  Q.window = convex_set(M, window);
  Q.phi = phi;
  Automorphism inv = inverse(phi);
  for (Vid v : Q.window.members) {
    if (!ball->interior(v)) continue;
    for (Vid w : {phi.image[v], inv.image[v]})
      if (w != kNone && ball->interior(w) && !Q.window.contains(w))
        throw PreconditionError("window is not invariant under phi");
  }
  for (Vid v : Q.window.members) {
    Vid p = inv.image[v];
    if (Q.in_window(p)) continue;
    std::vector<Vid> chain{v};
    for (Vid w = phi.image[v]; Q.in_window(w); w = phi.image[w]) {
      if (w == v) throw PreconditionError("phi has a finite orbit in the window");
      chain.push_back(w);
    }
    Q.fundamental_domain.push_back(v);
    Q.chains.push_back(std::move(chain));
  }
  std::size_t covered = 0, longest = 0, shortest = SIZE_MAX;
  for (const auto& c : Q.chains) {
    covered += c.size();
    longest = std::max(longest, c.size());
    shortest = std::min(shortest, c.size());
  }
  if (Q.chains.empty() || covered != Q.window.size())
    throw PreconditionError("phi permutes part of the window in cycles");
  if (2 * shortest < longest) throw PreconditionError("window is not a union of translates of one fundamental domain");
  Q.period_count = static_cast<int>(shortest) - 1;
  if (Q.period_count < min_periods)
    throw PreconditionError("window realizes only " + std::to_string(Q.period_count) + " periods; at least " +
                            std::to_string(min_periods) + " are needed");
  Q.x0 = Q.chains.front()[Q.chains.front().size() / 2];
  Q.phi_length = translation_length(*ball, phi).length;
  return Q;
}

enum class HyperplaneKind { trivial, half_essential, essential, undecided };

inline const char* kind_name(HyperplaneKind k) {
  switch (k) {
    case HyperplaneKind::trivial: return "trivial";
    case HyperplaneKind::half_essential: return "half_essential";
    case HyperplaneKind::essential: return "essential";
    default: return "undecided";
  }
}

struct HyperplaneClass {
  std::uint32_t id = 0;
  HyperplaneKind kind = HyperplaneKind::undecided;
  std::uint32_t rep = 0;  // orbit representative nearest x0
  long offset = 0;        // id = φ^offset(rep)
  // Side value (as in MedianSpace::side) of the forward end for essential hyperplanes,
  // of the deep side for half-essential ones.
  bool plus_side = false;
  std::optional<bool> shallow_side;
  std::optional<int> diam;  // dual-graph diameter in the window; empty for trivial
};

struct Classification {
  std::vector<HyperplaneClass> classes;
  std::map<std::uint32_t, std::size_t> index;
  std::vector<std::uint32_t> reps;
  std::vector<std::uint32_t> trivial;
  std::vector<std::uint32_t> undecided;

  const HyperplaneClass& of(std::uint32_t h) const {
    auto it = index.find(h);
    if (it == index.end()) throw PreconditionError("hyperplane " + std::to_string(h) + " does not meet the window");
    return classes[it->second];
  }
  bool has(std::uint32_t h) const { return index.count(h) > 0; }
  std::size_t count(HyperplaneKind k) const {
    std::size_t n = 0;
    for (const auto& c : classes)
      if (c.kind == k) ++n;
    return n;
  }
};

namespace detail {

inline std::optional<Eid> edge_between(const CubeComplex& X, Vid u, Vid w) {
  for (EdgeEnd x : X.ends_at(u))
    if (X.far_vertex(x) == w) return x.edge;
  return std::nullopt;
}

// A dual edge of h inside the window whose endpoints both have images under g.
inline std::optional<Eid> mapped_dual_edge(const Quasiline& Q, std::uint32_t h, const Automorphism& g) {
  const CubeComplex& X = *Q.ball->complex;
  for (Eid e : Q.metric().hyperplanes().dual_edges[h]) {
    Vid u = X.edges[e].tail, w = X.edges[e].head;
    if (Q.in_window(u) && Q.in_window(w) && Q.in_window(g.image[u]) && Q.in_window(g.image[w])) return e;
  }
  return std::nullopt;
}

inline std::optional<std::uint32_t> image_hyperplane(const Quasiline& Q, std::uint32_t h, const Automorphism& g) {
  auto e = mapped_dual_edge(Q, h, g);
  if (!e) return std::nullopt;
  const CubeComplex& X = *Q.ball->complex;
  auto f = edge_between(X, g.image[X.edges[*e].tail], g.image[X.edges[*e].head]);
  if (!f) throw InconsistencyError("deck map does not preserve adjacency");
  return Q.metric().hyperplanes().of_edge[*f];
}

// Side of g(h) containing g of the h-side `side`.
inline bool image_side(const Quasiline& Q, std::uint32_t h, bool side, const Automorphism& g, std::uint32_t gh) {
  const CubeComplex& X = *Q.ball->complex;
  Eid e = *mapped_dual_edge(Q, h, g);
  Vid u = X.edges[e].tail, w = X.edges[e].head;
  Vid on = Q.metric().side(u, h) == side ? u : w;
  return Q.metric().side(g.image[on], gh);
}

inline int set_diameter(const MedianSpace& M, const std::vector<Vid>& S) { return M.diameter(S); }

}  // namespace detail

// Hyperplanes meeting the window, i.e. with window vertices on both sides.
inline std::vector<std::uint32_t> window_hyperplanes(const Quasiline& Q) {
  Sig c = MedianSpace::crossing(Q.window.profile);
  return {c.begin(), c.end()};
}

inline std::vector<Vid> window_halfspace(const Quasiline& Q, std::uint32_t h, bool side) {
  std::vector<Vid> out;
  for (Vid v : Q.window.members)
    if (Q.metric().side(v, h) == side) out.push_back(v);
  return out;
}

inline std::vector<Vid> window_carrier(const Quasiline& Q, std::uint32_t h) {
  std::vector<Vid> out;
  for (Vid v : carrier_vertices(*Q.ball->complex, Q.metric().hyperplanes(), h))
    if (Q.in_window(v)) out.push_back(v);
  return out;
}

inline int window_hyperplane_diameter(const Quasiline& Q, std::uint32_t h) {
  const CubeComplex& X = *Q.ball->complex;
  auto d = hyperplane_diameter(X, Q.metric().hyperplanes(), h,
                               [&](Eid e) { return Q.in_window(X.edges[e].tail) && Q.in_window(X.edges[e].head); });
  if (!d) throw InconsistencyError("hyperplane is disconnected inside a convex window");
  return *d;
}

// Forward (sign > 0) or backward orbit points φ^j(x0), j = 1, 2, ... inside the window.
inline std::vector<Vid> end_orbit(const Quasiline& Q, int sign, const Automorphism& inv) {
  std::vector<Vid> out;
  const Automorphism& g = sign > 0 ? Q.phi : inv;
  for (Vid v = g.image[Q.x0]; Q.in_window(v); v = g.image[v]) out.push_back(v);
  return out;
}

// Trivial hyperplanes are those with a finite φ-orbit. The others are judged by where
// the far orbit points of x0 fall, then the verdict is carried along the orbit.
inline Classification classify_hyperplanes(const Quasiline& Q) {
  const MedianSpace& M = Q.metric();
  Automorphism inv = inverse(Q.phi);
  Classification C;
  auto hs = window_hyperplanes(Q);
  std::map<std::uint32_t, std::uint32_t> next, prev;
  for (auto h : hs) {
    auto g = detail::image_hyperplane(Q, h, Q.phi);
    if (g && std::binary_search(hs.begin(), hs.end(), *g)) {
      next[h] = *g;
      prev[*g] = h;
    }
  }
  auto fwd = end_orbit(Q, 1, inv), bwd = end_orbit(Q, -1, inv);
  auto far_part = [](const std::vector<Vid>& pts) {
    std::size_t from = (3 * pts.size() + 3) / 4;
    if (from == 0) from = 1;
    return std::vector<Vid>(pts.begin() + static_cast<long>(std::min(from - 1, pts.size())), pts.end());
  };
  auto end_plus = far_part(fwd), end_minus = far_part(bwd);

  std::set<std::uint32_t> done;
  for (auto h0 : hs) {
    if (done.count(h0)) continue;
    // walk back to the start of the orbit (or detect a cycle)
    std::uint32_t start = h0;
    bool cyclic = false;
    std::set<std::uint32_t> seen{start};
    while (prev.count(start)) {
      start = prev[start];
      if (!seen.insert(start).second) {
        cyclic = true;
        break;
      }
    }
    std::vector<std::uint32_t> orbit{start};
    for (auto it = next.find(start); it != next.end() && it->second != start; it = next.find(it->second)) {
      if (std::find(orbit.begin(), orbit.end(), it->second) != orbit.end()) {
        cyclic = true;
        break;
      }
      orbit.push_back(it->second);
    }
    if (next.count(orbit.back()) && next[orbit.back()] == start) cyclic = true;
    for (auto h : orbit) done.insert(h);

    // representative: member whose carrier is nearest x0
    std::uint32_t rep = orbit.front();
    long rep_pos = 0;
    int best = -1;
    for (std::size_t i = 0; i < orbit.size(); ++i) {
      int dist = -1;
      for (Vid v : window_carrier(Q, orbit[i])) {
        int d = M.distance(Q.x0, v);
        if (dist < 0 || d < dist) dist = d;
      }
      if (best < 0 || dist < best) {
        best = dist;
        rep = orbit[i];
        rep_pos = static_cast<long>(i);
      }
    }
    C.reps.push_back(rep);

    HyperplaneClass base;
    base.id = rep;
    base.rep = rep;
    if (cyclic) {
      base.kind = HyperplaneKind::trivial;
    } else {
      auto side_of = [&](const std::vector<Vid>& pts) -> std::optional<bool> {
        if (pts.empty()) return std::nullopt;
        bool s = M.side(pts.front(), rep);
        for (Vid v : pts)
          if (M.side(v, rep) != s) return std::nullopt;
        return s;
      };
      auto sp = side_of(end_plus), sm = side_of(end_minus);
      if (!sp || !sm) {
        base.kind = HyperplaneKind::undecided;
      } else if (*sp != *sm) {
        base.kind = HyperplaneKind::essential;
        base.plus_side = *sp;
      } else {
        base.kind = HyperplaneKind::half_essential;
        base.plus_side = *sp;
        base.shallow_side = !*sp;
      }
      base.diam = window_hyperplane_diameter(Q, rep);
    }
    // carry the verdict and orientation along the orbit in both directions
    std::vector<HyperplaneClass> cls(orbit.size());
    cls[static_cast<std::size_t>(rep_pos)] = base;
    for (std::size_t i = static_cast<std::size_t>(rep_pos) + 1; i < orbit.size(); ++i) {
      HyperplaneClass c = cls[i - 1];
      c.id = orbit[i];
      c.offset = cls[i - 1].offset + 1;
      if (c.kind != HyperplaneKind::trivial && c.kind != HyperplaneKind::undecided) {
        c.plus_side = detail::image_side(Q, orbit[i - 1], cls[i - 1].plus_side, Q.phi, orbit[i]);
        if (c.shallow_side) c.shallow_side = !c.plus_side;
        c.diam = window_hyperplane_diameter(Q, orbit[i]);
      }
      cls[i] = c;
    }
    for (std::size_t i = static_cast<std::size_t>(rep_pos); i-- > 0;) {
      HyperplaneClass c = cls[i + 1];
      c.id = orbit[i];
      c.offset = cls[i + 1].offset - 1;
      if (c.kind != HyperplaneKind::trivial && c.kind != HyperplaneKind::undecided) {
        c.plus_side = detail::image_side(Q, orbit[i + 1], cls[i + 1].plus_side, inv, orbit[i]);
        if (c.shallow_side) c.shallow_side = !c.plus_side;
        c.diam = window_hyperplane_diameter(Q, orbit[i]);
      }
      cls[i] = c;
    }
    for (auto& c : cls) {
      if (c.kind == HyperplaneKind::trivial) C.trivial.push_back(c.id);
      if (c.kind == HyperplaneKind::undecided) C.undecided.push_back(c.id);
      C.index[c.id] = C.classes.size();
      C.classes.push_back(c);
    }
  }
  std::sort(C.trivial.begin(), C.trivial.end());
  return C;
}

inline Classification classify_or_throw(const Quasiline& Q) {
  Classification C = classify_hyperplanes(Q);
  if (!C.undecided.empty())
    throw PreconditionError("window too small to classify " + std::to_string(C.undecided.size()) + " hyperplane(s)");
  return C;
}

// φ^k(h), following the orbit inside the window.
inline std::optional<std::uint32_t> orbit_member(const Quasiline& /*Q*/, const Classification& C, std::uint32_t h,
                                                 long k) {
  const HyperplaneClass& c = C.of(h);
  const long target = c.offset + k;
  for (const auto& o : C.classes)
    if (o.rep == c.rep && o.offset == target) return o.id;
  return std::nullopt;
}

// Halfspace of h on its plus (forward-end) side or the other one.
inline std::vector<Vid> oriented_halfspace(const Quasiline& Q, const Classification& C, std::uint32_t h, bool plus) {
  const HyperplaneClass& c = C.of(h);
  return window_halfspace(Q, h, plus ? c.plus_side : !c.plus_side);
}

struct QuasilineConstants {
  int D = 0, K = 0, d = 0, N = 0, M = 0, h = 0;
  long long n = 0, B0 = 0;
  int phi_length = 0;
};

namespace detail {

inline long long checked_mul(long long a, long long b, const char* what) {
  long long r;
  if (__builtin_mul_overflow(a, b, &r)) throw BudgetError(std::string("overflow computing ") + what);
  return r;
}

inline long long checked_add(long long a, long long b, const char* what) {
  long long r;
  if (__builtin_add_overflow(a, b, &r)) throw BudgetError(std::string("overflow computing ") + what);
  return r;
}

inline long long factorial(int h) {
  long long f = 1;
  for (int i = 2; i <= h; ++i) {
    if (__builtin_mul_overflow(f, static_cast<long long>(i), &f))
      throw BudgetError("h! overflows 64 bits at h = " + std::to_string(i));
  }
  return f;
}

inline std::vector<Vid> intersect_sorted(const std::vector<Vid>& a, const std::vector<Vid>& b) {
  std::vector<Vid> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

// N-contribution for one essential hyperplane: max diam of H⁻∩φH⁺ and H⁺∩φH⁻.
inline int overlap_diameter(const Quasiline& Q, const Classification& C, std::uint32_t h, long k) {
  auto hk = orbit_member(Q, C, h, k);
  if (!hk) throw PreconditionError("window too short to translate hyperplane " + std::to_string(h));
  const MedianSpace& M = Q.metric();
  auto a = detail::intersect_sorted(oriented_halfspace(Q, C, h, false), oriented_halfspace(Q, C, *hk, true));
  auto b = detail::intersect_sorted(oriented_halfspace(Q, C, h, true), oriented_halfspace(Q, C, *hk, false));
  return std::max(M.diameter(a), M.diameter(b));
}

inline QuasilineConstants quasiline_constants(const Quasiline& Q, const Classification& C) {
  if (!C.undecided.empty()) throw PreconditionError("classification has undecided hyperplanes");
  const MedianSpace& M = Q.metric();
  QuasilineConstants k;
  k.phi_length = Q.phi_length;
  k.h = static_cast<int>(C.trivial.size());
  for (auto r : C.reps) {
    const HyperplaneClass& c = C.of(r);
    if (c.kind == HyperplaneKind::trivial) continue;
    k.D = std::max(k.D, *c.diam);
    if (c.kind == HyperplaneKind::half_essential) {
      auto S = window_halfspace(Q, r, *c.shallow_side);
      auto N = window_carrier(Q, r);
      S.insert(S.end(), N.begin(), N.end());
      k.K = std::max(k.K, M.diameter(S));
    }
  }
  k.d = (3 * k.D + 2) / k.phi_length + 1;
  int worst = 0;
  for (auto r : C.reps)
    if (C.of(r).kind == HyperplaneKind::essential) worst = std::max(worst, overlap_diameter(Q, C, r, 1));
  k.N = worst + k.D + 1;
  k.M = (k.d + 2) * k.N;
  k.n = detail::checked_mul(2LL * k.d, detail::factorial(k.h), "n = 2d*h!");
  const long long nM = detail::checked_mul(k.n, k.M, "n*M");
  const long long num = detail::checked_add(detail::checked_mul(2 * k.n, k.N, "2nN"), k.D, "2nN+D");
  const long long den = detail::checked_mul(k.n, k.phi_length, "n|phi|");
  const long long third = detail::checked_mul(num / den + 2, nM, "B0");
  k.B0 = std::max({static_cast<long long>(k.K) + 1, detail::checked_mul(2, nM, "2nM"), third});
  return k;
}

struct BlockCheck {
  std::uint32_t hyperplane = 0;
  Vid a = kNone;
  ConvexSet C;
  std::vector<bool> union_equals_hull;  // index m
  std::size_t sandwich_samples = 0;
  bool sandwich_ok = true;
  bool ok() const {
    return sandwich_ok && std::all_of(union_equals_hull.begin(), union_equals_hull.end(), [](bool b) { return b; });
  }
};

// Hyperplane witnessing a failure of "H and φH disjoint and never crossed together",
// or the hyperplane itself when it meets its translate.
inline std::optional<std::uint32_t> block_hypothesis_witness(const Quasiline& Q, const Classification& C,
                                                             std::uint32_t h) {
  auto h1 = orbit_member(Q, C, h, 1);
  if (!h1) throw PreconditionError("window too short to translate hyperplane");
  const auto& H = Q.metric().hyperplanes();
  if (*h1 == h || H.cross(h, *h1)) return h;
  for (auto j : window_hyperplanes(Q))
    if (H.cross(j, h) && H.cross(j, *h1)) return j;
  return std::nullopt;
}

inline std::vector<Vid> translate(const Automorphism& g, const std::vector<Vid>& S, const char* what) {
  std::vector<Vid> out;
  out.reserve(S.size());
  for (Vid v : S) {
    if (g.image[v] == kNone) throw BudgetError(std::string("window margin insufficient for ") + what);
    out.push_back(g.image[v]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

// Random geodesic from p to q: at each step a uniformly chosen neighbour closer to q.
inline Geodesic random_geodesic(const MedianSpace& M, Vid p, Vid q, std::mt19937& rng) {
  Geodesic g{{p}, {}};
  const CubeComplex& X = M.complex();
  int d = M.distance(p, q);
  for (Vid cur = p; cur != q; --d) {
    std::vector<EdgeEnd> steps;
    for (EdgeEnd x : X.ends_at(cur))
      if (M.distance(X.far_vertex(x), q) == d - 1) steps.push_back(x);
    EdgeEnd x = steps[std::uniform_int_distribution<std::size_t>(0, steps.size() - 1)(rng)];
    cur = X.far_vertex(x);
    g.vertices.push_back(cur);
    g.crossed.push_back(M.hyperplanes().of_edge[x.edge]);
  }
  return g;
}

}  // namespace detail

inline BlockCheck block_check(const Quasiline& Q, const Classification& C, std::uint32_t h, int m,
                              std::size_t samples = 16) {
  if (C.of(h).kind != HyperplaneKind::essential) throw PreconditionError("block check needs an essential hyperplane");
  if (auto w = block_hypothesis_witness(Q, C, h))
    throw PreconditionError("hyperplane " + std::to_string(*w) + " crosses both H and phi(H)");
  const MedianSpace& M = Q.metric();
  auto h1 = *orbit_member(Q, C, h, 1);
  ConvexSet NH = convex_set(M, window_carrier(Q, h)), N1 = convex_set(M, window_carrier(Q, h1));
  ConvexSet ab = pitchfork(M, NH, N1);
  if (ab.size() != 1) throw InconsistencyError("N(H) ⊤ N(phi H) is not a single vertex");
  BlockCheck r;
  r.hyperplane = h;
  r.a = ab.members.front();
  auto phi2 = power(Q.phi, 2);
  if (phi2.image[r.a] == kNone) throw BudgetError("window margin insufficient for phi^2(a)");
  r.C = hull_set(M, {r.a, phi2.image[r.a]});
  std::vector<Vid> uni = r.C.members, cur = r.C.members;
  Vid far = phi2.image[r.a];
  for (int i = 0; i <= m; ++i) {
    if (i > 0) {
      cur = translate(Q.phi, cur, "block union");
      std::vector<Vid> merged;
      std::set_union(uni.begin(), uni.end(), cur.begin(), cur.end(), std::back_inserter(merged));
      uni.swap(merged);
      far = Q.phi.image[far];
      if (far == kNone) throw BudgetError("window margin insufficient for phi^(m+2)(a)");
    }
    r.union_equals_hull.push_back(uni == M.hull({r.a, far}));
  }
  // sandwich on sampled geodesics from the far side of H to the far side of φ³H
  std::vector<std::uint32_t> Hs{h};
  for (long i = 1; i <= 3; ++i) {
    auto hi = orbit_member(Q, C, h, i);
    if (!hi) throw BudgetError("window margin insufficient for phi^3(H)");
    Hs.push_back(*hi);
  }
  auto starts = detail::intersect_sorted(window_carrier(Q, h), oriented_halfspace(Q, C, h, false));
  auto ends = detail::intersect_sorted(window_carrier(Q, Hs[3]), oriented_halfspace(Q, C, Hs[3], true));
  std::mt19937 rng(12345);
  for (std::size_t s = 0; s < samples && !starts.empty() && !ends.empty(); ++s) {
    Vid p = starts[s % starts.size()], q = ends[(s / starts.size()) % ends.size()];
    Geodesic g = detail::random_geodesic(M, p, q, rng);
    std::array<long, 4> at{-1, -1, -1, -1};
    for (std::size_t i = 0; i < g.crossed.size(); ++i)
      for (int j = 0; j < 4; ++j)
        if (g.crossed[i] == Hs[j]) at[j] = static_cast<long>(i);
    if (std::find(at.begin(), at.end(), -1) != at.end()) continue;
    ++r.sandwich_samples;
    for (long i = at[1]; i <= at[2] + 1; ++i)
      if (!r.C.contains(g.vertices[static_cast<std::size_t>(i)])) r.sandwich_ok = false;
    auto outer = M.hull({g.vertices[at[0]], g.vertices[at[0] + 1], g.vertices[at[3]], g.vertices[at[3] + 1]});
    for (Vid v : r.C.members)
      if (!std::binary_search(outer.begin(), outer.end(), v)) r.sandwich_ok = false;
  }
  return r;
}

struct FellowTravelResult {
  ConvexSet C;
  long long n = 0;
  long l = 0, p = 0, q = 0;
  Geodesic gamma_hat;
  Vid a = kNone;
  std::uint32_t H = 0;
  std::size_t e0 = 0;
  std::vector<Vid> translates_union;  // ⋃_{k=0}^{l} φ^{nk}(C)
  bool gamma_hat_covered = false;
  bool union_in_W = false;
  bool union_is_hull = false;
  bool long_enough = false;  // diam(γ̂) > B
  bool l_bound = false;      // l > 2B/(nM) - 5
  bool ok() const { return gamma_hat_covered && union_in_W && union_is_hull && long_enough && l_bound; }
};

inline FellowTravelResult fellow_travel(const Quasiline& Q, const Classification& C, const QuasilineConstants& K,
                                        const ConvexSet& W, const Geodesic& gamma, long long B) {
  const MedianSpace& M = Q.metric();
  if (B < K.B0) throw PreconditionError("B = " + std::to_string(B) + " is below B0 = " + std::to_string(K.B0));
  const long long len = gamma.length();
  if (len < 3 * B)
    throw PreconditionError("geodesic of length " + std::to_string(len) + " is shorter than 3B = " +
                            std::to_string(3 * B));
  std::set<std::uint32_t> seen;
  for (std::size_t i = 0; i < gamma.crossed.size(); ++i) {
    if (!seen.insert(gamma.crossed[i]).second) throw PreconditionError("path is not a geodesic");
    if (M.distance(gamma.vertices[i], gamma.vertices[i + 1]) != 1) throw PreconditionError("path is not connected");
  }
  for (Vid v : gamma.vertices)
    if (!W.contains(v) || !Q.in_window(v)) throw PreconditionError("geodesic leaves W");
  for (auto t : C.trivial)
    if (seen.count(t)) throw PreconditionError("geodesic crosses trivial hyperplane " + std::to_string(t));

  FellowTravelResult r;
  r.n = K.n;
  r.e0 = static_cast<std::size_t>((len - 1) / 2);
  r.H = gamma.crossed[r.e0];
  if (C.of(r.H).kind != HyperplaneKind::essential)
    throw InconsistencyError("middle hyperplane is not essential although B > K");

  // sector of the trivial halfspaces containing γ
  std::vector<Vid> sector;
  for (Vid v : Q.window.members) {
    bool in = true;
    for (auto t : C.trivial)
      if (M.side(v, t) != M.side(gamma.vertices.front(), t)) in = false;
    if (in) sector.push_back(v);
  }
  auto hn = orbit_member(Q, C, r.H, static_cast<long>(K.n));
  if (!hn) throw BudgetError("window margin insufficient for phi^n(H)");
  ConvexSet NH = convex_set(M, detail::intersect_sorted(window_carrier(Q, r.H), sector));
  ConvexSet NHn = convex_set(M, detail::intersect_sorted(window_carrier(Q, *hn), sector));
  ConvexSet ab = pitchfork(M, NH, NHn);
  if (ab.size() != 1) throw InconsistencyError("carrier projection is not a single vertex");
  r.a = ab.members.front();

  std::map<std::uint32_t, std::size_t> crossed_at;
  for (std::size_t i = 0; i < gamma.crossed.size(); ++i) crossed_at[gamma.crossed[i]] = i;
  auto edge_of = [&](long k) -> std::optional<std::size_t> {
    auto hk = orbit_member(Q, C, r.H, k * K.n);
    if (!hk) return std::nullopt;
    auto it = crossed_at.find(*hk);
    if (it == crossed_at.end()) return std::nullopt;
    return it->second;
  };
  while (edge_of(r.p + 1)) ++r.p;
  while (edge_of(r.q - 1)) --r.q;
  r.l = r.p - r.q - 3;
  if (r.l < 0) throw PreconditionError("geodesic crosses too few translates of H");

  Automorphism step = power(Q.phi, static_cast<long>(K.n));
  Automorphism back = inverse(step);
  Vid start = r.a;
  for (long k = 0; k > r.q; --k) {
    start = back.image[start];
    if (start == kNone) throw BudgetError("window margin insufficient for phi^(qn)(a)");
  }
  Vid two = step.image[start] == kNone ? kNone : step.image[step.image[start]];
  if (two == kNone) throw BudgetError("window margin insufficient for C");
  r.C = hull_set(M, {start, two});

  std::size_t from = *edge_of(r.q + 1), to = *edge_of(r.p - 1);
  r.gamma_hat.vertices.assign(gamma.vertices.begin() + static_cast<long>(from),
                              gamma.vertices.begin() + static_cast<long>(to) + 2);
  r.gamma_hat.crossed.assign(gamma.crossed.begin() + static_cast<long>(from),
                             gamma.crossed.begin() + static_cast<long>(to) + 1);

  std::vector<Vid> uni = r.C.members, cur = r.C.members;
  Vid far = two;
  for (long k = 1; k <= r.l; ++k) {
    cur = translate(step, cur, "fellow-travel union");
    std::vector<Vid> merged;
    std::set_union(uni.begin(), uni.end(), cur.begin(), cur.end(), std::back_inserter(merged));
    uni.swap(merged);
    far = step.image[far];
    if (far == kNone) throw BudgetError("window margin insufficient for the last translate");
  }
  r.translates_union = uni;
  r.gamma_hat_covered = std::all_of(r.gamma_hat.vertices.begin(), r.gamma_hat.vertices.end(),
                                    [&](Vid v) { return std::binary_search(uni.begin(), uni.end(), v); });
  r.union_in_W = std::all_of(uni.begin(), uni.end(), [&](Vid v) { return W.contains(v); });
  r.union_is_hull = uni == M.hull({start, far});
  r.long_enough = r.gamma_hat.length() > B;
  // l > 2B/(nM) - 5  <=>  (l + 5) nM > 2B
  r.l_bound = detail::checked_mul(r.l + 5, detail::checked_mul(K.n, K.M, "nM"), "l bound") > 2 * B;
  return r;
}

struct CommensurationResult {
  bool related = false;
  bool decided = false;  // false when the projection is too small to claim anything
  long d1 = 0, d2 = 0;
  long m = 0;  // least m with φ1^{m|φ2|} = φ2^{±m|φ1|}
  int projection_diam = 0;
  std::size_t checked_vertices = 0;
};

inline CommensurationResult commensurate(const Quasiline& Q1, const Quasiline& Q2, long S) {
  if (Q1.ball != Q2.ball) throw PreconditionError("quasilines live in different windows");
  const MedianSpace& M = Q1.metric();
  CommensurationResult r;
  r.projection_diam = M.diameter(pitchfork(M, Q1.window, Q2.window).members);
  if (r.projection_diam <= S) return r;
  r.decided = true;
  // deck maps agree everywhere once they agree at one vertex, so search along the orbit
  // of a reference vertex and verify candidates pointwise
  const Vid ref = Q1.x0;
  std::map<Vid, long> exponent2;
  Automorphism inv2 = inverse(Q2.phi);
  for (int sign : {1, -1}) {
    Vid v = ref;
    for (long k = 1; k <= Q2.period_count; ++k) {
      v = (sign > 0 ? Q2.phi : inv2).image[v];
      if (v == kNone) break;
      exponent2.emplace(v, sign * k);
    }
  }
  Vid y = ref;
  for (long d1 = 1; d1 <= Q1.period_count; ++d1) {
    y = Q1.phi.image[y];
    if (y == kNone) break;
    auto it = exponent2.find(y);
    if (it == exponent2.end()) continue;
    Automorphism p1 = power(Q1.phi, d1), p2 = power(Q2.phi, it->second);
    std::size_t checked = 0;
    bool equal = true;
    for (Vid v = 0; v < p1.image.size(); ++v) {
      if (p1.image[v] == kNone || p2.image[v] == kNone) continue;
      ++checked;
      if (p1.image[v] != p2.image[v]) equal = false;
    }
    if (!equal) continue;
    r.related = true;
    r.d1 = d1;
    r.d2 = it->second;
    r.checked_vertices = checked;
    r.m = d1 / std::gcd(d1, static_cast<long>(Q2.phi_length));
    break;
  }
  return r;
}

}  // namespace mf

// Acceptance run: one PASS/FAIL line per criterion. A criterion passes only if every
// check holds and it finishes inside its time budget.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sys/wait.h>
#include <unistd.h>

#include "../tests/oracles.hpp"
#include "mf/bass_serre/gog_fixtures.hpp"
#include "mf/bass_serre/stature.hpp"
#include "mf/cubecore/special.hpp"
#include "mf/gates/gates.hpp"
#include "mf/io/json_io.hpp"
#include "mf/quasiline/quasiline.hpp"

using namespace mf;
namespace fx = mf::fixtures;
namespace fs = std::filesystem;

namespace {

// Collects failed checks; the first few are printed under the verdict line.
struct Checks {
  std::size_t total = 0;
  std::vector<std::string> failures;
  std::string note;

  void expect(bool ok, const std::string& what) {
    ++total;
    if (!ok) failures.push_back(what);
  }
};

bool run(int id, const std::string& title, double budget_s, const std::function<void(Checks&)>& body) {
  Checks c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs <= budget_s;
  const bool pass = c.failures.empty() && in_time && c.total > 0;
  std::printf("criterion %2d %-28s %s  checks=%zu failed=%zu  %.1fs (budget %.0fs)%s%s\n", id, title.c_str(),
              pass ? "PASS" : "FAIL", c.total, c.failures.size(), secs, budget_s, c.note.empty() ? "" : "  ",
              c.note.c_str());
  if (!in_time) std::printf("    over time budget\n");
  for (std::size_t i = 0; i < c.failures.size() && i < 5; ++i) std::printf("    %s\n", c.failures[i].c_str());
  std::fflush(stdout);
  return pass;
}

std::vector<Vid> all_of(const Ball& B) {
  std::vector<Vid> v(B.size());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

struct Window {
  std::shared_ptr<Ball> ball;
  const MedianSpace* M;
  oracle::Dist d;
};

Window window(oracle::Gen& gen, bool with_klein = true) {
  Window w{gen.window(with_klein), nullptr, {}};
  w.M = &w.ball->metric();
  w.d = oracle::all_pairs(*w.ball->complex);
  return w;
}

struct Line {
  std::shared_ptr<Ball> ball;
  Quasiline Q;
  Classification C;
};

Line quasiline(CubeComplex X, int R) {
  Line s;
  s.ball = develop_ball(fx::shared(std::move(X)), 0, R);
  s.Q = validate_quasiline(s.ball, all_of(*s.ball), lift_loop(*s.ball, {{0, false}}));
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

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / ("mf_acceptance_" + std::to_string(::getpid()));
  const std::string cmd = std::string(MF_CLI_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  CliRun r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, io::read_file(out)};
  fs::remove(out);
  return r;
}

std::string str(std::size_t x) { return std::to_string(x); }

// 1. distance = BFS distance = number of separating hyperplanes
void metric_suite(Checks& c) {
  auto check = [&](const CubeComplex& X, const MedianSpace& M, const std::string& what) {
    auto d = oracle::all_pairs(X);
    auto H = oracle::halfspaces(X);
    std::size_t bad = 0;
    for (Vid p = 0; p < X.vertex_count(); ++p)
      for (Vid q = 0; q < X.vertex_count(); ++q)
        if (M.distance(p, q) != d[p][q] || H.separating_count(p, q) != d[p][q]) ++bad;
    c.expect(bad == 0, what + ": " + str(bad) + " pairs disagree");
  };
  for (int m = 1; m <= 8; ++m)
    for (int n = 1; n <= 8; ++n) {
      CubeComplex X = fx::grid(m, n);
      auto M = median_space(X);
      check(X, *M, "grid " + str(m) + "x" + str(n));
    }
  oracle::Gen gen(101);
  for (int t = 0; t < 200; ++t) {
    auto B = gen.window(false);
    check(*B->complex, B->metric(), "window " + str(t));
  }
  c.note = "64 grids, 200 windows";
}

// 2. gates against brute-force nearest points, pitchforks against pointwise images
void gate_suite(Checks& c) {
  oracle::Gen gen(102);
  std::size_t pairs = 0, forks = 0;
  while (pairs < 10'000) {
    Window w = window(gen);
    for (int k = 0; k < 100; ++k, ++pairs) {
      ConvexSet Y = convex_set(*w.M, gen.convex(w.d));
      Vid x = gen.vertex(w.ball->size());
      auto brute = oracle::nearest(w.d, x, Y.members);
      GateResult r = gate_vertex(*w.M, x, Y);
      c.expect(brute && r.image == *brute && r.distance == w.d[x][*brute], "gate pair " + str(pairs));
    }
    for (int k = 0; k < 10; ++k, ++forks) {
      ConvexSet A = convex_set(*w.M, gen.convex(w.d)), B = convex_set(*w.M, gen.convex(w.d));
      c.expect(pitchfork(*w.M, A, B).members == oracle::gate_image(w.d, A.members, B.members),
               "pitchfork " + str(forks));
    }
  }
  c.note = str(pairs) + " gate pairs, " + str(forks) + " pitchforks";
}

// 3. bridge: hyperplane laws and the product witness
void bridge_suite(Checks& c) {
  oracle::Gen gen(103);
  std::size_t done = 0;
  while (done < 500) {
    Window w = window(gen);
    auto H = oracle::halfspaces(*w.ball->complex);
    for (int k = 0; k < 5; ++k, ++done) {
      ConvexSet A = convex_set(*w.M, gen.convex(w.d)), B = convex_set(*w.M, gen.convex(w.d));
      BridgeDecomposition d = bridge(*w.M, A, B);
      const std::string tag = "bridge " + str(done);
      c.expect(d.verified(), tag + ": internal verification");
      bool laws = true;
      for (std::size_t h = 0; h < H.classes.size(); ++h) {
        laws &= H.crosses(h, d.a_side.members) == (H.crosses(h, A.members) && H.crosses(h, B.members));
        laws &= H.separates(h, d.a_side.members, d.b_side.members) == H.separates(h, A.members, B.members);
      }
      c.expect(laws, tag + ": hyperplane laws");
      // bijection bridge -> connector x (A⊤B), additive in distance from a
      std::set<std::pair<Vid, Vid>> coords;
      bool additive = true, in_factors = true;
      for (const auto& [v, ca] : d.witness) {
        coords.insert(ca);
        additive &= w.d[v][d.a] == w.d[ca.first][d.a] + w.d[ca.second][d.a];
        in_factors &= d.connector.contains(ca.first) && d.a_side.contains(ca.second);
      }
      c.expect(additive && in_factors, tag + ": witness coordinates");
      c.expect(coords.size() == d.bridge.size() && coords.size() == d.connector.size() * d.a_side.size(),
               tag + ": witness is a bijection");
      c.expect(d.bridge.members == oracle::hull(w.d, [&] {
                 auto u = d.a_side.members;
                 u.insert(u.end(), d.b_side.members.begin(), d.b_side.members.end());
                 return u;
               }()),
               tag + ": bridge is the hull of both sides");
    }
  }
  c.note = str(done) + " convex pairs";
}

// 4. projection algebra on triples
void algebra_suite(Checks& c) {
  oracle::Gen gen(104);
  std::size_t done = 0;
  while (done < 500) {
    Window w = window(gen);
    for (int k = 0; k < 5; ++k, ++done) {
      ConvexSet A = convex_set(*w.M, gen.convex(w.d)), B = convex_set(*w.M, gen.convex(w.d)),
                C = convex_set(*w.M, gen.convex(w.d));
      auto AB = pitchfork(*w.M, A, B), AC = pitchfork(*w.M, A, C), BC = pitchfork(*w.M, B, C);
      auto left = pitchfork(*w.M, AB, C), right = pitchfork(*w.M, A, BC);
      c.expect(left.members == right.members, "triple " + str(done) + ": associativity");
      std::vector<Vid> both;
      std::set_intersection(AB.members.begin(), AB.members.end(), AC.members.begin(), AC.members.end(),
                            std::back_inserter(both));
      c.expect(std::includes(right.members.begin(), right.members.end(), both.begin(), both.end()),
               "triple " + str(done) + ": inclusion");
    }
  }
  c.note = str(done) + " convex triples";
}

// 5. trivial / half-essential / essential
void trichotomy_suite(Checks& c) {
  Line line = quasiline(fx::line(), 12);
  c.expect(line.C.count(HyperplaneKind::trivial) == 0 && line.C.count(HyperplaneKind::half_essential) == 0 &&
               line.C.count(HyperplaneKind::essential) == line.C.classes.size(),
           "LINE all essential");
  Line ladder = quasiline(fx::ladder(), 12);
  c.expect(ladder.C.count(HyperplaneKind::trivial) == 1 && ladder.C.count(HyperplaneKind::half_essential) == 0,
           "LADDER exactly one trivial");
  Line comb = quasiline(fx::comb(), 12);
  const HyperplaneData& H = comb.Q.metric().hyperplanes();
  std::size_t pendants = 0;
  for (const auto& k : comb.C.classes) {
    const bool pendant = comb.ball->proj_edge[H.dual_edges[k.id].front()] == 1;
    pendants += pendant;
    c.expect(k.kind == (pendant ? HyperplaneKind::half_essential : HyperplaneKind::essential),
             "COMB class " + str(k.id));
  }
  c.expect(pendants > 0, "COMB has pendant classes");
  for (auto make : {fx::line, fx::ladder, fx::comb}) {
    Line small = quasiline(make(), 12), big = quasiline(make(), 24);
    const HyperplaneData& Hs = small.Q.metric().hyperplanes();
    const HyperplaneData& Hb = big.Q.metric().hyperplanes();
    for (const auto& k : small.C.classes)
      c.expect(big.C.of(Hb.of_edge[Hs.dual_edges[k.id].front()]).kind == k.kind,
               make().name + ": class changed under R -> 2R");
  }
}

// 6. LINE constants, then the separation, overlap and propagation inequalities
void constants_suite(Checks& c) {
  Line line = quasiline(fx::line(), 20);
  QuasilineConstants K = quasiline_constants(line.Q, line.C);
  c.expect(K.D == 0 && K.K == 0 && K.d == 3 && K.N == 1 && K.M == 5 && K.h == 0 && K.n == 6 && K.B0 == 120,
           "LINE constants");
  oracle::Gen gen(106);
  std::size_t overlaps = 0;
  for (auto make : {fx::line, fx::ladder, fx::comb}) {
    Line s = quasiline(make(), 40);
    QuasilineConstants k = quasiline_constants(s.Q, s.C);
    const HyperplaneData& HD = s.Q.metric().hyperplanes();
    const std::string name = make().name;
    auto window = window_hyperplanes(s.Q);
    for (const auto& h : s.C.classes) {
      if (h.kind != HyperplaneKind::essential) continue;
      // the d-th translate is disjoint and only trivial hyperplanes cross both
      if (auto hd = orbit_member(s.Q, s.C, h.id, k.d)) {
        bool ok = *hd != h.id && !HD.cross(h.id, *hd);
        for (auto j : window)
          if (HD.cross(j, h.id) && HD.cross(j, *hd)) ok &= s.C.of(j).kind == HyperplaneKind::trivial;
        c.expect(ok, name + ": d-translate separation at " + str(h.id));
      }
    }
    // overlap of carriers of h and its k-th translate is at most kN, for every k realized in the window
    for (auto r : s.C.reps) {
      if (s.C.of(r).kind != HyperplaneKind::essential) continue;
      for (long j = 1;; ++j) {
        bool any = false;
        for (long sign : {1L, -1L}) {
          if (!orbit_member(s.Q, s.C, r, sign * j)) continue;
          any = true;
          ++overlaps;
          c.expect(overlap_diameter(s.Q, s.C, r, sign * j) <= j * k.N, name + ": overlap at k=" + str(j));
        }
        if (!any) break;
      }
    }
    // an essential hyperplane crossed far from both ends of a geodesic drags its translates along
    for (int trial = 0; trial < 30; ++trial) {
      Geodesic g = s.Q.metric().geodesic(gen.vertex(s.ball->size()), gen.vertex(s.ball->size()));
      std::set<std::uint32_t> crossed(g.crossed.begin(), g.crossed.end());
      const long len = g.length();
      for (long i = 0; i < len; ++i) {
        if (s.C.of(g.crossed[i]).kind != HyperplaneKind::essential) continue;
        for (long j = 1; j * k.M <= std::min(i, len - 1 - i); ++j)
          for (long sign : {1L, -1L}) {
            auto hk = orbit_member(s.Q, s.C, g.crossed[i], sign * j);
            c.expect(hk && crossed.count(*hk), name + ": propagation at k=" + str(j));
          }
      }
    }
  }
  c.note = str(overlaps) + " overlaps";
}

// 7. unions of translates of the block equal hulls
void block_suite(Checks& c) {
  Line line = quasiline(fx::line(), 30);
  const std::uint32_t h = line.Q.metric().hyperplanes().of_edge[0];
  for (int m = 0; m <= 10; ++m) {
    BlockCheck b = block_check(line.Q, line.C, h, m);
    c.expect(b.ok() && b.union_equals_hull.size() == static_cast<std::size_t>(m + 1), "m=" + str(m));
  }
}

// 8. fellow travelling along a long orbit geodesic
void fellow_suite(Checks& c) {
  Line line = quasiline(fx::line(), 400);
  QuasilineConstants K = quasiline_constants(line.Q, line.C);
  Geodesic g = orbit_segment(line.Q, 360);
  FellowTravelResult f = fellow_travel(line.Q, line.C, K, line.Q.window, g, 120);
  c.expect(f.ok(), "inclusion chain");
  c.expect(f.gamma_hat.length() > 120, "diam of gamma hat exceeds B");
  c.expect(f.l > 2 * 120 / (K.n * K.M) - 5, "l exceeds 2B/(nM) - 5");
  c.expect(oracle::is_convex(oracle::all_pairs(*line.ball->complex), f.translates_union),
           "union of translates is convex (oracle)");
  c.note = "window " + str(line.ball->size()) + ", l=" + std::to_string(f.l);
}

// 9. shift by one and shift by two are commensurate
void commensurate_suite(Checks& c) {
  auto B = develop_ball(fx::shared(fx::line()), 0, 40);
  auto all = all_of(*B);
  Automorphism shift = lift_loop(*B, {{0, false}}), twice = power(shift, 2);
  Quasiline Q1 = validate_quasiline(B, all, shift), Q2 = validate_quasiline(B, all, twice);
  CommensurationResult r = commensurate(Q1, Q2, 10);
  c.expect(r.related && r.decided, "related");
  c.expect(r.d1 == 2 && r.d2 == 1, "d1=2, d2=1");
  c.expect(std::abs(r.d1) * Q1.phi_length == std::abs(r.d2) * Q2.phi_length, "|d1||phi1| = |d2||phi2|");
  // pointwise: phi1^d1 and phi2^d2 agree wherever both are defined
  Automorphism a = power(shift, r.d1), b = power(twice, r.d2);
  std::size_t common = 0, bad = 0;
  for (Vid v = 0; v < B->size(); ++v) {
    if (a.image[v] == kNone || b.image[v] == kNone) continue;
    ++common;
    bad += a.image[v] != b.image[v];
  }
  c.expect(common > 0 && bad == 0, "pointwise equality on the window");
  c.note = str(common) + " points compared";
}

// 10. specialness
void special_suite(Checks& c) {
  CubeComplex T = fx::torus(), K = fx::klein(), G = fx::grid(3, 3);
  c.expect(check_special(T).special, "torus special");
  c.expect(check_special(G).special, "grid special");
  SpecialnessReport k = check_special(K);
  bool one_sided = false;
  for (const auto& h : k.hyperplanes) one_sided |= h.one_sided.has_value();
  c.expect(!k.special && one_sided, "Klein bottle has a one-sided witness");
}

// 11. triple stabilizers
void cyclonormal_suite(Checks& c) {
  auto tori = std::make_shared<const GraphOfComplexes>(fx::tori_gog());
  CyclonormalReport edges = check_cyclonormal(tori, 0, 2, 8, 6);
  c.expect(edges.pass, "tori_gog passes");
  c.expect(edges.counts[static_cast<int>(CyclicVerdict::cyclic)] == edges.triples.size(),
           "tori_gog triples all cyclic");
  CyclonormalReport paths = check_cyclonormal(tori, 1, 2, 8, 6);
  bool same = paths.triples.size() == edges.triples.size();
  for (std::size_t i = 0; same && i < paths.triples.size(); ++i) same = paths.triples[i].verdict == edges.triples[i].verdict;
  c.expect(same && paths.pass == edges.pass, "paths(1) verdicts equal edge verdicts");
  auto free = std::make_shared<const GraphOfComplexes>(fx::free_gog());
  CyclonormalReport f = check_cyclonormal(free, 0, 2, 8, 6);
  c.expect(!f.pass && f.witness.has_value(), "free gog fails with a witness");
  if (f.witness) {
    const TripleRecord& t = f.triples[*f.witness];
    c.expect(t.verdict == CyclicVerdict::higher && t.witness_words.size() >= 2, "witness has rank at least two");
  }
  c.note = str(edges.triples.size()) + " tori triples";
}

// 12. stature tallies through the CLI, twice each
void stature_suite(Checks& c) {
  const fs::path fixtures = MF_FIXTURE_DIR;
  // the wise circles reach length 16, so stabilizer shifts only show up in wider chambers
  const std::pair<std::string, int> runs[] = {{"tori_gog", 8}, {"wise_gog", 40}};
  for (const auto& [name, radius] : runs) {
    const std::string args =
        "gog stature " + (fixtures / name).string() + " --Lmax 4 --radius " + std::to_string(radius);
    CliRun a = cli(args), b = cli(args);
    c.expect(a.code == 0 && b.code == 0, name + ": exit code " + std::to_string(a.code));
    c.expect(!a.out.empty() && a.out == b.out, name + ": reports byte-identical");
    io::json r = io::json::parse(a.out)["results"];
    auto tallies = r["tallies"].get<std::vector<std::size_t>>();
    c.expect(tallies.size() == 4, name + ": four tallies");
    if (name == "tori_gog") {
      c.expect(tallies == std::vector<std::size_t>{1, 1, 1, 1}, "tori_gog tallies constant at one class");
      c.expect(r["stabilization"].get<bool>() && r["stabilization_length"] == 1, "tori_gog stabilizes at L=1");
    } else {
      bool increasing = true;
      for (std::size_t i = 1; i < tallies.size(); ++i) increasing &= tallies[i] > tallies[i - 1];
      c.expect(increasing, "wise_gog tallies strictly increasing");
      c.expect(!r["stabilization"].get<bool>(), "wise_gog does not stabilize");
    }
    c.note += name + " " + r["tallies"].dump() + " ";
  }
}

}  // namespace

int main() {
  struct Criterion {
    const char* title;
    double budget;
    void (*body)(Checks&);
  };
  const Criterion all[] = {
      {"metric oracle", 30, metric_suite},        {"gate oracle", 60, gate_suite},
      {"bridge", 60, bridge_suite},               {"projection algebra", 60, algebra_suite},
      {"quasiline trichotomy", 10, trichotomy_suite}, {"quasiline constants", 30, constants_suite},
      {"block unions", 10, block_suite},          {"fellow travelling", 60, fellow_suite},
      {"commensurability", 10, commensurate_suite}, {"specialness", 5, special_suite},
      {"cyclonormality", 120, cyclonormal_suite}, {"stature probe", 300, stature_suite},
  };
  int failed = 0;
  for (int i = 0; i < 12; ++i) failed += !run(i + 1, all[i].title, all[i].budget, all[i].body);
  std::printf("%d of 12 criteria passed\n", 12 - failed);
  return failed == 0 ? 0 : 1;
}

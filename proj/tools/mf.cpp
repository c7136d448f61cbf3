#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mf/bass_serre/gog_fixtures.hpp"
#include "mf/io/report.hpp"
#include "mf/io/results.hpp"

namespace fs = std::filesystem;
using namespace mf;
using io::json;

namespace {

enum Exit { kOk = 0, kInput = 1, kFail = 2, kUndecided = 3 };

struct Common {
  std::string format = "json";
  bool trace = false;
};

int emit(const io::Report& r, const Common& c, int code) {
  std::cout << io::render(r, c.format == "text");
  return code;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

// A vertex set: a JSON file holding an array of ids, an inline JSON array, or "a,b,c".
std::vector<Vid> vertex_set(const CubeComplex& X, const std::string& arg, io::Report& r) {
  std::vector<std::string> ids;
  const bool inline_json = !arg.empty() && arg.front() == '[';
  if (inline_json || fs::is_regular_file(arg)) {
    if (!inline_json) r.add_input(arg);
    json j = io::parse_json(inline_json ? arg : io::read_file(arg), arg);
    if (!j.is_array()) throw InputError(arg + ": a vertex set is a JSON array of ids");
    for (const json& v : j) ids.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  } else {
    ids = split(arg, ',');
  }
  if (ids.empty()) throw InputError("empty vertex set");
  std::vector<Vid> out;
  for (const auto& id : ids) out.push_back(X.vertex(id));
  return out;
}

// "e0.e1^-1" -> [(0, forward), (1, backward)]
std::vector<std::pair<Eid, bool>> parse_word(const std::string& w) {
  std::vector<std::pair<Eid, bool>> out;
  for (std::string letter : split(w, '.')) {
    bool inverse = false;
    if (letter.size() > 3 && letter.compare(letter.size() - 3, 3, "^-1") == 0) {
      inverse = true;
      letter.resize(letter.size() - 3);
    }
    if (letter.size() < 2 || letter[0] != 'e') throw InputError("loop word letters look like e3 or e3^-1");
    try {
      out.emplace_back(static_cast<Eid>(std::stoul(letter.substr(1))), inverse);
    } catch (const std::exception&) {
      throw InputError("bad loop word letter '" + letter + "'");
    }
  }
  if (out.empty()) throw InputError("empty loop word");
  return out;
}

std::shared_ptr<MedianSpace> cat0_space(CubeComplex& X) {
  Cat0Result r = analyze_cat0(X);
  if (!r.ok) throw PreconditionError("complex is not CAT(0) (" + (r.witness ? r.witness->kind : std::string("?")) + ")");
  return r.space;
}

json complex_summary(const CubeComplex& X) {
  return {{"name", X.name}, {"vertices", X.vertex_count()}, {"edges", X.edge_count()},
          {"squares", X.squares.size()}, {"cubes3", X.cubes3.size()}, {"dim", X.dim()}};
}

struct QlArgs {
  std::string file, word = "e0", base, window;
  int radius = 20;
  int min_periods = kMinPeriods;
};

struct QlSetup {
  std::shared_ptr<const CubeComplex> X;
  std::shared_ptr<Ball> ball;
  Automorphism phi;
};

QlSetup ql_setup(const QlArgs& a, const std::string& word, io::Report& r) {
  r.add_input(a.file);
  QlSetup s;
  s.X = std::make_shared<const CubeComplex>(io::load_complex(a.file));
  Vid base = a.base.empty() ? 0 : s.X->vertex(a.base);
  s.ball = develop_ball(s.X, base, a.radius);
  s.phi = lift_loop(*s.ball, parse_word(word));
  return s;
}

Quasiline ql_build(const QlArgs& a, const QlSetup& s, io::Report& r) {
  std::vector<Vid> window;
  if (a.window.empty()) {
    window.resize(s.ball->size());
    std::iota(window.begin(), window.end(), 0);
  } else {
    window = vertex_set(*s.ball->complex, a.window, r);
  }
  return validate_quasiline(s.ball, window, s.phi, a.min_periods);
}

struct WindowArgs {
  std::string dir, base;
  int depth = 1, radius = 6, cap = 5;
};

std::shared_ptr<const GraphOfComplexes> gog_input(const std::string& dir, io::Report& r) {
  io::GogFiles g = io::load_gog(dir);
  for (const auto& f : g.files)
    if (!r.inputs.contains(f.generic_string())) r.add_input(f);
  for (const auto& n : g.gog.notes) r.caveats.push_back(n);
  return std::make_shared<const GraphOfComplexes>(std::move(g.gog));
}

std::uint32_t gog_vertex(const GraphOfComplexes& G, const std::string& name) {
  if (name.empty()) return 0;
  for (std::uint32_t v = 0; v < G.vertex_count(); ++v)
    if (G.vertex_names[v] == name) return v;
  throw InputError("unknown graph vertex '" + name + "'");
}

int write_fixture(const std::string& name, const std::string& out, int m, int n, const Common& c) {
  io::Report r;
  r.command = "fixture";
  std::vector<fs::path> written;
  auto complex_file = [&](const CubeComplex& X, const std::string& file) {
    fs::path p = fs::path(out) / file;
    io::write_file(p, io::canonical_dump(io::complex_to_json(X)));
    written.push_back(p);
  };
  if (name == "grid") complex_file(fixtures::grid(m, n), "grid" + std::to_string(m) + std::to_string(n) + ".json");
  else if (name == "line") complex_file(fixtures::line(), "line.json");
  else if (name == "ladder") complex_file(fixtures::ladder(), "ladder.json");
  else if (name == "comb") complex_file(fixtures::comb(), "comb.json");
  else if (name == "torus") complex_file(fixtures::torus(), "torus.json");
  else if (name == "klein") complex_file(fixtures::klein(), "klein.json");
  else if (name == "tori_gog") written = io::save_gog(fixtures::tori_gog(), fs::path(out) / name);
  else if (name == "transverse_gog") written = io::save_gog(fixtures::transverse_gog(), fs::path(out) / name);
  else if (name == "free_gog") written = io::save_gog(fixtures::free_gog(), fs::path(out) / name);
  else if (name == "wise_gog") written = io::save_gog(fixtures::wise_gog(), fs::path(out) / name);
  else throw InputError("unknown fixture '" + name + "'");
  json files = json::array();
  for (const auto& p : written) files.push_back(p.generic_string());
  r.results = {{"fixture", name}, {"files", files}};
  return emit(r, c, kOk);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cube complex geometry, quasilines and graphs of cube complexes"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--format", common.format, "Report format")->check(CLI::IsMember({"json", "text"}));
  app.add_flag("--trace", common.trace, "Include search traces in reports");
  std::function<int()> run;

  // complexes
  std::string file, from, to, set, set_a, set_b, base, out;
  int radius = 4;
  auto* validate = app.add_subcommand("validate", "Check links and the CAT(0) property");
  validate->add_option("complex", file)->required();
  validate->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "validate";
      r.add_input(file);
      CubeComplex X = io::load_complex(file);
      NpcReport npc = validate_npc(X);
      r.results = complex_summary(X);
      r.results.update(io::npc_json(X, npc));
      if (npc.ok) r.results.update(io::cat0_json(X, analyze_cat0(X)));
      return emit(r, common, npc.ok ? kOk : kFail);
    };
  });

  auto* hyper = app.add_subcommand("hyperplanes", "List hyperplanes with carriers and crossings");
  hyper->add_option("complex", file)->required();
  hyper->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "hyperplanes";
      r.add_input(file);
      CubeComplex X = io::load_complex(file);
      r.results = io::hyperplanes_json(X, compute_hyperplanes(X));
      return emit(r, common, kOk);
    };
  });

  auto* distance = app.add_subcommand("distance", "Distance and a geodesic in a CAT(0) complex");
  distance->add_option("complex", file)->required();
  distance->add_option("--from", from)->required();
  distance->add_option("--to", to)->required();
  distance->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "distance";
      r.add_input(file);
      CubeComplex X = io::load_complex(file);
      auto M = cat0_space(X);
      Vid p = X.vertex(from), q = X.vertex(to);
      Geodesic g = M->geodesic(p, q);
      r.results = {{"distance", M->distance(p, q)},
                   {"bfs_distance", bfs_distances(X, p)[q]},
                   {"geodesic", io::ids_json(X, g.vertices)},
                   {"crossed_hyperplanes", g.crossed}};
      return emit(r, common, kOk);
    };
  });

  auto* hull = app.add_subcommand("hull", "Convex hull of a vertex set");
  hull->add_option("complex", file)->required();
  hull->add_option("--set", set, "JSON array of ids (inline or in a file), or a comma list")->required();
  hull->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "hull";
      r.add_input(file);
      CubeComplex X = io::load_complex(file);
      auto M = cat0_space(X);
      auto S = vertex_set(X, set, r);
      ConvexSet H = hull_set(*M, S);
      r.results = {{"hull", io::ids_json(X, H.members)}, {"size", H.size()}, {"diameter", M->diameter(H.members)}};
      return emit(r, common, kOk);
    };
  });

  auto* special = app.add_subcommand("special", "Check the specialness conditions on hyperplanes");
  special->add_option("complex", file)->required();
  special->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "special";
      r.add_input(file);
      CubeComplex X = io::load_complex(file);
      SpecialnessReport s = check_special(X);
      r.results = io::special_json(X, s);
      return emit(r, common, s.special ? kOk : kFail);
    };
  });

  auto* develop = app.add_subcommand("develop", "Develop a ball of the universal cover");
  develop->add_option("complex", file)->required();
  develop->add_option("--radius", radius)->required();
  develop->add_option("--base", base, "Basepoint id (default: first vertex)");
  develop->add_option("--out", out, "Write the ball as a complex file");
  develop->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "develop";
      r.add_input(file);
      auto X = std::make_shared<const CubeComplex>(io::load_complex(file));
      auto B = develop_ball(X, base.empty() ? 0 : X->vertex(base), radius);
      r.results = complex_summary(*B->complex);
      r.results["radius"] = radius;
      r.results["boundary_vertices"] = B->boundary().size();
      r.results["cat0"] = B->has_metric();
      if (!out.empty()) {
        io::write_file(out, io::canonical_dump(io::complex_to_json(*B->complex)));
        r.results["written"] = out;
      }
      return emit(r, common, kOk);
    };
  });

  auto* gate = app.add_subcommand("gate", "Gate projections between two convex sets");
  gate->add_option("complex", file)->required();
  gate->add_option("--set-a", set_a)->required();
  gate->add_option("--set-b", set_b)->required();
  gate->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "gate";
      r.add_input(file);
      CubeComplex X = io::load_complex(file);
      auto M = cat0_space(X);
      ConvexSet A = hull_set(*M, vertex_set(X, set_a, r)), B = hull_set(*M, vertex_set(X, set_b, r));
      json gates = json::object();
      for (Vid b : B.members) {
        GateResult g = gate_vertex(*M, b, A);
        gates[X.vertex_ids[b]] = {{"image", X.vertex_ids[g.image]}, {"distance", g.distance}};
      }
      r.results = {{"A", io::ids_json(X, A.members)},
                   {"B", io::ids_json(X, B.members)},
                   {"A_pitchfork_B", io::ids_json(X, pitchfork(*M, A, B).members)},
                   {"B_pitchfork_A", io::ids_json(X, pitchfork(*M, B, A).members)},
                   {"gates_of_B", gates}};
      return emit(r, common, kOk);
    };
  });

  auto* bridge_cmd = app.add_subcommand("bridge", "Bridge decomposition of two convex sets");
  bridge_cmd->add_option("complex", file)->required();
  bridge_cmd->add_option("--set-a", set_a)->required();
  bridge_cmd->add_option("--set-b", set_b)->required();
  bridge_cmd->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "bridge";
      r.add_input(file);
      CubeComplex X = io::load_complex(file);
      auto M = cat0_space(X);
      ConvexSet A = hull_set(*M, vertex_set(X, set_a, r)), B = hull_set(*M, vertex_set(X, set_b, r));
      BridgeDecomposition d = bridge(*M, A, B);
      json witness = json::array();
      for (const auto& [v, w] : d.witness)
        witness.push_back({X.vertex_ids[v], X.vertex_ids[w.first], X.vertex_ids[w.second]});
      r.results = {{"A_pitchfork_B", io::ids_json(X, d.a_side.members)},
                   {"B_pitchfork_A", io::ids_json(X, d.b_side.members)},
                   {"a", X.vertex_ids[d.a]},
                   {"b", X.vertex_ids[d.b]},
                   {"connector", io::ids_json(X, d.connector.members)},
                   {"bridge", io::ids_json(X, d.bridge.members)},
                   {"witness", witness},
                   {"checks",
                    {{"product_bijective", d.product_bijective},
                     {"product_isometric", d.product_isometric},
                     {"sides_isometric", d.sides_isometric},
                     {"crossing_law", d.crossing_law},
                     {"separation_law", d.separation_law}}},
                   {"verified", d.verified()}};
      return emit(r, common, d.verified() ? kOk : kFail);
    };
  });

  // quasilines
  QlArgs ql;
  std::string word2, geodesic_file;
  long long budget_B = 0, S = 0;
  int length = 0;
  auto* qlc = app.add_subcommand("ql", "Quasiline analysis in a developed ball");
  qlc->require_subcommand(1);
  auto ql_options = [&](CLI::App* sub) {
    sub->add_option("complex", ql.file)->required();
    sub->add_option("--radius", ql.radius, "Ball radius")->capture_default_str();
    sub->add_option("--word", ql.word, "Loop word for phi, e.g. e0 or e0.e1^-1")->capture_default_str();
    sub->add_option("--base", ql.base, "Basepoint id");
    sub->add_option("--window", ql.window, "Window vertex set (default: the whole ball)");
    sub->add_option("--min-periods", ql.min_periods)->capture_default_str();
  };
  auto* ql_classify = qlc->add_subcommand("classify", "Classify hyperplanes as trivial, half-essential or essential");
  ql_options(ql_classify);
  ql_classify->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "ql classify";
      QlSetup s = ql_setup(ql, ql.word, r);
      Quasiline Q = ql_build(ql, s, r);
      Classification C = classify_hyperplanes(Q);
      r.results = io::classification_json(Q, C);
      if (!C.undecided.empty()) r.caveats.push_back("some hyperplanes could not be classified in this window");
      return emit(r, common, C.undecided.empty() ? kOk : kUndecided);
    };
  });
  auto* ql_constants = qlc->add_subcommand("constants", "Explicit quasiline constants");
  ql_options(ql_constants);
  ql_constants->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "ql constants";
      QlSetup s = ql_setup(ql, ql.word, r);
      Quasiline Q = ql_build(ql, s, r);
      Classification C = classify_or_throw(Q);
      r.results = io::classification_json(Q, C);
      r.results["constants"] = io::constants_json(quasiline_constants(Q, C));
      return emit(r, common, kOk);
    };
  });
  auto* ql_fellow = qlc->add_subcommand("fellow", "Fellow-travelling block along a long geodesic");
  ql_options(ql_fellow);
  ql_fellow->add_option("--B", budget_B, "Budget B (at least B0)")->required();
  auto* geo_opt = ql_fellow->add_option("--geodesic", geodesic_file, "JSON array of window vertex ids");
  ql_fellow->add_option("--length", length, "Use the orbit geodesic of this length through the window centre")
      ->excludes(geo_opt);
  ql_fellow->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "ql fellow";
      QlSetup s = ql_setup(ql, ql.word, r);
      Quasiline Q = ql_build(ql, s, r);
      Classification C = classify_or_throw(Q);
      QuasilineConstants K = quasiline_constants(Q, C);
      const MedianSpace& M = Q.metric();
      Geodesic g;
      if (!geodesic_file.empty()) {
        auto vs = vertex_set(*s.ball->complex, geodesic_file, r);
        g = M.geodesic(vs.front(), vs.back());
      } else {
        if (length <= 0) length = static_cast<int>(3 * budget_B);
        Automorphism inv = inverse(Q.phi);
        Vid a = Q.x0, b = Q.x0;
        while (M.distance(a, b) < length) {
          Vid na = inv.image[a], nb = Q.phi.image[b];
          if (na == kNone || nb == kNone) throw BudgetError("window too small for a geodesic of that length");
          if (M.distance(na, b) <= length) a = na;
          if (M.distance(a, nb) <= length) b = nb;
          if (M.distance(a, b) < length && M.distance(na, b) > length && M.distance(a, nb) > length)
            throw PreconditionError("cannot realize that length along the orbit");
        }
        g = M.geodesic(a, b);
      }
      FellowTravelResult f = fellow_travel(Q, C, K, Q.window, g, budget_B);
      r.results = {{"constants", io::constants_json(K)}, {"geodesic_length", g.length()}, {"B", budget_B}};
      r.results["result"] = io::fellow_json(Q, f);
      return emit(r, common, f.ok() ? kOk : kFail);
    };
  });
  auto* ql_comm = qlc->add_subcommand("commensurate", "Compare two deck maps acting on one window");
  ql_options(ql_comm);
  ql_comm->add_option("--word2", word2, "Loop word of the second deck map")->required();
  ql_comm->add_option("--S", S, "Projection diameter threshold")->capture_default_str();
  ql_comm->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "ql commensurate";
      QlSetup s1 = ql_setup(ql, ql.word, r);
      Quasiline Q1 = ql_build(ql, s1, r);
      QlSetup s2 = s1;
      s2.phi = lift_loop(*s1.ball, parse_word(word2));
      Quasiline Q2 = ql_build(ql, s2, r);
      CommensurationResult c = commensurate(Q1, Q2, S);
      r.results = io::commensurate_json(c);
      r.results["phi_lengths"] = {Q1.phi_length, Q2.phi_length};
      return emit(r, common, c.decided ? kOk : kUndecided);
    };
  });

  // graphs of complexes
  std::string gdir, mode = "edges";
  int depth = 2, cap = 6, lmax = 4, plateau = 3;
  std::string path_arg;
  auto* gog = app.add_subcommand("gog", "Graphs of cube complexes");
  gog->require_subcommand(1);
  auto* gog_validate = gog->add_subcommand("validate", "Check every space and attaching map");
  gog_validate->add_option("gog", gdir, "Directory holding gog.json")->required();
  gog_validate->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "gog validate";
      auto G = gog_input(gdir, r);
      json vs = json::object(), es = json::array();
      for (std::uint32_t v = 0; v < G->vertex_count(); ++v) vs[G->vertex_names[v]] = complex_summary(*G->vertex_spaces[v]);
      for (std::uint32_t e = 0; e < G->edge_count(); ++e)
        es.push_back({{"name", G->edges[e].name},
                      {"minus", G->vertex_names[G->edges[e].minus_vertex]},
                      {"plus", G->vertex_names[G->edges[e].plus_vertex]},
                      {"space", complex_summary(*G->edge_spaces[e])}});
      r.results = {{"valid", true}, {"vertex_spaces", vs}, {"edges", es}};
      return emit(r, common, kOk);
    };
  });
  auto* gog_total = gog->add_subcommand("total", "Build the total space");
  gog_total->add_option("gog", gdir)->required();
  gog_total->add_option("--out", out, "Write the total space as a complex file");
  gog_total->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "gog total";
      auto G = gog_input(gdir, r);
      CubeComplex T = total_space(*G);
      NpcReport npc = validate_npc(T);
      r.results = complex_summary(T);
      r.results.update(io::npc_json(T, npc));
      if (!out.empty()) {
        io::write_file(out, io::canonical_dump(io::complex_to_json(T)));
        r.results["written"] = out;
      }
      return emit(r, common, npc.ok ? kOk : kFail);
    };
  });
  auto* gog_cyc = gog->add_subcommand("cyclonormal", "Check that triple coset stabilizers are trivial or cyclic");
  gog_cyc->add_option("gog", gdir)->required();
  gog_cyc->add_option("--mode", mode, "edges or paths:N")->capture_default_str();
  gog_cyc->add_option("--depth", depth)->capture_default_str();
  gog_cyc->add_option("--radius", radius, "Chamber radius (default 8)");
  gog_cyc->add_option("--cap", cap)->capture_default_str();
  gog_cyc->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "gog cyclonormal";
      auto G = gog_input(gdir, r);
      int n = 0;
      if (mode.rfind("paths:", 0) == 0) {
        try {
          n = std::stoi(mode.substr(6));
        } catch (const std::exception&) {
          throw InputError("mode must be edges or paths:N");
        }
        if (n < 1) throw InputError("path length must be at least 1");
      } else if (mode != "edges") {
        throw InputError("mode must be edges or paths:N");
      }
      const int R = gog_cyc->count("--radius") ? radius : 8;
      CyclonormalReport c = check_cyclonormal(G, n, depth, R, cap);
      r.results = io::cyclonormal_json(*G, c);
      for (const auto& cv : c.caveats) r.caveats.push_back(cv);
      if (!c.pass) return emit(r, common, kFail);
      return emit(r, common, c.undecided_dominated ? kUndecided : kOk);
    };
  });
  auto* gog_stature = gog->add_subcommand("stature", "Tally classes of infinite path stabilizers");
  gog_stature->add_option("gog", gdir)->required();
  gog_stature->add_option("--Lmax", lmax)->capture_default_str();
  gog_stature->add_option("--radius", radius, "Chamber radius (default 8)");
  gog_stature->add_option("--cap", cap, "Coset cap (default 3)");
  gog_stature->add_option("--base", base, "Base graph vertex");
  gog_stature->add_option("--plateau", plateau)->capture_default_str();
  gog_stature->add_option("--S", S, "Caller-supplied triple-gate quotient bound");
  gog_stature->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "gog stature";
      auto G = gog_input(gdir, r);
      StatureOptions opt;
      opt.plateau = plateau;
      opt.trace = common.trace;
      if (gog_stature->count("--S")) opt.S = S;
      const int R = gog_stature->count("--radius") ? radius : 8;
      const int C = gog_stature->count("--cap") ? cap : 3;
      StatureReport s = stature_probe(G, gog_vertex(*G, base), lmax, R, C, opt);
      r.results = io::stature_json(*G, s);
      if (common.trace) r.trace = io::stature_trace_json(*G, s);
      for (const auto& cv : s.caveats) r.caveats.push_back(cv);
      std::size_t undecided = std::accumulate(s.undecided_counts.begin(), s.undecided_counts.end(), std::size_t{0});
      std::size_t paths = std::accumulate(s.path_counts.begin(), s.path_counts.end(), std::size_t{0});
      return emit(r, common, 2 * undecided > paths ? kUndecided : kOk);
    };
  });

  // Bass-Serre windows
  WindowArgs wa;
  auto* bs = app.add_subcommand("bs", "Truncated Bass-Serre tree windows");
  bs->require_subcommand(1);
  auto window_options = [&](CLI::App* sub) {
    sub->add_option("gog", wa.dir)->required();
    sub->add_option("--base", wa.base, "Base graph vertex");
    sub->add_option("--depth", wa.depth)->capture_default_str();
    sub->add_option("--radius", wa.radius)->capture_default_str();
    sub->add_option("--cap", wa.cap)->capture_default_str();
  };
  auto* bs_window = bs->add_subcommand("window", "Chambers and strips of a tree window");
  window_options(bs_window);
  bs_window->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "bs window";
      auto G = gog_input(wa.dir, r);
      TreeWindow W = tree_window(G, gog_vertex(*G, wa.base), wa.depth, wa.radius, wa.cap);
      r.results = io::window_json(W);
      if (W.truncated()) r.caveats.push_back("coset enumeration was capped at " + std::to_string(wa.cap));
      return emit(r, common, kOk);
    };
  });
  auto* bs_stab = bs->add_subcommand("stab", "Gate and stabilizer of a path of strips");
  window_options(bs_stab);
  bs_stab->add_option("--path", path_arg, "Comma-separated strip ids")->required();
  bs_stab->callback([&] {
    run = [&] {
      io::Report r;
      r.command = "bs stab";
      auto G = gog_input(wa.dir, r);
      TreeWindow W = tree_window(G, gog_vertex(*G, wa.base), wa.depth, wa.radius, wa.cap);
      TreePath rho;
      for (const auto& s : split(path_arg, ',')) {
        try {
          rho.strips.push_back(static_cast<std::uint32_t>(std::stoul(s)));
        } catch (const std::exception&) {
          throw InputError("bad strip id '" + s + "'");
        }
      }
      PathStabilizerApprox ps = path_stabilizer(W, rho);
      r.results = io::path_stabilizer_json(W, ps);
      if (common.trace) r.trace = {{"gate_notes", ps.gate.caveats}, {"anchor_chamber", ps.gate.chamber}};
      for (const auto& cv : ps.stab.caveats) r.caveats.push_back(cv);
      return emit(r, common, ps.stab.verdict == CyclicVerdict::undecided ? kUndecided : kOk);
    };
  });

  // fixtures
  std::string fixture_name;
  int gm = 2, gn = 2;
  auto* fixture = app.add_subcommand("fixture", "Write a fixture complex or graph of complexes");
  fixture->add_option("name", fixture_name)
      ->required()
      ->check(CLI::IsMember(
          {"grid", "line", "ladder", "comb", "torus", "klein", "tori_gog", "transverse_gog", "free_gog", "wise_gog"}));
  fixture->add_option("--out", out, "Output directory")->required();
  fixture->add_option("--m", gm, "Grid width")->capture_default_str();
  fixture->add_option("--n", gn, "Grid height")->capture_default_str();
  fixture->callback([&] { run = [&] { return write_fixture(fixture_name, out, gm, gn, common); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInput;
  }
  try {
    return run();
  } catch (const Error& e) {
    std::cerr << "mf: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "mf: " << e.what() << "\n";
    return kInput;
  }
}

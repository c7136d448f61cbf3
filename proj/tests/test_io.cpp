#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <set>
#include <sys/wait.h>
#include <unistd.h>

#include "mf/bass_serre/gog_fixtures.hpp"
#include "mf/io/report.hpp"
#include "mf/io/results.hpp"

using namespace mf;
namespace fx = mf::fixtures;
namespace fs = std::filesystem;
using io::json;

namespace {

const fs::path kFixtures = MF_FIXTURE_DIR;

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("mf_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct CliRun {
  int code;
  std::string out;
};

CliRun mf_cli(const std::string& args) {
  static int counter = 0;
  fs::path out = fs::temp_directory_path() / ("mf_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  const std::string cmd = std::string(MF_CLI_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  CliRun r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, io::read_file(out)};
  fs::remove(out);
  return r;
}

std::string fixture(const std::string& name) { return (kFixtures / name).string(); }

void expect_same_map(const CombinatorialMap& a, const CombinatorialMap& b) {
  EXPECT_EQ(a.vertex_map, b.vertex_map);
  EXPECT_EQ(a.edge_map, b.edge_map);
  EXPECT_EQ(a.square_map, b.square_map);
}

}  // namespace

TEST(RoundTrip, Complexes) {
  for (CubeComplex X : {fx::grid(2, 2), fx::grid(3, 1), fx::line(), fx::ladder(), fx::comb(), fx::torus(), fx::klein(),
                        fx::subdivided_torus(3), fx::rose2_double_cover(), fx::cycle(5)}) {
    json j = io::complex_to_json(X);
    CubeComplex Y = io::complex_from_json(io::parse_json(io::canonical_dump(j), X.name));
    EXPECT_TRUE(io::same_complex(X, Y)) << X.name;
    EXPECT_EQ(io::canonical_dump(io::complex_to_json(Y)), io::canonical_dump(j)) << X.name;
  }
}

TEST(RoundTrip, DevelopedBalls) {
  auto B = develop_ball(fx::shared(fx::klein()), 0, 4);
  const CubeComplex& X = *B->complex;
  CubeComplex Y = io::complex_from_json(io::complex_to_json(X));
  // balls are not built in normal cell form, so compare squares by their edge sets
  ASSERT_EQ(Y.vertex_ids, X.vertex_ids);
  ASSERT_EQ(Y.edge_count(), X.edge_count());
  for (Eid e = 0; e < X.edge_count(); ++e) EXPECT_EQ(Y.edges[e].tail, X.edges[e].tail);
  auto edge_sets = [](const CubeComplex& Z) {
    std::set<std::set<Eid>> out;
    for (const Cube& q : Z.squares) {
      std::set<Eid> s;
      for (int k = 0; k < 4; ++k) s.insert(q.edges[k].edge);
      out.insert(s);
    }
    return out;
  };
  EXPECT_EQ(edge_sets(Y), edge_sets(X));
  EXPECT_TRUE(io::same_complex(Y, io::complex_from_json(io::complex_to_json(Y))));
}

TEST(RoundTrip, Maps) {
  auto G = fx::free_gog();
  for (std::uint32_t e = 0; e < G.edge_count(); ++e)
    for (int side : {0, 1}) {
      const CombinatorialMap& f = G.attachment(e, side);
      CombinatorialMap g = io::map_from_json(io::map_to_json(f), f.source, f.target, "map");
      expect_same_map(f, g);
    }
}

TEST(RoundTrip, Gogs) {
  for (GraphOfComplexes G : {fx::tori_gog(), fx::transverse_gog(), fx::free_gog(), fx::wise_gog()}) {
    fs::path dir = scratch("gog");
    io::save_gog(G, dir);
    GraphOfComplexes H = io::load_gog(dir).gog;
    ASSERT_EQ(H.vertex_names, G.vertex_names);
    ASSERT_EQ(H.edge_count(), G.edge_count());
    for (std::size_t v = 0; v < G.vertex_count(); ++v)
      EXPECT_TRUE(io::same_complex(*G.vertex_spaces[v], *H.vertex_spaces[v]));
    for (std::uint32_t e = 0; e < G.edge_count(); ++e) {
      EXPECT_EQ(H.edges[e].name, G.edges[e].name);
      EXPECT_TRUE(io::same_complex(*G.edge_spaces[e], *H.edge_spaces[e]));
      expect_same_map(G.minus[e], H.minus[e]);
      expect_same_map(G.plus[e], H.plus[e]);
    }
    fs::remove_all(dir);
  }
}

TEST(Fixtures, FilesMatchGenerators) {
  EXPECT_TRUE(io::same_complex(io::load_complex(fixture("grid22.json")), fx::grid(2, 2)));
  EXPECT_TRUE(io::same_complex(io::load_complex(fixture("torus.json")), fx::torus()));
  EXPECT_TRUE(io::same_complex(io::load_complex(fixture("klein.json")), fx::klein()));
  EXPECT_TRUE(io::same_complex(io::load_complex(fixture("line.json")), fx::line()));
  GraphOfComplexes G = io::load_gog(kFixtures / "tori_gog").gog;
  EXPECT_EQ(G.vertex_names, fx::tori_gog().vertex_names);
}

TEST(Parse, Errors) {
  EXPECT_THROW(io::parse_json("{", "x"), InputError);
  json dangling = {{"name", "d"}, {"vertices", {"a"}}, {"edges", {{"a", "b"}}}};
  EXPECT_THROW(io::complex_from_json(dangling), InputError);
  json missing_side = {{"name", "s"},
                       {"vertices", {"a", "b", "c", "d"}},
                       {"edges", {{"a", "b"}, {"a", "c"}}},
                       {"squares", {{"a", "b", "c", "d"}}}};
  EXPECT_THROW(io::complex_from_json(missing_side), InputError);
  json capped = {{"name", "c"},
                 {"dim_cap", 1},
                 {"vertices", {"a", "b", "c", "d"}},
                 {"edges", {{"a", "b"}, {"a", "c"}, {"b", "d"}, {"c", "d"}}},
                 {"squares", {{"a", "b", "c", "d"}}}};
  EXPECT_THROW(io::complex_from_json(capped), InputError);
  EXPECT_THROW(io::load_complex("/nonexistent/complex.json"), InputError);
}

TEST(Report, DigestAndDeterminism) {
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  io::Report r;
  r.command = "validate";
  r.add_input(fixture("grid22.json"));
  r.results = {{"z", 1}, {"a", {{"y", 2}, {"b", 3}}}};
  const std::string once = io::render(r, false), twice = io::render(r, false);
  EXPECT_EQ(once, twice);
  EXPECT_LT(once.find("\"a\""), once.find("\"z\""));
  EXPECT_EQ(once.back(), '\n');
  EXPECT_NE(io::render(r, true).find("a.b: 3"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(mf_cli("validate " + fixture("grid22.json")).code, 0);
  CliRun special = mf_cli("special " + fixture("klein.json"));
  EXPECT_EQ(special.code, 2);
  json j = json::parse(special.out);
  EXPECT_FALSE(j["results"]["special"].get<bool>());
  EXPECT_EQ(j["results"]["violations"][0].count("one_sided_square"), 1u);
  EXPECT_EQ(mf_cli("validate /nonexistent.json").code, 1);
  EXPECT_EQ(mf_cli("no-such-command").code, 1);
  EXPECT_EQ(mf_cli("special " + fixture("torus.json")).code, 0);
}

TEST(Cli, ReportsAreByteIdentical) {
  CliRun a = mf_cli("hyperplanes " + fixture("grid88.json"));
  CliRun b = mf_cli("hyperplanes " + fixture("grid88.json"));
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  json j = json::parse(a.out);
  EXPECT_EQ(j["results"]["count"], 16);
  EXPECT_EQ(j["inputs"].size(), 1u);
}

TEST(Cli, QuasilineCommands) {
  CliRun c = mf_cli("ql constants " + fixture("line.json") + " --radius 20");
  ASSERT_EQ(c.code, 0);
  json K = json::parse(c.out)["results"]["constants"];
  EXPECT_EQ(K["B0"], 120);
  EXPECT_EQ(K["M"], 5);
  CliRun f = mf_cli("ql fellow " + fixture("line.json") + " --radius 400 --B 120 --length 360");
  EXPECT_EQ(f.code, 0);
  CliRun m = mf_cli("ql commensurate " + fixture("line.json") + " --radius 40 --word e0 --word2 e0.e0 --S 10");
  ASSERT_EQ(m.code, 0);
  json r = json::parse(m.out)["results"];
  EXPECT_EQ(r["d1"], 2);
  EXPECT_EQ(r["d2"], 1);
}

TEST(Cli, GogCommands) {
  EXPECT_EQ(mf_cli("gog validate " + fixture("tori_gog")).code, 0);
  CliRun t = mf_cli("gog total " + fixture("tori_gog"));
  ASSERT_EQ(t.code, 0);
  EXPECT_EQ(json::parse(t.out)["results"]["edges"], 5);
  EXPECT_EQ(mf_cli("bs window " + fixture("tori_gog") + " --depth 1").code, 0);
  CliRun s = mf_cli("bs stab " + fixture("tori_gog") + " --depth 2 --radius 8 --cap 3 --path 0");
  ASSERT_EQ(s.code, 0);
  EXPECT_EQ(json::parse(s.out)["results"]["verdict"], "cyclic");
  EXPECT_EQ(mf_cli("bs stab " + fixture("tori_gog") + " --path 99").code, 1);
}

TEST(Cli, CyclonormalVerdictFailExits2) {
  CliRun r = mf_cli("gog cyclonormal " + fixture("free_gog") + " ");
  EXPECT_EQ(r.code, 2);
  json j = json::parse(r.out)["results"];
  EXPECT_FALSE(j["pass"].get<bool>());
  EXPECT_EQ(j["witness"]["generators"].size(), 2u);
}

TEST(Cli, StatureOnTori) {
  CliRun r = mf_cli("gog stature " + fixture("tori_gog") + " --Lmax 4");
  ASSERT_EQ(r.code, 0);
  json j = json::parse(r.out)["results"];
  EXPECT_TRUE(j["stabilization"].get<bool>());
  EXPECT_EQ(j["tallies"], json({1, 1, 1, 1}));
}

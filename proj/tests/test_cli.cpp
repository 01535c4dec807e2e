#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "tnkit/io.hpp"

using namespace tnkit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out, err;
  json report() const { return json::parse(out); }
};

fs::path workdir() {
  static const fs::path d = [] {
    fs::path p = fs::temp_directory_path() / ("tnkit_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path write(const std::string& name, const json& j) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << j.dump();
  return p;
}

// args are passed to the shell verbatim; env is a prefix like "TNKIT_CAP_QUBITS=6"
Outcome run_cli(const std::string& args, const std::string& env = "") {
  const fs::path o = workdir() / "stdout", e = workdir() / "stderr";
  const std::string cmd = "cd '" + workdir().string() + "' && " + env + " '" TNKIT_BIN "' " + args + " >'" +
                          o.string() + "' 2>'" + e.string() + "'";
  const int st = std::system(cmd.c_str());
  Outcome r;
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

cplx c(const json& z) { return {z[0].get<double>(), z[1].get<double>()}; }

}  // namespace

TEST(Cli, TransferOfAklt) {
  write("aklt.json", io::to_json(*make("aklt1d").mps));
  const Outcome r = run_cli("transfer --in aklt.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.report();
  const auto& ev = j["results"]["eigenvalues"];
  ASSERT_EQ(ev.size(), 4u);
  EXPECT_NEAR(std::abs(c(ev[0]) - 1.0), 0, 1e-10);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(std::abs(c(ev[k]) + 1.0 / 3.0), 0, 1e-10);
  EXPECT_EQ(j["inputs"][0]["fnv1a"], io::fnv1a_hex(slurp(workdir() / "aklt.json")));
  EXPECT_DOUBLE_EQ(j["tolerances"]["eq"].get<double>(), 1e-10);
}

TEST(Cli, CompareGaugeRelatedPair) {
  std::mt19937_64 rng(3);
  const Mat X = random_matrix(2, 2, rng) + 2.0 * Mat::Identity(2, 2);
  std::vector<Mat> b;
  for (const auto& a : make("aklt1d").mps->mats()) b.push_back(X * a * X.inverse());
  write("a.json", io::to_json(*make("aklt1d").mps));
  write("b.json", io::to_json(UniformMps::periodic(b)));
  const Outcome r = run_cli("compare --a a.json --b b.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.report();
  EXPECT_EQ(j["verdicts"]["verdict"], "Equal");
  EXPECT_TRUE(j["results"].contains("gauge"));
  EXPECT_EQ(j["inputs"].size(), 2u);
}

TEST(Cli, SectorsAndTee) {
  const Outcome r = run_cli("sectors --group z2 --lx 3 --ly 3 --jobs 2");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["verdicts"]["rank"], 4);
  const Outcome t = run_cli("tee --group z2 --lx 4 --ly 4 --region 1,1,3,3");
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_NEAR(t.report()["results"]["gamma"].get<double>(), std::log(2.0), 1e-8);
}

TEST(Cli, DeterministicReports) {
  write("aklt.json", io::to_json(*make("aklt1d").mps));
  for (const std::string cmd : {"canonical --in aklt.json", "ground-space --in aklt.json --N 6 --seed 9",
                                "gap-martingale --in aklt.json", "corpus list"}) {
    json a = run_cli(cmd).report(), b = run_cli(cmd).report();
    a.erase("wall_time");
    b.erase("wall_time");
    EXPECT_EQ(a.dump(), b.dump()) << cmd;
  }
}

TEST(Cli, StdinAndPipes) {
  const Outcome r = run_cli("corpus export aklt1d | '" TNKIT_BIN "' injectivity --in -");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["results"]["injectivity_length"], 2);
  EXPECT_EQ(r.report()["inputs"][0]["path"], "-");
}

TEST(Cli, ExitCodes) {
  std::ofstream(workdir() / "broken.json") << "{\"kind\":\"mps\",";
  Outcome r = run_cli("normal --in broken.json");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err)["error"]["code"], "invalid_input");
  EXPECT_TRUE(r.out.empty());

  write("short.json", json::parse(R"({"kind":"mps","dims":{"p":2,"l":1,"r":1},"data":[[1,0]]})"));
  EXPECT_EQ(run_cli("normal --in short.json").code, 2);
  EXPECT_EQ(run_cli("normal --in missing.json").code, 2);
  EXPECT_EQ(run_cli("frobnicate").code, 2);
  EXPECT_EQ(run_cli("normal").code, 2);
  EXPECT_EQ(run_cli("peps-boundary --in x.json --region 1,2").code, 2);

  write("aklt.json", io::to_json(*make("aklt1d").mps));
  r = run_cli("ground-space --in aklt.json --N 8", "TNKIT_CAP_QUBITS=6");
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(json::parse(r.err)["error"]["code"], "cap_exceeded");
  EXPECT_EQ(run_cli("ground-space --in aklt.json --N 4", "TNKIT_CAP_QUBITS=7").code, 0);
  EXPECT_EQ(run_cli("corpus list", "TNKIT_CAP_QUBITS=abc").code, 2);
  EXPECT_EQ(run_cli("sectors --group z2 --lx 5 --ly 5").code, 3);

  // a failing verdict is still exit 0
  write("ghz.json", io::to_json(*make("ghz").mps));
  r = run_cli("normal --in ghz.json");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.report()["verdicts"]["normal"], false);
}

TEST(Cli, EverySubcommandHasHelp) {
  for (const char* s : {"canonical", "compare", "normal", "injectivity", "transfer", "entspec", "corrlen", "symmetry",
                        "spt", "tr-index", "string-order", "spt-build", "rgfp", "parent-ham", "ground-space",
                        "gap-martingale", "gap-knabe", "mpo-apply", "mpu-check", "mpu-index", "mpo-reduce",
                        "peps-norm", "peps-expect", "peps-boundary", "sectors", "tee", "corpus"}) {
    EXPECT_EQ(run_cli(std::string(s) + " --help").code, 0) << s;
  }
}

TEST(Cli, SymmetryCommands) {
  ASSERT_EQ(run_cli("corpus export aklt1d --out aklt.json").code, 0);
  ASSERT_EQ(run_cli("corpus export aklt1d --what symmetry --out sym.json").code, 0);
  Outcome r = run_cli("spt --in aklt.json --sym sym.json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["verdicts"]["trivial"], false);
  EXPECT_EQ(r.report()["results"]["label"], json::array({1}));
  r = run_cli("tr-index --in aklt.json");
  EXPECT_EQ(r.report()["verdicts"]["index"], -1);

  // Z2 x Z2 with the nontrivial cocycle omega(g, h) = pi g_2 h_1
  json omega = json::array();
  for (int g = 0; g < 4; ++g) {
    json row = json::array();
    for (int h = 0; h < 4; ++h) row.push_back(M_PI * ((g & 1) * ((h >> 1) & 1)));
    omega.push_back(row);
  }
  write("cocycle.json", {{"kind", "cocycle"}, {"group", "z2xz2"}, {"omega", omega}});
  r = run_cli("spt-build --in cocycle.json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["verdicts"]["round_trip"], true);
  EXPECT_EQ(r.report()["verdicts"]["fixed_point"], true);
}

TEST(Cli, MpoAndPeps) {
  ASSERT_EQ(run_cli("corpus export shift_mpu --out shift.json").code, 0);
  Outcome r = run_cli("mpu-index --in shift.json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.report()["verdicts"]["index"].get<double>(), 1.0, 1e-10);

  ASSERT_EQ(run_cli("corpus export ising_peps --param beta=0.4406 --lx 3 --ly 3 --out ising.json").code, 0);
  Mat z = Mat::Identity(2, 2);
  z(1, 1) = -1;
  write("ops.json", io::to_json(std::vector<PlacedOp>{{0, 0, z}, {1, 0, z}}));
  r = run_cli("peps-expect --in ising.json --ops ops.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const double v = c(r.report()["results"]["value"]).real();
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0);

  ASSERT_EQ(run_cli("corpus export ghz2d --lx 3 --ly 3 --out ghz2d.json").code, 0);
  r = run_cli("peps-boundary --in ghz2d.json --region 0,0,2,2");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["results"]["sigma_rank"], 2);
  EXPECT_NEAR(r.report()["results"]["entropy"].get<double>(), std::log(2.0), 1e-10);
}

TEST(Cli, CorpusValidate) {
  const Outcome r = run_cli("corpus validate");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.report()["verdicts"]["all_passed"], true);
  EXPECT_EQ(run_cli("corpus show ising_peps --param beta=-1").code, 2);
}

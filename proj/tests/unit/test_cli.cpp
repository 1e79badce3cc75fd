#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kreinlab/io.hpp"
#include "kreinlab/kreinlab.hpp"

using namespace kreinlab;
namespace fs = std::filesystem;

namespace {

const fs::path data_dir = KREINLAB_TEST_DATA;

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("kreinlab_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// Runs the CLI inside `dir` with stdout captured to dir/stdout.txt; returns the exit status.
int run(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" + KREINLAB_CLI + "' " + args + " > stdout.txt 2> stderr.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(io::split_csv_line(line));
  return rows;
}

}  // namespace

TEST_CASE("dtn on the interval matches the closed form") {
  const auto d = scratch_dir("dtn_interval");
  REQUIRE(run(d, "--out m.csv dtn --domain interval --z=-1,0") == 0);
  const CMat m = io::read_matrix_csv(d / "m.csv");
  CHECK((m - oracles::interval_dtn(-1.0)).norm() <= 1e-12);
  const auto meta = io::read_json(d / "m.json");
  CHECK(meta["command"] == "dtn");
  CHECK(meta["N"] == 2);
  CHECK(meta["z"][0] == -1.0);
  CHECK(meta["condition"].get<double>() >= 1.0);
}

TEST_CASE("dtn on the disk of radius 1.3 has Rayleigh quotients -|k|/1.3") {
  const auto d = scratch_dir("dtn_disk");
  REQUIRE(run(d, "--nodes 128 dtn --domain " + (data_dir / "disk13.json").string() + " --z 0,0") == 0);
  const CMat m = io::read_matrix_csv(d / "dtn.csv");
  REQUIRE(m.rows() == 128);
  const auto g = geometry::make_grid(geometry::CurveSpec::circle(1.3), 128);
  for (int k = -10; k <= 10; ++k) {
    CVec e(g.n);
    for (int j = 0; j < g.n; ++j) e[j] = std::polar(1.0, k * g.t[j]);
    const cplx q = la::pairing(m * e, e, g.measure()) / la::pairing(e, e, g.measure());
    CHECK(std::abs(q + std::abs(k) / 1.3) <= 1e-8);
  }
}

TEST_CASE("errors exit nonzero with machine-readable JSON") {
  const auto d = scratch_dir("errors");
  CHECK(run(d, "dtn --domain /nonexistent/domain.json --z 0") == 2);
  const auto j = io::json::parse(slurp(d / "stdout.txt"));
  CHECK(j["error"] == "config_not_found");
  CHECK(run(d, "spectrum --spec /nonexistent/spec.json --window 1,2") == 2);
  CHECK(run(d, "dtn --domain interval --z 9.869604401089358") == 3);
  CHECK(io::json::parse(slurp(d / "stdout.txt"))["error"] == "near_eigenvalue");
  CHECK(run(d, "mfunc-scan --spec " + (data_dir / "krein.json").string() + " --path 0:0.1:1") == 3);
  CHECK(run(d, "verify --suite nope --backend interval") != 0);
}

TEST_CASE("spectrum of the Krein interval extension") {
  const auto d = scratch_dir("spectrum");
  REQUIRE(run(d, "spectrum --spec " + (data_dir / "krein.json").string() + " --window 1,100") == 0);
  const auto rows = read_csv(d / "eigs.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"index", "lambda", "multiplicity", "ratio"});
  CHECK(std::abs(io::parse_real(rows[1][1]) - 39.478417604357434475) <= 1e-6 * 39.5);
  CHECK(std::abs(io::parse_real(rows[2][1]) - 80.762914225706519898) <= 1e-6 * 80.8);

  REQUIRE(run(d, "--out empty.csv spectrum --spec " + (data_dir / "krein.json").string() + " --window 1,30") == 0);
  const auto empty = read_csv(d / "empty.csv");
  REQUIRE(empty.size() == 1);
  CHECK(empty[0][0] == "index");
}

TEST_CASE("mfunc-scan stays in the closed upper half plane") {
  const auto d = scratch_dir("mfunc");
  REQUIRE(run(d, "mfunc-scan --spec " + (data_dir / "krein.json").string() + " --path \"0.1+0.1i:0.1:3+0.1i\"") == 0);
  const auto rows = read_csv(d / "mfunc.csv");
  REQUIRE(rows.size() == 31);
  CHECK(rows[0][0] == "z");
  double lowest = INFINITY;
  for (std::size_t i = 1; i < rows.size(); ++i)
    for (std::size_t c = 1; c < rows[i].size(); ++c) lowest = std::min(lowest, io::parse_real(rows[i][c]));
  CHECK(lowest >= -1e-10);
  // a disk spec loaded from JSON
  REQUIRE(run(d, "--out disk.csv mfunc-scan --spec " + (data_dir / "robin_disk.json").string() +
                     " --path \"-1+0.5i:1:1+0.5i\"") == 0);
  CHECK(read_csv(d / "disk.csv")[0].size() == 18);
}

TEST_CASE("solve on model backends satisfies the boundary condition") {
  const auto d = scratch_dir("solve");
  REQUIRE(run(d, "--out u.csv solve --spec " + (data_dir / "krein.json").string() + " --z=-1 --source poly:1") == 0);
  const auto meta = io::read_json(d / "u.json");
  CHECK(meta["boundary_residual"].get<double>() <= 1e-9);
  CHECK(read_csv(d / "u.csv")[0] == std::vector<std::string>{"x", "u"});
  REQUIRE(run(d, "--nodes 64 --out bvp.csv solve --domain kite --z=-1 --bc dirichlet --mode 2") == 0);
  const auto rows = read_csv(d / "bvp.csv");
  CHECK(rows.size() == 65);
  CHECK(rows[0] == std::vector<std::string>{"t", "x", "y", "trace_d", "trace_n"});
}

TEST_CASE("verify: pass, injected failure, and byte-identical reports") {
  const auto d = scratch_dir("verify");
  REQUIRE(run(d, "--out a verify --suite all --backend interval") == 0);
  REQUIRE(run(d, "--out b verify --suite all --backend interval") == 0);
  const std::string ra = slurp(d / "a" / "report.json");
  CHECK(!ra.empty());
  CHECK(ra == slurp(d / "b" / "report.json"));
  CHECK(slurp(d / "a" / "ledger.json") == slurp(d / "b" / "ledger.json"));
  const auto rep = io::json::parse(ra);
  CHECK(rep["pass"] == true);
  CHECK(rep["seed"] == 1);
  CHECK(rep["reports"].size() == 1);
  CHECK(io::read_json(d / "a" / "ledger.json")["consistent"] == true);

  CHECK(run(d, "--out c verify --suite krein --backend disk --inject krein_resolvent_formula") == 1);
  const auto bad = io::read_json(d / "c" / "ledger.json");
  CHECK(bad["consistent"] == false);
  CHECK(bad["violated"] == io::json::array({"krein_resolvent_formula"}));
  CHECK(slurp(d / "stdout.txt").find("krein_resolvent_formula") != std::string::npos);

  // a different seed changes the randomized operators and is recorded
  REQUIRE(run(d, "--seed 5 --out e verify --suite krein --backend interval") == 0);
  CHECK(io::read_json(d / "e" / "report.json")["seed"] == 5);
}

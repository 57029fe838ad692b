// Runs the installed command line tool as a child process.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

#ifndef FRACTILE_CLI_PATH
#error "FRACTILE_CLI_PATH must point at the fractile binary"
#endif

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("fractile_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Exit status of `fractile <args>`, stdout captured into `out`.
int run(const std::string& args, std::string* out = nullptr) {
  const auto capture = scratch_dir() / "stdout.txt";
  const std::string cmd = std::string("FRACTILE_THREADS= '") + FRACTILE_CLI_PATH + "' " + args + " > '" +
                          capture.string() + "' 2> '" + (scratch_dir() / "stderr.txt").string() + "'";
  const int st = std::system(cmd.c_str());
  if (out) {
    std::ifstream in(capture);
    std::stringstream ss;
    ss << in.rdbuf();
    *out = ss.str();
  }
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string last_stderr() { return slurp(scratch_dir() / "stderr.txt"); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("matrix subcommand") {
    std::string out;
    CHECK(run("matrix --kind hexagonal --lambda 5 --p 0.5 --pstar 0", &out) == 0);
    auto j = json::parse(out);
    CHECK(j.begin().key() == "config");
    CHECK(j["rho"].get<double>() == doctest::Approx(6.0));

    CHECK(run("matrix --kind square --lambda 4 --p 0.5 --pstar 0", &out) == 0);
    j = json::parse(out);
    CHECK(j["dimension"].get<double>() == doctest::Approx(1.18215).epsilon(1e-4));

    // The printed triangular formula disagrees with the matrix: flag raised.
    CHECK(run("matrix --kind triangular --lambda 4 --p 0.5 --pstar 0", &out) == 1);
    CHECK(json::parse(out)["flags"].size() > 0);
    CHECK(run("--report-only matrix --kind triangular --lambda 4 --p 0.5 --pstar 0") == 0);
  }

  TEST_CASE("usage and module errors") {
    CHECK(run("matrix --kind hexagonal --lambda 2 --p 0.5 --pstar 1") == 3);
    CHECK(last_stderr().find("lambda") != std::string::npos);
    CHECK(run("matrix --kind octagon --lambda 4") == 2);
    CHECK(run("matrix --lambda notanumber") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("vonkoch --pattern 10x11") == 2);
    CHECK(last_stderr().find("position 3") != std::string::npos);
    CHECK(run("--config /nonexistent/cfg.json matrix") == 4);
  }

  TEST_CASE("simulate writes snapshots, svgs and stats") {
    const auto a = scratch_dir() / "sim_a";
    const auto b = scratch_dir() / "sim_b";
    const std::string common = "simulate --kind square --lambda 3 --p 0.5 --pstar 0 --seed 9 --n 3 --out ";
    REQUIRE(run(common + "'" + a.string() + "'") == 0);
    REQUIRE(run(common + "'" + b.string() + "'") == 0);
    for (int m = 0; m <= 3; ++m) {
      CHECK(fs::exists(a / ("snapshot_" + std::to_string(m) + ".json")));
      CHECK(fs::exists(a / ("level_" + std::to_string(m) + ".svg")));
      CHECK(slurp(a / ("level_" + std::to_string(m) + ".svg")) == slurp(b / ("level_" + std::to_string(m) + ".svg")));
    }
    const auto csv = slurp(a / "stats.csv");
    CHECK(csv.rfind("# fractile simulate", 0) == 0);
    CHECK(csv.find("\nn,frontier_total,") != std::string::npos);
    CHECK(json::parse(slurp(a / "snapshot_2.json")).contains("config"));
  }

  TEST_CASE("config file precedence") {
    const auto cfg = scratch_dir() / "cfg.json";
    std::ofstream(cfg) << R"({"kind": "square", "lambda": 4, "p": 0.5, "p_star": 0,
                             "matrix": {"lambda": 3}})";
    std::string out;
    REQUIRE(run("--config '" + cfg.string() + "' matrix", &out) == 0);
    auto j = json::parse(out);
    CHECK(j["config"]["kind"] == "square");
    CHECK(j["config"]["lambda"] == 3);
    REQUIRE(run("--config '" + cfg.string() + "' matrix --lambda 5", &out) == 0);
    CHECK(json::parse(out)["config"]["lambda"] == 5);

    std::ofstream(cfg) << "{broken";
    CHECK(run("--config '" + cfg.string() + "' matrix") == 2);
  }

  TEST_CASE("dim-sweep and vonkoch") {
    std::string out;
    REQUIRE(run("dim-sweep --kind hexagonal --lambda 3 --pstar 0 --grid 0,1 --generations 6 --replicates 3", &out) == 0);
    CHECK(out.find("p,d_theoretical,d_numerical_median,d_numerical_iqr,fit_residual,error") != std::string::npos);
    REQUIRE(run("vonkoch --pattern 000", &out) == 0);
    CHECK(json::parse(out)["dimension"].get<double>() == doctest::Approx(1.0));
    REQUIRE(run("vonkoch --random --lambda 3 --p 0.5 --samples 500", &out) == 0);
    CHECK(json::parse(out)["rho"].get<double>() == doctest::Approx(3.5));
    REQUIRE(run("vonkoch --pattern 10011 --format csv", &out) == 0);
    CHECK(out.find(',') != std::string::npos);
  }
}

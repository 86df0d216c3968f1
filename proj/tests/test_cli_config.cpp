#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "clusterdiag/config.hpp"
#include "clusterdiag/runner.hpp"

using namespace clusterdiag;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  SECTION("round trip with sections, lists and comments") {
    auto cfg = ExperimentConfig::parse(R"(
# experiment
[run]
kind = figure3
seed = 99
[lattice]
n = 8
boundary = periodic
[channel]
px = 0.1, 0.2   # grid
pz = 0.0
[figure3]
loop_sizes = 2, 3
[mc]
sweeps = 512
thermalization = 64
)");
    REQUIRE(cfg.kind == "figure3");
    REQUIRE(cfg.seed == 99);
    REQUIRE(cfg.lattice_n == 8);
    REQUIRE(cfg.px_values == std::vector<double>{0.1, 0.2});
    REQUIRE(cfg.loop_sizes == std::vector<int>{2, 3});
    REQUIRE(cfg.schedule.sweeps == 512);
    REQUIRE(cfg.to_json()["lattice"]["n"] == 8);
  }
  SECTION("schema violations rejected") {
    REQUIRE_THROWS_AS(ExperimentConfig::parse("[run]\nkind = bogus\n"), ConfigError);
    REQUIRE_THROWS_AS(ExperimentConfig::parse("[run]\nkind = figure3\n[channel]\npx =\n"),
                      ConfigError);
    REQUIRE_THROWS_AS(ExperimentConfig::parse("[channel]\npx = 0.7\n"), ConfigError);
    REQUIRE_THROWS_AS(ExperimentConfig::parse("[lattice]\nn = 1\n"), ConfigError);
    REQUIRE_THROWS_AS(ExperimentConfig::parse("[mc]\nblocks = 8\n"), ConfigError);
    REQUIRE_THROWS_AS(ExperimentConfig::parse("key_without_equals\n"), ConfigError);
  }
}

TEST_CASE("figure3 runner determinism and manifest") {
  auto tmp = fs::temp_directory_path() / "clusterdiag_test_fig3";
  fs::remove_all(tmp);
  auto cfg = ExperimentConfig::parse(R"(
[run]
kind = figure3
seed = 7
[lattice]
n = 6
[channel]
px = 0.0, 0.15
[figure3]
loop_sizes = 2
[mc]
sweeps = 256
thermalization = 64
)");
  cfg.out_dir = (tmp / "a").string();
  REQUIRE(run_experiment(cfg) == 0);
  REQUIRE(fs::exists(tmp / "a" / "manifest.json"));
  REQUIRE(fs::exists(tmp / "a" / "figure3_loop2.csv"));
  cfg.out_dir = (tmp / "b").string();
  REQUIRE(run_experiment(cfg) == 0);
  REQUIRE(slurp(tmp / "a" / "figure3_loop2.csv") == slurp(tmp / "b" / "figure3_loop2.csv"));
  // workers > 1 produce the same bytes (fixed streams, ordered emission)
  cfg.out_dir = (tmp / "c").string();
  cfg.workers = 3;
  REQUIRE(run_experiment(cfg) == 0);
  REQUIRE(slurp(tmp / "a" / "figure3_loop2.csv") == slurp(tmp / "c" / "figure3_loop2.csv"));
  fs::remove_all(tmp);
}

TEST_CASE("symmetry table runner output") {
  auto tmp = fs::temp_directory_path() / "clusterdiag_test_symm";
  fs::remove_all(tmp);
  ExperimentConfig cfg;
  cfg.kind = "symmetry-table";
  cfg.px_values = {0.1};
  cfg.out_dir = tmp.string();
  REQUIRE(run_experiment(cfg) == 0);
  auto table = slurp(tmp / "symmetry_table.csv");
  REQUIRE(table.find("bit-flip all,exact,exact") != std::string::npos);
  REQUIRE(table.find("phase on A,average,exact") != std::string::npos);
  REQUIRE(table.find("phase on B,exact,average") != std::string::npos);
  fs::remove_all(tmp);
}

TEST_CASE("diagnostics scan runner") {
  auto tmp = fs::temp_directory_path() / "clusterdiag_test_diag";
  fs::remove_all(tmp);
  auto cfg = ExperimentConfig::parse(R"(
[run]
kind = diagnostics-scan
seed = 3
[lattice]
n = 4
[channel]
px = 0.05, 0.30
[mc]
sweeps = 512
thermalization = 128
)");
  cfg.out_dir = tmp.string();
  REQUIRE(run_experiment(cfg) == 0);
  REQUIRE(fs::exists(tmp / "manifest.json"));
  REQUIRE(fs::exists(tmp / "diagnostics.csv"));
  auto json_text = slurp(tmp / "diagnostics.json");
  REQUIRE(json_text.find("phase_call") != std::string::npos);
  fs::remove_all(tmp);
}

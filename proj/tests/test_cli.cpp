#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "codesign/timeseries.hpp"
#include "config.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace codesign;

namespace {

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("ecodesign");
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream sink;
  auto* out = std::cout.rdbuf(sink.rdbuf());
  const int rc = cli::run(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(out);
  return rc;
}

fs::path fresh_dir(const std::string& tag) {
  const auto dir = fs::temp_directory_path() / ("ecodesign-clitest-" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kTinyConfig = R"({
  "data": {
    "training": {"kind": "synth", "synth": {"span_hours": 72, "resolution_min": 60,
                  "price_block_min": 60, "temp_mean": 10, "temp_annual_amp": 0}}
  },
  "controller": {"delta_T_min": 60, "T_d_floor_min": 60, "n_f_lo": 2, "n_f_hi": 3,
                 "epsilon": 5.0, "tune_window_hours": 24, "pc_ref": [1,1,4],
                 "pc_fixed": [1,1,3]},
  "sizing": {"battery_max_kwh": 1, "pv_max_units": 1, "budget": 30},
  "subsample": {"sim_hours": 24, "stride_hours": 24},
  "cluster": {"n_c": 2},
  "run": {"seed": 3, "threads": 1}
})";

}  // namespace

TEST_CASE("config schema is validated strictly") {
  CHECK_THROWS_WITH_AS(cli::parse_config(R"({"nonsense": 1})", "t"),
                       doctest::Contains("unknown key"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(cli::parse_config(R"({"risk": "median"})", "t"),
                       doctest::Contains("must be 'mean' or 'max'"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(cli::parse_config(R"({"run": {"seed": "seven"}})", "t"),
                       doctest::Contains("expected an integer"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(cli::parse_config("{", "t"), doctest::Contains("JSON parse error"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      cli::parse_config(R"({"data": {"training": {"kind": "csv"}}})", "t"),
      doctest::Contains("requires 'path'"), std::invalid_argument);

  const auto cfg = cli::parse_config(kTinyConfig, "t");
  CHECK(cfg.master_seed == 3);
  CHECK(cfg.pipeline.n_c_override == 2);
  CHECK(cfg.pipeline.pc_fixed.n_f == 3);
  CHECK(cfg.pipeline.sizing_lattice.dims[0].count() == 2);
}

TEST_CASE("canonical serialisation ignores thread count but tracks the seed") {
  auto a = cli::parse_config(kTinyConfig, "t");
  auto b = a;
  b.threads = 8;
  CHECK(a.canonical() == b.canonical());
  b.master_seed = 4;
  CHECK(a.canonical() != b.canonical());
}

TEST_CASE("synthetic sources realize deterministically by name and seed") {
  const auto cfg = cli::parse_config(kTinyConfig, "t");
  const auto s1 = cli::realize(cfg.training, 3);
  const auto s2 = cli::realize(cfg.training, 3);
  REQUIRE(s1.size() == s2.size());
  for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1.at(i).c_el == s2.at(i).c_el);
  const auto s3 = cli::realize(cfg.training, 4);
  bool differs = false;
  for (std::size_t i = 0; i < s1.size(); ++i) differs = differs || s1.at(i).c_el != s3.at(i).c_el;
  CHECK(differs);
}

TEST_CASE("unknown flags and missing configs exit with the config code") {
  CHECK(run_cli({"simulate", "--bogus"}) == 2);
  CHECK(run_cli({"simulate", "--config", "/nonexistent/config.json"}) == 2);
  CHECK(run_cli({}) == 2);
}

TEST_CASE("synth and simulate stages write loadable artifacts") {
  const auto dir = fresh_dir("synth");
  const auto config_path = dir / "c.json";
  std::ofstream(config_path) << kTinyConfig;

  CHECK(run_cli({"synth", "--config", config_path.string(), "--out", dir.string()}) == 0);
  const auto series = load_series((dir / "training.csv").string(), 60.0);
  CHECK(series.size() == 72);

  CHECK(run_cli({"simulate", "--config", config_path.string(), "--out", dir.string(), "--p",
                 "1,1", "--pc", "1,1,3"}) == 0);
  std::ifstream traj(dir / "trajectory.csv");
  std::string header;
  std::getline(traj, header);
  CHECK(header == "t,T,SoC,u_eH,u_CeH,u_dch,u_ch,u_b,u_s,c_el,interval");
}

TEST_CASE("cluster stage requires the subsample artifact") {
  const auto dir = fresh_dir("cluster");
  const auto config_path = dir / "c.json";
  std::ofstream(config_path) << kTinyConfig;
  CHECK(run_cli({"cluster", "--config", config_path.string(), "--out", dir.string()}) == 2);

  CHECK(run_cli({"subsample", "--config", config_path.string(), "--out", dir.string()}) == 0);
  CHECK(run_cli({"cluster", "--config", config_path.string(), "--out", dir.string(), "--n-c",
                 "2"}) == 0);
  CHECK(fs::exists(dir / "clusters.csv"));
}

TEST_CASE("stage reruns with unchanged inputs are no-ops") {
  const auto dir = fresh_dir("noop");
  const auto config_path = dir / "c.json";
  std::ofstream(config_path) << kTinyConfig;
  CHECK(run_cli({"synth", "--config", config_path.string(), "--out", dir.string()}) == 0);
  const auto first_write = fs::last_write_time(dir / "training.csv");
  CHECK(run_cli({"synth", "--config", config_path.string(), "--out", dir.string()}) == 0);
  CHECK(fs::last_write_time(dir / "training.csv") == first_write);
  // A different seed invalidates the stage key and rewrites.
  CHECK(run_cli({"synth", "--config", config_path.string(), "--out", dir.string(), "--seed",
                 "9"}) == 0);
  CHECK(fs::last_write_time(dir / "training.csv") != first_write);
}

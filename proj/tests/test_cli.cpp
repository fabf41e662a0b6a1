#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mmdnav/cli.hpp"
#include "mmdnav/io.hpp"

using namespace mmdnav;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = MMDNAV_SCENARIO_DIR;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mmdnav_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& row) {
  std::vector<std::string> out;
  std::istringstream in(row);
  for (std::string c; std::getline(in, c, ',');) out.push_back(c);
  return out;
}

fs::path write_scenario(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "scenario.json";
  std::ofstream(p) << text;
  return p;
}

constexpr const char* kFree = R"({"start":{"position":[0,0],"heading":0},"goal":[3,0],"dt":0.1,"horizon":100,
  "samples":{"robot":10,"obstacle":10}})";

constexpr const char* kSmallSingle = R"({"start":{"position":[0,0],"heading":1.5707963267948966},"goal":[0,10],
  "obstacles":[{"position":[0,5],"position_noise":{"components":[{"weight":1,"cov":[[0.01,0],[0,0.01]]}]}}],
  "radius":1.0,"dt":0.2,"horizon":80,"robot_noise":{"bias_sweep":3},"heading_noise_std":0.01,
  "samples":{"robot":15,"obstacle":15},"favorable_side":"right","seed":2})";

int run_main(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "mmdnav");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text) *err_text = err.str();
  return code;
}

cli::RunSpec spec_for(const std::string& sub, const fs::path& scenario, const fs::path& out) {
  cli::RunSpec s;
  s.subcommand = sub;
  s.scenario = scenario;
  s.out_dir = out;
  return s;
}

}  // namespace

TEST_CASE("run writes one csv row per step") {
  const fs::path dir = fresh_dir("run");
  const fs::path scenario = write_scenario(dir, kFree);
  std::ostringstream err;
  REQUIRE(cli::cmd_run(spec_for("run", scenario, dir), err) == cli::kOk);
  const auto rows = lines(read(dir / "trajectory.csv"));
  const json metrics = json::parse(read(dir / "metrics.json"));
  CHECK(rows.front().rfind("step,x,y,theta,v_cmd,w_cmd", 0) == 0);
  CHECK(rows.size() - 1 == metrics["steps"].get<std::size_t>());
  CHECK(metrics["reached_goal"] == true);
  CHECK(metrics["mode"] == "exact");
  CHECK_FALSE(fs::exists(dir / "trajectory.csv.tmp"));
}

TEST_CASE("run is byte-identical across invocations") {
  const fs::path a = fresh_dir("det_a"), b = fresh_dir("det_b");
  const fs::path scenario = write_scenario(a, kSmallSingle);
  CHECK(run_main({"run", "--scenario", scenario.string(), "--out", a.string()}) == 0);
  CHECK(run_main({"run", "--scenario", scenario.string(), "--out", b.string()}) == 0);
  CHECK(read(a / "trajectory.csv") == read(b / "trajectory.csv"));
  CHECK(read(a / "metrics.json") == read(b / "metrics.json"));
  CHECK(run_main({"run", "--scenario", scenario.string(), "--out", b.string(), "--seed", "3"}) == 0);
  CHECK(read(a / "trajectory.csv") != read(b / "trajectory.csv"));
}

TEST_CASE("malformed scenario is a usage error naming the file") {
  const fs::path dir = fresh_dir("malformed");
  const fs::path scenario = write_scenario(dir, "{\"goal\": [1, ");
  std::string err;
  CHECK(run_main({"run", "--scenario", scenario.string(), "--out", dir.string()}, &err) == 1);
  CHECK(err.find(scenario.string()) != std::string::npos);
  CHECK(err.find("config error") != std::string::npos);

  const fs::path schema = write_scenario(dir, R"({"start":{},"goal":[1,1],"radius":-1})");
  CHECK(run_main({"run", "--scenario", schema.string(), "--out", dir.string()}, &err) == 1);
  CHECK(err.find(schema.string()) != std::string::npos);
  CHECK(run_main({"run", "--scenario", (dir / "nope.json").string(), "--out", dir.string()}, &err) == 1);
  CHECK(err.find("nope.json") != std::string::npos);
}

TEST_CASE("flag errors") {
  CHECK(run_main({}) == 1);
  CHECK(run_main({"fly"}) == 1);
  CHECK(run_main({"run"}) == 1);
  CHECK(run_main({"run", "--scenario", "x.json", "--mode", "fuzzy"}) == 1);
  CHECK(run_main({"montecarlo", "--scenario", "x.json", "--runs", "0"}) == 1);
  CHECK(run_main({"--help"}) == 0);
  std::ostringstream err;
  cli::RunSpec s;
  s.subcommand = "teleport";
  CHECK(cli::dispatch(s, err) == cli::kUsageError);
}

TEST_CASE("planning failure exits with 2") {
  const fs::path dir = fresh_dir("failure");
  const fs::path scenario = write_scenario(dir, kFree);
  const fs::path config = dir / "config.json";
  // squared tracking error overflows for every candidate
  std::ofstream(config) << R"({"v_max_desired": 1e308})";
  std::string err;
  CHECK(run_main({"run", "--scenario", scenario.string(), "--config", config.string(), "--out", dir.string()}, &err) ==
        2);
  CHECK(err.find("planning failure") != std::string::npos);
}

TEST_CASE("montecarlo report") {
  const fs::path dir = fresh_dir("mc");
  const fs::path scenario = write_scenario(dir, kSmallSingle);
  CHECK(run_main({"montecarlo", "--scenario", scenario.string(), "--out", dir.string(), "--runs", "3", "--seed",
                  "10", "--mode", "gaussian-ablation"}) == 0);
  const json r = json::parse(read(dir / "report.json"));
  CHECK(r["runs"] == 3);
  CHECK(r["mode"] == "gaussian");
  CHECK(r["episodes"].size() == 3);
  CHECK(r["episodes"][2]["seed"] == 12);
  CHECK(r["favorable_freq"].get<double>() + r["unfavorable_freq"].get<double>() + r["none_freq"].get<double>() ==
        doctest::Approx(1.0));
}

TEST_CASE("sweep table shape") {
  const fs::path dir = fresh_dir("sweep");
  const fs::path scenario = write_scenario(dir, kSmallSingle);
  auto spec = spec_for("sweep", scenario, dir);
  spec.runs = 2;
  std::ostringstream err;
  REQUIRE(cli::cmd_sweep(spec, err) == cli::kOk);
  const auto rows = lines(read(dir / "sweep.csv"));
  REQUIRE(rows.size() == 17);
  CHECK(rows[0] == "k,mode,favorable_freq,mean_coll_frac,mean_smoothness");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto cells = split(rows[i]);
    REQUIRE(cells.size() == 5);
    CHECK(std::stoi(cells[0]) == static_cast<int>((i + 1) / 2));
    CHECK(cells[1] == (i % 2 == 1 ? "exact" : "gaussian"));
    const double f = std::stod(cells[2]);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
  CHECK(json::parse(read(dir / "sweep.json")).size() == 16);
}

TEST_CASE("sweep needs a favorable side") {
  const fs::path dir = fresh_dir("sweep_none");
  const fs::path scenario = write_scenario(dir, kFree);
  std::ostringstream err;
  CHECK(cli::cmd_sweep(spec_for("sweep", scenario, dir), err) == cli::kUsageError);
}

TEST_CASE("histogram of an obstacle-free scenario has only the header") {
  const fs::path dir = fresh_dir("hist_empty");
  const fs::path scenario = write_scenario(dir, kFree);
  std::ostringstream err;
  REQUIRE(cli::cmd_histogram(spec_for("histogram", scenario, dir), err) == cli::kOk);
  CHECK(read(dir / "histogram.csv") == "obstacle,robot_sample,obstacle_sample,h,f\n");
}

TEST_CASE("histogram step range") {
  const fs::path dir = fresh_dir("hist_range");
  const fs::path scenario = write_scenario(dir, kSmallSingle);
  std::string err;
  CHECK(run_main({"histogram", "--scenario", scenario.string(), "--out", dir.string(), "--step", "100000"}, &err) == 1);
  CHECK(err.find("range error") != std::string::npos);
  CHECK(run_main({"histogram", "--scenario", scenario.string(), "--out", dir.string(), "--step", "0"}) == 0);
  const auto rows = lines(read(dir / "histogram.csv"));
  CHECK(rows.size() == 1 + 15 * 15);  // budget 500 exceeds 225 pairs
}

TEST_CASE("histogram of the head-on benchmark") {
  const fs::path dir = fresh_dir("hist_head_on");
  auto spec = spec_for("histogram", kScenarios / "head_on.json", dir);
  spec.config = kScenarios / "benchmark_planner.json";
  std::ostringstream err;
  spec.step = 0;
  REQUIRE(cli::cmd_histogram(spec, err) == cli::kOk);
  double mean_f = 0.0;
  auto rows = lines(read(dir / "histogram.csv"));
  for (std::size_t i = 1; i < rows.size(); ++i) mean_f += std::stod(split(rows[i])[4]);
  CHECK(rows.size() == 501);
  CHECK(mean_f > 0.0);

  spec.step = -1;
  REQUIRE(cli::cmd_histogram(spec, err) == cli::kOk);
  rows = lines(read(dir / "histogram.csv"));
  std::size_t zeros = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) zeros += std::stod(split(rows[i])[3]) == 0.0 ? 1 : 0;
  CHECK(static_cast<double>(zeros) >= 0.95 * static_cast<double>(rows.size() - 1));
}

TEST_CASE("bundled scenarios load") {
  for (const char* name : {"single_obstacle.json", "head_on.json", "five_obstacles.json"}) {
    CAPTURE(name);
    const Scenario s = scenario_from_json(load_json_file(kScenarios / name));
    CHECK(s.n_robot == 100);
    CHECK(s.n_obstacle == 100);
  }
  const PlannerConfig c = planner_config_from_json(load_json_file(kScenarios / "benchmark_planner.json"));
  CHECK(c.weights.tracking == 1e-6);
  CHECK(c.pair_budget == std::optional<std::size_t>(500));
}

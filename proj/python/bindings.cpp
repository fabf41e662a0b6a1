#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mmdnav/baseline_gaussian.hpp"
#include "mmdnav/cli.hpp"
#include "mmdnav/errors.hpp"
#include "mmdnav/io.hpp"
#include "mmdnav/mmd.hpp"
#include "mmdnav/planner.hpp"
#include "mmdnav/rng.hpp"
#include "mmdnav/sim.hpp"
#include "mmdnav/vo.hpp"

namespace py = pybind11;
using namespace mmdnav;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Scenario scenario_from_text(const std::string& text) { return scenario_from_json(json::parse(text)); }

PlannerConfig config_from_text(const std::optional<std::string>& text) {
  return text ? planner_config_from_json(json::parse(*text)) : PlannerConfig{};
}

std::vector<double> uniform_weights(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

double mmd(const std::vector<double>& h, std::optional<std::vector<double>> a, double gamma, const std::string& method) {
  const std::vector<double> w = a ? *a : uniform_weights(h.size());
  const DeltaWeights delta = DeltaWeights::uniform(1);
  const KernelConfig k{gamma};
  if (method == "matrix") return mmd_cost(h, w, delta, k);
  if (method == "series") return mmd_cost_series(h, w, delta, k);
  if (method == "direct") return mmd_direct(h, w, delta, k);
  throw std::invalid_argument("method must be 'matrix', 'series' or 'direct'");
}

py::dict episode(const std::string& scenario_text, const std::optional<std::string>& config_text,
                 const std::string& mode, unsigned threads) {
  const Scenario s = scenario_from_text(scenario_text);
  const PlannerConfig cfg = config_from_text(config_text);
  EpisodeOptions opts;
  opts.threads = threads;
  if (mode_from_string(mode) == PlannerMode::gaussian)
    opts.belief = gaussianize_scenario(s, derive_seed(s.seed, {0x6761757373ULL}));
  TrajectoryLog log;
  {
    py::gil_scoped_release release;
    log = run_episode(s, cfg, opts);
  }
  const auto n = static_cast<Eigen::Index>(log.steps.size());
  RowMatrix states(n, 3), controls(n, 2);
  Eigen::VectorXd coll(n), cost(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto& r = log.steps[static_cast<std::size_t>(t)];
    states.row(t) << r.robot.position.x(), r.robot.position.y(), r.robot.heading;
    controls.row(t) << r.control.v, r.control.omega;
    coll(t) = r.collision_fraction;
    cost(t) = r.cost;
  }
  py::dict out;
  out["states"] = states;
  out["controls"] = controls;
  out["collision_fraction"] = coll;
  out["cost"] = cost;
  out["final_position"] = Eigen::Vector2d(log.final_robot.position);
  out["metrics"] = to_json(compute_metrics(log, s, cfg.eta)).dump();
  out["csv"] = trajectory_csv(log);
  return out;
}

std::string montecarlo(const std::string& scenario_text, const std::optional<std::string>& config_text,
                       std::size_t runs, std::optional<std::uint64_t> base_seed, const std::string& mode,
                       unsigned threads) {
  const Scenario s = scenario_from_text(scenario_text);
  const PlannerConfig cfg = config_from_text(config_text);
  AggregateReport r;
  {
    py::gil_scoped_release release;
    r = monte_carlo(s, cfg, runs, base_seed.value_or(s.seed), mode_from_string(mode), threads);
  }
  return to_json(r).dump();
}

py::tuple plan_once(const RowMatrix& robot, const RowMatrix& noise, const std::vector<RowMatrix>& obstacles,
                    const Eigen::Vector2d& position, double heading, const Eigen::Vector2d& goal, double radius,
                    double dt, std::uint64_t seed, const std::optional<std::string>& config_text, unsigned threads) {
  PlanningProblem p;
  p.nominal = RobotState{position, heading};
  p.robot_samples = SampleSet(robot);
  p.control_noise = SampleSet(noise);
  for (const auto& o : obstacles) p.obstacle_samples.emplace_back(o);
  p.goal = goal;
  p.radius = radius;
  p.dt = dt;
  p.seed = seed;
  const PlannerConfig cfg = config_from_text(config_text);
  PlanResult r;
  {
    py::gil_scoped_release release;
    r = plan(p, cfg, threads);
  }
  return py::make_tuple(r.control.v, r.control.omega, r.index,
                        Eigen::Map<const Eigen::VectorXd>(r.costs.data(), static_cast<Eigen::Index>(r.costs.size())));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "MMD-based reactive collision avoidance under non-parametric noise";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<PlanningError>(m, "PlanningError", PyExc_RuntimeError);

  m.def("rbf", &rbf, py::arg("c1"), py::arg("c2"), py::arg("gamma"));
  m.def("mmd_cost", &mmd, py::arg("h"), py::arg("weights") = py::none(), py::arg("gamma") = 0.1,
        py::arg("method") = "matrix", "Squared MMD between weighted violations and a point mass at zero.");
  m.def("vo_constraint", &vo_constraint, py::arg("robot_pos"), py::arg("robot_vel"), py::arg("obstacle_pos"),
        py::arg("obstacle_vel"), py::arg("radius"));
  m.def("violation", &violation, py::arg("f"));

  m.def(
      "sample_mixture",
      [](const std::string& model_text, std::size_t n, std::uint64_t seed) {
        return RowMatrix(sample_mixture(mixture_from_json(json::parse(model_text)), n, seed).matrix());
      },
      py::arg("model"), py::arg("n"), py::arg("seed"));
  m.def(
      "bias_sweep_model", [](int k) { return to_json(bias_sweep_model(k)).dump(); }, py::arg("k"));
  m.def(
      "gaussianize",
      [](const std::string& model_text, std::uint64_t seed) {
        return to_json(gaussianize(mixture_from_json(json::parse(model_text)), seed)).dump();
      },
      py::arg("model"), py::arg("seed"));
  m.def(
      "normalize_scenario", [](const std::string& text) { return to_json(scenario_from_text(text)).dump(); },
      py::arg("scenario"));
  m.def(
      "normalize_config", [](const std::string& text) { return to_json(config_from_text(text)).dump(); },
      py::arg("config"));

  m.def("run_episode", &episode, py::arg("scenario"), py::arg("config") = py::none(), py::arg("mode") = "exact",
        py::arg("threads") = 1);
  m.def("monte_carlo", &montecarlo, py::arg("scenario"), py::arg("config") = py::none(), py::arg("runs") = 100,
        py::arg("base_seed") = py::none(), py::arg("mode") = "exact", py::arg("threads") = 1);
  m.def("plan", &plan_once, py::arg("robot_samples"), py::arg("control_noise"), py::arg("obstacle_samples"),
        py::arg("position"), py::arg("heading"), py::arg("goal"), py::arg("radius"), py::arg("dt"),
        py::arg("seed") = 0, py::arg("config") = py::none(), py::arg("threads") = 1);

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"mmdnav"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool; returns (exit_code, stdout, stderr).");
}

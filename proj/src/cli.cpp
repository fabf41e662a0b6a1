#include "mmdnav/cli.hpp"

#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "mmdnav/baseline_gaussian.hpp"
#include "mmdnav/errors.hpp"
#include "mmdnav/io.hpp"
#include "mmdnav/parallel.hpp"
#include "mmdnav/rng.hpp"

namespace mmdnav::cli {
namespace {

constexpr std::uint64_t kGaussianizeStream = 0x6761757373ULL;

struct Inputs {
  Scenario scenario;
  PlannerConfig config;
  std::uint64_t seed = 0;
};

Inputs load_inputs(const RunSpec& spec) {
  Inputs in;
  try {
    in.scenario = scenario_from_json(load_json_file(spec.scenario));
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.find(spec.scenario.string()) != std::string::npos) throw;
    throw ConfigError(spec.scenario.string() + ": " + msg);
  }
  if (spec.config) {
    try {
      in.config = planner_config_from_json(load_json_file(*spec.config));
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      if (msg.find(spec.config->string()) != std::string::npos) throw;
      throw ConfigError(spec.config->string() + ": " + msg);
    }
  }
  if (spec.seed) in.scenario.seed = *spec.seed;
  in.seed = in.scenario.seed;
  return in;
}

EpisodeOptions episode_options(const RunSpec& spec, const Inputs& in) {
  EpisodeOptions opts;
  opts.threads = spec.threads;
  if (spec.mode == PlannerMode::gaussian)
    opts.belief = gaussianize_scenario(in.scenario, derive_seed(in.seed, {kGaussianizeStream}));
  return opts;
}

// Maps exceptions onto exit codes.
int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::out_of_range& e) {
    err << "range error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kUsageError;
  } catch (const PlanningError& e) {
    err << "planning failure: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace

int cmd_run(const RunSpec& spec, std::ostream& err) {
  return guarded(err, [&] {
    const Inputs in = load_inputs(spec);
    const TrajectoryLog log = run_episode(in.scenario, in.config, episode_options(spec, in));
    const Metrics metrics = compute_metrics(log, in.scenario, in.config.eta);
    write_file_atomic(spec.out_dir / "trajectory.csv", trajectory_csv(log));
    json m = to_json(metrics);
    m["mode"] = to_string(spec.mode);
    m["seed"] = in.seed;
    write_file_atomic(spec.out_dir / "metrics.json", m.dump(2) + "\n");
    return static_cast<int>(kOk);
  });
}

int cmd_montecarlo(const RunSpec& spec, std::ostream& err) {
  return guarded(err, [&] {
    if (spec.runs < 1) throw std::invalid_argument("--runs must be >= 1");
    const Inputs in = load_inputs(spec);
    const AggregateReport report = monte_carlo(in.scenario, in.config, spec.runs, in.seed, spec.mode, spec.threads);
    write_file_atomic(spec.out_dir / "report.json", to_json(report).dump(2) + "\n");
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const RunSpec& spec, std::ostream& err) {
  return guarded(err, [&] {
    if (spec.runs < 1) throw std::invalid_argument("--runs must be >= 1");
    const Inputs in = load_inputs(spec);
    if (in.scenario.favorable_side == Side::none) throw ConfigError("sweep needs a scenario with favorable_side set");
    if (in.scenario.obstacles.size() != 1) throw ConfigError("sweep needs a single-obstacle scenario");

    std::ostringstream csv;
    csv << "k,mode,favorable_freq,mean_coll_frac,mean_smoothness\n";
    json reports = json::array();
    for (int k = 1; k <= 8; ++k) {
      Scenario scenario = in.scenario;
      scenario.robot_noise = bias_sweep_model(k);
      for (PlannerMode mode : {PlannerMode::exact, PlannerMode::gaussian}) {
        const AggregateReport r = monte_carlo(scenario, in.config, spec.runs, in.seed, mode, spec.threads);
        csv << k << ',' << to_string(mode) << ',' << format_number(r.favorable_freq.value_or(0.0)) << ','
            << format_number(r.mean_max_collision_fraction) << ',' << format_number(r.mean_smoothness) << '\n';
        json j = to_json(r);
        j.erase("episodes");
        j["k"] = k;
        reports.push_back(std::move(j));
      }
    }
    write_file_atomic(spec.out_dir / "sweep.csv", csv.str());
    write_file_atomic(spec.out_dir / "sweep.json", reports.dump(2) + "\n");
    return static_cast<int>(kOk);
  });
}

int cmd_histogram(const RunSpec& spec, std::ostream& err) {
  return guarded(err, [&] {
    const Inputs in = load_inputs(spec);
    EpisodeOptions opts = episode_options(spec, in);
    opts.record_violations = true;
    const TrajectoryLog log = run_episode(in.scenario, in.config, opts);

    std::ostringstream csv;
    csv << "obstacle,robot_sample,obstacle_sample,h,f\n";
    if (!in.scenario.obstacles.empty()) {
      const auto n = static_cast<long>(log.steps.size());
      const long index = spec.step < 0 ? n + spec.step : spec.step;
      if (index < 0 || index >= n)
        throw std::out_of_range("step " + std::to_string(spec.step) + " outside episode of " + std::to_string(n) + " steps");
      const StepRecord& rec = log.steps[static_cast<std::size_t>(index)];
      for (std::size_t j = 0; j < rec.violations.size(); ++j) {
        const ViolationVector& v = rec.violations[j];
        for (std::size_t p = 0; p < v.size(); ++p)
          csv << j << ',' << v.pairs[p].robot << ',' << v.pairs[p].obstacle << ',' << format_number(v.h[p]) << ','
              << format_number(v.constraint[p]) << '\n';
      }
    }
    write_file_atomic(spec.out_dir / "histogram.csv", csv.str());
    return static_cast<int>(kOk);
  });
}

int dispatch(const RunSpec& spec, std::ostream& err) {
  if (spec.subcommand == "run") return cmd_run(spec, err);
  if (spec.subcommand == "montecarlo") return cmd_montecarlo(spec, err);
  if (spec.subcommand == "sweep") return cmd_sweep(spec, err);
  if (spec.subcommand == "histogram") return cmd_histogram(spec, err);
  err << "unknown subcommand '" << spec.subcommand << "'\n";
  return kUsageError;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reactive collision avoidance by MMD distribution matching"};
  app.require_subcommand(1);

  RunSpec spec;
  spec.threads = default_thread_count();
  std::string mode = "exact";
  std::string scenario;
  std::string config;
  std::string out_dir = ".";
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario, "Scenario JSON file")->required();
    sub->add_option("--config", config, "Planner config JSON file (defaults if omitted)");
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Base seed (overrides the scenario seed)");
    sub->add_option("--mode", mode, "Planner noise model")->check(CLI::IsMember({"exact", "gaussian", "gaussian-ablation"}))->capture_default_str();
  };
  auto* run = app.add_subcommand("run", "Run one episode; writes trajectory.csv and metrics.json");
  add_common(run);
  auto* mc = app.add_subcommand("montecarlo", "Run seeded episodes; writes report.json");
  add_common(mc);
  mc->add_option("--runs", spec.runs, "Episode count")->check(CLI::PositiveNumber)->capture_default_str();
  auto* sweep = app.add_subcommand("sweep", "Bias sweep k = 1..8 in both modes; writes sweep.csv");
  add_common(sweep);
  sweep->add_option("--runs", spec.runs, "Episodes per distribution and mode")->check(CLI::PositiveNumber)->capture_default_str();
  auto* hist = app.add_subcommand("histogram", "Violation values at one step; writes histogram.csv");
  add_common(hist);
  hist->add_option("--step", spec.step, "Step index (negative counts from the end)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  for (auto* sub : {run, mc, sweep, hist})
    if (sub->parsed()) spec.subcommand = sub->get_name();
  spec.scenario = scenario;
  if (!config.empty()) spec.config = config;
  spec.out_dir = out_dir;
  for (auto* sub : {run, mc, sweep, hist})
    if (sub->parsed() && sub->count("--seed") > 0) spec.seed = seed;
  spec.mode = mode_from_string(mode);
  return dispatch(spec, err);
}

}  // namespace mmdnav::cli

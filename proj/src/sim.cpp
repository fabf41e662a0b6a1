#include "mmdnav/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "mmdnav/baseline_gaussian.hpp"
#include "mmdnav/errors.hpp"
#include "mmdnav/parallel.hpp"
#include "mmdnav/rng.hpp"

namespace mmdnav {
namespace {

// Stream tags for per-step seed derivation.
enum Stream : std::uint64_t {
  kRobotPosition = 1,
  kHeading = 2,
  kObstaclePosition = 3,
  kObstacleVelocity = 4,
  kDisturbance = 5,
  kControlNoise = 6,
  kPairs = 7,
  kBeliefOffset = 100,
};

constexpr double kSideEpsilon = 1e-9;

Eigen::MatrixXd centered_draws(const MixtureModel& model, std::size_t n, std::uint64_t seed) {
  Eigen::MatrixXd draws = sample_mixture(model, n, seed).matrix();
  draws.rowwise() -= model.mean().transpose();
  return draws;
}

struct Perception {
  Eigen::MatrixXd robot;                   // (x, y, theta)
  std::vector<Eigen::MatrixXd> obstacles;  // (x, y, vx, vy)
};

Perception perceive(const Scenario& models, const RobotState& robot, const std::vector<ObstacleState>& obstacles,
                    std::uint64_t step_seed, std::uint64_t offset) {
  Perception out;
  const auto n_r = static_cast<Eigen::Index>(models.n_robot);
  out.robot.resize(n_r, 3);
  out.robot.leftCols(2) = centered_draws(models.robot_noise, models.n_robot, derive_seed(step_seed, {offset + kRobotPosition}));
  out.robot.col(0).array() += robot.position.x();
  out.robot.col(1).array() += robot.position.y();
  std::mt19937_64 gen(derive_seed(step_seed, {offset + kHeading}));
  std::normal_distribution<double> heading(0.0, 1.0);
  for (Eigen::Index i = 0; i < n_r; ++i) {
    const double z = heading(gen);
    out.robot(i, 2) = robot.heading + models.heading_noise_std * z;
  }

  out.obstacles.reserve(obstacles.size());
  for (std::size_t j = 0; j < obstacles.size(); ++j) {
    const auto& spec = models.obstacles[j];
    Eigen::MatrixXd o(static_cast<Eigen::Index>(models.n_obstacle), 4);
    o.leftCols(2) = centered_draws(spec.position_noise, models.n_obstacle, derive_seed(step_seed, {offset + kObstaclePosition, j}));
    o.rightCols(2) = centered_draws(spec.velocity_noise, models.n_obstacle, derive_seed(step_seed, {offset + kObstacleVelocity, j}));
    o.col(0).array() += obstacles[j].position.x();
    o.col(1).array() += obstacles[j].position.y();
    o.col(2).array() += obstacles[j].velocity.x();
    o.col(3).array() += obstacles[j].velocity.y();
    out.obstacles.push_back(std::move(o));
  }
  return out;
}

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len_sq = ab.squaredNorm();
  if (len_sq == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double cross_z(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

TrajectoryLog simulate(const Scenario& world, const PlannerConfig& config, const EpisodeOptions& options) {
  world.validate();
  config.validate();
  const Scenario* belief = options.belief ? &*options.belief : nullptr;
  if (belief) {
    belief->validate();
    if (belief->obstacles.size() != world.obstacles.size())
      throw ConfigError("belief scenario must describe the same obstacles as the world");
  }

  TrajectoryLog log;
  RobotState robot = world.start;
  std::vector<ObstacleState> obstacles;
  for (const auto& o : world.obstacles) obstacles.push_back(o.initial);

  for (std::size_t t = 0; t < world.horizon; ++t) {
    if ((robot.position - world.goal).norm() <= world.goal_tolerance) {
      log.reached_goal = true;
      break;
    }
    const std::uint64_t step_seed = derive_seed(world.seed, {t});
    const Perception truth = perceive(world, robot, obstacles, step_seed, 0);
    const Perception seen = belief ? perceive(*belief, robot, obstacles, step_seed, kBeliefOffset) : truth;
    const Scenario& models = belief ? *belief : world;

    PlanningProblem problem;
    problem.nominal = robot;
    problem.robot_samples = SampleSet(seen.robot);
    problem.control_noise = sample_mixture(models.actuation_noise, models.n_robot, derive_seed(step_seed, {kControlNoise}));
    for (const auto& o : seen.obstacles) problem.obstacle_samples.emplace_back(o);
    problem.goal = world.goal;
    problem.radius = world.radius;
    problem.dt = world.dt;
    problem.seed = derive_seed(step_seed, {kPairs});

    PlanResult result;
    try {
      result = plan(problem, config, options.threads);
    } catch (const PlanningError& e) {
      log.failure = PlanningError(e.what(), t).what();
      break;
    }

    StepRecord rec;
    rec.step = t;
    rec.robot = robot;
    rec.control = result.control;
    rec.obstacles = obstacles;
    rec.cost = result.cost;
    const Eigen::Vector2d desired = desired_velocity(robot.position, world.goal, config.v_max_desired);
    rec.mmd = evaluate_cost_terms(result.control, problem, desired, config).mmd;

    std::vector<Eigen::MatrixXd> obstacle_positions;
    for (const auto& o : truth.obstacles) obstacle_positions.push_back(o.leftCols(2));
    rec.collision_fraction = obstacle_positions.empty()
                                 ? 0.0
                                 : collision_sample_fraction(truth.robot.leftCols(2), obstacle_positions, world.radius);

    if (options.record_violations) {
      for (std::size_t j = 0; j < problem.obstacle_samples.size(); ++j) {
        const auto pairs = obstacle_pairs(problem, config, j);
        rec.violations.push_back(violation_vector(problem.robot_samples, result.control, problem.control_noise,
                                                  problem.obstacle_samples[j], world.radius, world.dt, pairs));
      }
    }

    const Eigen::MatrixXd eps = sample_mixture(world.actuation_noise, 1, derive_seed(step_seed, {kDisturbance})).matrix();
    rec.disturbance = Disturbance{eps(0, 0), eps(0, 1)};
    log.steps.push_back(std::move(rec));

    robot = step_robot(robot, result.control, log.steps.back().disturbance, world.dt);
    for (auto& o : obstacles) o = step_obstacle(o, world.dt);
  }
  if (!log.failure && !log.reached_goal && (robot.position - world.goal).norm() <= world.goal_tolerance)
    log.reached_goal = true;
  log.final_robot = robot;
  log.final_obstacles = obstacles;
  return log;
}

}  // namespace

std::string to_string(Side side) {
  switch (side) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::none: return "none";
  }
  return "none";
}

Side side_from_string(const std::string& label) {
  if (label == "left") return Side::left;
  if (label == "right") return Side::right;
  if (label == "none") return Side::none;
  throw ConfigError("unknown side label '" + label + "' (expected left, right or none)");
}

std::string to_string(PlannerMode mode) { return mode == PlannerMode::exact ? "exact" : "gaussian"; }

PlannerMode mode_from_string(const std::string& label) {
  if (label == "exact") return PlannerMode::exact;
  if (label == "gaussian" || label == "gaussian-ablation") return PlannerMode::gaussian;
  throw ConfigError("unknown planner mode '" + label + "' (expected exact or gaussian)");
}

void Scenario::validate() const {
  if (!(radius > 0.0)) throw ConfigError("scenario: radius must be positive");
  if (!(dt > 0.0)) throw ConfigError("scenario: dt must be positive");
  if (horizon < 1) throw ConfigError("scenario: horizon must be >= 1");
  if (n_robot < 1 || n_obstacle < 1) throw ConfigError("scenario: sample counts must be >= 1");
  if (!(goal_tolerance >= 0.0)) throw ConfigError("scenario: goal_tolerance must be non-negative");
  if (!(heading_noise_std >= 0.0)) throw ConfigError("scenario: heading_noise_std must be non-negative");
  if (!start.position.allFinite() || !std::isfinite(start.heading) || !goal.allFinite())
    throw ConfigError("scenario: start and goal must be finite");
}

TrajectoryLog run_episode(const Scenario& scenario, const PlannerConfig& config, const EpisodeOptions& options) {
  TrajectoryLog log = simulate(scenario, config, options);
  if (log.failure) throw PlanningError(*log.failure, log.steps.size());
  return log;
}

double collision_sample_fraction(const Eigen::MatrixXd& robot_positions, const Eigen::MatrixXd& obstacle_positions,
                                 double radius) {
  if (robot_positions.rows() == 0 || obstacle_positions.rows() == 0)
    throw std::invalid_argument("collision_sample_fraction: empty sample set");
  const double r2 = radius * radius;
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < robot_positions.rows(); ++i)
    for (Eigen::Index j = 0; j < obstacle_positions.rows(); ++j)
      if ((robot_positions.row(i).head<2>() - obstacle_positions.row(j).head<2>()).squaredNorm() < r2) ++hits;
  return static_cast<double>(hits) / static_cast<double>(robot_positions.rows() * obstacle_positions.rows());
}

double collision_sample_fraction(const Eigen::MatrixXd& robot_positions,
                                 const std::vector<Eigen::MatrixXd>& obstacle_positions, double radius) {
  if (obstacle_positions.empty()) throw std::invalid_argument("collision_sample_fraction: no obstacle sample sets");
  double worst = 0.0;
  for (const auto& o : obstacle_positions) worst = std::max(worst, collision_sample_fraction(robot_positions, o, radius));
  return worst;
}

Side homotopy_side(const TrajectoryLog& log, const Scenario& scenario) {
  if (scenario.obstacles.size() != 1) throw std::invalid_argument("homotopy_side supports single-obstacle scenarios only");
  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector2d offset = Eigen::Vector2d::Zero();
  auto consider = [&](const Eigen::Vector2d& robot, const Eigen::Vector2d& obstacle) {
    const double d = (robot - obstacle).norm();
    if (d < best) {
      best = d;
      offset = robot - obstacle;
    }
  };
  for (const auto& s : log.steps) consider(s.robot.position, s.obstacles.at(0).position);
  if (!log.final_obstacles.empty()) consider(log.final_robot.position, log.final_obstacles.at(0).position);
  if (!std::isfinite(best)) return Side::none;

  const double z = cross_z(scenario.goal - scenario.start.position, offset);
  if (std::abs(z) < kSideEpsilon) return Side::none;
  return z > 0.0 ? Side::left : Side::right;
}

double control_smoothness(const std::vector<ControlInput>& controls) {
  double total = 0.0;
  for (std::size_t t = 1; t < controls.size(); ++t) {
    const double dv = controls[t].v - controls[t - 1].v;
    const double dw = controls[t].omega - controls[t - 1].omega;
    total += dv * dv + dw * dw;
  }
  return total;
}

double path_deviation(const std::vector<Eigen::Vector2d>& path, const Eigen::Vector2d& start,
                      const Eigen::Vector2d& goal) {
  if (path.empty()) return 0.0;
  double total = 0.0;
  for (const auto& p : path) total += point_segment_distance(p, start, goal);
  return total / static_cast<double>(path.size());
}

Metrics compute_metrics(const TrajectoryLog& log, const Scenario& scenario, double eta) {
  Metrics m;
  std::vector<ControlInput> controls;
  std::vector<Eigen::Vector2d> path;
  for (const auto& s : log.steps) {
    controls.push_back(s.control);
    path.push_back(s.robot.position);
    m.max_collision_fraction = std::max(m.max_collision_fraction, s.collision_fraction);
  }
  path.push_back(log.final_robot.position);
  m.smoothness = control_smoothness(controls);
  m.deviation = path_deviation(path, scenario.start.position, scenario.goal);
  m.reached_goal = log.reached_goal;
  m.planning_failed = log.failure.has_value();
  m.steps = log.steps.size();
  m.success = m.reached_goal && !m.planning_failed && m.max_collision_fraction <= 1.0 - eta;
  if (scenario.obstacles.size() == 1) m.side = homotopy_side(log, scenario);
  return m;
}

AggregateReport monte_carlo(const Scenario& scenario, const PlannerConfig& config, std::size_t runs,
                            std::uint64_t base_seed, PlannerMode mode, unsigned threads) {
  if (runs < 1) throw std::invalid_argument("monte_carlo: runs must be >= 1");
  scenario.validate();
  config.validate();

  EpisodeOptions options;
  if (mode == PlannerMode::gaussian) options.belief = gaussianize_scenario(scenario, derive_seed(base_seed, {0x6761757373ULL}));

  AggregateReport report;
  report.runs = runs;
  report.base_seed = base_seed;
  report.mode = mode;
  report.episodes.resize(runs);
  parallel_for(runs, threads, [&](std::size_t r) {
    Scenario episode = scenario;
    episode.seed = base_seed + r;
    EpisodeOptions opts = options;
    if (opts.belief) opts.belief->seed = episode.seed;
    report.episodes[r] = compute_metrics(simulate(episode, config, opts), episode, config.eta);
  });

  const double n = static_cast<double>(runs);
  std::size_t left = 0, right = 0, none = 0, successes = 0;
  for (const auto& m : report.episodes) {
    successes += m.success ? 1 : 0;
    report.planning_failures += m.planning_failed ? 1 : 0;
    report.mean_smoothness += m.smoothness / n;
    report.mean_deviation += m.deviation / n;
    report.mean_max_collision_fraction += m.max_collision_fraction / n;
    report.mean_steps += static_cast<double>(m.steps) / n;
    if (m.side) {
      left += *m.side == Side::left ? 1 : 0;
      right += *m.side == Side::right ? 1 : 0;
      none += *m.side == Side::none ? 1 : 0;
    }
  }
  report.success_rate = static_cast<double>(successes) / n;
  if (scenario.obstacles.size() == 1) {
    report.left_freq = static_cast<double>(left) / n;
    report.right_freq = static_cast<double>(right) / n;
    report.none_freq = static_cast<double>(none) / n;
    if (scenario.favorable_side == Side::left) {
      report.favorable_freq = report.left_freq;
      report.unfavorable_freq = report.right_freq;
    } else if (scenario.favorable_side == Side::right) {
      report.favorable_freq = report.right_freq;
      report.unfavorable_freq = report.left_freq;
    }
  }
  return report;
}

}  // namespace mmdnav

#include "mmdnav/planner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mmdnav/errors.hpp"
#include "mmdnav/parallel.hpp"
#include "mmdnav/rng.hpp"

namespace mmdnav {
namespace {

constexpr double kArrivalDistance = 1e-6;

double axis_value(double lo, double hi, int count, int i) {
  if (count == 1) return 0.5 * (lo + hi);
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

// Pair geometry that does not depend on the candidate control.
struct PreparedObstacle {
  std::vector<std::uint32_t> robot_index;
  std::vector<Eigen::Vector2d> rel_pos;
  std::vector<double> rel_pos_sq;
  std::vector<Eigen::Vector2d> obstacle_vel;
  std::vector<double> weights;
  DeltaWeights delta = DeltaWeights::uniform(1);
};

std::vector<PreparedObstacle> prepare(const PlanningProblem& problem, const PlannerConfig& config) {
  std::vector<PreparedObstacle> out;
  out.reserve(problem.obstacle_samples.size());
  const SampleSet& robot = problem.robot_samples;
  for (std::size_t j = 0; j < problem.obstacle_samples.size(); ++j) {
    const SampleSet& obs = problem.obstacle_samples[j];
    if (obs.dim() < 4) throw std::invalid_argument("obstacle samples need columns (x, y, vx, vy)");
    const auto pairs = obstacle_pairs(problem, config, j);
    PreparedObstacle prep;
    prep.robot_index.reserve(pairs.size());
    prep.rel_pos.reserve(pairs.size());
    prep.rel_pos_sq.reserve(pairs.size());
    prep.obstacle_vel.reserve(pairs.size());
    for (const auto& [i, k] : pairs) {
      const Eigen::Vector2d r = Eigen::Vector2d(robot(i, 0), robot(i, 1)) - Eigen::Vector2d(obs(k, 0), obs(k, 1));
      prep.robot_index.push_back(i);
      prep.rel_pos.push_back(r);
      prep.rel_pos_sq.push_back(r.squaredNorm());
      prep.obstacle_vel.emplace_back(obs(k, 2), obs(k, 3));
    }
    prep.weights.assign(pairs.size(), 1.0 / static_cast<double>(pairs.size()));
    prep.delta = DeltaWeights::uniform(pairs.size());
    out.push_back(std::move(prep));
  }
  return out;
}

// Unit direction of every robot sample's realized velocity for one omega.
struct SampleHeadings {
  std::vector<double> cos;
  std::vector<double> sin;
};

SampleHeadings sample_headings(const PlanningProblem& problem, double omega) {
  const SampleSet& robot = problem.robot_samples;
  const SampleSet& noise = problem.control_noise;
  SampleHeadings out;
  out.cos.resize(robot.count());
  out.sin.resize(robot.count());
  for (std::size_t i = 0; i < robot.count(); ++i) {
    // Same angle expression as realized_velocity.
    const double angle = robot(i, 2) + (omega + noise(i, 1)) * problem.dt;
    out.cos[i] = std::cos(angle);
    out.sin[i] = std::sin(angle);
  }
  return out;
}

CostTerms cost_terms_prepared(const ControlInput& control, const PlanningProblem& problem,
                              const Eigen::Vector2d& desired, const PlannerConfig& config,
                              const std::vector<PreparedObstacle>& prepared, const SampleHeadings& headings) {
  CostTerms terms;
  if (!prepared.empty()) {
    const SampleSet& noise = problem.control_noise;
    thread_local std::vector<Eigen::Vector2d> robot_vel;
    thread_local std::vector<double> h;
    robot_vel.resize(noise.count());
    for (std::size_t i = 0; i < noise.count(); ++i) {
      const double speed = control.v + noise(i, 0);
      robot_vel[i] = Eigen::Vector2d(speed * headings.cos[i], speed * headings.sin[i]);
    }

    const double r2 = problem.radius * problem.radius;
    for (const auto& prep : prepared) {
      h.resize(prep.rel_pos.size());
      for (std::size_t p = 0; p < h.size(); ++p) {
        const Eigen::Vector2d v = robot_vel[prep.robot_index[p]] - prep.obstacle_vel[p];
        h[p] = violation(vo_constraint_relative(prep.rel_pos[p], prep.rel_pos_sq[p], v, r2));
      }
      terms.mmd += config.mmd_evaluation == MmdEvaluation::series
                       ? mmd_cost_series(h, prep.weights, prep.delta, config.kernel)
                       : mmd_cost(h, prep.weights, prep.delta, config.kernel);
    }
  }
  const Eigen::Vector2d v = nominal_velocity(problem.nominal.heading, control, problem.dt);
  terms.tracking = config.weights.tracking * (v - desired).squaredNorm();
  terms.effort = config.weights.effort * (control.v * control.v + control.omega * control.omega);
  return terms;
}

void check_problem(const PlanningProblem& problem) {
  if (!(problem.radius > 0.0)) throw std::invalid_argument("combined radius must be positive");
  if (!(problem.dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (problem.obstacle_samples.empty()) return;
  if (problem.robot_samples.dim() < 3) throw std::invalid_argument("robot samples need columns (x, y, theta)");
  if (problem.control_noise.dim() < 2) throw std::invalid_argument("control noise needs columns (eps_v, eps_omega)");
  if (problem.robot_samples.count() != problem.control_noise.count())
    throw std::invalid_argument("robot samples and control noise must have the same count");
}

}  // namespace

void ControlGrid::validate() const {
  if (!(v_min < v_max)) throw ConfigError("control grid: v_min must be below v_max");
  if (!(omega_max > 0.0)) throw ConfigError("control grid: omega_max must be positive");
  if (v_count < 1 || omega_count < 1) throw ConfigError("control grid: resolution must be >= 1 per axis");
}

std::vector<ControlInput> ControlGrid::candidates() const {
  validate();
  std::vector<ControlInput> out;
  out.reserve(size());
  for (int iv = 0; iv < v_count; ++iv)
    for (int iw = 0; iw < omega_count; ++iw)
      out.push_back({axis_value(v_min, v_max, v_count, iv), axis_value(-omega_max, omega_max, omega_count, iw)});
  return out;
}

void PlannerConfig::validate() const {
  grid.validate();
  if (!(weights.tracking >= 0.0) || !(weights.effort >= 0.0)) throw ConfigError("cost weights must be non-negative");
  if (!(kernel.gamma > 0.0)) throw ConfigError("kernel gamma must be positive");
  if (pair_budget && *pair_budget < 1) throw ConfigError("pair_budget must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in (0, 1]");
  if (!(v_max_desired >= 0.0)) throw ConfigError("v_max_desired must be non-negative");
}

Eigen::Vector2d desired_velocity(const Eigen::Vector2d& position, const Eigen::Vector2d& goal, double v_max_desired) {
  const Eigen::Vector2d to_goal = goal - position;
  const double dist = to_goal.norm();
  if (dist <= kArrivalDistance) return Eigen::Vector2d::Zero();
  return v_max_desired * to_goal / dist;
}

Eigen::Vector2d nominal_velocity(double heading, const ControlInput& control, double dt) {
  return realized_velocity(heading, control, Disturbance{}, dt);
}

std::vector<PairIndex> obstacle_pairs(const PlanningProblem& problem, const PlannerConfig& config,
                                      std::size_t obstacle) {
  return select_pairs(problem.robot_samples.count(), problem.obstacle_samples.at(obstacle).count(),
                      config.pair_budget, derive_seed(problem.seed, {obstacle}));
}

CostTerms evaluate_cost_terms(const ControlInput& control, const PlanningProblem& problem,
                              const Eigen::Vector2d& desired, const PlannerConfig& config) {
  check_problem(problem);
  const auto prepared = prepare(problem, config);
  const SampleHeadings headings = prepared.empty() ? SampleHeadings{} : sample_headings(problem, control.omega);
  return cost_terms_prepared(control, problem, desired, config, prepared, headings);
}

double evaluate_cost(const ControlInput& control, const PlanningProblem& problem, const Eigen::Vector2d& desired,
                     const PlannerConfig& config) {
  return evaluate_cost_terms(control, problem, desired, config).total();
}

PlanResult plan(const PlanningProblem& problem, const PlannerConfig& config, unsigned threads) {
  config.validate();
  const auto candidates = config.grid.candidates();
  if (candidates.empty()) throw PlanningError("control grid is empty");

  const Eigen::Vector2d desired = desired_velocity(problem.nominal.position, problem.goal, config.v_max_desired);
  check_problem(problem);
  const auto prepared = prepare(problem, config);

  // Candidates are v-major, so the first omega_count entries hold every distinct omega.
  const auto omega_count = static_cast<std::size_t>(config.grid.omega_count);
  std::vector<SampleHeadings> headings(prepared.empty() ? 0 : omega_count);
  for (std::size_t w = 0; w < headings.size(); ++w) headings[w] = sample_headings(problem, candidates[w].omega);

  PlanResult result;
  result.costs.assign(candidates.size(), std::numeric_limits<double>::quiet_NaN());
  static const SampleHeadings kNone;
  parallel_for(candidates.size(), threads, [&](std::size_t c) {
    const SampleHeadings& dirs = headings.empty() ? kNone : headings[c % omega_count];
    result.costs[c] = cost_terms_prepared(candidates[c], problem, desired, config, prepared, dirs).total();
  });

  bool found = false;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double cost = result.costs[c];
    if (!std::isfinite(cost)) continue;
    if (!found || cost < result.cost) {
      found = true;
      result.cost = cost;
      result.index = c;
    }
  }
  if (!found) throw PlanningError("no control candidate has a finite cost");
  result.control = candidates[result.index];
  return result;
}

}  // namespace mmdnav

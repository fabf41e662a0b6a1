#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmdnav/dynamics.hpp"
#include "mmdnav/noise.hpp"
#include "mmdnav/planner.hpp"
#include "mmdnav/vo.hpp"

namespace mmdnav {

enum class Side { none, left, right };

std::string to_string(Side side);
Side side_from_string(const std::string& label);

struct ObstacleSpec {
  ObstacleState initial;
  MixtureModel position_noise = MixtureModel::point_mass();
  MixtureModel velocity_noise = MixtureModel::point_mass();
};

/**
 * One benchmark episode. Perception noise models describe the shape of the
 * estimation error; samples are re-centered on the nominal state each step, so
 * the nominal state is the sample mean in expectation. Actuation noise is
 * applied as drawn (its mean acts on the robot).
 */
struct Scenario {
  RobotState start;
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
  std::vector<ObstacleSpec> obstacles;
  double radius = 1.0;  // combined robot + obstacle radius, m
  double dt = 0.1;
  std::size_t horizon = 200;
  double goal_tolerance = 0.2;

  MixtureModel robot_noise = MixtureModel::point_mass();      // position offsets, m
  double heading_noise_std = 0.0;                             // rad
  MixtureModel actuation_noise = MixtureModel::point_mass();  // (eps_v, eps_omega)

  std::size_t n_robot = 100;
  std::size_t n_obstacle = 100;
  Side favorable_side = Side::none;
  std::uint64_t seed = 0;

  void validate() const;
};

struct StepRecord {
  std::size_t step = 0;
  RobotState robot;
  ControlInput control;
  Disturbance disturbance;
  std::vector<ObstacleState> obstacles;
  double collision_fraction = 0.0;
  double cost = 0.0;      // minimum over the grid
  double mmd = 0.0;       // MMD part of the chosen control's cost
  // Filled only when EpisodeOptions::record_violations is set, one per obstacle.
  std::vector<ViolationVector> violations;
};

struct TrajectoryLog {
  std::vector<StepRecord> steps;
  RobotState final_robot;
  std::vector<ObstacleState> final_obstacles;
  bool reached_goal = false;
  std::optional<std::string> failure;  // planning failure message, if any
};

struct EpisodeOptions {
  // Noise models the planner samples from; the world always uses the scenario's own.
  std::optional<Scenario> belief;
  bool record_violations = false;
  unsigned threads = 1;
};

/**
 * Closed loop: draw perception samples around the nominal states, plan, apply
 * one actuation draw to the nominal robot, advance obstacles. Stops within
 * goal_tolerance of the goal or at the horizon. Fully determined by the
 * scenario seed. Planning failures throw PlanningError carrying the step.
 */
TrajectoryLog run_episode(const Scenario& scenario, const PlannerConfig& config, const EpisodeOptions& options = {});

/// Fraction of (i, j) position pairs closer than radius, maximized over obstacle sets.
double collision_sample_fraction(const Eigen::MatrixXd& robot_positions,
                                 const std::vector<Eigen::MatrixXd>& obstacle_positions, double radius);

double collision_sample_fraction(const Eigen::MatrixXd& robot_positions, const Eigen::MatrixXd& obstacle_positions,
                                 double radius);

/// Passing side at the step of closest approach. Requires exactly one obstacle.
Side homotopy_side(const TrajectoryLog& log, const Scenario& scenario);

struct Metrics {
  bool success = false;
  bool reached_goal = false;
  double smoothness = 0.0;  // sum |u_t - u_{t-1}|^2
  double deviation = 0.0;   // mean distance to the start-goal segment, m
  double max_collision_fraction = 0.0;
  std::optional<Side> side;  // single-obstacle scenarios only
  std::size_t steps = 0;
  bool planning_failed = false;
};

double control_smoothness(const std::vector<ControlInput>& controls);
double path_deviation(const std::vector<Eigen::Vector2d>& path, const Eigen::Vector2d& start, const Eigen::Vector2d& goal);

Metrics compute_metrics(const TrajectoryLog& log, const Scenario& scenario, double eta);

enum class PlannerMode { exact, gaussian };

std::string to_string(PlannerMode mode);
PlannerMode mode_from_string(const std::string& label);

struct AggregateReport {
  std::size_t runs = 0;
  std::uint64_t base_seed = 0;
  PlannerMode mode = PlannerMode::exact;
  double success_rate = 0.0;
  double mean_smoothness = 0.0;
  double mean_deviation = 0.0;
  double mean_max_collision_fraction = 0.0;
  double mean_steps = 0.0;
  std::size_t planning_failures = 0;
  // Homotopy frequencies; present for single-obstacle scenarios.
  std::optional<double> left_freq;
  std::optional<double> right_freq;
  std::optional<double> none_freq;
  // Present when the scenario names a favorable side.
  std::optional<double> favorable_freq;
  std::optional<double> unfavorable_freq;
  std::vector<Metrics> episodes;  // ordered by seed
};

/**
 * Runs episodes with seeds base_seed .. base_seed + runs - 1. In gaussian mode
 * the planner's noise models are replaced once by gaussianize_scenario. Episodes
 * run in parallel over `threads`; aggregation is in seed order.
 */
AggregateReport monte_carlo(const Scenario& scenario, const PlannerConfig& config, std::size_t runs,
                            std::uint64_t base_seed, PlannerMode mode = PlannerMode::exact, unsigned threads = 1);

}  // namespace mmdnav

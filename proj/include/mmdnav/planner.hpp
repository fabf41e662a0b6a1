#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mmdnav/dynamics.hpp"
#include "mmdnav/mmd.hpp"
#include "mmdnav/noise.hpp"
#include "mmdnav/vo.hpp"

namespace mmdnav {

/// Box of candidate controls, v in [v_min, v_max] and omega in [-omega_max, omega_max].
struct ControlGrid {
  double v_min = 0.0;
  double v_max = 1.5;
  double omega_max = 1.0;
  int v_count = 25;
  int omega_count = 25;

  void validate() const;
  std::size_t size() const { return static_cast<std::size_t>(v_count) * static_cast<std::size_t>(omega_count); }
  // v-major enumeration: index = iv * omega_count + iw. A single-point axis sits at its midpoint.
  std::vector<ControlInput> candidates() const;
};

struct CostWeights {
  double tracking = 1.0;  // w1
  double effort = 0.02;   // w2
};

enum class MmdEvaluation {
  series,  // mmd_cost_series
  matrix,  // mmd_cost
};

struct PlannerConfig {
  ControlGrid grid;
  CostWeights weights;
  KernelConfig kernel;
  PairBudget pair_budget = 500;
  double v_max_desired = 1.0;
  // Success threshold; only used when scoring episodes.
  double eta = 0.9;
  MmdEvaluation mmd_evaluation = MmdEvaluation::series;

  void validate() const;
};

Eigen::Vector2d desired_velocity(const Eigen::Vector2d& position, const Eigen::Vector2d& goal, double v_max_desired);

/// Noise-free velocity for a control from the nominal heading.
Eigen::Vector2d nominal_velocity(double heading, const ControlInput& control, double dt);

struct CostTerms {
  double mmd = 0.0;       // summed over obstacles
  double tracking = 0.0;  // w1 |v - v_d|^2
  double effort = 0.0;    // w2 |u|^2
  double total() const { return mmd + tracking + effort; }
};

/// Everything the planner sees at one step.
struct PlanningProblem {
  RobotState nominal;
  SampleSet robot_samples;                 // rows (x, y, theta)
  SampleSet control_noise;                 // rows (eps_v, eps_omega)
  std::vector<SampleSet> obstacle_samples; // per obstacle, rows (x, y, vx, vy)
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
  double radius = 1.0;
  double dt = 0.1;
  std::uint64_t seed = 0;  // drives pair subsampling
};

/// Pair set for obstacle j, shared by every candidate within one planning call.
std::vector<PairIndex> obstacle_pairs(const PlanningProblem& problem, const PlannerConfig& config, std::size_t obstacle);

CostTerms evaluate_cost_terms(const ControlInput& control, const PlanningProblem& problem,
                              const Eigen::Vector2d& desired, const PlannerConfig& config);

double evaluate_cost(const ControlInput& control, const PlanningProblem& problem, const Eigen::Vector2d& desired,
                     const PlannerConfig& config);

struct PlanResult {
  ControlInput control;
  std::size_t index = 0;
  double cost = 0.0;
  std::vector<double> costs;  // per candidate, grid enumeration order
};

/**
 * Grid-search minimizer of MMD + tracking + effort. Ties go to the lowest
 * enumeration index, so the result does not depend on the thread count.
 * Throws PlanningError when no candidate has a finite cost.
 */
PlanResult plan(const PlanningProblem& problem, const PlannerConfig& config, unsigned threads = 1);

}  // namespace mmdnav

#pragma once

#include <Eigen/Dense>

namespace mmdnav {

struct RobotState {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  double heading = 0.0;  // radians, unwrapped
};

/// Commanded linear speed (m/s) and angular rate (rad/s).
struct ControlInput {
  double v = 0.0;
  double omega = 0.0;

  friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

struct ObstacleState {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
};

/// Additive actuation noise on (v, omega).
struct Disturbance {
  double v = 0.0;
  double omega = 0.0;
};

// Velocity realized by the unicycle over one step. The heading is evaluated after
// the step's rotation, so the velocity points along theta + (omega + eps_omega) * dt.
Eigen::Vector2d realized_velocity(double heading, const ControlInput& control, const Disturbance& dist, double dt);

RobotState step_robot(const RobotState& state, const ControlInput& control, const Disturbance& dist, double dt);

ObstacleState step_obstacle(const ObstacleState& state, double dt);

}  // namespace mmdnav

#include "mmdnav/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace mmdnav {
namespace {

void require_positive_dt(double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
}

}  // namespace

Eigen::Vector2d realized_velocity(double heading, const ControlInput& control, const Disturbance& dist, double dt) {
  require_positive_dt(dt);
  const double speed = control.v + dist.v;
  const double angle = heading + (control.omega + dist.omega) * dt;
  return {speed * std::cos(angle), speed * std::sin(angle)};
}

RobotState step_robot(const RobotState& state, const ControlInput& control, const Disturbance& dist, double dt) {
  const Eigen::Vector2d vel = realized_velocity(state.heading, control, dist, dt);
  return {state.position + vel * dt, state.heading + (control.omega + dist.omega) * dt};
}

ObstacleState step_obstacle(const ObstacleState& state, double dt) {
  require_positive_dt(dt);
  return {state.position + state.velocity * dt, state.velocity};
}

}  // namespace mmdnav

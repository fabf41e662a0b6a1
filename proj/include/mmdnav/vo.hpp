#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mmdnav/dynamics.hpp"
#include "mmdnav/noise.hpp"

namespace mmdnav {

/// Below this squared relative speed the VO constraint uses its static limit.
inline constexpr double kStaticSpeedSq = 1e-12;

/**
 * Velocity-obstacle constraint between two disks with combined radius R:
 *
 *   f = (r.v)^2 / |v|^2 - |r|^2 + R^2,   r = x_r - x_o,  v = v_r - v_o
 *
 * f <= 0 means the relative velocity is outside the collision cone. The
 * quadratic alone describes a double cone, so it is only applied while the
 * agents close in (r.v < 0). Receding or near-static pairs get R^2 - |r|^2,
 * which is positive only when the disks already overlap.
 */
inline double vo_constraint_relative(const Eigen::Vector2d& r, double r_sq, const Eigen::Vector2d& v, double radius_sq) {
  const double vv = v.squaredNorm();
  const double rv = r.dot(v);
  if (vv < kStaticSpeedSq || rv >= 0.0) return radius_sq - r_sq;
  return rv * rv / vv - r_sq + radius_sq;
}

double vo_constraint(const Eigen::Vector2d& robot_pos, const Eigen::Vector2d& robot_vel,
                     const Eigen::Vector2d& obstacle_pos, const Eigen::Vector2d& obstacle_vel, double radius);

inline double violation(double f) { return f > 0.0 ? f : 0.0; }

struct PairIndex {
  std::uint32_t robot = 0;
  std::uint32_t obstacle = 0;

  friend bool operator==(const PairIndex&, const PairIndex&) = default;
};

/// Empirical distribution of constraint violations over robot x obstacle sample pairs.
struct ViolationVector {
  std::vector<double> h;           // max(0, f) per pair
  std::vector<double> constraint;  // raw signed f per pair
  std::vector<double> weights;     // uniform 1 / N_pairs
  std::vector<PairIndex> pairs;

  std::size_t size() const { return h.size(); }
};

/// nullopt selects every pair.
using PairBudget = std::optional<std::size_t>;

/**
 * Pair set used to evaluate violations. A budget of nullopt, or one at least
 * n_robot * n_obstacle, yields the full product in row-major (robot, obstacle)
 * order. Smaller budgets draw that many distinct pairs uniformly without
 * replacement; the result is sorted in row-major order.
 */
std::vector<PairIndex> select_pairs(std::size_t n_robot, std::size_t n_obstacle, PairBudget budget, std::uint64_t seed);

/**
 * Robot samples are rows (x, y, theta); control noise rows (eps_v, eps_omega),
 * index-aligned with the robot samples; obstacle samples rows (x, y, vx, vy).
 */
ViolationVector violation_vector(const SampleSet& robot_samples, const ControlInput& control,
                                 const SampleSet& control_noise, const SampleSet& obstacle_samples, double radius,
                                 double dt, std::span<const PairIndex> pairs);

ViolationVector violation_vector(const SampleSet& robot_samples, const ControlInput& control,
                                 const SampleSet& control_noise, const SampleSet& obstacle_samples, double radius,
                                 double dt, PairBudget budget, std::uint64_t seed);

}  // namespace mmdnav

#include "mmdnav/vo.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mmdnav {
namespace {

void check_sample_shapes(const SampleSet& robot, const SampleSet& noise, const SampleSet& obstacle) {
  if (robot.dim() < 3) throw std::invalid_argument("robot samples need columns (x, y, theta)");
  if (noise.dim() < 2) throw std::invalid_argument("control noise samples need columns (eps_v, eps_omega)");
  if (obstacle.dim() < 4) throw std::invalid_argument("obstacle samples need columns (x, y, vx, vy)");
  if (robot.count() != noise.count())
    throw std::invalid_argument("robot samples and control noise must have the same count");
}

}  // namespace

double vo_constraint(const Eigen::Vector2d& robot_pos, const Eigen::Vector2d& robot_vel,
                     const Eigen::Vector2d& obstacle_pos, const Eigen::Vector2d& obstacle_vel, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("vo_constraint: combined radius must be positive");
  const Eigen::Vector2d r = robot_pos - obstacle_pos;
  return vo_constraint_relative(r, r.squaredNorm(), robot_vel - obstacle_vel, radius * radius);
}

std::vector<PairIndex> select_pairs(std::size_t n_robot, std::size_t n_obstacle, PairBudget budget,
                                    std::uint64_t seed) {
  const std::size_t total = n_robot * n_obstacle;
  std::vector<PairIndex> pairs;
  auto to_pair = [n_obstacle](std::size_t flat) {
    return PairIndex{static_cast<std::uint32_t>(flat / n_obstacle), static_cast<std::uint32_t>(flat % n_obstacle)};
  };
  if (!budget || *budget >= total) {
    pairs.reserve(total);
    for (std::size_t p = 0; p < total; ++p) pairs.push_back(to_pair(p));
    return pairs;
  }
  if (*budget == 0) throw std::invalid_argument("pair budget must be >= 1");

  // Selection sampling keeps the chosen indices in ascending order.
  std::vector<std::size_t> flat(total);
  std::iota(flat.begin(), flat.end(), std::size_t{0});
  std::vector<std::size_t> chosen;
  chosen.reserve(*budget);
  std::mt19937_64 gen(seed);
  std::sample(flat.begin(), flat.end(), std::back_inserter(chosen), *budget, gen);
  pairs.reserve(chosen.size());
  for (std::size_t p : chosen) pairs.push_back(to_pair(p));
  return pairs;
}

ViolationVector violation_vector(const SampleSet& robot_samples, const ControlInput& control,
                                 const SampleSet& control_noise, const SampleSet& obstacle_samples, double radius,
                                 double dt, std::span<const PairIndex> pairs) {
  check_sample_shapes(robot_samples, control_noise, obstacle_samples);
  const std::size_t n_r = robot_samples.count();
  const std::size_t n_o = obstacle_samples.count();

  std::vector<Eigen::Vector2d> robot_vel(n_r);
  for (std::size_t i = 0; i < n_r; ++i)
    robot_vel[i] = realized_velocity(robot_samples(i, 2), control, Disturbance{control_noise(i, 0), control_noise(i, 1)}, dt);

  ViolationVector out;
  out.h.resize(pairs.size());
  out.constraint.resize(pairs.size());
  out.weights.assign(pairs.size(), pairs.empty() ? 0.0 : 1.0 / static_cast<double>(pairs.size()));
  out.pairs.assign(pairs.begin(), pairs.end());
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    if (i >= n_r || j >= n_o) throw std::out_of_range("pair index outside sample sets");
    const Eigen::Vector2d xr(robot_samples(i, 0), robot_samples(i, 1));
    const Eigen::Vector2d xo(obstacle_samples(j, 0), obstacle_samples(j, 1));
    const Eigen::Vector2d vo(obstacle_samples(j, 2), obstacle_samples(j, 3));
    const double f = vo_constraint(xr, robot_vel[i], xo, vo, radius);
    out.constraint[p] = f;
    out.h[p] = violation(f);
  }
  return out;
}

ViolationVector violation_vector(const SampleSet& robot_samples, const ControlInput& control,
                                 const SampleSet& control_noise, const SampleSet& obstacle_samples, double radius,
                                 double dt, PairBudget budget, std::uint64_t seed) {
  check_sample_shapes(robot_samples, control_noise, obstacle_samples);
  const auto pairs = select_pairs(robot_samples.count(), obstacle_samples.count(), budget, seed);
  return violation_vector(robot_samples, control, control_noise, obstacle_samples, radius, dt, pairs);
}

}  // namespace mmdnav

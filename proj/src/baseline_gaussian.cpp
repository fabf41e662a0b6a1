#include "mmdnav/baseline_gaussian.hpp"

#include "mmdnav/rng.hpp"

namespace mmdnav {

MixtureModel gaussianize(const MixtureModel& model, std::uint64_t seed) {
  return gaussian_approximation(sample_mixture(model, kGaussianizeDraws, seed));
}

Scenario gaussianize_scenario(const Scenario& scenario, std::uint64_t seed) {
  Scenario out = scenario;
  out.robot_noise = gaussianize(scenario.robot_noise, derive_seed(seed, {0}));
  out.actuation_noise = gaussianize(scenario.actuation_noise, derive_seed(seed, {1}));
  for (std::size_t j = 0; j < out.obstacles.size(); ++j) {
    out.obstacles[j].position_noise = gaussianize(scenario.obstacles[j].position_noise, derive_seed(seed, {2, j}));
    out.obstacles[j].velocity_noise = gaussianize(scenario.obstacles[j].velocity_noise, derive_seed(seed, {3, j}));
  }
  return out;
}

TrajectoryLog run_episode_gaussian(const Scenario& scenario, const PlannerConfig& config, std::uint64_t seed,
                                   EpisodeOptions options) {
  options.belief = gaussianize_scenario(scenario, seed);
  return run_episode(scenario, config, options);
}

}  // namespace mmdnav

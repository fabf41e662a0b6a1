#pragma once

#include <cstddef>
#include <cstdint>

#include "mmdnav/noise.hpp"
#include "mmdnav/sim.hpp"

namespace mmdnav {

/// Draw count used to moment-match each mixture.
inline constexpr std::size_t kGaussianizeDraws = 10000;

/// Single-Gaussian moment match of a mixture, estimated from kGaussianizeDraws samples.
MixtureModel gaussianize(const MixtureModel& model, std::uint64_t seed);

/**
 * Replaces every noise model of the scenario (robot position, actuation, and
 * per-obstacle position and velocity) by its moment-matched Gaussian. All other
 * fields are copied unchanged. Use the result as EpisodeOptions::belief so the
 * world keeps the true noise while the planner sees the approximation.
 */
Scenario gaussianize_scenario(const Scenario& scenario, std::uint64_t seed);

/// run_episode with the planner's beliefs replaced by gaussianize_scenario(scenario, seed).
TrajectoryLog run_episode_gaussian(const Scenario& scenario, const PlannerConfig& config, std::uint64_t seed,
                                   EpisodeOptions options = {});

}  // namespace mmdnav

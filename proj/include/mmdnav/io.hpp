#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "mmdnav/noise.hpp"
#include "mmdnav/planner.hpp"
#include "mmdnav/sim.hpp"

namespace mmdnav {

using json = nlohmann::json;

// Mixture: {"components":[{"weight":w,"mean":[x,y],"cov":[[a,b],[b,c]]}]}.
// Input also accepts {"bias_sweep": k} for the built-in k = 1..8 family.
MixtureModel mixture_from_json(const json& j);
json to_json(const MixtureModel& model);

// Keys: grid, weights, gamma, pair_budget ("all" or a count), eta, v_max_desired,
// and optionally mmd_evaluation ("series" or "matrix"). Missing keys keep defaults.
PlannerConfig planner_config_from_json(const json& j);
json to_json(const PlannerConfig& config);

Scenario scenario_from_json(const json& j);
json to_json(const Scenario& scenario);

json to_json(const Metrics& metrics);
json to_json(const AggregateReport& report);

/// Parses a JSON file. Missing files and parse errors throw ConfigError naming the path.
json load_json_file(const std::filesystem::path& path);

/// One sample per row, comma-separated columns, no header.
SampleSet load_samples_csv(const std::filesystem::path& path);

/// Header: step,x,y,theta,v_cmd,w_cmd,eps_v,eps_w,cost,mmd,coll_frac, then obs<j>_x,obs<j>_y per obstacle.
std::string trajectory_csv(const TrajectoryLog& log);

/// Writes via a sibling temporary file and rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Shortest round-trip decimal representation of a double.
std::string format_number(double value);

}  // namespace mmdnav

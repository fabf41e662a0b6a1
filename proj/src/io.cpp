#include "mmdnav/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "mmdnav/errors.hpp"

namespace mmdnav {
namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + ": expected a JSON object");
  for (const auto& [key, _] : j.items())
    if (!allowed.contains(key)) throw ConfigError(what + ": unknown key '" + key + "'");
}

Eigen::Vector2d vec2(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(what + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json vec2_json(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& what) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(what + ": bad value for '" + key + "': " + e.what());
  }
}

std::size_t get_count(const json& j, const char* key, std::size_t fallback, const std::string& what) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(what + ": '" + key + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

MixtureModel mixture_or(const json& j, const char* key, const MixtureModel& fallback) {
  if (!j.contains(key)) return fallback;
  return mixture_from_json(j.at(key));
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

MixtureModel mixture_from_json(const json& j) {
  const std::string what = "mixture";
  if (j.is_object() && j.contains("bias_sweep")) {
    reject_unknown_keys(j, {"bias_sweep"}, what);
    if (!j["bias_sweep"].is_number_integer()) throw ConfigError(what + ": bias_sweep must be an integer");
    try {
      return bias_sweep_model(j["bias_sweep"].get<int>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(what + ": " + e.what());
    }
  }
  reject_unknown_keys(j, {"components"}, what);
  if (!j.contains("components") || !j["components"].is_array())
    throw ConfigError(what + ": 'components' array is required");
  std::vector<MixtureComponent> comps;
  for (const auto& c : j["components"]) {
    reject_unknown_keys(c, {"weight", "mean", "cov"}, what + " component");
    MixtureComponent comp;
    comp.weight = get_or<double>(c, "weight", 1.0, what);
    comp.mean = c.contains("mean") ? vec2(c["mean"], what + " mean") : Eigen::Vector2d::Zero();
    if (c.contains("cov")) {
      const auto& cov = c["cov"];
      if (!cov.is_array() || cov.size() != 2) throw ConfigError(what + ": cov must be a 2x2 array");
      comp.covariance.row(0) = vec2(cov[0], what + " cov").transpose();
      comp.covariance.row(1) = vec2(cov[1], what + " cov").transpose();
    }
    comps.push_back(comp);
  }
  return MixtureModel(std::move(comps));
}

json to_json(const MixtureModel& model) {
  json comps = json::array();
  for (const auto& c : model.components()) {
    comps.push_back({{"weight", c.weight},
                     {"mean", vec2_json(c.mean)},
                     {"cov", json::array({vec2_json(c.covariance.row(0).transpose()),
                                          vec2_json(c.covariance.row(1).transpose())})}});
  }
  return {{"components", comps}};
}

PlannerConfig planner_config_from_json(const json& j) {
  const std::string what = "planner config";
  reject_unknown_keys(j, {"grid", "weights", "gamma", "pair_budget", "eta", "v_max_desired", "mmd_evaluation"}, what);
  PlannerConfig c;
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    reject_unknown_keys(g, {"v_min", "v_max", "omega_max", "v_count", "omega_count"}, what + " grid");
    c.grid.v_min = get_or<double>(g, "v_min", c.grid.v_min, what);
    c.grid.v_max = get_or<double>(g, "v_max", c.grid.v_max, what);
    c.grid.omega_max = get_or<double>(g, "omega_max", c.grid.omega_max, what);
    c.grid.v_count = get_or<int>(g, "v_count", c.grid.v_count, what);
    c.grid.omega_count = get_or<int>(g, "omega_count", c.grid.omega_count, what);
  }
  if (j.contains("weights")) {
    const auto& w = j["weights"];
    reject_unknown_keys(w, {"w1", "w2"}, what + " weights");
    c.weights.tracking = get_or<double>(w, "w1", c.weights.tracking, what);
    c.weights.effort = get_or<double>(w, "w2", c.weights.effort, what);
  }
  c.kernel.gamma = get_or<double>(j, "gamma", c.kernel.gamma, what);
  if (j.contains("pair_budget")) {
    const auto& b = j["pair_budget"];
    if (b.is_string() && b.get<std::string>() == "all") {
      c.pair_budget = std::nullopt;
    } else {
      c.pair_budget = get_count(j, "pair_budget", 500, what);
    }
  }
  c.eta = get_or<double>(j, "eta", c.eta, what);
  c.v_max_desired = get_or<double>(j, "v_max_desired", c.v_max_desired, what);
  if (j.contains("mmd_evaluation")) {
    const auto mode = get_or<std::string>(j, "mmd_evaluation", "series", what);
    if (mode == "series") c.mmd_evaluation = MmdEvaluation::series;
    else if (mode == "matrix") c.mmd_evaluation = MmdEvaluation::matrix;
    else throw ConfigError(what + ": mmd_evaluation must be 'series' or 'matrix'");
  }
  c.validate();
  return c;
}

json to_json(const PlannerConfig& c) {
  return {{"grid",
           {{"v_min", c.grid.v_min},
            {"v_max", c.grid.v_max},
            {"omega_max", c.grid.omega_max},
            {"v_count", c.grid.v_count},
            {"omega_count", c.grid.omega_count}}},
          {"weights", {{"w1", c.weights.tracking}, {"w2", c.weights.effort}}},
          {"gamma", c.kernel.gamma},
          {"pair_budget", c.pair_budget ? json(*c.pair_budget) : json("all")},
          {"eta", c.eta},
          {"v_max_desired", c.v_max_desired},
          {"mmd_evaluation", c.mmd_evaluation == MmdEvaluation::series ? "series" : "matrix"}};
}

Scenario scenario_from_json(const json& j) {
  const std::string what = "scenario";
  reject_unknown_keys(j,
                      {"start", "goal", "obstacles", "radius", "dt", "horizon", "goal_tolerance", "robot_noise",
                       "heading_noise_std", "actuation_noise", "samples", "favorable_side", "seed"},
                      what);
  Scenario s;
  if (!j.contains("start") || !j.contains("goal")) throw ConfigError(what + ": 'start' and 'goal' are required");
  reject_unknown_keys(j["start"], {"position", "heading"}, what + " start");
  s.start.position = vec2(j["start"].value("position", json::array({0.0, 0.0})), what + " start.position");
  s.start.heading = get_or<double>(j["start"], "heading", 0.0, what);
  s.goal = vec2(j["goal"], what + " goal");
  if (j.contains("obstacles")) {
    if (!j["obstacles"].is_array()) throw ConfigError(what + ": 'obstacles' must be an array");
    for (const auto& o : j["obstacles"]) {
      reject_unknown_keys(o, {"position", "velocity", "position_noise", "velocity_noise"}, what + " obstacle");
      ObstacleSpec spec;
      if (!o.contains("position")) throw ConfigError(what + ": obstacle needs a position");
      spec.initial.position = vec2(o["position"], what + " obstacle position");
      spec.initial.velocity = o.contains("velocity") ? vec2(o["velocity"], what + " obstacle velocity") : Eigen::Vector2d::Zero();
      spec.position_noise = mixture_or(o, "position_noise", spec.position_noise);
      spec.velocity_noise = mixture_or(o, "velocity_noise", spec.velocity_noise);
      s.obstacles.push_back(std::move(spec));
    }
  }
  s.radius = get_or<double>(j, "radius", s.radius, what);
  s.dt = get_or<double>(j, "dt", s.dt, what);
  s.horizon = get_count(j, "horizon", s.horizon, what);
  s.goal_tolerance = get_or<double>(j, "goal_tolerance", s.goal_tolerance, what);
  s.robot_noise = mixture_or(j, "robot_noise", s.robot_noise);
  s.heading_noise_std = get_or<double>(j, "heading_noise_std", s.heading_noise_std, what);
  s.actuation_noise = mixture_or(j, "actuation_noise", s.actuation_noise);
  if (j.contains("samples")) {
    reject_unknown_keys(j["samples"], {"robot", "obstacle"}, what + " samples");
    s.n_robot = get_count(j["samples"], "robot", s.n_robot, what);
    s.n_obstacle = get_count(j["samples"], "obstacle", s.n_obstacle, what);
  }
  s.favorable_side = side_from_string(get_or<std::string>(j, "favorable_side", "none", what));
  s.seed = get_or<std::uint64_t>(j, "seed", 0, what);
  s.validate();
  return s;
}

json to_json(const Scenario& s) {
  json obstacles = json::array();
  for (const auto& o : s.obstacles) {
    obstacles.push_back({{"position", vec2_json(o.initial.position)},
                         {"velocity", vec2_json(o.initial.velocity)},
                         {"position_noise", to_json(o.position_noise)},
                         {"velocity_noise", to_json(o.velocity_noise)}});
  }
  return {{"start", {{"position", vec2_json(s.start.position)}, {"heading", s.start.heading}}},
          {"goal", vec2_json(s.goal)},
          {"obstacles", obstacles},
          {"radius", s.radius},
          {"dt", s.dt},
          {"horizon", s.horizon},
          {"goal_tolerance", s.goal_tolerance},
          {"robot_noise", to_json(s.robot_noise)},
          {"heading_noise_std", s.heading_noise_std},
          {"actuation_noise", to_json(s.actuation_noise)},
          {"samples", {{"robot", s.n_robot}, {"obstacle", s.n_obstacle}}},
          {"favorable_side", to_string(s.favorable_side)},
          {"seed", s.seed}};
}

json to_json(const Metrics& m) {
  json out = {{"success", m.success},
              {"reached_goal", m.reached_goal},
              {"planning_failed", m.planning_failed},
              {"steps", m.steps},
              {"smoothness", m.smoothness},
              {"deviation", m.deviation},
              {"max_collision_fraction", m.max_collision_fraction}};
  out["side"] = m.side ? json(to_string(*m.side)) : json(nullptr);
  return out;
}

json to_json(const AggregateReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json episodes = json::array();
  for (std::size_t i = 0; i < r.episodes.size(); ++i) {
    json e = to_json(r.episodes[i]);
    e["seed"] = r.base_seed + i;
    episodes.push_back(std::move(e));
  }
  return {{"runs", r.runs},
          {"base_seed", r.base_seed},
          {"mode", to_string(r.mode)},
          {"success_rate", r.success_rate},
          {"mean_smoothness", r.mean_smoothness},
          {"mean_deviation", r.mean_deviation},
          {"mean_max_collision_fraction", r.mean_max_collision_fraction},
          {"mean_steps", r.mean_steps},
          {"planning_failures", r.planning_failures},
          {"left_freq", opt(r.left_freq)},
          {"right_freq", opt(r.right_freq)},
          {"none_freq", opt(r.none_freq)},
          {"favorable_freq", opt(r.favorable_freq)},
          {"unfavorable_freq", opt(r.unfavorable_freq)},
          {"episodes", episodes}};
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("JSON parse error in " + path.string() + ": " + e.what());
  }
}

SampleSet load_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto first = cell.find_first_not_of(" \t\r");
      const auto last = cell.find_last_not_of(" \t\r");
      double v = 0.0;
      const char* begin = first == std::string::npos ? cell.data() : cell.data() + first;
      const char* end = first == std::string::npos ? cell.data() : cell.data() + last + 1;
      const auto res = std::from_chars(begin, end, v);
      if (res.ec != std::errc{} || res.ptr != end)
        throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": not a number: '" + cell + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": inconsistent column count");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(path.string() + ": no samples");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  try {
    return SampleSet(std::move(m));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string trajectory_csv(const TrajectoryLog& log) {
  std::size_t n_obs = log.final_obstacles.size();
  std::ostringstream out;
  out << "step,x,y,theta,v_cmd,w_cmd,eps_v,eps_w,cost,mmd,coll_frac";
  for (std::size_t j = 0; j < n_obs; ++j) out << ",obs" << j << "_x,obs" << j << "_y";
  out << '\n';
  for (const auto& s : log.steps) {
    out << s.step << ',' << format_number(s.robot.position.x()) << ',' << format_number(s.robot.position.y()) << ','
        << format_number(s.robot.heading) << ',' << format_number(s.control.v) << ',' << format_number(s.control.omega)
        << ',' << format_number(s.disturbance.v) << ',' << format_number(s.disturbance.omega) << ','
        << format_number(s.cost) << ',' << format_number(s.mmd) << ',' << format_number(s.collision_fraction);
    for (const auto& o : s.obstacles) out << ',' << format_number(o.position.x()) << ',' << format_number(o.position.y());
    out << '\n';
  }
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mmdnav

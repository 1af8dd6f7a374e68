// Copyright 2026 The sacontrol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sac/simulator.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sac {
namespace {

using nlohmann::json;

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != N) {
    throw ConfigError(key + " must be an array of " + std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    if (!j[static_cast<size_t>(i)].is_number()) throw ConfigError(key + " must contain numbers");
    v[i] = j[static_cast<size_t>(i)].get<double>();
  }
  return v;
}

double num(const json& j, const std::string& key) {
  if (!j.is_number()) throw ConfigError(key + " must be a number");
  return j.get<double>();
}

// Scalar -> s*I, array of N -> diagonal, array of N arrays -> full matrix.
template <int N>
Eigen::Matrix<double, N, N> matrix(const json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>() * Eigen::Matrix<double, N, N>::Identity();
  if (j.is_array() && j.size() == N && j[0].is_array()) {
    Eigen::Matrix<double, N, N> m;
    for (int r = 0; r < N; ++r) m.row(r) = vec<N>(j[static_cast<size_t>(r)], key).transpose();
    return m;
  }
  return vec<N>(j, key).asDiagonal();
}

Diag6 diag6(const json& j, const std::string& key) {
  const Mat6 m = matrix<6>(j, key);
  if (!is_diagonal(m)) throw ConfigError(key + " must be diagonal");
  return Diag6(Vec6(m.diagonal()));
}

// Visits every key of an object section and rejects unknown ones.
template <class F>
void section(const json& root, const std::string& name, F&& on_key) {
  if (!root.contains(name)) return;
  const json& s = root.at(name);
  if (!s.is_object()) throw ConfigError(name + " must be an object");
  for (auto it = s.begin(); it != s.end(); ++it) {
    const std::string full = name + "." + it.key();
    if (!on_key(it.key(), it.value(), full)) throw ConfigError("unknown key " + full);
  }
}

ObstacleSphere parse_obstacle(const json& j) {
  ObstacleSphere o;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string k = "obstacles[]." + it.key();
    if (it.key() == "center") o.center = vec<3>(it.value(), k);
    else if (it.key() == "radius") o.radius = num(it.value(), k);
    else if (it.key() == "v_dir") o.v_dir = vec<3>(it.value(), k).normalized();
    else throw ConfigError("unknown key " + k);
  }
  return o;
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("scenario must be a JSON object");
  ScenarioConfig cfg;
  for (auto it = root.begin(); it != root.end(); ++it) {
    static const std::vector<std::string> top = {"name",       "demo",        "obstacles", "motion",
                                                 "authority",  "controller",  "plant",     "environment",
                                                 "sim",        "human"};
    if (std::find(top.begin(), top.end(), it.key()) == top.end()) throw ConfigError("unknown key " + it.key());
  }
  if (root.contains("name")) cfg.name = root.at("name").get<std::string>();

  section(root, "demo", [&](const std::string& k, const json& v, const std::string& full) {
    if (k == "source") {
      std::filesystem::path p = v.get<std::string>();
      cfg.demo.path = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    } else if (k == "mode") {
      const auto mode = v.get<std::string>();
      if (mode != "mean" && mode != "single") throw ConfigError(full + " must be 'mean' or 'single'");
      cfg.demo.use_mean = mode == "mean";
    } else if (k == "index") {
      cfg.demo.index = v.get<std::size_t>();
    } else if (k == "locality_window") {
      if (!v.is_null()) cfg.demo.locality_window = v.get<Eigen::Index>();
    } else if (k == "start") {
      cfg.start = vec<3>(v, full);
    } else if (k == "goal") {
      cfg.goal = vec<3>(v, full);
    } else {
      return false;
    }
    return true;
  });

  if (root.contains("obstacles")) {
    for (const auto& o : root.at("obstacles")) cfg.obstacles.push_back(parse_obstacle(o));
  }

  section(root, "motion", [&](const std::string& k, const json& v, const std::string& full) {
    if (k == "gain_linear") cfg.motion.gain_linear = matrix<3>(v, full);
    else if (k == "gain_angular") cfg.motion.gain_angular = matrix<3>(v, full);
    else if (k == "v_th") cfg.motion.v_th = num(v, full);
    else if (k == "w_th") cfg.motion.w_th = num(v, full);
    else if (k == "lambda_cap") cfg.motion.lambda_cap = num(v, full);
    else if (k == "obstacle_gain") cfg.motion.obstacle_gain = num(v, full);
    else return false;
    return true;
  });

  section(root, "authority", [&](const std::string& k, const json& v, const std::string& full) {
    auto& a = cfg.authority;
    if (k == "a") a.a = num(v, full);
    else if (k == "b") a.b = num(v, full);
    else if (k == "c1") a.c1 = num(v, full);
    else if (k == "c2") a.c2 = num(v, full);
    else if (k == "g_plus") a.g_plus = num(v, full);
    else if (k == "g_minus") a.g_minus = num(v, full);
    else if (k == "sensor_lag") cfg.sim.authority_sensor_lag = num(v, full);
    else return false;
    return true;
  });

  bool explicit_d_bar = false;
  section(root, "controller", [&](const std::string& k, const json& v, const std::string& full) {
    auto& g = cfg.gains;
    if (k == "K_bar") g.k_bar = diag6(v, full);
    else if (k == "D_bar") { g.d_bar = diag6(v, full); explicit_d_bar = true; }
    else if (k == "K_max") g.k_max = diag6(v, full);
    else if (k == "K_w") g.k_w = diag6(v, full);
    else if (k == "K_i") g.k_i = diag6(v, full);
    else if (k == "integral_limit") g.integral_limit = num(v, full);
    else if (k == "force_axes") {
      const auto axes = v.get<std::string>();
      if (axes != "reference" && axes != "all") throw ConfigError(full + " must be 'reference' or 'all'");
      g.force_axes = axes == "reference" ? ForceAxes::kReference : ForceAxes::kAll;
    }
    else if (k == "psi_lower") cfg.tank.psi_lower = num(v, full);
    else if (k == "psi_upper") cfg.tank.psi_upper = num(v, full);
    else if (k == "s_floor") cfg.tank.s_floor = num(v, full);
    else return false;
    return true;
  });
  if (!explicit_d_bar) cfg.gains.d_bar = Diag6(Vec6(2.0 * cfg.gains.k_bar.diagonal().cwiseSqrt()));

  section(root, "plant", [&](const std::string& k, const json& v, const std::string& full) {
    if (k == "inertia") cfg.plant.inertia = diag6(v, full);
    else if (k == "coriolis") cfg.plant.coriolis = matrix<6>(v, full);
    else if (k == "gravity") cfg.plant.gravity = vec<6>(v, full);
    else return false;
    return true;
  });

  section(root, "environment", [&](const std::string& k, const json& v, const std::string& full) {
    if (k == "walls") {
      for (const auto& wj : v) {
        Wall w;
        for (auto it = wj.begin(); it != wj.end(); ++it) {
          const std::string wk = full + "[]." + it.key();
          if (it.key() == "point") w.point = vec<3>(it.value(), wk);
          else if (it.key() == "normal") w.normal = vec<3>(it.value(), wk).normalized();
          else if (it.key() == "stiffness") w.stiffness = num(it.value(), wk);
          else if (it.key() == "damping") w.damping = num(it.value(), wk);
          else if (it.key() == "friction") w.friction = num(it.value(), wk);
          else throw ConfigError("unknown key " + wk);
        }
        cfg.environment.walls.push_back(w);
      }
    } else if (k == "button") {
      Button b;
      for (auto it = v.begin(); it != v.end(); ++it) {
        const std::string bk = full + "." + it.key();
        if (it.key() == "wall") b.wall = it.value().get<std::size_t>();
        else if (it.key() == "trigger_force") b.trigger_force = num(it.value(), bk);
        else if (it.key() == "sustain") b.sustain = num(it.value(), bk);
        else throw ConfigError("unknown key " + bk);
      }
      cfg.environment.button = b;
    } else {
      return false;
    }
    return true;
  });

  section(root, "sim", [&](const std::string& k, const json& v, const std::string& full) {
    auto& s = cfg.sim;
    if (k == "dt") s.dt = num(v, full);
    else if (k == "duration") s.duration = num(v, full);
    else if (k == "seed") s.seed = v.get<std::uint64_t>();
    else if (k == "noise_sigma") s.noise_sigma = num(v, full);
    else if (k == "noise_sigma_est") s.noise_sigma_est = num(v, full);
    else if (k == "reference_follow_gain") s.reference_follow_gain = num(v, full);
    else if (k == "initial_pose") { s.initial_pose = vec<6>(v, full); s.start_at_demo_start = false; }
    else if (k == "initial_vel") s.initial_vel = vec<6>(v, full);
    else if (k == "controller_enabled") s.controller_enabled = v.get<bool>();
    else return false;
    return true;
  });

  if (root.contains("human")) {
    for (const auto& hj : root.at("human")) {
      HumanSegment seg;
      for (auto it = hj.begin(); it != hj.end(); ++it) {
        const std::string hk = "human[]." + it.key();
        if (it.key() == "start") seg.start = num(it.value(), hk);
        else if (it.key() == "end") seg.end = num(it.value(), hk);
        else if (it.key() == "frame") {
          const auto f = it.value().get<std::string>();
          if (f != "tool" && f != "body") throw ConfigError(hk + " must be 'tool' or 'body'");
          seg.frame = f == "tool" ? ForceFrame::kTool : ForceFrame::kBody;
        } else if (it.key() == "wrench") seg.wrench = vec<6>(it.value(), hk);
        else throw ConfigError("unknown key " + hk);
      }
      cfg.human.push_back(seg);
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read scenario " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  ScenarioConfig cfg;
  try {
    cfg = parse_scenario(ss.str(), path.parent_path());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  }
  resolve_demo(cfg);
  return cfg;
}

void resolve_demo(ScenarioConfig& cfg) {
  const auto& src = cfg.demo;
  if (src.path.empty()) throw ConfigError("demo.source is required");
  if (std::filesystem::is_directory(src.path)) {
    DemoSet set = load_demo_set(src.path);
    if (src.use_mean) {
      cfg.demo_data = mean_trajectory(set);
    } else {
      if (src.index >= set.demos.size()) throw ConfigError("demo.index out of range");
      cfg.demo_data = set.demos[src.index];
    }
  } else if (std::filesystem::exists(src.path)) {
    cfg.demo_data = load_demonstration(src.path);
  } else {
    throw ConfigError("demo.source not found: " + src.path.string());
  }
}

}  // namespace sac

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

#include "sac/session.hpp"

#include "sac/trace.hpp"

#include <cmath>
#include <regex>

namespace sac {
namespace {

using nlohmann::json;

struct Reject {
  std::string code;
  std::string message;
};

json arr(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

template <int N>
Eigen::Matrix<double, N, 1> read_vec(const json& msg, const char* key) {
  if (!msg.contains(key)) throw Reject{"Malformed", std::string("missing '") + key + "'"};
  const json& j = msg.at(key);
  if (!j.is_array() || j.size() != N) {
    throw Reject{"Malformed", std::string("'") + key + "' must be an array of " + std::to_string(N) + " numbers"};
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    const json& x = j[static_cast<std::size_t>(i)];
    if (!x.is_number() || !std::isfinite(x.get<double>())) {
      throw Reject{"Malformed", std::string("'") + key + "' must contain finite numbers"};
    }
    v[i] = x.get<double>();
  }
  return v;
}

double read_number(const json& msg, const char* key) {
  if (!msg.contains(key) || !msg.at(key).is_number() || !std::isfinite(msg.at(key).get<double>())) {
    throw Reject{"Malformed", std::string("'") + key + "' must be a finite number"};
  }
  return msg.at(key).get<double>();
}

std::string read_string(const json& msg, const char* key) {
  if (!msg.contains(key) || !msg.at(key).is_string()) {
    throw Reject{"Malformed", std::string("'") + key + "' must be a string"};
  }
  return msg.at(key).get<std::string>();
}

json error_reply(const json& seq, const std::string& code, const std::string& message) {
  json r = {{"v", kProtocolVersion}, {"type", "error"}, {"code", code}, {"message", message}};
  if (!seq.is_null()) r["seq"] = seq;
  return r;
}

}  // namespace

Vec6 clamp_wrench(const Vec6& w, double max_force, double max_torque) {
  Vec6 out = w;
  const double f = w.head<3>().norm();
  const double t = w.tail<3>().norm();
  if (f > max_force) out.head<3>() *= max_force / f;
  if (t > max_torque) out.tail<3>() *= max_torque / t;
  return out;
}

Session::Session(ScenarioConfig cfg, SessionOptions opts)
    : opts_(std::move(opts)), scenario_dir_(opts_.scenario.parent_path()) {
  load(std::move(cfg));
}

void Session::load(ScenarioConfig cfg) {
  sim_.emplace(std::move(cfg));
  obstacle_ids_.clear();
  for (std::size_t i = 0; i < sim_->obstacles().size(); ++i) obstacle_ids_.push_back(next_obstacle_id_++);
  sim_revision_seen_ = sim_->transform_revision();
  ++demo_revision_;
  human_ = HumanInput{};
  human_at_.reset();
  records_.clear();
}

json Session::handle(const std::string& text, Clock::time_point now) {
  json msg;
  try {
    msg = json::parse(text);
  } catch (const json::exception& e) {
    return error_reply(nullptr, "Malformed", std::string("invalid JSON: ") + e.what());
  }
  return handle(msg, now);
}

json Session::handle(const json& msg, Clock::time_point now) {
  const json seq = msg.is_object() && msg.contains("seq") ? msg.at("seq") : json();
  try {
    return apply(msg, now);
  } catch (const Reject& r) {
    return error_reply(seq, r.code, r.message);
  } catch (const json::exception& e) {
    return error_reply(seq, "Malformed", e.what());
  }
}

json Session::apply(const json& msg, Clock::time_point now) {
  if (!msg.is_object()) throw Reject{"Malformed", "message must be an object"};
  if (!msg.contains("v") || !msg.at("v").is_number_integer() || msg.at("v").get<int>() != kProtocolVersion) {
    throw Reject{"Malformed", "unsupported or missing protocol version 'v'"};
  }
  const std::string type = read_string(msg, "type");
  json ack = {{"v", kProtocolVersion}, {"type", "ack"}, {"of", type}};
  if (msg.contains("seq")) ack["seq"] = msg.at("seq");
  json applied = json::object();

  if (type == "human_force") {
    const std::string frame = read_string(msg, "frame");
    if (frame != "tool" && frame != "body") throw Reject{"Malformed", "'frame' must be 'tool' or 'body'"};
    const Vec6 w = clamp_wrench(read_vec<6>(msg, "wrench"), opts_.max_force, opts_.max_torque);
    human_ = HumanInput{};
    (frame == "tool" ? human_.tool_wrench : human_.body_wrench) = w;
    human_at_ = now;
    applied = {{"frame", frame}, {"wrench", arr(w)}};
  } else if (type == "place_obstacle") {
    ObstacleSphere o;
    o.center = read_vec<3>(msg, "center");
    o.radius = read_number(msg, "radius");
    if (!(o.radius > 0.0 && o.radius <= 1.0)) throw Reject{"Malformed", "'radius' must lie in (0, 1] m"};
    if (msg.contains("v_dir")) {
      const Vec3 d = read_vec<3>(msg, "v_dir");
      if (d.norm() < 1e-12) throw Reject{"Malformed", "'v_dir' must be non-zero"};
      o.v_dir = d.normalized();
    }
    sim_->add_obstacle(o);
    obstacle_ids_.push_back(next_obstacle_id_);
    applied = {{"id", next_obstacle_id_++}, {"center", arr(o.center)}, {"radius", o.radius}, {"v_dir", arr(o.v_dir)}};
  } else if (type == "remove_obstacle") {
    if (!msg.contains("id") || !msg.at("id").is_number_unsigned()) throw Reject{"Malformed", "'id' must be an id"};
    const auto id = msg.at("id").get<std::uint64_t>();
    const auto it = std::find(obstacle_ids_.begin(), obstacle_ids_.end(), id);
    if (it == obstacle_ids_.end()) throw Reject{"UnknownObstacle", "no obstacle with id " + std::to_string(id)};
    sim_->remove_obstacle(static_cast<std::size_t>(it - obstacle_ids_.begin()));
    obstacle_ids_.erase(it);
    applied = {{"id", id}};
  } else if (type == "set_goal") {
    const Vec3 g = read_vec<3>(msg, "goal");
    try {
      sim_->set_goal(g);
    } catch (const Error& e) {
      throw Reject{e.kind(), e.what()};
    }
    if (sim_->transform_revision() != sim_revision_seen_) {
      sim_revision_seen_ = sim_->transform_revision();
      ++demo_revision_;
    }
    applied = {{"goal", arr(sim_->transformed().alignment.goal)}};
  } else if (type == "pause") {
    paused_ = true;
  } else if (type == "resume") {
    paused_ = false;
  } else if (type == "reset") {
    const std::string id = read_string(msg, "scenario");
    static const std::regex safe("[A-Za-z0-9_.-]+");
    if (!std::regex_match(id, safe) || id.find("..") != std::string::npos) {
      throw Reject{"UnknownScenario", "invalid scenario id"};
    }
    const auto path = scenario_dir_ / (id + ".json");
    if (!std::filesystem::exists(path)) throw Reject{"UnknownScenario", "no scenario '" + id + "'"};
    ScenarioConfig cfg;
    try {
      cfg = load_scenario(path);
    } catch (const Error& e) {
      throw Reject{e.kind(), e.what()};
    }
    save_trace();
    load(std::move(cfg));
    applied = {{"scenario", id}};
  } else if (type == "set_param") {
    const std::string key = read_string(msg, "key");
    const double value = read_number(msg, "value");
    const auto& keys = Simulation::live_parameters();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw Reject{"UnknownKey", "'" + key + "' is not a live parameter"};
    }
    try {
      applied = {{"key", key}, {"value", sim_->set_parameter(key, value)}};
    } catch (const Error& e) {
      throw Reject{"InvalidValue", e.what()};
    }
  } else {
    throw Reject{"Malformed", "unknown message type '" + type + "'"};
  }
  ack["applied"] = std::move(applied);
  return ack;
}

void Session::advance(Clock::time_point now) {
  if (human_at_ && now - *human_at_ > std::chrono::duration<double>(opts_.staleness)) {
    human_ = HumanInput{};
    human_at_.reset();
  }
  if (paused_) return;
  const TraceRecord& r = sim_->step(human_);
  if (opts_.trace_dir) records_.push_back(r);
}

json Session::snapshot(bool with_demo) const {
  const TraceRecord& r = sim_->last();
  const auto& cfg = sim_->config();
  json s = {{"v", kProtocolVersion},
            {"type", "snapshot"},
            {"time", sim_->time()},
            {"step", sim_->step_count()},
            {"paused", paused_},
            {"scenario", cfg.name},
            {"pose", arr(r.pose)},
            {"vel", arr(r.vel)},
            {"x_dot_ref", arr(r.x_dot_ref)},
            {"theta_dot_ref", arr(r.theta_dot_ref)},
            {"w_ref", arr(r.w_ref)},
            {"w_s", arr(r.w_s)},
            {"w_est", arr(r.w_est)},
            {"w_contact", arr(r.w_contact)},
            {"alpha_h", r.alpha_h},
            {"beta", r.beta},
            {"tank",
             {{"psi", r.psi}, {"psi_lower", cfg.tank.psi_lower}, {"psi_upper", cfg.tank.psi_upper}}},
            {"flags", {{"gamma", r.gamma}, {"zeta", r.zeta}, {"phi", r.phi}}},
            {"i_min", r.i_min},
            {"guidance", r.guidance},
            {"passivity_residual", r.passivity_residual},
            {"goal", arr(sim_->transformed().alignment.goal)},
            {"demo_revision", demo_revision_}};
  json obs = json::array();
  for (std::size_t i = 0; i < sim_->obstacles().size(); ++i) {
    const auto& o = sim_->obstacles()[i];
    obs.push_back({{"id", obstacle_ids_[i]}, {"center", arr(o.center)}, {"radius", o.radius}, {"v_dir", arr(o.v_dir)}});
  }
  s["obstacles"] = std::move(obs);
  const auto& env = sim_->environment();
  s["button"] = {{"present", env.button.has_value()}, {"latched", env.button && env.button->latched}};
  if (with_demo) {
    json poly = json::array();
    const auto& p = sim_->transformed().positions;
    for (Eigen::Index i = 0; i < p.cols(); ++i) poly.push_back({p(0, i), p(1, i), p(2, i)});
    s["demo"] = {{"revision", demo_revision_}, {"polyline", std::move(poly)}};
  }
  return s;
}

void Session::save_trace() {
  if (!opts_.trace_dir || records_.empty()) return;
  std::filesystem::create_directories(*opts_.trace_dir);
  SimTrace t{sim_->meta(), records_};
  const auto name = sim_->config().name + "-" + std::to_string(saved_traces_++) + ".csv";
  write_trace(*opts_.trace_dir / name, t);
  records_.clear();
}

}  // namespace sac

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
#include "support.hpp"

#include <gtest/gtest.h>

namespace sac {
namespace {

using nlohmann::json;
using Clock = Session::Clock;

Session make_session(const std::string& name = "leaf_obstacle.json", SessionOptions opts = {}) {
  opts.scenario = testing::scenario_dir() / name;
  return Session(load_scenario(opts.scenario), opts);
}

json msg(const std::string& type, json extra = json::object()) {
  extra["v"] = kProtocolVersion;
  extra["type"] = type;
  return extra;
}

TEST(Session, ForceIsClampedAndAcked) {
  Session s = make_session();
  const json r = s.handle(msg("human_force", {{"frame", "tool"}, {"wrench", {500, 0, 0, 0, 0, 30}}, {"seq", 7}}),
                          Clock::now());
  EXPECT_EQ(r["type"], "ack");
  EXPECT_EQ(r["of"], "human_force");
  EXPECT_EQ(r["seq"], 7);
  EXPECT_DOUBLE_EQ(r["applied"]["wrench"][0].get<double>(), 100.0);
  EXPECT_DOUBLE_EQ(r["applied"]["wrench"][5].get<double>(), 10.0);
  EXPECT_DOUBLE_EQ(s.human().tool_wrench[0], 100.0);
  EXPECT_TRUE(s.human().body_wrench.isZero());
}

TEST(Session, ClampKeepsDirection) {
  const Vec6 w = clamp_wrench((Vec6() << 300, 400, 0, 0, 0, 0).finished(), 100.0, 10.0);
  EXPECT_NEAR(w[0], 60.0, 1e-12);
  EXPECT_NEAR(w[1], 80.0, 1e-12);
}

TEST(Session, StaleForceIsZeroed) {
  Session s = make_session();
  const auto t0 = Clock::now();
  s.handle(msg("human_force", {{"frame", "body"}, {"wrench", {5, 0, 0, 0, 0, 0}}}), t0);
  s.advance(t0 + std::chrono::milliseconds(200));
  EXPECT_DOUBLE_EQ(s.human().body_wrench[0], 5.0);
  s.advance(t0 + std::chrono::milliseconds(300));
  EXPECT_TRUE(s.human().body_wrench.isZero());
}

TEST(Session, PauseFreezesTime) {
  Session s = make_session();
  const auto now = Clock::now();
  s.advance(now);
  s.advance(now);
  const auto steps = s.simulation().step_count();
  s.handle(msg("pause"), now);
  for (int i = 0; i < 10; ++i) s.advance(now);
  EXPECT_EQ(s.simulation().step_count(), steps);
  EXPECT_TRUE(s.snapshot(false)["paused"].get<bool>());
  s.handle(msg("resume"), now);
  s.advance(now);
  EXPECT_EQ(s.simulation().step_count(), steps + 1);
}

TEST(Session, ParametersAreWhitelisted) {
  Session s = make_session();
  const auto now = Clock::now();
  json r = s.handle(msg("set_param", {{"key", "controller.K_bar"}, {"value", 1.0}}), now);
  EXPECT_EQ(r["type"], "error");
  EXPECT_EQ(r["code"], "UnknownKey");
  r = s.handle(msg("set_param", {{"key", "motion.v_th"}, {"value", -1.0}}), now);
  EXPECT_EQ(r["code"], "InvalidValue");
  r = s.handle(msg("set_param", {{"key", "motion.v_th"}, {"value", 0.1}}), now);
  EXPECT_EQ(r["type"], "ack");
  EXPECT_DOUBLE_EQ(s.simulation().config().motion.v_th, 0.1);
}

TEST(Session, ObstacleIdsAreStable) {
  Session s = make_session();
  const auto now = Clock::now();
  EXPECT_EQ(s.snapshot(false)["obstacles"].size(), 1u);
  const json a = s.handle(msg("place_obstacle", {{"center", {0.4, 0.1, 0.3}}, {"radius", 0.02}}), now);
  const json b = s.handle(msg("place_obstacle", {{"center", {0.4, -0.1, 0.3}}, {"radius", 0.02}}), now);
  const auto ida = a["applied"]["id"].get<std::uint64_t>();
  const auto idb = b["applied"]["id"].get<std::uint64_t>();
  EXPECT_NE(ida, idb);
  EXPECT_EQ(s.handle(msg("remove_obstacle", {{"id", ida}}), now)["type"], "ack");
  const json obs = s.snapshot(false)["obstacles"];
  ASSERT_EQ(obs.size(), 2u);
  EXPECT_EQ(obs[1]["id"], idb);
  EXPECT_EQ(s.handle(msg("remove_obstacle", {{"id", ida}}), now)["code"], "UnknownObstacle");
  EXPECT_EQ(s.handle(msg("place_obstacle", {{"center", {0, 0, 0}}, {"radius", 0.0}}), now)["code"], "Malformed");
}

TEST(Session, MalformedMessagesAreRejected) {
  Session s = make_session();
  const auto now = Clock::now();
  EXPECT_EQ(s.handle(std::string("{not json"), now)["code"], "Malformed");
  EXPECT_EQ(s.handle(json::array(), now)["code"], "Malformed");
  EXPECT_EQ(s.handle(json{{"type", "pause"}}, now)["code"], "Malformed");
  EXPECT_EQ(s.handle(json{{"v", 2}, {"type", "pause"}}, now)["code"], "Malformed");
  EXPECT_EQ(s.handle(msg("teleport"), now)["code"], "Malformed");
  EXPECT_EQ(s.handle(msg("human_force", {{"frame", "hand"}, {"wrench", {0, 0, 0, 0, 0, 0}}}), now)["code"],
            "Malformed");
  EXPECT_EQ(s.handle(msg("human_force", {{"frame", "tool"}, {"wrench", {0, 0, 0}}}), now)["code"], "Malformed");
  const json r = s.handle(msg("set_goal", {{"goal", {1, "x", 0}}, {"seq", "abc"}}), now);
  EXPECT_EQ(r["code"], "Malformed");
  EXPECT_EQ(r["seq"], "abc");
}

TEST(Session, GoalChangeBumpsDemoRevision) {
  Session s = make_session();
  const auto now = Clock::now();
  const auto rev = s.demo_revision();
  const json r = s.handle(msg("set_goal", {{"goal", {0.55, 0.05, 0.3}}}), now);
  EXPECT_EQ(r["type"], "ack");
  EXPECT_GT(s.demo_revision(), rev);
  const json snap = s.snapshot(true);
  EXPECT_EQ(snap["demo"]["revision"], s.demo_revision());
  const json last = snap["demo"]["polyline"].back();
  EXPECT_NEAR(last[0].get<double>(), 0.55, 1e-12);
  EXPECT_NEAR(last[1].get<double>(), 0.05, 1e-12);
}

TEST(Session, ResetLoadsSiblingScenario) {
  Session s = make_session();
  const auto now = Clock::now();
  for (int i = 0; i < 5; ++i) s.advance(now);
  EXPECT_EQ(s.handle(msg("reset", {{"scenario", "nope"}}), now)["code"], "UnknownScenario");
  EXPECT_EQ(s.handle(msg("reset", {{"scenario", "../scenarios/leaf"}}), now)["code"], "UnknownScenario");
  const auto rev = s.demo_revision();
  EXPECT_EQ(s.handle(msg("reset", {{"scenario", "press_force"}}), now)["type"], "ack");
  EXPECT_EQ(s.simulation().step_count(), 0);
  EXPECT_GT(s.demo_revision(), rev);
  EXPECT_TRUE(s.snapshot(false)["button"]["present"].get<bool>());
}

TEST(Session, SnapshotCarriesState) {
  Session s = make_session();
  s.advance(Clock::now());
  const json snap = s.snapshot(false);
  for (const char* k : {"time", "pose", "vel", "x_dot_ref", "w_ref", "alpha_h", "tank", "flags", "goal", "obstacles",
                        "button", "i_min", "guidance", "passivity_residual", "demo_revision"}) {
    EXPECT_TRUE(snap.contains(k)) << k;
  }
  EXPECT_FALSE(snap.contains("demo"));
  EXPECT_EQ(snap["v"], kProtocolVersion);
  EXPECT_EQ(snap["pose"].size(), 6u);
  EXPECT_EQ(snap["step"], 1);
}

TEST(Session, TraceIsWrittenOnSave) {
  SessionOptions opts;
  const auto dir = std::filesystem::temp_directory_path() / ("sac_session_" + std::to_string(::getpid()));
  opts.trace_dir = dir;
  Session s = make_session("leaf.json", opts);
  for (int i = 0; i < 20; ++i) s.advance(Clock::now());
  s.save_trace();
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) n += e.path().extension() == ".csv";
  EXPECT_EQ(n, 1u);
  std::filesystem::remove_all(dir);
}

TEST(Session, IdleSessionMatchesHeadlessRun) {
  SessionOptions opts;
  opts.scenario = testing::scenario_dir() / "authority_push.json";
  opts.trace_dir = std::filesystem::temp_directory_path() / "unused";
  ScenarioConfig cfg = load_scenario(opts.scenario);
  cfg.human.clear();
  cfg.sim.duration = 0.5;
  Session s(cfg, opts);
  const auto now = Clock::now();
  for (int i = 0; i < 500; ++i) s.advance(now);
  EXPECT_EQ(s.records(), run_scenario(cfg).records);
}

TEST(Session, ForceFrameShowsInSensors) {
  Session s = make_session("leaf.json");
  const auto now = Clock::now();
  s.handle(msg("human_force", {{"frame", "tool"}, {"wrench", {5, 0, 0, 0, 0, 0}}}), now);
  s.advance(now);
  json snap = s.snapshot(false);
  for (int k = 0; k < 6; ++k) {
    const double d = snap["w_s"][k].get<double>() - snap["w_contact"][k].get<double>();
    EXPECT_NEAR(d, k == 0 ? 5.0 : 0.0, 1e-12);
  }
  s.handle(msg("human_force", {{"frame", "body"}, {"wrench", {0, 5, 0, 0, 0, 0}}}), now);
  s.advance(now);
  snap = s.snapshot(false);
  EXPECT_NEAR(snap["w_est"][1].get<double>() - snap["w_s"][1].get<double>(), 5.0, 1e-12);
}

}  // namespace
}  // namespace sac

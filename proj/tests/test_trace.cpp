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

#include "sac/trace.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cmath>

namespace sac {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sac_test_" + name + "_" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

SimTrace short_trace(const std::string& scenario, double duration) {
  ScenarioConfig cfg = load_scenario(testing::scenario_dir() / scenario);
  cfg.sim.duration = duration;
  Simulation sim(cfg);
  SimTrace t;
  t.meta = sim.meta();
  while (!sim.finished()) t.records.push_back(sim.step());
  return t;
}

TEST(Trace, ColumnsMatchRowWidth) {
  EXPECT_EQ(trace_columns().size(), record_to_row(TraceRecord{}).size());
  EXPECT_EQ(trace_columns().front(), "time");
  EXPECT_EQ(trace_columns().back(), "passivity_residual");
}

TEST(Trace, RowRoundTrip) {
  const SimTrace t = short_trace("press_force.json", 0.3);
  for (const auto& r : t.records) ASSERT_EQ(row_to_record(record_to_row(r)), r);
}

TEST(Trace, CsvRoundTripIsExact) {
  const SimTrace t = short_trace("leaf_obstacle.json", 0.5);
  EXPECT_EQ(trace_from_csv(trace_to_csv(t.records)), t.records);
}

TEST(Trace, BinaryRoundTripIsExact) {
  const SimTrace t = short_trace("authority_push.json", 0.5);
  const std::string bytes = trace_to_binary(t.records);
  EXPECT_EQ(bytes.substr(0, 8), "SACTRACE");
  EXPECT_EQ(trace_from_binary(bytes), t.records);
}

TEST(Trace, BadInputsRejected) {
  EXPECT_THROW(trace_from_csv("a,b\n1,2\n"), MalformedFile);
  EXPECT_THROW(trace_from_binary("NOTATRACE......."), MalformedFile);
  const SimTrace t = short_trace("leaf.json", 0.01);
  std::string bytes = trace_to_binary(t.records);
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(trace_from_binary(bytes), MalformedFile);
}

TEST(Trace, MetaRoundTrip) {
  ScenarioConfig cfg = load_scenario(testing::scenario_dir() / "leaf_obstacle.json");
  const TraceMeta m = Simulation(cfg).meta();
  const TraceMeta back = meta_from_json(meta_to_json(m));
  EXPECT_EQ(back.scenario, m.scenario);
  EXPECT_EQ(back.dt, m.dt);
  EXPECT_EQ(back.goal, m.goal);
  ASSERT_EQ(back.obstacles.size(), 1u);
  EXPECT_EQ(back.obstacles[0].center, m.obstacles[0].center);
  EXPECT_EQ(back.tank.psi_lower, m.tank.psi_lower);
}

TEST(Trace, SummaryWithoutObstaclesIsNull) {
  const SimTrace t = short_trace("leaf.json", 0.1);
  const TraceSummary s = summarize(t.meta, t.records);
  EXPECT_TRUE(std::isnan(s.min_obstacle_distance));
  EXPECT_TRUE(nlohmann::json::parse(summary_to_json(s)).at("min_obstacle_distance").is_null());
  EXPECT_EQ(s.steps, 100u);
}

TEST(Trace, WriteReadReplayIdentity) {
  const fs::path dir = temp_dir("replay");
  const SimTrace t = short_trace("press_force.json", 1.0);
  for (const char* name : {"t.csv", "t.bin"}) {
    const fs::path out = dir / name;
    const TraceSummary s = write_trace(out, t);
    EXPECT_TRUE(fs::exists(meta_path(out)));
    EXPECT_TRUE(fs::exists(summary_path(out)));
    const SimTrace back = read_trace(out);
    EXPECT_EQ(back.records, t.records);
    EXPECT_EQ(summary_to_json(summarize(back.meta, back.records)), read_file(summary_path(out)));
    EXPECT_EQ(summary_to_json(s), read_file(summary_path(out)));
  }
  fs::remove_all(dir);
}

TEST(Trace, WriteToMissingDirectoryFails) {
  EXPECT_THROW(write_file("/nonexistent-dir/x/y.csv", "data"), IoError);
}

}  // namespace
}  // namespace sac

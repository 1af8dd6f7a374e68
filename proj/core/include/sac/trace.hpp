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

#pragma once

#include "sac/simulator.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sac {

/// Column names of the trace CSV, in order.
const std::vector<std::string>& trace_columns();

std::vector<double> record_to_row(const TraceRecord& r);
TraceRecord row_to_record(const std::vector<double>& row);

std::string trace_to_csv(const std::vector<TraceRecord>& records);
std::vector<TraceRecord> trace_from_csv(const std::string& text);

/// "SACTRACE", u32 version, u32 columns, u64 rows, then row-major doubles
/// in host byte order.
std::string trace_to_binary(const std::vector<TraceRecord>& records);
std::vector<TraceRecord> trace_from_binary(const std::string& bytes);

std::string meta_to_json(const TraceMeta& meta);
TraceMeta meta_from_json(const std::string& text);

struct TraceSummary {
  std::size_t steps = 0;
  double final_time = 0.0;
  double final_goal_error = 0.0;  // m
  /// Minimum centre distance and surface clearance over all obstacles;
  /// NaN without obstacles.
  double min_obstacle_distance = 0.0;
  double min_obstacle_clearance = 0.0;
  double max_passivity_residual = 0.0;  // W
  double max_ref_speed = 0.0;           // m/s
  double min_psi = 0.0;
  double max_psi = 0.0;
  double max_alpha = 0.0;
  double final_alpha = 0.0;
  bool button_latched = false;
  bool guidance_seen = false;
};

TraceSummary summarize(const TraceMeta& meta, const std::vector<TraceRecord>& records);
std::string summary_to_json(const TraceSummary& s);
/// Human-readable summary lines.
std::string summary_to_text(const TraceSummary& s);

/// Writes `<out>` (CSV, or binary when the extension is .bin) plus
/// `<out>.meta.json` and `<out>.summary.json`. Returns the summary.
TraceSummary write_trace(const std::filesystem::path& out, const SimTrace& trace);
/// Reads a trace written by write_trace, including its meta sidecar.
SimTrace read_trace(const std::filesystem::path& path);

std::filesystem::path meta_path(const std::filesystem::path& trace);
std::filesystem::path summary_path(const std::filesystem::path& trace);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& data);

}  // namespace sac

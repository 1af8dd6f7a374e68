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

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sac {
namespace {

constexpr char kMagic[8] = {'S', 'A', 'C', 'T', 'R', 'A', 'C', 'E'};
constexpr std::uint32_t kBinaryVersion = 1;

void add_block(std::vector<std::string>& cols, const std::string& prefix, const char* const* axes, int n) {
  for (int i = 0; i < n; ++i) cols.push_back(prefix + axes[i]);
}

template <class V>
void put(std::vector<double>& row, const V& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v[i]);
}

template <int N>
Eigen::Matrix<double, N, 1> take(const std::vector<double>& row, std::size_t& at) {
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = row[at++];
  return v;
}

void append_double(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

double parse_field(std::string_view f, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size()) {
    if (f == "nan" || f == "-nan") return std::numeric_limits<double>::quiet_NaN();
    if (f == "inf") return std::numeric_limits<double>::infinity();
    if (f == "-inf") return -std::numeric_limits<double>::infinity();
    throw MalformedFile("trace line " + std::to_string(line) + ": cannot parse '" + std::string(f) + "'");
  }
  return v;
}

nlohmann::json vec_json(const Vec3& v) { return nlohmann::json::array({v.x(), v.y(), v.z()}); }

Vec3 json_vec(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw MalformedFile("expected 3-vector in trace meta");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

// NaN does not survive JSON; absent values are written as null.
nlohmann::json num_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

}  // namespace

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols = [] {
    static const char* const pose[] = {"x", "y", "z", "rx", "ry", "rz"};
    static const char* const twist[] = {"vx", "vy", "vz", "wx", "wy", "wz"};
    static const char* const wrench[] = {"fx", "fy", "fz", "tx", "ty", "tz"};
    static const char* const xyz[] = {"x", "y", "z"};
    std::vector<std::string> c{"time"};
    add_block(c, "", pose, 6);
    add_block(c, "", twist, 6);
    add_block(c, "ref_", pose, 6);
    add_block(c, "xdot_ref_", xyz, 3);
    add_block(c, "thetadot_ref_", xyz, 3);
    add_block(c, "wref_", wrench, 6);
    add_block(c, "ws_", wrench, 6);
    add_block(c, "west_", wrench, 6);
    add_block(c, "wenv_", wrench, 6);
    add_block(c, "wcontact_", wrench, 6);
    add_block(c, "u_", wrench, 6);
    for (const char* s : {"alpha_h", "beta", "psi", "gamma", "zeta", "phi", "i_min", "guidance", "button_latched",
                          "passivity_residual"}) {
      c.emplace_back(s);
    }
    return c;
  }();
  return cols;
}

std::vector<double> record_to_row(const TraceRecord& r) {
  std::vector<double> row;
  row.reserve(trace_columns().size());
  row.push_back(r.time);
  put(row, r.pose);
  put(row, r.vel);
  put(row, r.pose_ref);
  put(row, r.x_dot_ref);
  put(row, r.theta_dot_ref);
  put(row, r.w_ref);
  put(row, r.w_s);
  put(row, r.w_est);
  put(row, r.w_env);
  put(row, r.w_contact);
  put(row, r.u);
  row.push_back(r.alpha_h);
  row.push_back(r.beta);
  row.push_back(r.psi);
  row.push_back(r.gamma ? 1.0 : 0.0);
  row.push_back(r.zeta ? 1.0 : 0.0);
  row.push_back(r.phi ? 1.0 : 0.0);
  row.push_back(static_cast<double>(r.i_min));
  row.push_back(r.guidance ? 1.0 : 0.0);
  row.push_back(r.button_latched ? 1.0 : 0.0);
  row.push_back(r.passivity_residual);
  return row;
}

TraceRecord row_to_record(const std::vector<double>& row) {
  if (row.size() != trace_columns().size()) throw MalformedFile("trace row has wrong arity");
  TraceRecord r;
  std::size_t at = 0;
  r.time = row[at++];
  r.pose = take<6>(row, at);
  r.vel = take<6>(row, at);
  r.pose_ref = take<6>(row, at);
  r.x_dot_ref = take<3>(row, at);
  r.theta_dot_ref = take<3>(row, at);
  r.w_ref = take<6>(row, at);
  r.w_s = take<6>(row, at);
  r.w_est = take<6>(row, at);
  r.w_env = take<6>(row, at);
  r.w_contact = take<6>(row, at);
  r.u = take<6>(row, at);
  r.alpha_h = row[at++];
  r.beta = row[at++];
  r.psi = row[at++];
  r.gamma = row[at++] != 0.0;
  r.zeta = row[at++] != 0.0;
  r.phi = row[at++] != 0.0;
  r.i_min = static_cast<Eigen::Index>(row[at++]);
  r.guidance = row[at++] != 0.0;
  r.button_latched = row[at++] != 0.0;
  r.passivity_residual = row[at++];
  return r;
}

std::string trace_to_csv(const std::vector<TraceRecord>& records) {
  const auto& cols = trace_columns();
  std::string out;
  out.reserve(records.size() * cols.size() * 12 + 1024);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    out += cols[c];
    out += c + 1 < cols.size() ? ',' : '\n';
  }
  for (const auto& r : records) {
    const auto row = record_to_row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      append_double(out, row[c]);
      out += c + 1 < row.size() ? ',' : '\n';
    }
  }
  return out;
}

std::vector<TraceRecord> trace_from_csv(const std::string& text) {
  const auto& cols = trace_columns();
  std::vector<TraceRecord> out;
  std::size_t pos = 0;
  std::size_t line = 0;
  std::vector<double> row;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view ln(text.data() + pos, end - pos);
    if (!ln.empty() && ln.back() == '\r') ln.remove_suffix(1);
    pos = end + 1;
    ++line;
    if (line == 1) {
      std::string expect;
      for (std::size_t c = 0; c < cols.size(); ++c) expect += (c ? "," : "") + cols[c];
      if (ln != expect) throw MalformedFile("trace header does not match");
      continue;
    }
    if (ln.empty()) continue;
    row.clear();
    std::size_t s = 0;
    while (true) {
      const std::size_t comma = ln.find(',', s);
      row.push_back(parse_field(ln.substr(s, comma == std::string_view::npos ? ln.npos : comma - s), line));
      if (comma == std::string_view::npos) break;
      s = comma + 1;
    }
    if (row.size() != cols.size()) throw MalformedFile("trace line " + std::to_string(line) + " has wrong arity");
    out.push_back(row_to_record(row));
  }
  if (line == 0) throw MalformedFile("empty trace");
  return out;
}

std::string trace_to_binary(const std::vector<TraceRecord>& records) {
  const std::uint32_t ncols = static_cast<std::uint32_t>(trace_columns().size());
  const std::uint64_t nrows = records.size();
  std::string out(sizeof(kMagic) + 2 * sizeof(std::uint32_t) + sizeof(std::uint64_t), '\0');
  char* p = out.data();
  std::memcpy(p, kMagic, sizeof(kMagic));
  p += sizeof(kMagic);
  std::memcpy(p, &kBinaryVersion, sizeof(kBinaryVersion));
  p += sizeof(kBinaryVersion);
  std::memcpy(p, &ncols, sizeof(ncols));
  p += sizeof(ncols);
  std::memcpy(p, &nrows, sizeof(nrows));
  out.reserve(out.size() + nrows * ncols * sizeof(double));
  for (const auto& r : records) {
    const auto row = record_to_row(r);
    out.append(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(double));
  }
  return out;
}

std::vector<TraceRecord> trace_from_binary(const std::string& bytes) {
  const std::size_t header = sizeof(kMagic) + 2 * sizeof(std::uint32_t) + sizeof(std::uint64_t);
  if (bytes.size() < header || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw MalformedFile("not a binary trace");
  }
  std::uint32_t version = 0;
  std::uint32_t ncols = 0;
  std::uint64_t nrows = 0;
  const char* p = bytes.data() + sizeof(kMagic);
  std::memcpy(&version, p, sizeof(version));
  std::memcpy(&ncols, p + 4, sizeof(ncols));
  std::memcpy(&nrows, p + 8, sizeof(nrows));
  if (version != kBinaryVersion) throw MalformedFile("unsupported binary trace version");
  if (ncols != trace_columns().size()) throw MalformedFile("binary trace column count mismatch");
  if (bytes.size() != header + nrows * ncols * sizeof(double)) throw MalformedFile("binary trace truncated");
  std::vector<TraceRecord> out;
  out.reserve(nrows);
  std::vector<double> row(ncols);
  p = bytes.data() + header;
  for (std::uint64_t i = 0; i < nrows; ++i) {
    std::memcpy(row.data(), p, ncols * sizeof(double));
    p += ncols * sizeof(double);
    out.push_back(row_to_record(row));
  }
  return out;
}

std::string meta_to_json(const TraceMeta& meta) {
  nlohmann::ordered_json j;
  j["scenario"] = meta.scenario;
  j["dt"] = meta.dt;
  j["goal"] = vec_json(meta.goal);
  j["obstacles"] = nlohmann::json::array();
  for (const auto& o : meta.obstacles) {
    j["obstacles"].push_back({{"center", vec_json(o.center)}, {"radius", o.radius}, {"v_dir", vec_json(o.v_dir)}});
  }
  j["tank"] = {{"psi_lower", meta.tank.psi_lower}, {"psi_upper", meta.tank.psi_upper}, {"s_floor", meta.tank.s_floor}};
  return j.dump(2) + "\n";
}

TraceMeta meta_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    TraceMeta m;
    m.scenario = j.at("scenario").get<std::string>();
    m.dt = j.at("dt").get<double>();
    m.goal = json_vec(j.at("goal"));
    for (const auto& o : j.at("obstacles")) {
      ObstacleSphere s;
      s.center = json_vec(o.at("center"));
      s.radius = o.at("radius").get<double>();
      s.v_dir = json_vec(o.at("v_dir"));
      m.obstacles.push_back(s);
    }
    const auto& t = j.at("tank");
    m.tank.psi_lower = t.at("psi_lower").get<double>();
    m.tank.psi_upper = t.at("psi_upper").get<double>();
    m.tank.s_floor = t.at("s_floor").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile(std::string("trace meta: ") + e.what());
  }
}

TraceSummary summarize(const TraceMeta& meta, const std::vector<TraceRecord>& records) {
  TraceSummary s;
  s.steps = records.size();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.min_obstacle_distance = meta.obstacles.empty() ? nan : std::numeric_limits<double>::infinity();
  s.min_obstacle_clearance = s.min_obstacle_distance;
  if (records.empty()) {
    s.final_goal_error = nan;
    s.min_psi = s.max_psi = nan;
    return s;
  }
  s.max_passivity_residual = -std::numeric_limits<double>::infinity();
  s.min_psi = std::numeric_limits<double>::infinity();
  s.max_psi = -std::numeric_limits<double>::infinity();
  for (const auto& r : records) {
    const Vec3 x = r.pose.head<3>();
    for (const auto& o : meta.obstacles) {
      const double d = (x - o.center).norm();
      s.min_obstacle_distance = std::min(s.min_obstacle_distance, d);
      s.min_obstacle_clearance = std::min(s.min_obstacle_clearance, d - o.radius);
    }
    s.max_passivity_residual = std::max(s.max_passivity_residual, r.passivity_residual);
    s.max_ref_speed = std::max(s.max_ref_speed, r.x_dot_ref.norm());
    s.min_psi = std::min(s.min_psi, r.psi);
    s.max_psi = std::max(s.max_psi, r.psi);
    s.max_alpha = std::max(s.max_alpha, r.alpha_h);
    s.button_latched = s.button_latched || r.button_latched;
    s.guidance_seen = s.guidance_seen || r.guidance;
  }
  const auto& last = records.back();
  s.final_time = last.time;
  s.final_goal_error = (Vec3(last.pose.head<3>()) - meta.goal).norm();
  s.final_alpha = last.alpha_h;
  return s;
}

std::string summary_to_json(const TraceSummary& s) {
  nlohmann::ordered_json j;
  j["steps"] = s.steps;
  j["final_time"] = s.final_time;
  j["final_goal_error"] = num_or_null(s.final_goal_error);
  j["min_obstacle_distance"] = num_or_null(s.min_obstacle_distance);
  j["min_obstacle_clearance"] = num_or_null(s.min_obstacle_clearance);
  j["max_passivity_residual"] = num_or_null(s.max_passivity_residual);
  j["max_ref_speed"] = s.max_ref_speed;
  j["min_psi"] = num_or_null(s.min_psi);
  j["max_psi"] = num_or_null(s.max_psi);
  j["max_alpha"] = s.max_alpha;
  j["final_alpha"] = s.final_alpha;
  j["button_latched"] = s.button_latched;
  j["guidance_seen"] = s.guidance_seen;
  return j.dump(2) + "\n";
}

std::string summary_to_text(const TraceSummary& s) {
  std::ostringstream o;
  o.precision(6);
  o << "steps                  " << s.steps << "\n";
  o << "final goal error [m]   " << s.final_goal_error << "\n";
  if (std::isnan(s.min_obstacle_distance)) {
    o << "min obstacle distance  n/a\n";
  } else {
    o << "min obstacle distance  " << s.min_obstacle_distance << " m (clearance " << s.min_obstacle_clearance
      << " m)\n";
  }
  o << "max passivity residual " << s.max_passivity_residual << " W\n";
  o << "tank energy [J]        " << s.min_psi << " .. " << s.max_psi << "\n";
  o << "max alpha_h            " << s.max_alpha << "\n";
  if (s.button_latched) o << "button                 latched\n";
  return o.str();
}

std::filesystem::path meta_path(const std::filesystem::path& trace) {
  return std::filesystem::path(trace.string() + ".meta.json");
}

std::filesystem::path summary_path(const std::filesystem::path& trace) {
  return std::filesystem::path(trace.string() + ".summary.json");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedFile("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

TraceSummary write_trace(const std::filesystem::path& out, const SimTrace& trace) {
  const bool binary = out.extension() == ".bin";
  write_file(out, binary ? trace_to_binary(trace.records) : trace_to_csv(trace.records));
  write_file(meta_path(out), meta_to_json(trace.meta));
  const TraceSummary s = summarize(trace.meta, trace.records);
  write_file(summary_path(out), summary_to_json(s));
  return s;
}

SimTrace read_trace(const std::filesystem::path& path) {
  SimTrace t;
  const std::string data = read_file(path);
  const bool binary = data.size() >= sizeof(kMagic) && std::memcmp(data.data(), kMagic, sizeof(kMagic)) == 0;
  t.records = binary ? trace_from_binary(data) : trace_from_csv(data);
  t.meta = meta_from_json(read_file(meta_path(path)));
  return t;
}

}  // namespace sac

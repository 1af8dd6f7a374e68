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

#include "sac/demo.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sac {
namespace {

const std::vector<std::string> kFullHeader = {
    "t",  "px", "py", "pz", "rx", "ry", "rz", "vx", "vy", "vz",
    "wx", "wy", "wz", "fx", "fy", "fz", "tx", "ty", "tz"};
const std::vector<std::string> kPlanarHeader = {"t", "px", "py", "vx", "vy"};
const std::vector<std::string> kPlanarPosHeader = {"t", "px", "py"};

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

double parse_double(const std::string& field, size_t row) {
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    // from_chars rejects "inf"/"nan" spellings that some writers emit.
    if (field == "nan" || field == "NaN" || field == "inf" || field == "-inf" ||
        field == "Inf" || field == "-Inf") {
      throw NonFinite("row " + std::to_string(row) + " contains '" + field + "'");
    }
    throw MalformedFile("row " + std::to_string(row) + ": cannot parse '" + field + "'");
  }
  return v;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MalformedFile("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Demonstration allocate(Eigen::Index t) {
  Demonstration d;
  d.positions = Channel3::Zero(3, t);
  d.eulers = Channel3::Zero(3, t);
  d.lin_vels = Channel3::Zero(3, t);
  d.ang_vels = Channel3::Zero(3, t);
  d.wrenches = Channel6::Zero(6, t);
  return d;
}

double dt_from_times(const std::vector<double>& t) {
  for (size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw MalformedFile("time column is not strictly increasing");
  }
  return (t.back() - t.front()) / static_cast<double>(t.size() - 1);
}

void central_differences(Demonstration& d) {
  const Eigen::Index n = d.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index lo = std::max<Eigen::Index>(i - 1, 0);
    Eigen::Index hi = std::min<Eigen::Index>(i + 1, n - 1);
    d.lin_vels.col(i) =
        (d.positions.col(hi) - d.positions.col(lo)) / (static_cast<double>(hi - lo) * d.sample_dt);
  }
}

bool all_finite(const Demonstration& d) {
  return d.positions.allFinite() && d.eulers.allFinite() && d.lin_vels.allFinite() &&
         d.ang_vels.allFinite() && d.wrenches.allFinite() && std::isfinite(d.sample_dt);
}

// Value of column `c` of the full 19-column layout at sample i.
template <class Demo>
auto& full_slot(Demo& d, size_t c, Eigen::Index i) {
  if (c >= 1 && c <= 3) return d.positions(c - 1, i);
  if (c >= 4 && c <= 6) return d.eulers(c - 4, i);
  if (c >= 7 && c <= 9) return d.lin_vels(c - 7, i);
  if (c >= 10 && c <= 12) return d.ang_vels(c - 10, i);
  return d.wrenches(c - 13, i);
}

}  // namespace

void Demonstration::validate() const {
  const Eigen::Index t = positions.cols();
  if (t < 2) throw MalformedFile("demonstration needs at least 2 samples, got " + std::to_string(t));
  if (eulers.cols() != t || lin_vels.cols() != t || ang_vels.cols() != t || wrenches.cols() != t) {
    throw LengthMismatch("channels disagree on sample count");
  }
  if (!all_finite(*this)) throw NonFinite("demonstration contains NaN or Inf");
  if (!(sample_dt > 0.0)) throw MalformedFile("sample_dt must be positive");
}

std::vector<Eigen::Index> implausible_steps(const Demonstration& demo) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 0; i + 1 < demo.size(); ++i) {
    double step = (demo.positions.col(i + 1) - demo.positions.col(i)).norm();
    double bound = std::max(demo.lin_vels.col(i).norm(), demo.lin_vels.col(i + 1).norm()) *
                   demo.sample_dt * 10.0;
    if (step > bound && step > 1e-12) out.push_back(i);
  }
  return out;
}

DemoFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  if (ext == ".json") return DemoFormat::kJson;
  if (ext == ".csv") return DemoFormat::kCsv;
  throw MalformedFile("unknown demonstration extension '" + ext + "'");
}

Demonstration parse_demonstration_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw MalformedFile("empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header;
  for (auto& h : split(line, ',')) header.push_back(trim(h));
  const bool full = header == kFullHeader;
  const bool planar = header == kPlanarHeader;
  const bool planar_pos = header == kPlanarPosHeader;
  if (!full && !planar && !planar_pos) throw MalformedFile("unrecognised header '" + line + "'");

  std::vector<std::vector<double>> rows;
  size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (fields.size() != header.size()) {
      throw MalformedFile("row " + std::to_string(row_no) + " has " + std::to_string(fields.size()) +
                          " fields, expected " + std::to_string(header.size()));
    }
    std::vector<double> values;
    values.reserve(fields.size());
    for (auto& f : fields) values.push_back(parse_double(trim(f), row_no));
    rows.push_back(std::move(values));
  }
  if (rows.size() < 2) throw MalformedFile("demonstration needs at least 2 samples");

  const auto t = static_cast<Eigen::Index>(rows.size());
  Demonstration d = allocate(t);
  std::vector<double> times;
  for (Eigen::Index i = 0; i < t; ++i) {
    const auto& r = rows[static_cast<size_t>(i)];
    for (double v : r) {
      if (!std::isfinite(v)) throw NonFinite("row " + std::to_string(i + 2) + " is not finite");
    }
    times.push_back(r[0]);
    if (full) {
      for (size_t c = 1; c < r.size(); ++c) full_slot(d, c, i) = r[c];
    } else {
      d.positions(0, i) = r[1];
      d.positions(1, i) = r[2];
      if (planar) {
        d.lin_vels(0, i) = r[3];
        d.lin_vels(1, i) = r[4];
      }
    }
  }
  d.sample_dt = dt_from_times(times);
  if (planar_pos) central_differences(d);
  d.validate();
  return d;
}

Demonstration parse_demonstration_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedFile(e.what());
  }
  if (!j.is_object() || !j.contains("sample_dt") || !j.contains("px")) {
    throw MalformedFile("JSON demonstration needs 'sample_dt' and channel arrays");
  }
  auto column = [&](const std::string& key) -> std::vector<double> {
    if (!j.contains(key)) return {};
    const auto& a = j.at(key);
    if (!a.is_array()) throw MalformedFile("'" + key + "' is not an array");
    std::vector<double> out;
    for (const auto& v : a) {
      if (v.is_null()) throw NonFinite("'" + key + "' contains null");
      if (!v.is_number()) throw MalformedFile("'" + key + "' contains a non-number");
      out.push_back(v.get<double>());
    }
    return out;
  };
  const auto t = static_cast<Eigen::Index>(column("px").size());
  if (t < 2) throw MalformedFile("demonstration needs at least 2 samples");
  Demonstration d = allocate(t);
  for (size_t c = 1; c < kFullHeader.size(); ++c) {
    auto values = column(kFullHeader[c]);
    if (values.empty()) continue;
    if (static_cast<Eigen::Index>(values.size()) != t) {
      throw LengthMismatch("'" + kFullHeader[c] + "' has " + std::to_string(values.size()) +
                           " samples, 'px' has " + std::to_string(t));
    }
    for (Eigen::Index i = 0; i < t; ++i) full_slot(d, c, i) = values[static_cast<size_t>(i)];
  }
  if (!j.at("sample_dt").is_number()) throw MalformedFile("'sample_dt' is not a number");
  d.sample_dt = j.at("sample_dt").get<double>();
  d.validate();
  return d;
}

Demonstration load_demonstration(const std::filesystem::path& path, DemoFormat format) {
  const std::string text = read_file(path);
  return format == DemoFormat::kCsv ? parse_demonstration_csv(text) : parse_demonstration_json(text);
}

Demonstration load_demonstration(const std::filesystem::path& path) {
  return load_demonstration(path, format_from_path(path));
}

std::string demonstration_to_csv(const Demonstration& demo) {
  std::string out;
  for (size_t c = 0; c < kFullHeader.size(); ++c) {
    out += kFullHeader[c];
    out += c + 1 < kFullHeader.size() ? ',' : '\n';
  }
  const Demonstration& d = demo;
  char buf[32];
  for (Eigen::Index i = 0; i < demo.size(); ++i) {
    for (size_t c = 0; c < kFullHeader.size(); ++c) {
      double v = c == 0 ? static_cast<double>(i) * demo.sample_dt : full_slot(d, c, i);
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out.append(buf, ptr);
      out += c + 1 < kFullHeader.size() ? ',' : '\n';
    }
  }
  return out;
}

std::string demonstration_to_json(const Demonstration& demo) {
  nlohmann::ordered_json j;
  j["sample_dt"] = demo.sample_dt;
  const Demonstration& d = demo;
  std::vector<double> t(static_cast<size_t>(demo.size()));
  for (Eigen::Index i = 0; i < demo.size(); ++i) t[static_cast<size_t>(i)] = static_cast<double>(i) * demo.sample_dt;
  j["t"] = t;
  for (size_t c = 1; c < kFullHeader.size(); ++c) {
    std::vector<double> col(static_cast<size_t>(demo.size()));
    for (Eigen::Index i = 0; i < demo.size(); ++i) col[static_cast<size_t>(i)] = full_slot(d, c, i);
    j[kFullHeader[c]] = std::move(col);
  }
  return j.dump() + "\n";
}

void save_demonstration(const Demonstration& demo, const std::filesystem::path& path,
                        DemoFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MalformedFile("cannot write " + path.string());
  out << (format == DemoFormat::kCsv ? demonstration_to_csv(demo) : demonstration_to_json(demo));
}

DemoSet load_demo_set(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw MissingDataset("no dataset directory " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".csv" || ext == ".json")) files.push_back(entry.path());
  }
  if (files.empty()) throw MissingDataset("no demonstrations in " + dir.string());
  std::sort(files.begin(), files.end());
  DemoSet set;
  set.label = dir.filename().string();
  for (const auto& f : files) set.demos.push_back(load_demonstration(f));
  return set;
}

Demonstration resample_arc_length(const Demonstration& demo, Eigen::Index n) {
  demo.validate();
  const Eigen::Index t = demo.size();
  std::vector<double> arc(static_cast<size_t>(t), 0.0);
  for (Eigen::Index i = 1; i < t; ++i) {
    arc[static_cast<size_t>(i)] =
        arc[static_cast<size_t>(i - 1)] + (demo.positions.col(i) - demo.positions.col(i - 1)).norm();
  }
  const double length = arc.back();
  if (length <= 0.0) {
    for (Eigen::Index i = 0; i < t; ++i) arc[static_cast<size_t>(i)] = static_cast<double>(i);
  }
  const double total = arc.back();

  Demonstration out = allocate(n);
  out.sample_dt = demo.sample_dt;
  size_t seg = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double target = n == 1 ? 0.0 : total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg + 2 < arc.size() && arc[seg + 1] < target) ++seg;
    const double span = arc[seg + 1] - arc[seg];
    double w = span > 0.0 ? (target - arc[seg]) / span : 0.0;
    w = std::clamp(w, 0.0, 1.0);
    if (k == n - 1) {
      seg = arc.size() - 2;
      w = 1.0;
    }
    const auto a = static_cast<Eigen::Index>(seg);
    auto lerp = [&](const auto& ch) { return ((1.0 - w) * ch.col(a) + w * ch.col(a + 1)).eval(); };
    out.positions.col(k) = lerp(demo.positions);
    out.eulers.col(k) = lerp(demo.eulers);
    out.lin_vels.col(k) = lerp(demo.lin_vels);
    out.ang_vels.col(k) = lerp(demo.ang_vels);
    out.wrenches.col(k) = lerp(demo.wrenches);
  }
  return out;
}

Demonstration mean_trajectory(const DemoSet& set) {
  if (set.demos.empty()) throw MalformedFile("demo set '" + set.label + "' is empty");
  Eigen::Index n = 0;
  for (const auto& d : set.demos) {
    d.validate();
    n = std::max(n, d.size());
  }
  Demonstration mean = allocate(n);
  // Sum in a fixed order over sorted copies so the result does not depend on
  // the order of `set.demos`.
  std::vector<Demonstration> resampled;
  resampled.reserve(set.demos.size());
  for (const auto& d : set.demos) resampled.push_back(resample_arc_length(d, n));
  std::sort(resampled.begin(), resampled.end(), [](const Demonstration& a, const Demonstration& b) {
    return std::lexicographical_compare(a.positions.data(), a.positions.data() + a.positions.size(),
                                        b.positions.data(), b.positions.data() + b.positions.size());
  });
  double dt_sum = 0.0;
  for (const auto& r : resampled) {
    dt_sum += r.sample_dt;
    mean.positions += r.positions;
    mean.eulers += r.eulers;
    mean.lin_vels += r.lin_vels;
    mean.ang_vels += r.ang_vels;
    mean.wrenches += r.wrenches;
  }
  const double k = 1.0 / static_cast<double>(set.demos.size());
  mean.positions *= k;
  mean.eulers *= k;
  mean.lin_vels *= k;
  mean.ang_vels *= k;
  mean.wrenches *= k;
  mean.sample_dt = dt_sum * k;
  return mean;
}

}  // namespace sac

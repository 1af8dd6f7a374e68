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

#include "sac/bench.hpp"

#include "sac/trace.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace sac {
namespace {

constexpr std::size_t kPathDecimation = 10;

void append(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

Vec3 nominal_start(const BenchParams& p, const Demonstration& mean) {
  return p.goal + p.scale * (mean.positions.col(0) - mean.positions.col(mean.size() - 1));
}

BenchRun evaluate(const BenchParams& p, const Demonstration& mean, const Channel3& ref, double diag,
                  std::size_t index, const Vec3& start) {
  BenchRun run;
  run.index = index;
  run.start = start;
  Simulation sim(bench_scenario(p, mean, start));
  const double contact = p.contact_fraction * diag;
  double dev_sum = 0.0;
  std::size_t dev_n = 0;
  bool reached = false;
  while (!sim.finished()) {
    const TraceRecord& r = sim.step();
    const Vec3 x = r.pose.head<3>();
    const double d = distance_to_polyline(ref, x);
    if (run.contact_step < 0 && d <= contact) run.contact_step = static_cast<std::ptrdiff_t>(sim.step_count() - 1);
    if (run.contact_step >= 0) {
      dev_sum += d;
      ++dev_n;
    }
    if (!reached && (x - p.goal).norm() <= p.goal_tolerance) {
      reached = true;
      run.steps = static_cast<std::size_t>(sim.step_count());
    }
    if (static_cast<std::size_t>(sim.step_count()) % kPathDecimation == 1) run.path.push_back(x);
  }
  run.final_error = (Vec3(sim.plant_state().pose.head<3>()) - p.goal).norm();
  run.goal_reached = run.final_error <= p.goal_tolerance;
  if (!reached) run.steps = static_cast<std::size_t>(sim.step_count());
  run.mean_deviation = dev_n ? dev_sum / static_cast<double>(dev_n) : std::numeric_limits<double>::quiet_NaN();
  return run;
}

}  // namespace

double distance_to_polyline(const Channel3& pts, const Vec3& x) {
  double best = std::numeric_limits<double>::infinity();
  if (pts.cols() == 1) return (pts.col(0) - x).norm();
  for (Eigen::Index i = 0; i + 1 < pts.cols(); ++i) {
    const Vec3 a = pts.col(i);
    const Vec3 ab = pts.col(i + 1) - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((x - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (a + t * ab - x).squaredNorm());
  }
  return std::sqrt(best);
}

ScenarioConfig bench_scenario(const BenchParams& p, const Demonstration& mean, const Vec3& start) {
  ScenarioConfig cfg;
  cfg.name = "bench-" + p.shape;
  cfg.demo_data = mean;
  cfg.start = nominal_start(p, mean);
  cfg.goal = p.goal;
  cfg.motion = p.motion;
  cfg.sim.dt = p.dt;
  cfg.sim.duration = p.duration;
  cfg.sim.seed = p.seed;
  cfg.sim.start_at_demo_start = false;
  cfg.sim.initial_pose << start, mean.eulers.col(0);
  return cfg;
}

BenchResult run_bench(const BenchParams& p) {
  const Demonstration mean = mean_trajectory(load_demo_set(p.dataset_dir / p.shape));
  BenchResult res;
  const TransformedDemo td = transform_demo(mean, compute_alignment(mean, nominal_start(p, mean), p.goal));
  res.reference = td.positions;
  const Vec3 lo = td.positions.rowwise().minCoeff();
  const Vec3 hi = td.positions.rowwise().maxCoeff();
  res.diagonal = (hi - lo).norm();

  // Starts are drawn up front so results do not depend on worker scheduling.
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> starts;
  const Vec3 x0 = td.positions.col(0);
  for (std::size_t i = 0; i < p.n_starts; ++i) {
    const double r = p.perturbation * res.diagonal * std::sqrt(unit(rng));
    const double a = 2.0 * M_PI * unit(rng);
    starts.push_back(x0 + r * Vec3(std::cos(a), std::sin(a), 0.0));
  }

  res.runs.resize(starts.size());
  unsigned workers = p.workers ? p.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(starts.size(), 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (std::size_t i = next++; i < starts.size(); i = next++) {
      try {
        res.runs[i] = evaluate(p, mean, res.reference, res.diagonal, i, starts[i]);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  if (p.grid >= 2) {
    const Vec3 margin = 0.2 * (hi - lo);
    const Vec3 a = lo - margin;
    const Vec3 b = hi + margin;
    for (std::size_t iy = 0; iy < p.grid; ++iy) {
      for (std::size_t ix = 0; ix < p.grid; ++ix) {
        const double fx = static_cast<double>(ix) / static_cast<double>(p.grid - 1);
        const double fy = static_cast<double>(iy) / static_cast<double>(p.grid - 1);
        const Vec3 x(a.x() + fx * (b.x() - a.x()), a.y() + fy * (b.y() - a.y()), p.goal.z());
        const ReferenceOutput o = generate(x, Vec3::Zero(), td, {}, 0.0, p.motion);
        res.streamlines.push_back({x, o.x_dot_ref});
      }
    }
  }
  return res;
}

void write_bench(const BenchResult& r, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::string m = "run,start_x,start_y,start_z,goal_reached,final_error,mean_deviation,contact_step,steps\n";
  std::string paths = "run,x,y,z\n";
  for (const auto& run : r.runs) {
    m += std::to_string(run.index);
    for (int k = 0; k < 3; ++k) {
      m += ',';
      append(m, run.start[k]);
    }
    m += run.goal_reached ? ",true," : ",false,";
    append(m, run.final_error);
    m += ',';
    if (std::isnan(run.mean_deviation)) m += "nan";
    else append(m, run.mean_deviation);
    m += ',' + std::to_string(run.contact_step) + ',' + std::to_string(run.steps) + '\n';
    for (const auto& x : run.path) {
      paths += std::to_string(run.index);
      for (int k = 0; k < 3; ++k) {
        paths += ',';
        append(paths, x[k]);
      }
      paths += '\n';
    }
  }
  std::string s = "x,y,z,vx,vy,vz\n";
  for (const auto& smp : r.streamlines) {
    for (int k = 0; k < 3; ++k) {
      append(s, smp.position[k]);
      s += ',';
    }
    for (int k = 0; k < 3; ++k) {
      append(s, smp.velocity[k]);
      s += k < 2 ? ',' : '\n';
    }
  }
  std::string ref = "x,y,z\n";
  for (Eigen::Index i = 0; i < r.reference.cols(); ++i) {
    for (int k = 0; k < 3; ++k) {
      append(ref, r.reference(k, i));
      ref += k < 2 ? ',' : '\n';
    }
  }
  write_file(out_dir / "metrics.csv", m);
  write_file(out_dir / "paths.csv", paths);
  write_file(out_dir / "streamlines.csv", s);
  write_file(out_dir / "reference.csv", ref);
}

}  // namespace sac

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

// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures.

#include "sac/bench.hpp"
#include "sac/kdtree.hpp"
#include "sac/trace.hpp"
#include "sac/transform.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace {

using namespace sac;
using sac::testing::shipped_scenarios;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, double limit_s, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& ex) {
    o = {false, std::string("exception: ") + ex.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0.0 && secs >= limit_s) {
    o.pass = false;
    o.detail += " (runtime over limit)";
  }
  if (!o.pass) ++failures;
  std::printf("%s  %d  %-22s %s  [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Run {
  ScenarioConfig cfg;
  SimTrace trace;
};

Run run_file(const std::filesystem::path& path) {
  Run r{load_scenario(path), {}};
  r.trace = run_scenario(r.cfg);
  return r;
}

std::vector<Run> run_all() {
  std::vector<Run> out;
  for (const auto& p : shipped_scenarios()) out.push_back(run_file(p));
  return out;
}

Outcome transform_exactness() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<Eigen::Index> len(2, 300);
  double worst_pos = 0.0;
  double worst_rot = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Demonstration d = sac::testing::random_demo(rng, len(rng));
    const Vec3 start(u(rng), u(rng), u(rng));
    Vec3 goal;
    do goal = Vec3(u(rng), u(rng), u(rng)); while ((goal - start).norm() < 0.05);
    const TransformedDemo td = transform_demo(d, compute_alignment(d, start, goal));
    worst_pos = std::max({worst_pos, (td.positions.col(0) - start).norm(),
                          (td.positions.col(td.size() - 1) - goal).norm()});
    const Mat3& r = td.alignment.rotation;
    worst_rot = std::max({worst_rot, (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff(),
                          std::abs(r.determinant() - 1.0)});
  }
  return {worst_pos <= 1e-9 && worst_rot <= 1e-9,
          fmt("endpoint err %.2e m, orthonormality err %.2e (tol 1e-9)", worst_pos, worst_rot)};
}

Outcome nearest_oracle() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_int_distribution<Eigen::Index> len(50, 2000);
  int mismatches = 0;
  int queries = 0;
  for (int t = 0; t < 10; ++t) {
    const Demonstration d = sac::testing::random_demo(rng, len(rng));
    const KdTree tree(d.positions);
    for (int q = 0; q < 1000; ++q, ++queries) {
      // Every fourth query sits exactly on a sample to exercise ties.
      Vec3 x(u(rng), u(rng), u(rng));
      if (q % 4 == 0) x = d.positions.col(static_cast<Eigen::Index>(rng() % d.size()));
      if (tree.nearest(x) != nearest_index_linear(d.positions, x)) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%d/%d mismatches", mismatches, queries)};
}

Outcome leaf_reproduction() {
  BenchParams p;
  p.dataset_dir = sac::testing::lasa_dir();
  p.grid = 0;
  const BenchResult r = run_bench(p);
  int reached = 0;
  double worst_err = 0.0;
  double worst_dev = 0.0;
  bool all_contact = true;
  for (const auto& run : r.runs) {
    reached += run.goal_reached;
    worst_err = std::max(worst_err, run.final_error);
    if (run.contact_step < 0) all_contact = false;
    else worst_dev = std::max(worst_dev, run.mean_deviation);
  }
  const double dev_frac = worst_dev / r.diagonal;
  const bool ok = r.runs.size() == 20 && reached == 20 && worst_err <= 0.005 && all_contact && dev_frac < 0.05;
  return {ok, fmt("%d/%zu reached, worst goal err %.2e m, worst mean deviation %.4f of diagonal", reached,
                  r.runs.size(), worst_err, dev_frac)};
}

Outcome velocity_bound(const std::vector<Run>& runs) {
  std::size_t violations = 0;
  double worst = 0.0;
  for (const auto& run : runs) {
    for (const auto& rec : run.trace.records) {
      const double v = rec.x_dot_ref.norm();
      worst = std::max(worst, v / run.cfg.motion.v_th);
      if (v > run.cfg.motion.v_th) ++violations;
    }
  }
  return {violations == 0, fmt("%zu violations, max |xdot_ref|/v_th %.6f over %zu scenarios", violations, worst,
                               runs.size())};
}

Outcome passivity(const std::vector<Run>& runs) {
  bool ok = true;
  std::ostringstream why;
  double worst_res = -std::numeric_limits<double>::infinity();
  for (const auto& run : runs) {
    const auto& recs = run.trace.records;
    const TankParams& tp = run.cfg.tank;
    const double floor = 0.5 * tp.s_floor * tp.s_floor;
    const double tol = passivity_tolerance(run.cfg.sim.dt);
    double max_inflow = 0.0;  // largest one-step increase starting at or below the ceiling
    double psi_prev = tp.psi_upper;
    double max_psi = 0.0;
    for (const auto& rec : recs) {
      worst_res = std::max(worst_res, rec.passivity_residual);
      if (rec.passivity_residual > tol) {
        ok = false;
        why << " " << run.cfg.name << ": residual " << rec.passivity_residual << " at t=" << rec.time << ";";
        break;
      }
      if (psi_prev <= tp.psi_upper) max_inflow = std::max(max_inflow, rec.psi - psi_prev);
      else if (rec.psi > psi_prev) {
        ok = false;
        why << " " << run.cfg.name << ": tank grew above ceiling at t=" << rec.time << ";";
      }
      if (rec.psi < floor) {
        ok = false;
        why << " " << run.cfg.name << ": psi below floor;";
      }
      max_psi = std::max(max_psi, rec.psi);
      psi_prev = rec.psi;
    }
    if (max_psi > tp.psi_upper + max_inflow) {
      ok = false;
      why << " " << run.cfg.name << ": psi " << max_psi << " beyond ceiling + one step;";
    }
  }

  // Depletion.
  const Run* dep = nullptr;
  for (const auto& run : runs) {
    if (run.cfg.name == "tank_depletion") dep = &run;
  }
  double min_psi = std::numeric_limits<double>::infinity();
  double t_zeta = -1.0;
  std::size_t zeta_off = 0;
  std::size_t u_mismatch = 0;
  if (dep == nullptr) {
    ok = false;
    why << " no tank_depletion scenario;";
  } else {
    for (const auto& rec : dep->trace.records) {
      min_psi = std::min(min_psi, rec.psi);
      if (!rec.zeta) {
        if (t_zeta < 0.0) t_zeta = rec.time;
        ++zeta_off;
        const Vec6 expect = rec.phi ? rec.w_ref : Vec6::Zero();
        if (rec.u != expect) ++u_mismatch;
      }
    }
    const double lower = dep->cfg.tank.psi_lower;
    if (!(min_psi <= lower) || zeta_off == 0 || u_mismatch != 0) {
      ok = false;
      why << " depletion: min psi " << min_psi << ", zeta=0 steps " << zeta_off << ", u mismatches " << u_mismatch
          << ";";
    }
  }
  std::string detail = fmt("max residual %.2e W; depletion min psi %.3f J, zeta=0 first at t=%.3f s (%zu steps)",
                           worst_res, min_psi, t_zeta, zeta_off);
  return {ok, detail + why.str()};
}

Outcome force_tracking() {
  const Run run = run_file(sac::testing::scenario_dir() / "press_force.json");
  const auto& recs = run.trace.records;
  const double target = 15.0;
  double t_contact = -1.0;
  for (const auto& rec : recs) {
    if (rec.w_contact[2] > 0.0) {
      t_contact = rec.time;
      break;
    }
  }
  if (t_contact < 0.0) return {false, "no contact"};
  double steady = 0.0;
  double peak = 0.0;
  for (const auto& rec : recs) {
    const double f = rec.w_contact.head<3>().norm();
    peak = std::max(peak, f - target);
    if (rec.time >= t_contact + 3.0) steady = std::max(steady, std::abs(f - target));
  }
  return {steady < 0.2 && peak < 2.0,
          fmt("contact at %.3f s; max |F-15| after +3 s %.4f N (tol 0.2); peak overshoot %.4f N (tol 2)", t_contact,
              steady, peak)};
}

Outcome authority_dynamics() {
  const Run run = run_file(sac::testing::scenario_dir() / "authority_push.json");
  double push_start = 0.0;
  double push_end = 0.0;
  for (const auto& seg : run.cfg.human) {
    if (seg.frame == ForceFrame::kBody) {
      push_start = seg.start;
      push_end = seg.end;
    }
  }
  double t_rise = -1.0;
  double t_decay = -1.0;
  bool in_range = true;
  double prev_t = 0.0;
  for (const auto& rec : run.trace.records) {
    // A record's alpha is the value used during (prev_t, rec.time].
    if (rec.alpha_h < 0.0 || rec.alpha_h > 1.0) in_range = false;
    if (t_rise < 0.0 && prev_t >= push_start && rec.alpha_h > 0.9) t_rise = prev_t - push_start;
    if (t_decay < 0.0 && prev_t >= push_end && rec.alpha_h < 0.1) t_decay = prev_t - push_end;
    prev_t = rec.time;
  }
  const Diag6& k_max = run.cfg.gains.k_max;
  const bool k_ends = variable_impedance(0.0, k_max).stiffness.diagonal() == k_max.diagonal() &&
                      variable_impedance(1.0, k_max).stiffness.diagonal() == Vec6::Zero();
  const bool ok = in_range && k_ends && t_rise >= 0.0 && t_rise <= 0.5 && t_decay >= 2.0 * t_rise;
  return {ok, fmt("rise to 0.9 in %.3f s (tol 0.5), decay to 0.1 in %.3f s (>= %.3f), alpha in [0,1]: %s, "
                  "K(0)=K_max and K(1)=0: %s",
                  t_rise, t_decay, 2.0 * t_rise, in_range ? "yes" : "no", k_ends ? "yes" : "no")};
}

Outcome obstacle_avoidance() {
  const Run run = run_file(sac::testing::scenario_dir() / "leaf_obstacle.json");
  const TraceSummary s = summarize(run.trace.meta, run.trace.records);
  std::size_t guidance_steps = 0;
  for (const auto& rec : run.trace.records) guidance_steps += rec.guidance;
  const bool ok = s.min_obstacle_clearance >= 0.0 && s.final_goal_error <= 0.005 && guidance_steps > 0;
  return {ok, fmt("min clearance %.4f m, final goal err %.4f m (tol 0.005), guidance steps %zu",
                  s.min_obstacle_clearance, s.final_goal_error, guidance_steps)};
}

Outcome determinism() {
  std::size_t n = 0;
  std::string differing;
  for (const auto& p : shipped_scenarios()) {
    const ScenarioConfig cfg = load_scenario(p);
    const std::string a = trace_to_binary(run_scenario(cfg).records);
    const std::string b = trace_to_binary(run_scenario(load_scenario(p)).records);
    if (a != b) differing += " " + cfg.name;
    ++n;
  }
  return {differing.empty(), fmt("%zu scenarios re-run, bit-identical traces%s", n,
                                 differing.empty() ? "" : (": differs for" + differing).c_str())};
}

}  // namespace

int main() {
  report(1, "transform exactness", 5.0, transform_exactness);
  report(2, "nearest-point oracle", 5.0, nearest_oracle);
  report(3, "LASA leaf reproduction", 60.0, leaf_reproduction);
  report(4, "velocity bound", 0.0, [] { return velocity_bound(run_all()); });
  report(5, "passivity", 60.0, [] { return passivity(run_all()); });
  report(6, "force tracking", 30.0, force_tracking);
  report(7, "authority dynamics", 30.0, authority_dynamics);
  report(8, "obstacle avoidance", 60.0, obstacle_avoidance);
  report(9, "determinism", 0.0, determinism);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

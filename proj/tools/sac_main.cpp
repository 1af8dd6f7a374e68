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

// sac: headless entry point.

#include "sac/bench.hpp"
#include "sac/demo.hpp"
#include "sac/session.hpp"
#include "sac/simulator.hpp"
#include "sac/trace.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::filesystem::path default_dataset_dir() {
  if (const char* env = std::getenv("SAC_DATASET_DIR"); env && *env) return env;
  return "data/lasa";
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> duration;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Override sim.seed");
  cmd->add_option("--dt", o.dt, "Override sim.dt [s]");
  cmd->add_option("--duration", o.duration, "Override sim.duration [s]");
}

void apply(const Overrides& o, sac::ScenarioConfig& cfg) {
  if (o.seed) cfg.sim.seed = *o.seed;
  if (o.dt) cfg.sim.dt = *o.dt;
  if (o.duration) cfg.sim.duration = *o.duration;
  cfg.validate();
}

int cmd_run(const std::string& config, const std::filesystem::path& out, const Overrides& o) {
  sac::ScenarioConfig cfg = sac::load_scenario(config);
  apply(o, cfg);
  const sac::SimTrace trace = sac::run_scenario(cfg);
  const sac::TraceSummary s = sac::write_trace(out, trace);
  std::cout << sac::summary_to_text(s);
  return kOk;
}

int cmd_bench(sac::BenchParams p, const std::filesystem::path& out, const Overrides& o) {
  if (o.seed) p.seed = *o.seed;
  if (o.dt) p.dt = *o.dt;
  if (o.duration) p.duration = *o.duration;
  if (!(p.dt >= 1e-4 && p.dt <= 1e-2)) throw sac::ConfigError("--dt must lie in [1e-4, 1e-2] s");
  if (!(p.duration > 0.0)) throw sac::ConfigError("--duration must be positive");
  const sac::BenchResult r = sac::run_bench(p);
  sac::write_bench(r, out);
  std::size_t reached = 0;
  double worst = 0.0;
  for (const auto& run : r.runs) {
    reached += run.goal_reached ? 1 : 0;
    if (!std::isnan(run.mean_deviation)) worst = std::max(worst, run.mean_deviation);
  }
  std::cout << "runs " << r.runs.size() << ", goal reached " << reached << ", diagonal " << r.diagonal
            << " m, worst mean deviation " << (r.diagonal > 0 ? worst / r.diagonal : 0.0) << " of diagonal\n";
  return kOk;
}

int cmd_convert(const std::filesystem::path& in, const std::filesystem::path& out) {
  const sac::Demonstration d = sac::load_demonstration(in);
  sac::save_demonstration(d, out, sac::format_from_path(out));
  return kOk;
}

int cmd_replay(const std::filesystem::path& trace_path) {
  const sac::SimTrace t = sac::read_trace(trace_path);
  const std::string summary = sac::summary_to_json(sac::summarize(t.meta, t.records));
  std::cout << summary;
  const auto original = sac::summary_path(trace_path);
  if (std::filesystem::exists(original)) {
    if (sac::read_file(original) != summary) {
      std::cerr << "summary differs from " << original.string() << "\n";
      return kRuntimeError;
    }
    std::cerr << "summary identical to " << original.string() << "\n";
  }
  return kOk;
}

int classify(const sac::Error& e) {
  static const char* const config_kinds[] = {"ConfigError",    "MalformedFile",   "LengthMismatch",
                                             "NonFinite",      "MissingDataset",  "DegenerateChord",
                                             "NonDiagonalKmax"};
  for (const char* k : config_kinds) {
    if (e.kind() == k) return kConfigError;
  }
  return kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shared-autonomy motion generation, control and simulation"};
  app.require_subcommand(1);

  Overrides over;

  std::string run_config;
  std::filesystem::path run_out = "trace.csv";
  auto* run = app.add_subcommand("run", "Run a scenario and write its trace");
  run->add_option("config", run_config, "Scenario JSON file")->required();
  run->add_option("-o,--out", run_out, "Trace output (.csv, or .bin for binary)");
  add_overrides(run, over);

  sac::BenchParams bp;
  bp.dataset_dir = default_dataset_dir();
  std::filesystem::path bench_out = "bench";
  auto* bench = app.add_subcommand("bench", "Closed-loop reproduction of a LASA shape from perturbed starts");
  bench->add_option("--dataset", bp.dataset_dir, "Converted LASA directory (default $SAC_DATASET_DIR or data/lasa)");
  bench->add_option("--shape", bp.shape, "Shape directory name")->capture_default_str();
  bench->add_option("--starts", bp.n_starts, "Number of perturbed starts")->capture_default_str();
  bench->add_option("--workers", bp.workers, "Parallel workers (0 = all cores)");
  bench->add_option("--grid", bp.grid, "Streamline grid points per axis")->capture_default_str();
  bench->add_option("-o,--out", bench_out, "Output directory")->capture_default_str();
  add_overrides(bench, over);

  std::filesystem::path conv_in;
  std::filesystem::path conv_out;
  auto* convert = app.add_subcommand("convert", "Convert a demonstration between CSV and JSON");
  convert->add_option("input", conv_in, "Input demonstration (.csv or .json)")->required();
  convert->add_option("output", conv_out, "Output demonstration (.csv or .json)")->required();

  std::filesystem::path replay_in;
  auto* replay = app.add_subcommand("replay", "Recompute the summary of a written trace");
  replay->add_option("trace", replay_in, "Trace file written by run")->required();

  sac::SessionOptions so;
  std::string pace = "real";
  unsigned short port = 8765;
  auto* serve = app.add_subcommand("serve", "Serve live sessions over websocket at /session/{id}");
  serve->add_option("--scenario", so.scenario, "Initial scenario JSON")->required();
  serve->add_option("--port", port, "TCP port")->capture_default_str();
  serve->add_option("--pace", pace, "real or max")->check(CLI::IsMember({"real", "max"}))->capture_default_str();
  serve->add_option("--trace-dir", so.trace_dir, "Write session traces here on reset/exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (*run) return cmd_run(run_config, run_out, over);
    if (*bench) return cmd_bench(bp, bench_out, over);
    if (*convert) return cmd_convert(conv_in, conv_out);
    if (*replay) return cmd_replay(replay_in);
    if (*serve) {
      so.real_time = pace == "real";
      return sac::serve(so, port);
    }
  } catch (const sac::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}

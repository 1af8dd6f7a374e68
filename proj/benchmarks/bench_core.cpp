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

#include "sac/kdtree.hpp"
#include "sac/motion.hpp"
#include "sac/simulator.hpp"
#include "sac/transform.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using sac::Vec3;

Eigen::Matrix<double, 3, Eigen::Dynamic> cloud(Eigen::Index n) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> step(0.0, 0.01);
  Eigen::Matrix<double, 3, Eigen::Dynamic> p(3, n);
  Vec3 x = Vec3::Zero();
  for (Eigen::Index i = 0; i < n; ++i) {
    x += Vec3(step(rng), step(rng), step(rng));
    p.col(i) = x;
  }
  return p;
}

std::vector<Vec3> queries(const Eigen::Matrix<double, 3, Eigen::Dynamic>& p) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<Eigen::Index> pick(0, p.cols() - 1);
  std::normal_distribution<double> jitter(0.0, 0.05);
  std::vector<Vec3> q(1024);
  for (auto& v : q) v = p.col(pick(rng)) + Vec3(jitter(rng), jitter(rng), jitter(rng));
  return q;
}

void BM_NearestKdTree(benchmark::State& state) {
  const auto p = cloud(state.range(0));
  const sac::KdTree tree(p);
  const auto q = queries(p);
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(tree.nearest(q[k++ & 1023]));
}
BENCHMARK(BM_NearestKdTree)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_NearestLinear(benchmark::State& state) {
  const auto p = cloud(state.range(0));
  const auto q = queries(p);
  std::size_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sac::nearest_index_linear(p, q[k++ & 1023]));
}
BENCHMARK(BM_NearestLinear)->Arg(1000)->Arg(10000)->Arg(100000);

sac::ScenarioConfig leaf_obstacle() {
  return sac::load_scenario(std::filesystem::path(SAC_SOURCE_DIR) / "scenarios" / "leaf_obstacle.json");
}

void BM_Generate(benchmark::State& state) {
  const sac::ScenarioConfig cfg = leaf_obstacle();
  const sac::Simulation sim(cfg);
  const sac::TransformedDemo& td = sim.transformed();
  const auto q = queries(td.positions);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sac::generate(q[k++ & 1023], Vec3::Zero(), td, cfg.obstacles, 0.2, cfg.motion));
  }
}
BENCHMARK(BM_Generate);

void BM_SimulationStep(benchmark::State& state) {
  sac::ScenarioConfig cfg = leaf_obstacle();
  cfg.sim.duration = 1e6;
  sac::Simulation sim(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(sim.step());
}
BENCHMARK(BM_SimulationStep);

}  // namespace

BENCHMARK_MAIN();

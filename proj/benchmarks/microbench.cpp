// Copyright 2026 The ValleyForge Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "valleyforge/dataio.hpp"
#include "valleyforge/metrics.hpp"
#include "valleyforge/network.hpp"
#include "valleyforge/rng.hpp"
#include "valleyforge/sev_eb.hpp"

using namespace valleyforge;

namespace {

NetConfig net_for(std::size_t d) {
  NetConfig c;
  c.input_len = d;
  c.seed = 1;
  return c;
}

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  Engine eng = make_engine(seed, {});
  std::vector<double> v(n);
  for (double& x : v) x = uniform(eng, -1, 1);
  return v;
}

void BM_Forward(benchmark::State& state) {
  const NetConfig cfg = net_for(static_cast<std::size_t>(state.range(0)));
  const NetParams p = init_params(cfg);
  const auto x = noise(cfg.input_len, 2);
  ForwardTrace tr;
  for (auto _ : state) benchmark::DoNotOptimize(forward(x, p, cfg, tr));
}
BENCHMARK(BM_Forward)->Arg(5)->Arg(20)->Arg(80);

void BM_ForwardBackward(benchmark::State& state) {
  const NetConfig cfg = net_for(static_cast<std::size_t>(state.range(0)));
  const NetParams p = init_params(cfg);
  const auto x = noise(cfg.input_len, 3);
  const std::vector<double> y(cfg.outputs, 1.0);
  ForwardTrace tr;
  for (auto _ : state) {
    forward(x, p, cfg, tr);
    benchmark::DoNotOptimize(backward(tr, y, p));
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(5)->Arg(20)->Arg(80);

// One position update on the sphere, population 30.
void BM_SevEbUpdate(benchmark::State& state) {
  const std::size_t dim = static_cast<std::size_t>(state.range(0));
  const SearchSpace space = bench_space("sphere", dim);
  Population pop = init_population(space, 30, 4);
  pop.fitness.resize(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) pop.fitness[i] = bench_fn("sphere", pop.positions.row(i));
  IterationState st;
  st.bounds = space;
  st.bst_fit = *std::min_element(pop.fitness.begin(), pop.fitness.end());
  st.wst_fit = *std::max_element(pop.fitness.begin(), pop.fitness.end());
  const auto best = std::min_element(pop.fitness.begin(), pop.fitness.end()) - pop.fitness.begin();
  const auto row = pop.positions.row(static_cast<std::size_t>(best));
  st.x_best.assign(row.begin(), row.end());
  st.f_best = st.bst_fit;
  SevEbConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(update_positions(pop, st, cfg));
}
BENCHMARK(BM_SevEbUpdate)->Arg(10)->Arg(100);

void BM_Auc(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const auto s = noise(n, 5);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = (s[i] + 0.3 * static_cast<double>(i % 3) > 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(auc(s, y));
  state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_Auc)->Range(256, 1 << 16)->Complexity(benchmark::oNLogN);

}  // namespace

BENCHMARK_MAIN();

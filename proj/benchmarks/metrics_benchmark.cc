// Copyright 2026 The Bubble Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <random>
#include <vector>

#include "benchmark/benchmark.h"
#include "bubble_audit/metrics.h"

namespace bubble_audit {
namespace {

std::vector<int> RandomStances(size_t n) {
  std::mt19937_64 rng(n);
  std::uniform_int_distribution<int> stance(-1, 1);
  std::vector<int> x(n);
  for (int& v : x) v = stance(rng);
  return x;
}

void BM_SerpMs(benchmark::State& state) {
  const std::vector<int> x = RandomStances(static_cast<size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(SerpMs(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SerpMs)->Arg(10)->Arg(20)->Arg(100);

void BM_NormalizedScore(benchmark::State& state) {
  const std::vector<int> x = RandomStances(static_cast<size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(NormalizedScore(x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NormalizedScore)->Arg(10)->Arg(20)->Arg(100);

}  // namespace
}  // namespace bubble_audit

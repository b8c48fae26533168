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
#include "bubble_audit/stats.h"

namespace bubble_audit {
namespace {

std::vector<double> Sample(size_t n, uint64_t seed, double shift) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(shift, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = d(rng);
  return x;
}

// Both samples of size range(0); at most 8 each takes the exact path.
void BM_MannWhitneyU(benchmark::State& state) {
  const size_t n = static_cast<size_t>(state.range(0));
  const std::vector<double> a = Sample(n, 1, 0.0);
  const std::vector<double> b = Sample(n, 2, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(MannWhitneyU(a, b));
}
BENCHMARK(BM_MannWhitneyU)->Arg(4)->Arg(8)->Arg(10)->Arg(100)->Arg(1000);

// Typical metric samples: values on a coarse grid with many ties.
void BM_MannWhitneyUTied(benchmark::State& state) {
  const size_t n = static_cast<size_t>(state.range(0));
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> level(-10, 10);
  std::vector<double> a(n), b(n);
  for (double& v : a) v = level(rng) / 10.0;
  for (double& v : b) v = level(rng) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(MannWhitneyU(a, b));
}
BENCHMARK(BM_MannWhitneyUTied)->Arg(20)->Arg(200);

void BM_NullCounts(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(MannWhitneyNullCounts(n, n));
}
BENCHMARK(BM_NullCounts)->Arg(4)->Arg(8);

}  // namespace
}  // namespace bubble_audit

// Copyright 2026 The SRPP Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <omp.h>

#include "benchmark/benchmark.h"
#include "srpp/caps.h"
#include "srpp/scenario.h"
#include "srpp/sensitivity.h"

namespace srpp {
namespace {

void BM_BuildProfile(benchmark::State& state) {
  const auto n = static_cast<size_t>(state.range(0));
  omp_set_num_threads(static_cast<int>(state.range(1)));
  const ScenarioDataset data = *GaussianShiftScenario(10, n, 64, 1.0, 1);
  const SliceProfile profile = *SampleSliceProfile(64, 128, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(BuildProfile(data, profile, {}));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildProfile)
    ->ArgsProduct({{1000, 2000, 4000, 8000}, {1, 4}})
    ->Unit(benchmark::kMillisecond);

void BM_BuildProfileSerial(benchmark::State& state) {
  const auto n = static_cast<size_t>(state.range(0));
  const ScenarioDataset data = *GaussianShiftScenario(10, n, 64, 1.0, 1);
  const SliceProfile profile = *SampleSliceProfile(64, 128, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::BuildProfileSerial(data, profile, {}));
  }
}
BENCHMARK(BM_BuildProfileSerial)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_FullOracle(benchmark::State& state) {
  const ScenarioDataset data =
      *GaussianShiftScenario(10, static_cast<size_t>(state.range(0)), 64, 1.0, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(FullSensitivityOracle(data));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FullOracle)->RangeMultiplier(2)->Range(16, 64)->Complexity();

void BM_McCapCounts(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  const auto sub = *SubsamplingSpec::Create(SubsamplingScheme::kWOR, 5000, 64);
  const PairedSampler sampler = TwoWorldSampler(5000, 20);
  for (auto _ : state) {
    benchmark::DoNotOptimize(McCapCounts(sampler, sub, 2000, 3));
  }
}
BENCHMARK(BM_McCapCounts)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_McCapCountsSerial(benchmark::State& state) {
  const auto sub = *SubsamplingSpec::Create(SubsamplingScheme::kWOR, 5000, 64);
  const PairedSampler sampler = TwoWorldSampler(5000, 20);
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::McCapCountsSerial(sampler, sub, 2000, 3));
  }
}
BENCHMARK(BM_McCapCountsSerial)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace srpp

BENCHMARK_MAIN();

// Copyright 2026 The Orifice Authors. All rights reserved.
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

#include <benchmark/benchmark.h>

#include "orifice/depthseg.hpp"
#include "orifice/synthgen.hpp"

namespace {

using namespace orifice;

synthgen::Scene make_scene(int size) {
  return synthgen::generate(
      synthgen::random_scene(size, size, 3, 7, synthgen::kDefaultNoiseSigma));
}

void BM_RunPipeline(benchmark::State& state) {
  const auto scene = make_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(depthseg::run_pipeline(scene.depth));
  }
  state.counters["fps"] = benchmark::Counter(static_cast<double>(state.iterations()),
                                             benchmark::Counter::kIsRate);
}
BENCHMARK(BM_RunPipeline)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const auto scene = make_scene(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(depthseg::kmeans2_depth(scene.depth));
  }
}
BENCHMARK(BM_KMeans)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_Smooth(benchmark::State& state) {
  const auto scene = make_scene(static_cast<int>(state.range(0)));
  const depthseg::PipelineConfig config;
  for (auto _ : state) {
    benchmark::DoNotOptimize(depthseg::smooth_depth(scene.depth, config));
  }
}
BENCHMARK(BM_Smooth)->Arg(128)->Unit(benchmark::kMicrosecond);

void BM_Watershed(benchmark::State& state) {
  const auto scene = make_scene(static_cast<int>(state.range(0)));
  const depthseg::PipelineConfig config;
  const auto mask = depthseg::kmeans2_depth(scene.depth).mask;
  const auto peaks = depthseg::detect_peaks(depthseg::smooth_depth(scene.depth, config), mask,
                                            config);
  const auto relief = depthseg::invert_depth(scene.depth);
  for (auto _ : state) {
    benchmark::DoNotOptimize(depthseg::compact_watershed(relief, peaks, config));
  }
}
BENCHMARK(BM_Watershed)->Arg(128)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

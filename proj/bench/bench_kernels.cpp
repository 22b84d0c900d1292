/*
 * Copyright 2026 The HierIDS Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Serial reference kernels against their OpenMP counterparts. Arguments are
// (records, features); thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "hierids/dataset.hpp"
#include "hierids/forest.hpp"

using namespace hierids;

namespace {

Dataset bench_data(std::size_t n, std::size_t m) {
  SynthSpec spec;
  spec.n_records = n;
  spec.n_features = m;
  spec.class_mix = iov_class_mix();
  for (int c = 0; c < 6; ++c) spec.informative.push_back({static_cast<std::size_t>(c), c, 0.9});
  return synth_generate(spec, 1);
}

ForestParams bench_params() {
  ForestParams p;
  p.num_trees = 32;
  p.seed = 1;
  return p;
}

void BM_FitSerial(benchmark::State& state) {
  const Dataset ds = bench_data(state.range(0), state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::fit_forest_serial(ds.records, ds.labels, 6, bench_params()));
  }
}

void BM_FitParallel(benchmark::State& state) {
  const Dataset ds = bench_data(state.range(0), state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_forest(ds.records, ds.labels, 6, bench_params()));
  }
}

void BM_PredictSerial(benchmark::State& state) {
  const Dataset ds = bench_data(state.range(0), state.range(1));
  const ForestModel model = fit_forest(ds.records, ds.labels, 6, bench_params());
  for (auto _ : state) benchmark::DoNotOptimize(reference::predict_proba_serial(model, ds.records));
}

void BM_PredictParallel(benchmark::State& state) {
  const Dataset ds = bench_data(state.range(0), state.range(1));
  const ForestModel model = fit_forest(ds.records, ds.labels, 6, bench_params());
  for (auto _ : state) benchmark::DoNotOptimize(predict_proba(model, ds.records));
}

void BM_ImportanceSerial(benchmark::State& state) {
  const Dataset ds = bench_data(state.range(0), state.range(1));
  const ForestModel model = fit_forest(ds.records, ds.labels, 6, bench_params());
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::permutation_importance_serial(model, ds.records, ds.labels, 2));
  }
}

void BM_ImportanceParallel(benchmark::State& state) {
  const Dataset ds = bench_data(state.range(0), state.range(1));
  const ForestModel model = fit_forest(ds.records, ds.labels, 6, bench_params());
  for (auto _ : state) {
    benchmark::DoNotOptimize(permutation_importance(model, ds.records, ds.labels, 2));
  }
}

}  // namespace

BENCHMARK(BM_FitSerial)->Args({2000, 40})->Args({10000, 152})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitParallel)->Args({2000, 40})->Args({10000, 152})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictSerial)->Args({2000, 40})->Args({10000, 152})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PredictParallel)->Args({2000, 40})->Args({10000, 152})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ImportanceSerial)->Args({2000, 40})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ImportanceParallel)->Args({2000, 40})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

// Copyright 2026 The Counterbot Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <algorithm>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "counterbot/balance.hpp"
#include "counterbot/eval.hpp"
#include "counterbot/gbdt.hpp"
#include "counterbot/sentiment.hpp"
#include "counterbot/textprep.hpp"

namespace {

using namespace counterbot;

const std::string kTweet =
    "@alice_north RT Honestly the BEST debate night!!! &amp; so proud of you :) https://t.co/abc123 #cdnpoli";

Dataset synthetic(std::size_t n, double positive_fraction, std::uint64_t seed) {
  auto registry = std::make_shared<const FeatureRegistry>(FeatureRegistry::default_registry());
  const auto tox = *registry->index_of(kTriggerAttribute);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.15);
  Dataset d(registry);
  std::vector<double> row(registry->size());
  for (std::size_t i = 0; i < n; ++i) {
    const int label = u(rng) < positive_fraction ? 1 : 0;
    for (auto& v : row) v = u(rng);
    row[tox] = std::clamp((label ? 0.7 : 0.3) + noise(rng), 0.0, 1.0);
    d.add(row, label);
  }
  return d;
}

void BM_Clean(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(clean(kTweet));
}
BENCHMARK(BM_Clean);

void BM_Sentiment(benchmark::State& state) {
  const auto& analyzer = SentimentAnalyzer::bundled();
  const auto text = clean(kTweet);
  for (auto _ : state) benchmark::DoNotOptimize(analyzer.score(text.value()));
}
BENCHMARK(BM_Sentiment);

void BM_GbdtTrain(benchmark::State& state) {
  const auto d = synthetic(static_cast<std::size_t>(state.range(0)), 0.3, 1);
  TrainParams p;
  p.num_trees = 50;
  for (auto _ : state) benchmark::DoNotOptimize(train_gbdt(d, p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GbdtTrain)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_GbdtPredict(benchmark::State& state) {
  const auto d = synthetic(2000, 0.3, 2);
  const auto model = train_gbdt(d, TrainParams{});
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_all(d));
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_GbdtPredict)->Unit(benchmark::kMillisecond);

void BM_Adasyn(benchmark::State& state) {
  const auto d = synthetic(static_cast<std::size_t>(state.range(0)), 0.1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(adasyn(d, BalancerConfig{}));
}
BENCHMARK(BM_Adasyn)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Auc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(n);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = u(rng) < 0.3;
    s[i] = u(rng) + 0.2 * y[i];
  }
  for (auto _ : state) benchmark::DoNotOptimize(auc(s, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Auc)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();

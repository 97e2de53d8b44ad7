//
// Copyright 2026 The trustml Authors
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
//

#include <benchmark/benchmark.h>

#include <vector>

#include "trustml/data_io.hpp"
#include "trustml/equity.hpp"
#include "trustml/fairness.hpp"
#include "trustml/fedsim.hpp"
#include "trustml/fuzzy.hpp"
#include "trustml/privacy.hpp"
#include "trustml/rng.hpp"
#include "trustml/triage.hpp"

namespace {

using namespace trustml;

static void BM_FairnessSummary(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SeededRng rng(1);
  fairness::LabeledOutcomes outcomes;
  outcomes.truths.emplace();
  for (std::size_t i = 0; i < n; ++i) {
    outcomes.predictions.push_back(rng.bernoulli(0.4));
    outcomes.truths->push_back(rng.bernoulli(0.5));
    outcomes.groups.push_back("g" + std::to_string(rng.index(4)));
  }
  // keep every group non-degenerate
  for (std::size_t g = 0; g < 4; ++g) {
    outcomes.predictions.insert(outcomes.predictions.end(), {1, 0});
    outcomes.truths->insert(outcomes.truths->end(), {1, 0});
    outcomes.groups.insert(outcomes.groups.end(),
                           {"g" + std::to_string(g), "g" + std::to_string(g)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fairness::fairness_summary(outcomes));
  }
}
BENCHMARK(BM_FairnessSummary)->Arg(1000)->Arg(100000);

static void BM_Sparsify(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  SeededRng rng(2);
  privacy::WeightVector w(n);
  for (double& v : w) v = rng.gaussian();
  for (auto _ : state) {
    benchmark::DoNotOptimize(privacy::sparsify(w, 0.975));
  }
}
BENCHMARK(BM_Sparsify)->Arg(10000)->Arg(1000000);

static void BM_ClipWeights(benchmark::State& state) {
  SeededRng rng(3);
  privacy::WeightVector w(static_cast<std::size_t>(state.range(0)));
  for (double& v : w) v = rng.gaussian();
  const privacy::ClipConfig cfg{1.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(privacy::clip_weights(w, cfg));
  }
}
BENCHMARK(BM_ClipWeights)->Arg(1000000);

static void BM_FederatedRound(benchmark::State& state) {
  fedsim::FederatedConfig config;
  config.num_clients = 4;
  config.rounds = 1;
  config.local_epochs = 5;
  config.samples_per_client = 500;
  config.num_features = 10;
  config.sparsity = 0.9;
  config.seed = 4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fedsim::run_federated(config, fedsim::AggregationMode::sparse));
  }
}
BENCHMARK(BM_FederatedRound);

static void BM_FuzzyRiskScore(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(fuzzy::risk_score(42, 145, 12.0, 88));
  }
}
BENCHMARK(BM_FuzzyRiskScore);

static void BM_TrainTriageTree(benchmark::State& state) {
  const auto [records, labels] =
      data_io::synth_dengue(5, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(triage::train_tree(records, labels, 4, 50, 0));
  }
}
BENCHMARK(BM_TrainTriageTree)->Arg(4700);

static void BM_TriagePredict(benchmark::State& state) {
  const triage::DecisionTree& tree = triage::reference_tree();
  const triage::TriageRecord record{8, triage::Gender::male,
                                    triage::AreaType::urban, "building",
                                    "Dhaka"};
  for (auto _ : state) {
    benchmark::DoNotOptimize(triage::predict_proba(tree, record));
  }
}
BENCHMARK(BM_TriagePredict);

static void BM_TrainFairRegressor(benchmark::State& state) {
  const auto [records, targets] = data_io::synth_pdna(87);
  const equity::DebiasConfig config = equity::reference_training_config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        equity::train_fair_regressor(records, targets, config));
  }
}
BENCHMARK(BM_TrainFairRegressor);

static void BM_MiaThresholdSweep(benchmark::State& state) {
  SeededRng rng(6);
  std::vector<double> members, nonmembers;
  for (int i = 0; i < 500; ++i) {
    members.push_back(rng.uniform());
    nonmembers.push_back(rng.uniform() + 0.2);
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        fedsim::mia_loss_threshold_attack(members, nonmembers));
  }
}
BENCHMARK(BM_MiaThresholdSweep);

}  // namespace

BENCHMARK_MAIN();

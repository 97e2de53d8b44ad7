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

#pragma once

#include <cstdint>
#include <vector>

#include "trustml/privacy.hpp"

namespace trustml::fedsim {

struct ClientDataset {
  std::vector<std::vector<double>> features;  // N x d
  std::vector<int> labels;                    // N, values in {0, 1}
  std::size_t client_id = 0;
};

struct FederatedConfig {
  std::size_t num_clients = 4;
  std::size_t rounds = 30;
  std::size_t local_epochs = 5;
  double learning_rate = 0.5;
  double sparsity = 0.0;  // used by sparse / sparse_dp modes
  privacy::PrivacyBudget budget = privacy::PrivacyBudget::noiseless();
  privacy::ClipConfig clip{10.0};
  std::uint64_t seed = 1;
  std::size_t samples_per_client = 500;
  std::size_t num_features = 10;
  double heterogeneity = 0.0;  // 0 = i.i.d. split, 1 = maximal label skew
};

enum class AggregationMode { dense, sparse, sparse_dp };

struct RoundMetrics {
  std::size_t round = 0;  // 1-based
  double macro_f1 = 0.0;
  std::uint64_t bytes_sent = 0;  // this round, summed over clients
  double global_weights_norm = 0.0;
};

struct FederatedRun {
  std::vector<RoundMetrics> history;
  privacy::WeightVector final_weights;
};

/// Seeded two-class Gaussian-blob problem split across clients. Client i
/// is skewed towards class (i mod 2) with majority share
/// 0.5 + 0.5*heterogeneity, so heterogeneity 0 is an i.i.d. split and 1
/// gives single-class clients. Deterministic per config.seed.
std::vector<ClientDataset> partition_synthetic(const FederatedConfig& config);

/// Held-out evaluation split from the same feature distribution with a
/// disjoint seed stream and globally balanced labels.
ClientDataset test_split(const FederatedConfig& config,
                         std::size_t n_samples = 1000);

/// Full-batch gradient descent on the mean logistic loss for `epochs`
/// steps; returns new_weights - model_weights. Weight layout is d feature
/// coefficients followed by the bias. Full-batch training is already
/// deterministic; the seed is reserved for stochastic variants.
privacy::WeightVector local_train(const privacy::WeightVector& model_weights,
                                  const ClientDataset& data,
                                  std::size_t epochs, double learning_rate,
                                  std::uint64_t seed);

/// Mean logistic loss of the model on a dataset.
double logistic_loss(const privacy::WeightVector& weights,
                     const ClientDataset& data);

/// Per-sample logistic losses, aligned with data rows.
std::vector<double> per_sample_losses(const privacy::WeightVector& weights,
                                      const ClientDataset& data);

std::vector<int> predict(const privacy::WeightVector& weights,
                         const std::vector<std::vector<double>>& features);

/// Unweighted mean of per-class F1 over classes {0, 1}. A class absent
/// from both predictions and truths contributes F1 = 1 (conventions
/// differ; this one avoids penalizing classes that cannot occur).
double macro_f1(const std::vector<int>& predictions,
                const std::vector<int>& truths);

// Round loop. Per round every client trains locally on the current
// global weights; sparse modes pass each update through
// sparsify/densify before aggregation; sparse_dp aggregates with the
// configured budget, the other modes with noise disabled. Updates are
// combined in client-index order, so the result is independent of any
// internal scheduling. bytes_sent uses value_plus_index accounting
// (4-byte values, 4-byte indices) at the mode's effective sparsity.
FederatedRun run_federated(const FederatedConfig& config,
                           AggregationMode mode);

/// Best balanced accuracy of a loss-threshold membership inference
/// attack over an exhaustive sweep of candidate thresholds (midpoints of
/// the pooled sorted losses, both rule orientations). Always >= 0.5.
double mia_loss_threshold_attack(const std::vector<double>& member_losses,
                                 const std::vector<double>& nonmember_losses);

/// Reference config for the dense-vs-sparse equivalence check:
/// 4 clients x 500 samples, d = 10, 30 rounds, sparsity 0.9.
FederatedConfig equivalence_reference_config(std::uint64_t seed);

/// Reference overfitting scenario for membership-inference experiments:
/// tiny clients (20 samples), 200 local epochs, d = 50, clip 1.0.
FederatedConfig overfit_reference_config(std::uint64_t seed);

}  // namespace trustml::fedsim

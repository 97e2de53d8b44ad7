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

#include "trustml/fedsim.hpp"

#include <algorithm>
#include <cmath>

#include "trustml/error.hpp"
#include "trustml/rng.hpp"

namespace trustml::fedsim {
namespace {

constexpr std::uint64_t kPartitionStream = 0xDA7A5E7;
constexpr std::uint64_t kTestStream = 0x7E575E7;
constexpr std::uint64_t kNoiseStream = 0xA66;
constexpr std::size_t kValueBytes = 4;
constexpr std::size_t kIndexBytes = 4;

// Class mean magnitude per coordinate; the two blobs sit 2.2 apart overall.
double mean_magnitude(std::size_t d) {
  return 1.1 / std::sqrt(static_cast<double>(d));
}

void check_config(const FederatedConfig& c) {
  if (c.num_clients < 1 || c.rounds < 1 || c.samples_per_client < 1 ||
      c.num_features < 1) {
    raise(ErrorCode::invalid_config, "counts must be >= 1");
  }
  if (!(c.learning_rate > 0.0)) {
    raise(ErrorCode::invalid_config, "learning_rate must be positive");
  }
  if (!(c.sparsity >= 0.0 && c.sparsity < 1.0)) {
    raise(ErrorCode::invalid_config, "sparsity must lie in [0, 1)");
  }
  if (!(c.heterogeneity >= 0.0 && c.heterogeneity <= 1.0)) {
    raise(ErrorCode::invalid_config, "heterogeneity must lie in [0, 1]");
  }
}

std::vector<double> sample_point(SeededRng& rng, std::size_t d, int label,
                                 double mu) {
  std::vector<double> x(d);
  const double center = label == 1 ? mu : -mu;
  for (std::size_t j = 0; j < d; ++j) x[j] = center + rng.gaussian();
  return x;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double raw_score(const privacy::WeightVector& w,
                 const std::vector<double>& x) {
  double z = w.back();  // bias
  for (std::size_t j = 0; j < x.size(); ++j) z += w[j] * x[j];
  return z;
}

void check_dims(const privacy::WeightVector& w, const ClientDataset& data) {
  if (data.features.empty() || data.features.size() != data.labels.size()) {
    raise(ErrorCode::invalid_input, "dataset rows and labels misaligned");
  }
  if (w.size() != data.features.front().size() + 1) {
    raise(ErrorCode::invalid_input,
          "weight length must be feature count + 1 (bias)");
  }
}

}  // namespace

std::vector<ClientDataset> partition_synthetic(const FederatedConfig& config) {
  check_config(config);
  SeededRng rng(mix_seed(config.seed, kPartitionStream));
  const double mu = mean_magnitude(config.num_features);
  const double p_major = 0.5 + 0.5 * config.heterogeneity;

  std::vector<ClientDataset> clients(config.num_clients);
  for (std::size_t i = 0; i < config.num_clients; ++i) {
    ClientDataset& c = clients[i];
    c.client_id = i;
    const int major = static_cast<int>(i % 2);
    c.features.reserve(config.samples_per_client);
    c.labels.reserve(config.samples_per_client);
    for (std::size_t s = 0; s < config.samples_per_client; ++s) {
      const int label = rng.bernoulli(p_major) ? major : 1 - major;
      c.labels.push_back(label);
      c.features.push_back(
          sample_point(rng, config.num_features, label, mu));
    }
  }
  return clients;
}

ClientDataset test_split(const FederatedConfig& config, std::size_t n_samples) {
  check_config(config);
  SeededRng rng(mix_seed(config.seed, kTestStream));
  const double mu = mean_magnitude(config.num_features);

  ClientDataset test;
  test.client_id = config.num_clients;  // outside the client id range
  for (std::size_t s = 0; s < n_samples; ++s) {
    const int label = rng.bernoulli(0.5) ? 1 : 0;
    test.labels.push_back(label);
    test.features.push_back(sample_point(rng, config.num_features, label, mu));
  }
  return test;
}

privacy::WeightVector local_train(const privacy::WeightVector& model_weights,
                                  const ClientDataset& data,
                                  std::size_t epochs, double learning_rate,
                                  std::uint64_t /*seed*/) {
  check_dims(model_weights, data);
  const std::size_t d = data.features.front().size();
  const auto n = static_cast<double>(data.features.size());

  privacy::WeightVector w = model_weights;
  std::vector<double> grad(d + 1);
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < data.features.size(); ++i) {
      const double err =
          sigmoid(raw_score(w, data.features[i])) - data.labels[i];
      for (std::size_t j = 0; j < d; ++j) grad[j] += err * data.features[i][j];
      grad[d] += err;
    }
    for (std::size_t j = 0; j <= d; ++j) {
      w[j] -= learning_rate * grad[j] / n;
    }
  }

  privacy::WeightVector update(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) update[j] = w[j] - model_weights[j];
  return update;
}

double logistic_loss(const privacy::WeightVector& weights,
                     const ClientDataset& data) {
  check_dims(weights, data);
  double total = 0.0;
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    const double z = raw_score(weights, data.features[i]);
    // max(z,0) - y*z + log(1+exp(-|z|)): stable at large |z|
    total += std::max(z, 0.0) - data.labels[i] * z +
             std::log1p(std::exp(-std::fabs(z)));
  }
  return total / static_cast<double>(data.features.size());
}

std::vector<double> per_sample_losses(const privacy::WeightVector& weights,
                                      const ClientDataset& data) {
  check_dims(weights, data);
  std::vector<double> losses;
  losses.reserve(data.features.size());
  for (std::size_t i = 0; i < data.features.size(); ++i) {
    const double z = raw_score(weights, data.features[i]);
    losses.push_back(std::max(z, 0.0) - data.labels[i] * z +
                     std::log1p(std::exp(-std::fabs(z))));
  }
  return losses;
}

std::vector<int> predict(const privacy::WeightVector& weights,
                         const std::vector<std::vector<double>>& features) {
  std::vector<int> preds;
  preds.reserve(features.size());
  for (const auto& x : features) {
    preds.push_back(raw_score(weights, x) >= 0.0 ? 1 : 0);
  }
  return preds;
}

double macro_f1(const std::vector<int>& predictions,
                const std::vector<int>& truths) {
  if (predictions.size() != truths.size() || predictions.empty()) {
    raise(ErrorCode::invalid_input,
          "predictions and truths must be non-empty and aligned");
  }
  double sum = 0.0;
  for (int cls = 0; cls <= 1; ++cls) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      const bool p = predictions[i] == cls;
      const bool t = truths[i] == cls;
      tp += p && t;
      fp += p && !t;
      fn += !p && t;
    }
    const std::size_t denom = 2 * tp + fp + fn;
    // class absent from predictions and truths alike: F1 = 1
    sum += denom == 0 ? 1.0
                      : 2.0 * static_cast<double>(tp) /
                            static_cast<double>(denom);
  }
  return sum / 2.0;
}

FederatedRun run_federated(const FederatedConfig& config,
                           AggregationMode mode) {
  check_config(config);
  const auto clients = partition_synthetic(config);
  const auto test = test_split(config);
  const std::size_t n = config.num_features + 1;

  const bool sparse_mode = mode != AggregationMode::dense;
  const double effective_sparsity = sparse_mode ? config.sparsity : 0.0;
  const std::uint64_t per_client_bytes =
      privacy::comm_cost(n, effective_sparsity, kValueBytes, kIndexBytes,
                         privacy::CommMode::value_plus_index)
          .sparse_bytes;

  FederatedRun run;
  run.final_weights.assign(n, 0.0);
  privacy::WeightVector& global = run.final_weights;

  for (std::size_t round = 1; round <= config.rounds; ++round) {
    std::vector<privacy::WeightVector> updates;
    updates.reserve(clients.size());
    for (const auto& client : clients) {
      privacy::WeightVector update = local_train(
          global, client, config.local_epochs, config.learning_rate,
          mix_seed(config.seed, round * 1024 + client.client_id));
      if (sparse_mode) {
        auto [sparse, rate] = privacy::sparsify(update, config.sparsity);
        update = privacy::densify(sparse);
      }
      updates.push_back(std::move(update));
    }

    const privacy::PrivacyBudget budget = mode == AggregationMode::sparse_dp
                                              ? config.budget
                                              : privacy::PrivacyBudget::noiseless();
    const privacy::WeightVector aggregated = privacy::dp_fedavg_aggregate(
        updates, config.clip, budget, mix_seed(config.seed, kNoiseStream + round));
    for (std::size_t j = 0; j < n; ++j) global[j] += aggregated[j];

    RoundMetrics metrics;
    metrics.round = round;
    metrics.bytes_sent =
        per_client_bytes * static_cast<std::uint64_t>(clients.size());
    metrics.macro_f1 = macro_f1(predict(global, test.features), test.labels);
    metrics.global_weights_norm = privacy::l2_norm(global);
    run.history.push_back(metrics);
  }
  return run;
}

double mia_loss_threshold_attack(const std::vector<double>& member_losses,
                                 const std::vector<double>& nonmember_losses) {
  if (member_losses.empty() || nonmember_losses.empty()) {
    raise(ErrorCode::invalid_input, "loss lists must be non-empty");
  }

  std::vector<double> pooled = member_losses;
  pooled.insert(pooled.end(), nonmember_losses.begin(), nonmember_losses.end());
  std::sort(pooled.begin(), pooled.end());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  const auto nm = static_cast<double>(member_losses.size());
  const auto nn = static_cast<double>(nonmember_losses.size());

  double best = 0.5;  // trivial attacker: predict everyone the same way
  for (std::size_t i = 0; i + 1 < pooled.size(); ++i) {
    const double threshold = 0.5 * (pooled[i] + pooled[i + 1]);
    double members_below = 0, nonmembers_below = 0;
    for (double l : member_losses) members_below += l < threshold;
    for (double l : nonmember_losses) nonmembers_below += l < threshold;
    // "member iff loss < t" and the inverted rule
    const double balanced =
        0.5 * (members_below / nm + (nn - nonmembers_below) / nn);
    best = std::max({best, balanced, 1.0 - balanced});
  }
  return best;
}

FederatedConfig equivalence_reference_config(std::uint64_t seed) {
  FederatedConfig config;
  config.num_clients = 4;
  config.rounds = 30;
  config.local_epochs = 5;
  config.learning_rate = 0.5;
  config.sparsity = 0.9;
  config.budget = privacy::PrivacyBudget::noiseless();
  config.clip = privacy::ClipConfig{10.0};
  config.samples_per_client = 500;
  config.num_features = 10;
  config.heterogeneity = 0.0;
  config.seed = seed;
  return config;
}

FederatedConfig overfit_reference_config(std::uint64_t seed) {
  FederatedConfig config;
  config.num_clients = 4;
  config.rounds = 5;
  config.local_epochs = 200;
  config.learning_rate = 0.5;
  config.sparsity = 0.0;
  config.budget = privacy::PrivacyBudget{1.0, 1e-5};
  config.clip = privacy::ClipConfig{1.0};
  config.samples_per_client = 20;
  config.num_features = 50;
  config.heterogeneity = 0.0;
  config.seed = seed;
  return config;
}

}  // namespace trustml::fedsim

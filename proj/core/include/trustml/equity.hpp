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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace trustml::equity {

enum class RegionType { haor, non_haor };
std::string to_string(RegionType r);  // "Haor" / "non-Haor"
RegionType region_from_string(const std::string& s);

struct UpazilaRecord {
  std::string name;
  std::string district;
  RegionType region_type = RegionType::non_haor;
  double poverty_rate = 0.0;          // fraction in [0, 1]
  double damage_usd_m = 0.0;          // millions USD, >= 0
  double affected_population = 0.0;   // head count
};

struct DebiasConfig {
  double lambda = 1.0;  // gradient-reversal strength; 0 disables the adversary
  std::size_t hidden_width = 8;
  std::size_t epochs = 400;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
};

struct EpochLosses {
  double mse = 0.0;
  double adversary_bce = 0.0;
};

// Two-head network over the three standardized numeric features
// (poverty rate, damage, affected population): a shared tanh encoder,
// a logistic predictor head producing the priority score in [0, 1], and
// a logistic adversary head predicting the region. Standardization
// statistics are captured at training time so any record set can be
// scored consistently. The reversal strength only shapes gradients, so
// it is not part of the model: identical weights give identical scores
// whatever lambda trained them.
struct FairModel {
  std::size_t input_dim = 3;
  std::size_t hidden_width = 8;
  std::vector<double> w1;  // hidden_width x input_dim, row-major
  std::vector<double> b1;  // hidden_width
  std::vector<double> w2;  // hidden_width (predictor head)
  double b2 = 0.0;
  std::vector<double> wa;  // hidden_width (adversary head)
  double ba = 0.0;
  std::array<double, 3> feature_mean = {0, 0, 0};
  std::array<double, 3> feature_std = {1, 1, 1};
  std::vector<EpochLosses> history;  // losses at the start of each epoch

  std::array<double, 3> standardize(const UpazilaRecord& r) const;
  double priority_score(const UpazilaRecord& r) const;
  /// Adversary's probability that the record is Haor.
  double adversary_prob(const UpazilaRecord& r) const;

  /// Text serialization with full-precision ("%.17g") weights.
  std::string serialize() const;
  static FairModel deserialize(const std::string& text);
  static FairModel load(const std::string& path);
};

/// Backward contract of the gradient reversal layer: -lambda * gradient.
/// The forward pass of the layer is the identity.
std::vector<double> grl_backward(const std::vector<double>& upstream_gradient,
                                 double lambda);

struct Gradients {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;
  std::vector<double> wa;
  double ba = 0.0;
};

struct Losses {
  double mse = 0.0;
  double adversary_bce = 0.0;
};

/// Losses of a model on raw records (standardized with the model's own
/// statistics). Pure; usable as a finite-difference oracle.
Losses compute_losses(const FairModel& model,
                      const std::vector<UpazilaRecord>& records,
                      const std::vector<double>& targets);

/// One full-batch manual-backpropagation pass. Predictor and encoder
/// gradients minimize the MSE; adversary-head gradients minimize its
/// BCE; the adversary's encoder contribution is routed through
/// grl_backward with the given lambda.
Gradients compute_gradients(const FairModel& model,
                            const std::vector<UpazilaRecord>& records,
                            const std::vector<double>& targets,
                            double lambda);

/// Joint full-batch gradient descent per DebiasConfig. Deterministic per
/// seed; lambda = 0 is the unregularized baseline. Raises
/// training_diverged (with the epoch index) if a loss goes non-finite.
FairModel train_fair_regressor(const std::vector<UpazilaRecord>& records,
                               const std::vector<double>& targets,
                               const DebiasConfig& config);

/// |mean score over Haor - mean score over non-Haor| (continuous-score
/// statistical parity difference).
double statistical_parity_difference(const std::vector<double>& scores,
                                     const std::vector<RegionType>& regions);

/// |mean absolute residual over Haor - mean absolute residual over
/// non-Haor|: a residual-equity reading of regional fairness.
double regional_fairness_gap(const std::vector<double>& scores,
                             const std::vector<double>& targets,
                             const std::vector<RegionType>& regions);

struct RankedUpazila {
  std::size_t rank = 0;  // 1-based
  std::string name;
  double priority = 0.0;
  RegionType region_type = RegionType::non_haor;
};

struct PriorityRanking {
  std::vector<RankedUpazila> entries;  // scores non-increasing with rank
};

/// Scores every record with the model and ranks by score descending,
/// ties broken alphabetically by name.
PriorityRanking generate_priority_ranking(
    const std::vector<UpazilaRecord>& records, const FairModel& model);

/// Text rendering ("Rank 1: Name (priority=0.9428, Haor region)");
/// verbose adds the region annotation, otherwise only the score shows.
std::string render_ranking(const PriorityRanking& ranking, bool verbose);

struct RankingShift {
  double changed_fraction = 0.0;
  // baseline rank - fair rank per upazila, sorted by name; positive
  // means the upazila moved up under the fair model.
  std::vector<std::pair<std::string, long>> rank_deltas;
};

/// Compares two rankings over the same upazila set.
RankingShift ranking_shift(const PriorityRanking& baseline,
                           const PriorityRanking& fair);

/// Training configuration of the bundled reference model
/// (see core/data/pdna_model.provenance.txt).
DebiasConfig reference_training_config();
const FairModel& reference_model();

}  // namespace trustml::equity

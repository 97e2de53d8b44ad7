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

#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace trustml::privacy {

/// Flat model update; all values must be finite.
using WeightVector = std::vector<double>;

/// Sparse form of a WeightVector: strictly increasing indices with their
/// values, plus the original dense length.
struct SparseUpdate {
  std::vector<std::size_t> indices;
  std::vector<double> values;
  std::size_t original_len = 0;
};

/// (epsilon, delta) privacy budget. epsilon == +infinity disables noise
/// entirely (testing mode).
struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-5;

  static PrivacyBudget noiseless() {
    return {std::numeric_limits<double>::infinity(), 1e-5};
  }
  bool is_infinite() const {
    return epsilon == std::numeric_limits<double>::infinity();
  }
};

struct ClipConfig {
  double clip_norm = 1.0;  // C > 0
};

double l2_norm(const WeightVector& w);

/// Rescales w onto the L2 ball of radius C when it lies outside; inside
/// the ball the input is returned unchanged. Idempotent.
WeightVector clip_weights(const WeightVector& w, const ClipConfig& cfg);

/// Classic Gaussian-mechanism calibration sigma = C*sqrt(2*ln(1.25/delta))/eps
/// for sensitivity C. Returns 0 for an infinite budget. Warns on stderr
/// when epsilon > 1, where the classic bound weakens (no error).
double gaussian_sigma(double clip_norm, const PrivacyBudget& budget);

/// Adds i.i.d. zero-mean Gaussian noise with gaussian_sigma(C, budget)
/// per coordinate. The caller is responsible for clipping w to C first.
/// Deterministic for a fixed seed; an infinite budget returns w exactly.
WeightVector add_gaussian_noise(const WeightVector& w,
                                const PrivacyBudget& budget,
                                const ClipConfig& cfg, std::uint64_t seed);

/// k = max(1, ceil((1 - sparsity) * n)): entries kept by sparsify.
std::size_t kept_count(std::size_t n, double sparsity);

/// Keeps the k largest-magnitude entries (ties to the lower index) and
/// returns the sparse update plus the achieved zeroed fraction 1 - k/n.
std::pair<SparseUpdate, double> sparsify(const WeightVector& w,
                                         double sparsity);

/// Expands a SparseUpdate back to a dense vector of original_len.
WeightVector densify(const SparseUpdate& update);

/// DP-FedAvg: clips every client update to C, averages in input order,
/// then adds Gaussian noise calibrated for sensitivity C/m (m clients).
/// With an infinite budget this is exactly the clipped mean.
WeightVector dp_fedavg_aggregate(const std::vector<WeightVector>& client_updates,
                                 const ClipConfig& cfg,
                                 const PrivacyBudget& budget,
                                 std::uint64_t seed);

enum class CommMode {
  value_only,       // transmit values only (positions implicit)
  value_plus_index  // transmit (index, value) pairs
};

struct CommCost {
  std::uint64_t dense_bytes = 0;
  std::uint64_t sparse_bytes = 0;
  double reduction_fraction = 0.0;  // 1 - sparse/dense; negative if larger
};

/// Communication accounting for an n-entry update at the given sparsity.
CommCost comm_cost(std::size_t n, double sparsity, std::size_t value_bytes,
                   std::size_t index_bytes, CommMode mode);

}  // namespace trustml::privacy

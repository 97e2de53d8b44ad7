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

#include "trustml/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "trustml/error.hpp"
#include "trustml/rng.hpp"

namespace trustml::privacy {
namespace {

void check_finite(const WeightVector& w, const char* what) {
  if (w.empty()) {
    raise(ErrorCode::invalid_input, std::string(what) + " is empty");
  }
  for (double v : w) {
    if (!std::isfinite(v)) {
      raise(ErrorCode::invalid_input,
            std::string(what) + " contains a non-finite value");
    }
  }
}

void check_clip(const ClipConfig& cfg) {
  if (!(cfg.clip_norm > 0.0) || !std::isfinite(cfg.clip_norm)) {
    raise(ErrorCode::invalid_config, "clip_norm must be positive and finite");
  }
}

void check_budget(const PrivacyBudget& budget) {
  if (budget.is_infinite()) return;
  if (!(budget.epsilon > 0.0)) {
    raise(ErrorCode::invalid_config, "epsilon must be positive");
  }
  if (!(budget.delta > 0.0 && budget.delta < 1.0)) {
    raise(ErrorCode::invalid_config, "delta must lie in (0, 1)");
  }
}

void check_sparsity(double sparsity) {
  if (!(sparsity >= 0.0 && sparsity < 1.0)) {
    raise(ErrorCode::invalid_config, "sparsity must lie in [0, 1)");
  }
}

}  // namespace

double l2_norm(const WeightVector& w) {
  // long double accumulation keeps the idempotence margin comfortably
  // below the clip tolerance even for million-entry vectors
  long double sum = 0.0L;
  for (double v : w) sum += static_cast<long double>(v) * v;
  return static_cast<double>(std::sqrt(sum));
}

WeightVector clip_weights(const WeightVector& w, const ClipConfig& cfg) {
  check_finite(w, "weights");
  check_clip(cfg);
  const double norm = l2_norm(w);
  // relative margin makes clip(clip(w)) == clip(w) exactly
  if (norm <= cfg.clip_norm * (1.0 + 1e-12)) return w;
  const double scale = cfg.clip_norm / norm;
  WeightVector out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] * scale;
  return out;
}

double gaussian_sigma(double clip_norm, const PrivacyBudget& budget) {
  if (!(clip_norm > 0.0) || !std::isfinite(clip_norm)) {
    raise(ErrorCode::invalid_config, "sensitivity must be positive and finite");
  }
  check_budget(budget);
  if (budget.is_infinite()) return 0.0;
  if (budget.epsilon > 1.0) {
    std::fprintf(stderr,
                 "trustml: warning: epsilon=%g > 1 weakens the classic "
                 "Gaussian mechanism bound\n",
                 budget.epsilon);
  }
  return clip_norm * std::sqrt(2.0 * std::log(1.25 / budget.delta)) /
         budget.epsilon;
}

WeightVector add_gaussian_noise(const WeightVector& w,
                                const PrivacyBudget& budget,
                                const ClipConfig& cfg, std::uint64_t seed) {
  check_finite(w, "weights");
  check_clip(cfg);
  check_budget(budget);
  if (budget.is_infinite()) return w;
  const double sigma = gaussian_sigma(cfg.clip_norm, budget);
  SeededRng rng(seed);
  WeightVector out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i] = w[i] + sigma * rng.gaussian();
  }
  return out;
}

std::size_t kept_count(std::size_t n, double sparsity) {
  check_sparsity(sparsity);
  // the 1e-9 nudge absorbs binary representation error in (1-s)*n so a
  // nominally integral product never rounds up an extra entry
  const double raw =
      std::ceil((1.0 - sparsity) * static_cast<double>(n) - 1e-9);
  auto k = static_cast<std::size_t>(raw < 1.0 ? 1.0 : raw);
  return std::min(std::max<std::size_t>(k, 1), n);
}

std::pair<SparseUpdate, double> sparsify(const WeightVector& w,
                                         double sparsity) {
  check_sparsity(sparsity);
  check_finite(w, "weights");
  const std::size_t n = w.size();
  const std::size_t k = kept_count(n, sparsity);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ma = std::fabs(w[a]);
    const double mb = std::fabs(w[b]);
    if (ma != mb) return ma > mb;
    return a < b;  // ties keep the lower index
  });
  order.resize(k);
  std::sort(order.begin(), order.end());

  SparseUpdate update;
  update.original_len = n;
  update.indices = std::move(order);
  update.values.reserve(k);
  for (std::size_t idx : update.indices) update.values.push_back(w[idx]);

  const double achieved =
      static_cast<double>(n - k) / static_cast<double>(n);
  return {std::move(update), achieved};
}

WeightVector densify(const SparseUpdate& update) {
  if (update.original_len == 0 || update.indices.empty() ||
      update.indices.size() != update.values.size()) {
    raise(ErrorCode::corrupt_update, "malformed sparse update");
  }
  for (std::size_t i = 0; i < update.indices.size(); ++i) {
    if (update.indices[i] >= update.original_len) {
      raise(ErrorCode::corrupt_update,
            "sparse index " + std::to_string(update.indices[i]) +
                " out of range for length " +
                std::to_string(update.original_len));
    }
    if (i > 0 && update.indices[i] <= update.indices[i - 1]) {
      raise(ErrorCode::corrupt_update, "sparse indices not strictly increasing");
    }
  }
  WeightVector out(update.original_len, 0.0);
  for (std::size_t i = 0; i < update.indices.size(); ++i) {
    out[update.indices[i]] = update.values[i];
  }
  return out;
}

WeightVector dp_fedavg_aggregate(const std::vector<WeightVector>& client_updates,
                                 const ClipConfig& cfg,
                                 const PrivacyBudget& budget,
                                 std::uint64_t seed) {
  if (client_updates.empty()) {
    raise(ErrorCode::invalid_input, "no client updates");
  }
  check_clip(cfg);
  check_budget(budget);
  const std::size_t n = client_updates.front().size();
  for (const auto& u : client_updates) {
    if (u.size() != n) {
      raise(ErrorCode::invalid_input, "client updates differ in length");
    }
  }

  const auto m = static_cast<double>(client_updates.size());
  WeightVector mean(n, 0.0);
  for (const auto& u : client_updates) {  // fixed input order
    const WeightVector clipped = clip_weights(u, cfg);
    for (std::size_t i = 0; i < n; ++i) mean[i] += clipped[i];
  }
  for (std::size_t i = 0; i < n; ++i) mean[i] /= m;

  if (budget.is_infinite()) return mean;
  // mean of m C-bounded vectors has sensitivity C/m
  return add_gaussian_noise(mean, budget, ClipConfig{cfg.clip_norm / m}, seed);
}

CommCost comm_cost(std::size_t n, double sparsity, std::size_t value_bytes,
                   std::size_t index_bytes, CommMode mode) {
  if (n < 1) raise(ErrorCode::invalid_input, "n must be >= 1");
  const std::size_t k = kept_count(n, sparsity);

  CommCost cost;
  cost.dense_bytes = static_cast<std::uint64_t>(n) * value_bytes;
  const std::uint64_t per_entry =
      mode == CommMode::value_only
          ? static_cast<std::uint64_t>(value_bytes)
          : static_cast<std::uint64_t>(value_bytes) + index_bytes;
  cost.sparse_bytes = static_cast<std::uint64_t>(k) * per_entry;
  // single rounding keeps nominal fractions like 0.975 exact
  cost.reduction_fraction =
      (static_cast<double>(cost.dense_bytes) -
       static_cast<double>(cost.sparse_bytes)) /
      static_cast<double>(cost.dense_bytes);
  return cost;
}

}  // namespace trustml::privacy

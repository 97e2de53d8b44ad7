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

#include "trustml/fairness.hpp"

#include <algorithm>
#include <limits>

#include "trustml/error.hpp"

namespace trustml::fairness {
namespace {

struct GroupStats {
  std::size_t n = 0;
  std::size_t positive_preds = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t positive_truths = 0;
  std::size_t negative_truths = 0;
};

void check_binary(const std::vector<int>& values, const char* what) {
  for (int v : values) {
    if (v != 0 && v != 1) {
      raise(ErrorCode::invalid_input,
            std::string(what) + " must contain only 0 or 1");
    }
  }
}

std::map<std::string, GroupStats> collect_stats(const LabeledOutcomes& o) {
  if (o.predictions.empty()) {
    raise(ErrorCode::invalid_input, "empty input");
  }
  if (o.groups.size() != o.predictions.size()) {
    raise(ErrorCode::invalid_input,
          "groups and predictions differ in length");
  }
  if (o.truths && o.truths->size() != o.predictions.size()) {
    raise(ErrorCode::invalid_input, "truths and predictions differ in length");
  }
  check_binary(o.predictions, "predictions");
  if (o.truths) check_binary(*o.truths, "truths");

  std::map<std::string, GroupStats> stats;
  for (std::size_t i = 0; i < o.predictions.size(); ++i) {
    GroupStats& g = stats[o.groups[i]];
    const int pred = o.predictions[i];
    g.n += 1;
    g.positive_preds += static_cast<std::size_t>(pred);
    if (o.truths) {
      if ((*o.truths)[i] == 1) {
        g.positive_truths += 1;
        g.true_positives += static_cast<std::size_t>(pred);
      } else {
        g.negative_truths += 1;
        g.false_positives += static_cast<std::size_t>(pred);
      }
    }
  }
  return stats;
}

void require_two_groups(const std::map<std::string, GroupStats>& stats) {
  if (stats.size() < 2) {
    raise(ErrorCode::insufficient_groups,
          "need at least two non-empty groups");
  }
}

std::pair<double, double> rate_extremes(
    const std::map<std::string, GroupStats>& stats) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& [name, g] : stats) {
    const double rate =
        static_cast<double>(g.positive_preds) / static_cast<double>(g.n);
    lo = std::min(lo, rate);
    hi = std::max(hi, rate);
  }
  return {lo, hi};
}

std::string composite_name(const std::vector<std::vector<std::string>>& cols,
                           std::size_t row) {
  std::string name = cols[0][row];
  for (std::size_t c = 1; c < cols.size(); ++c) {
    name += '|';
    name += cols[c][row];
  }
  return name;
}

}  // namespace

double demographic_parity_diff(const LabeledOutcomes& outcomes) {
  const auto stats = collect_stats(outcomes);
  require_two_groups(stats);
  const auto [lo, hi] = rate_extremes(stats);
  return hi - lo;
}

double disparate_impact(const LabeledOutcomes& outcomes) {
  const auto stats = collect_stats(outcomes);
  require_two_groups(stats);
  const auto [lo, hi] = rate_extremes(stats);
  if (hi == 0.0) return 1.0;  // no group favored anywhere: perfect parity
  return lo / hi;
}

double equalized_odds_diff(const LabeledOutcomes& outcomes) {
  if (!outcomes.truths) {
    raise(ErrorCode::missing_truths,
          "equalized odds requires ground-truth labels");
  }
  const auto stats = collect_stats(outcomes);
  require_two_groups(stats);

  double tpr_lo = std::numeric_limits<double>::infinity(), tpr_hi = 0.0;
  double fpr_lo = std::numeric_limits<double>::infinity(), fpr_hi = 0.0;
  for (const auto& [name, g] : stats) {
    if (g.positive_truths == 0) {
      raise(ErrorCode::degenerate_group,
            "group '" + name + "' has no positive truths; TPR undefined");
    }
    if (g.negative_truths == 0) {
      raise(ErrorCode::degenerate_group,
            "group '" + name + "' has no negative truths; FPR undefined");
    }
    const double tpr = static_cast<double>(g.true_positives) /
                       static_cast<double>(g.positive_truths);
    const double fpr = static_cast<double>(g.false_positives) /
                       static_cast<double>(g.negative_truths);
    tpr_lo = std::min(tpr_lo, tpr);
    tpr_hi = std::max(tpr_hi, tpr);
    fpr_lo = std::min(fpr_lo, fpr);
    fpr_hi = std::max(fpr_hi, fpr);
  }
  return std::max(tpr_hi - tpr_lo, fpr_hi - fpr_lo);
}

FairnessReport intersectional_fairness(
    const std::vector<int>& predictions,
    const std::optional<std::vector<int>>& truths,
    const std::vector<std::vector<std::string>>& attribute_columns,
    std::size_t min_group_size) {
  if (attribute_columns.empty()) {
    raise(ErrorCode::invalid_input, "need at least one attribute column");
  }
  if (predictions.empty()) {
    raise(ErrorCode::invalid_input, "empty input");
  }
  const std::size_t n = predictions.size();
  for (const auto& col : attribute_columns) {
    if (col.size() != n) {
      raise(ErrorCode::invalid_input,
            "attribute column length does not match predictions");
    }
  }

  std::vector<std::string> composite(n);
  std::map<std::string, std::size_t> sizes;
  for (std::size_t i = 0; i < n; ++i) {
    composite[i] = composite_name(attribute_columns, i);
    sizes[composite[i]] += 1;
  }

  FairnessReport report;
  report.group_sizes = sizes;
  for (const auto& [name, size] : sizes) {
    if (size < min_group_size) report.excluded_groups.push_back(name);
  }

  LabeledOutcomes filtered;
  if (truths) filtered.truths.emplace();
  for (std::size_t i = 0; i < n; ++i) {
    if (sizes[composite[i]] < min_group_size) continue;
    filtered.predictions.push_back(predictions[i]);
    filtered.groups.push_back(composite[i]);
    if (truths) filtered.truths->push_back((*truths)[i]);
  }

  const std::size_t included_groups = sizes.size() - report.excluded_groups.size();
  if (included_groups < 2) {
    raise(ErrorCode::insufficient_groups,
          included_groups == 0
              ? "all composite groups excluded by min_group_size"
              : "fewer than two composite groups remain");
  }

  report.dpd = demographic_parity_diff(filtered);
  report.di = disparate_impact(filtered);
  if (truths) report.eod = equalized_odds_diff(filtered);

  for (const auto& [name, g] : collect_stats(filtered)) {
    report.per_group_positive_rates[name] =
        static_cast<double>(g.positive_preds) / static_cast<double>(g.n);
  }
  return report;
}

FairnessReport fairness_summary(const LabeledOutcomes& outcomes) {
  // Single-column passthrough: composite names equal the raw group names
  // and the metric values stay bit-identical to the direct calls.
  return intersectional_fairness(outcomes.predictions, outcomes.truths,
                                 {outcomes.groups}, 1);
}

}  // namespace trustml::fairness

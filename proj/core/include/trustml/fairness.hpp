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
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace trustml::fairness {

/// Binary predictions with optional ground truths and one sensitive
/// attribute per row. All vectors are aligned by index and must have the
/// same length; predictions and truths take values in {0, 1}.
struct LabeledOutcomes {
  std::vector<int> predictions;
  std::optional<std::vector<int>> truths;
  std::vector<std::string> groups;
};

struct FairnessReport {
  double dpd = 0.0;
  std::optional<double> eod;  // absent when truths are absent
  double di = 1.0;
  std::map<std::string, double> per_group_positive_rates;  // included groups
  std::map<std::string, std::size_t> group_sizes;  // all groups; sums to N
  std::vector<std::string> excluded_groups;  // dropped by min_group_size
};

/// Worst pairwise gap in predicted-positive rates across groups.
/// 0 means perfect parity. With more than two groups this is the
/// max-rate minus min-rate (the worst pair).
double demographic_parity_diff(const LabeledOutcomes& outcomes);

/// Worst pairwise gap in TPR or FPR across groups, whichever is larger.
/// Requires truths; a group with no positive (or no negative) truths has
/// an undefined TPR (FPR) and raises a degenerate_group error naming the
/// group and the rate rather than hiding it.
double equalized_odds_diff(const LabeledOutcomes& outcomes);

/// Minimum over maximum group predicted-positive rate. 0.80 is the
/// conventional equity threshold. When every group has rate zero no
/// group is favored and the ratio is defined as 1.0.
double disparate_impact(const LabeledOutcomes& outcomes);

/// Fairness metrics over composite groups formed row-wise from several
/// sensitive attribute columns (values joined with '|'). Composite
/// groups smaller than min_group_size are excluded from the metrics and
/// listed in the report; exclusion is opt-in (default keeps everything).
/// eod is computed only when truths are provided.
FairnessReport intersectional_fairness(
    const std::vector<int>& predictions,
    const std::optional<std::vector<int>>& truths,
    const std::vector<std::vector<std::string>>& attribute_columns,
    std::size_t min_group_size = 1);

/// All metrics in one call. Values are bit-identical to the individual
/// metric functions on the same input; eod is omitted (not an error)
/// when truths are absent.
FairnessReport fairness_summary(const LabeledOutcomes& outcomes);

}  // namespace trustml::fairness

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
#include <optional>
#include <string>
#include <vector>

namespace trustml::triage {

enum class Severity { mild, severe };
enum class Gender { male, female };
enum class AreaType { urban, rural };
enum class Language { english, bangla };

std::string to_string(Severity s);  // "Mild" / "Severe"
std::string to_string(Gender g);
std::string to_string(AreaType a);
std::string to_string(Language l);
Gender gender_from_string(const std::string& s);
AreaType area_type_from_string(const std::string& s);
Language language_from_string(const std::string& s);

struct TriageRecord {
  double age = 0;  // years, in [0, 120]
  Gender gender = Gender::male;
  AreaType area_type = AreaType::urban;
  std::string house_type;  // open categorical set (building, tinshed, ...)
  std::string district;    // open categorical set
};

// Feature order is fixed and doubles as the split tie-break order.
inline constexpr std::array<const char*, 5> kFeatureNames = {
    "age", "gender", "area_type", "house_type", "district"};

// Binary CART tree over TriageRecord. Numeric splits test age <= threshold,
// categorical splits are one-vs-rest equality tests. Each split node
// records which branch held the majority of training samples; a
// categorical value never seen in training routes along that branch
// instead of failing. Leaves keep raw class counts so predictions carry
// exact probabilities.
struct DecisionTree {
  struct Node {
    bool is_leaf = true;
    // split fields
    int feature = -1;
    double threshold = 0.0;  // numeric splits
    std::string category;    // categorical splits
    int left = -1, right = -1;
    bool majority_left = true;
    std::size_t samples = 0;
    // leaf fields: class counts ordered {mild, severe}
    std::array<std::size_t, 2> counts = {0, 0};
  };

  std::vector<Node> nodes;  // nodes[0] is the root; empty = untrained
  std::size_t max_depth = 0;
  std::size_t min_leaf = 1;
  std::size_t training_size = 0;
  std::array<std::vector<std::string>, 5> seen_categories;  // sorted, per feature
  std::string imputed_house_type;  // training mode, used when absent at inference

  bool seen(int feature, const std::string& value) const;

  /// Plain-text hierarchical serialization (stable key order, "%.9g"
  /// floats); byte-stable across runs and platforms.
  std::string serialize() const;
  static DecisionTree deserialize(const std::string& text);
  static DecisionTree load(const std::string& path);
};

struct TriageProbs {
  double mild = 0.0;
  double severe = 0.0;
};

struct TriageResult {
  Severity prediction = Severity::mild;
  double confidence = 0.0;  // leaf majority-class proportion
  std::string recommendation;
  bool rerouted = false;  // true iff confidence < 0.70
  Language language = Language::english;
};

/// Gini impurity 1 - sum(p_i^2) of a class-count vector.
double gini_impurity(const std::vector<std::size_t>& class_counts);

/// Greedy CART training: each node takes the split with the largest Gini
/// impurity decrease (numeric candidates are midpoints between sorted
/// unique values; categorical candidates are one-vs-rest per category),
/// ties broken by feature declaration order then lower threshold /
/// lexicographic category. Stops at max_depth, min_leaf or zero
/// impurity; single-class input yields a single leaf. Deterministic; the
/// seed is recorded but unused by the exact greedy procedure.
DecisionTree train_tree(const std::vector<TriageRecord>& records,
                        const std::vector<Severity>& labels,
                        std::size_t max_depth, std::size_t min_leaf,
                        std::uint64_t seed);

/// Leaf class-count proportions for the record; always sums to 1.
TriageProbs predict_proba(const DecisionTree& tree, const TriageRecord& record);

/// Sample-weighted impurity decrease per feature, normalized to sum 1.
/// A single-leaf tree yields an all-zero map.
std::array<double, 5> gini_feature_importance(const DecisionTree& tree,
                                              std::size_t training_size);

// Localized message table (plain-text key/value file, UTF-8, Bangla
// included). The built-in table is the bundled copy of
// core/data/triage_strings.txt.
class StringTable {
 public:
  static const StringTable& builtin();
  static StringTable parse(std::string_view text);
  static StringTable load(const std::string& path);

  const std::string& text(const std::string& message_id, Language lang) const;
  std::vector<std::string> message_ids() const;

 private:
  std::vector<std::pair<std::string, std::array<std::string, 2>>> entries_;
};

/// Confidence-thresholded triage: predicts with the tree, reroutes to a
/// doctor when the top class probability is below 0.70 (confidence
/// exactly 0.70 is not rerouted), and renders the recommendation in the
/// requested language. A missing house_type is imputed with the
/// training-set mode recorded in the tree.
TriageResult assess_dengue_risk(double age, Gender gender, AreaType area_type,
                                const std::string& district, Language language,
                                const DecisionTree& model,
                                const std::optional<std::string>& house_type = {});

// Bundled reference tree, trained on the synthetic dengue generator with
// the pinned parameters below (see core/data/dengue_tree.provenance.txt).
struct ReferenceTreeSpec {
  std::uint64_t generator_seed;
  std::size_t sample_count;
  std::size_t max_depth;
  std::size_t min_leaf;
  std::uint64_t train_seed;
};
ReferenceTreeSpec reference_tree_spec();
const DecisionTree& reference_tree();

}  // namespace trustml::triage

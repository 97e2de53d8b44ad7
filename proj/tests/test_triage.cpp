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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "trustml/data_io.hpp"
#include "trustml/error.hpp"
#include "trustml/rng.hpp"
#include "trustml/triage.hpp"

using namespace trustml;
using triage::AreaType;
using triage::DecisionTree;
using triage::Gender;
using triage::Language;
using triage::Severity;
using triage::TriageRecord;

namespace {

TriageRecord record(double age, Gender g = Gender::male,
                    AreaType a = AreaType::urban,
                    const std::string& house = "building",
                    const std::string& district = "Dhaka") {
  return TriageRecord{age, g, a, house, district};
}

// single-leaf tree with the given counts
DecisionTree leaf_tree(std::size_t mild, std::size_t severe) {
  DecisionTree tree;
  DecisionTree::Node node;
  node.is_leaf = true;
  node.samples = mild + severe;
  node.counts = {mild, severe};
  tree.nodes.push_back(node);
  tree.training_size = mild + severe;
  tree.imputed_house_type = "building";
  return tree;
}

}  // namespace

TEST_CASE("gini impurity worked examples") {
  CHECK(triage::gini_impurity({10, 0}) == 0.0);
  CHECK(triage::gini_impurity({5, 5}) == 0.5);
  CHECK(triage::gini_impurity({3, 1}) == doctest::Approx(0.375).epsilon(1e-12));
  CHECK_THROWS_AS(triage::gini_impurity({0, 0}), Error);
}

TEST_CASE("a perfectly age-separable set trains to a depth-1 tree") {
  std::vector<TriageRecord> records;
  std::vector<Severity> labels;
  for (int i = 0; i < 10; ++i) {
    records.push_back(record(2.0 + 0.5 * i));  // ages below 10
    labels.push_back(Severity::severe);
    records.push_back(record(20.0 + 2.0 * i));
    labels.push_back(Severity::mild);
  }
  const DecisionTree tree = triage::train_tree(records, labels, 4, 1, 0);

  REQUIRE_FALSE(tree.nodes.empty());
  CHECK_FALSE(tree.nodes[0].is_leaf);
  CHECK(tree.nodes[0].feature == 0);  // age
  CHECK(tree.nodes[0].threshold > 6.5);
  CHECK(tree.nodes[0].threshold < 20.0);
  CHECK(tree.nodes.size() == 3);  // one split, two leaves

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto probs = triage::predict_proba(tree, records[i]);
    const Severity predicted =
        probs.severe >= probs.mild ? Severity::severe : Severity::mild;
    CHECK(predicted == labels[i]);
  }

  const auto importance = triage::gini_feature_importance(tree, records.size());
  CHECK(importance[0] == 1.0);
  for (std::size_t f = 1; f < importance.size(); ++f) {
    CHECK(importance[f] == 0.0);
  }
}

TEST_CASE("single-class labels produce a single confident leaf") {
  std::vector<TriageRecord> records;
  std::vector<Severity> labels;
  for (int i = 0; i < 8; ++i) {
    records.push_back(record(10.0 + i));
    labels.push_back(Severity::mild);
  }
  const DecisionTree tree = triage::train_tree(records, labels, 4, 2, 0);
  REQUIRE(tree.nodes.size() == 1);
  CHECK(tree.nodes[0].is_leaf);
  const auto probs = triage::predict_proba(tree, record(12));
  CHECK(probs.mild == 1.0);
  // single-leaf tree: all-zero importances, documented behavior
  const auto importance = triage::gini_feature_importance(tree, records.size());
  for (double v : importance) CHECK(v == 0.0);
}

TEST_CASE("training is deterministic") {
  const auto [records, labels] = data_io::synth_dengue(99, 600);
  const DecisionTree a = triage::train_tree(records, labels, 4, 20, 1);
  const DecisionTree b = triage::train_tree(records, labels, 4, 20, 2);
  CHECK(a.serialize() == b.serialize());
}

TEST_CASE("greedy splits never increase weighted impurity") {
  const auto [records, labels] = data_io::synth_dengue(7, 800);
  const DecisionTree tree = triage::train_tree(records, labels, 5, 10, 0);

  // recompute each split's weighted child impurity from leaf counts
  struct Walker {
    const DecisionTree& tree;
    std::array<std::size_t, 2> visit(int id) {
      const auto& node = tree.nodes[static_cast<std::size_t>(id)];
      if (node.is_leaf) return node.counts;
      const auto left = visit(node.left);
      const auto right = visit(node.right);
      const double nl = left[0] + left[1];
      const double nr = right[0] + right[1];
      const double n = nl + nr;
      auto gini = [](std::array<std::size_t, 2> c) {
        const double total = c[0] + c[1];
        const double p = c[1] / total;
        return 1.0 - p * p - (1.0 - p) * (1.0 - p);
      };
      const std::array<std::size_t, 2> all = {left[0] + right[0],
                                              left[1] + right[1]};
      const double parent = gini(all);
      const double weighted = (nl * gini(left) + nr * gini(right)) / n;
      CHECK(parent >= weighted - 1e-12);
      return all;
    }
  };
  Walker{tree}.visit(0);
}

TEST_CASE("predict_proba returns leaf proportions that sum to one") {
  const DecisionTree tree = leaf_tree(2, 8);
  const auto probs = triage::predict_proba(tree, record(30));
  CHECK(probs.severe == 0.8);
  CHECK(probs.mild == 0.2);

  const auto [records, labels] = data_io::synth_dengue(3, 500);
  const DecisionTree trained = triage::train_tree(records, labels, 4, 25, 0);
  SeededRng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto& r = records[rng.index(records.size())];
    const auto p = triage::predict_proba(trained, r);
    CHECK(std::fabs(p.mild + p.severe - 1.0) <= 1e-12);
  }
}

TEST_CASE("feature importances are normalized and age-dominant on synthetic data") {
  const auto [records, labels] = data_io::synth_dengue(20260810, 5000);
  const DecisionTree tree = triage::train_tree(records, labels, 4, 50, 0);
  const auto importance = triage::gini_feature_importance(tree, records.size());

  double total = 0.0;
  for (double v : importance) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  const double age = importance[0];
  const double district = importance[4];
  CHECK(age > district);
  CHECK(district > 0.0);
  for (std::size_t f = 1; f < importance.size(); ++f) {
    CHECK(age > importance[f]);
  }
}

TEST_CASE("every training record routes to a leaf holding its label") {
  const auto [records, labels] = data_io::synth_dengue(42, 700);
  const DecisionTree tree = triage::train_tree(records, labels, 5, 10, 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto probs = triage::predict_proba(tree, records[i]);
    const double own_class_share =
        labels[i] == Severity::severe ? probs.severe : probs.mild;
    CHECK(own_class_share > 0.0);
  }
}

TEST_CASE("rerouting boundary sits exactly at 0.70") {
  const DecisionTree at_69 = leaf_tree(31, 69);
  const DecisionTree at_70 = leaf_tree(30, 70);
  const DecisionTree at_71 = leaf_tree(29, 71);

  const auto r69 = triage::assess_dengue_risk(30, Gender::female,
                                              AreaType::rural, "Khulna",
                                              Language::english, at_69);
  CHECK(r69.confidence == 0.69);
  CHECK(r69.rerouted);
  CHECK(r69.recommendation ==
        triage::StringTable::builtin().text("reroute_advice", Language::english));

  const auto r70 = triage::assess_dengue_risk(30, Gender::female,
                                              AreaType::rural, "Khulna",
                                              Language::english, at_70);
  CHECK(r70.confidence == 0.70);
  CHECK_FALSE(r70.rerouted);

  const auto r71 = triage::assess_dengue_risk(30, Gender::female,
                                              AreaType::rural, "Khulna",
                                              Language::english, at_71);
  CHECK(r71.confidence == 0.71);
  CHECK_FALSE(r71.rerouted);
}

TEST_CASE("the bundled tree reproduces the documented triage case") {
  const DecisionTree& tree = triage::reference_tree();
  const auto result = triage::assess_dengue_risk(
      8, Gender::male, AreaType::urban, "Dhaka", Language::bangla, tree);
  CHECK(result.prediction == Severity::severe);
  CHECK_FALSE(result.rerouted);
  CHECK(result.confidence >= 0.70);
  CHECK(result.recommendation ==
        triage::StringTable::builtin().text("severe_advice", Language::bangla));

  const auto english = triage::assess_dengue_risk(
      8, Gender::male, AreaType::urban, "Dhaka", Language::english, tree);
  CHECK(english.prediction == result.prediction);
  CHECK(english.confidence == result.confidence);
  CHECK(english.recommendation == "Seek immediate medical attention");
  CHECK(english.recommendation != result.recommendation);
}

TEST_CASE("the bundled tree equals retraining with the pinned parameters") {
  const triage::ReferenceTreeSpec spec = triage::reference_tree_spec();
  const auto [records, labels] =
      data_io::synth_dengue(spec.generator_seed, spec.sample_count);
  const DecisionTree retrained = triage::train_tree(
      records, labels, spec.max_depth, spec.min_leaf, spec.train_seed);
  CHECK(retrained.serialize() == triage::reference_tree().serialize());
}

TEST_CASE("tree serialization round trips byte for byte") {
  const auto [records, labels] = data_io::synth_dengue(4, 900);
  const DecisionTree tree = triage::train_tree(records, labels, 5, 30, 0);
  const std::string text = tree.serialize();
  const DecisionTree parsed = DecisionTree::deserialize(text);
  CHECK(parsed.serialize() == text);

  CHECK_THROWS_AS(DecisionTree::deserialize("not a tree"), Error);
  CHECK_THROWS_AS(DecisionTree::deserialize("dengue-tree v1\ntree\n"), Error);
  CHECK_THROWS_AS(DecisionTree::load("/nonexistent/tree.txt"), Error);
}

TEST_CASE("unseen categorical values route along the majority branch") {
  // hand-built tree: split on district == Dhaka, majority right
  DecisionTree tree;
  DecisionTree::Node split;
  split.is_leaf = false;
  split.feature = 4;
  split.category = "Dhaka";
  split.left = 1;
  split.right = 2;
  split.majority_left = false;
  split.samples = 100;
  tree.nodes.push_back(split);
  DecisionTree::Node left;
  left.counts = {10, 30};
  left.samples = 40;
  DecisionTree::Node right;
  right.counts = {55, 5};
  right.samples = 60;
  tree.nodes.push_back(left);
  tree.nodes.push_back(right);
  tree.seen_categories[4] = {"Dhaka", "Khulna"};
  tree.imputed_house_type = "building";
  tree.training_size = 100;

  // seen values use the equality test
  CHECK(triage::predict_proba(tree, record(30, Gender::male, AreaType::urban,
                                           "building", "Dhaka"))
            .severe == 0.75);
  CHECK(triage::predict_proba(tree, record(30, Gender::male, AreaType::urban,
                                           "building", "Khulna"))
            .mild == doctest::Approx(55.0 / 60.0));
  // unseen district goes to the majority (right) branch
  CHECK(triage::predict_proba(tree, record(30, Gender::male, AreaType::urban,
                                           "building", "Barishal"))
            .mild == doctest::Approx(55.0 / 60.0));
}

TEST_CASE("missing house_type is imputed with the training mode") {
  // tree splitting on house_type == tinshed; imputed mode is building
  DecisionTree tree;
  DecisionTree::Node split;
  split.is_leaf = false;
  split.feature = 3;
  split.category = "tinshed";
  split.left = 1;
  split.right = 2;
  split.majority_left = true;
  split.samples = 100;
  tree.nodes.push_back(split);
  DecisionTree::Node left;
  left.counts = {0, 80};
  left.samples = 80;
  DecisionTree::Node right;
  right.counts = {20, 0};
  right.samples = 20;
  tree.nodes.push_back(left);
  tree.nodes.push_back(right);
  tree.seen_categories[3] = {"building", "tinshed"};
  tree.imputed_house_type = "building";
  tree.training_size = 100;

  const auto imputed = triage::assess_dengue_risk(
      30, Gender::male, AreaType::urban, "Dhaka", Language::english, tree);
  CHECK(imputed.prediction == Severity::mild);  // building routes right

  const auto explicit_house = triage::assess_dengue_risk(
      30, Gender::male, AreaType::urban, "Dhaka", Language::english, tree,
      std::string("tinshed"));
  CHECK(explicit_house.prediction == Severity::severe);
}

TEST_CASE("localization table is complete in both languages") {
  const triage::StringTable& table = triage::StringTable::builtin();
  const auto ids = table.message_ids();
  CHECK(ids.size() == 3);
  const std::set<std::string> expected = {"severe_advice", "mild_advice",
                                          "reroute_advice"};
  CHECK(std::set<std::string>(ids.begin(), ids.end()) == expected);
  for (const auto& id : ids) {
    CHECK_FALSE(table.text(id, Language::english).empty());
    CHECK_FALSE(table.text(id, Language::bangla).empty());
    CHECK(table.text(id, Language::english) != table.text(id, Language::bangla));
  }
  CHECK_THROWS_AS(table.text("missing_id", Language::english), Error);

  const triage::StringTable loaded = triage::StringTable::load(
      std::string(TRUSTML_SOURCE_DATA_DIR) + "/triage_strings.txt");
  for (const auto& id : ids) {
    CHECK(loaded.text(id, Language::bangla) == table.text(id, Language::bangla));
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(triage::train_tree({}, {}, 3, 1, 0), Error);
  CHECK_THROWS_AS(triage::train_tree({record(500)}, {Severity::mild}, 3, 1, 0),
                  Error);
  const DecisionTree tree = leaf_tree(5, 5);
  CHECK_THROWS_AS(triage::predict_proba(tree, record(-3)), Error);
  CHECK_THROWS_AS(triage::predict_proba(DecisionTree{}, record(10)), Error);
  CHECK_THROWS_AS(triage::gender_from_string("other"), Error);
  CHECK_THROWS_AS(triage::area_type_from_string("suburban"), Error);
  CHECK_THROWS_AS(triage::language_from_string("latin"), Error);
}

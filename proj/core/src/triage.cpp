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

#include "trustml/triage.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "trustml/data_io.hpp"
#include "trustml/error.hpp"
#include "trustml/jsonout.hpp"
#include "embedded.hpp"

namespace trustml::triage {
namespace {

constexpr double kRerouteThreshold = 0.70;
constexpr int kAgeFeature = 0;

double gini_from_pair(std::size_t severe, std::size_t total) {
  const double p = static_cast<double>(severe) / static_cast<double>(total);
  const double q = 1.0 - p;
  return 1.0 - p * p - q * q;
}

void check_age(double age) {
  if (!std::isfinite(age) || age < 0.0 || age > 120.0) {
    raise(ErrorCode::invalid_input, "age must lie in [0, 120]");
  }
}

std::string categorical_value(const TriageRecord& r, int feature) {
  switch (feature) {
    case 1: return to_string(r.gender);
    case 2: return to_string(r.area_type);
    case 3: return r.house_type;
    case 4: return r.district;
    default:
      raise(ErrorCode::invalid_input, "not a categorical feature");
  }
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::size_t parse_count(const std::string& field, const std::string& key) {
  if (field.rfind(key + "=", 0) != 0) {
    raise(ErrorCode::schema_violation,
          "tree file: expected '" + key + "=' in '" + field + "'");
  }
  return static_cast<std::size_t>(std::stoull(field.substr(key.size() + 1)));
}

}  // namespace

std::string to_string(Severity s) { return s == Severity::mild ? "Mild" : "Severe"; }
std::string to_string(Gender g) { return g == Gender::male ? "male" : "female"; }
std::string to_string(AreaType a) { return a == AreaType::urban ? "urban" : "rural"; }
std::string to_string(Language l) {
  return l == Language::english ? "english" : "bangla";
}

Gender gender_from_string(const std::string& s) {
  if (s == "male") return Gender::male;
  if (s == "female") return Gender::female;
  raise(ErrorCode::invalid_input, "unknown gender '" + s + "'");
}

AreaType area_type_from_string(const std::string& s) {
  if (s == "urban") return AreaType::urban;
  if (s == "rural") return AreaType::rural;
  raise(ErrorCode::invalid_input, "unknown area_type '" + s + "'");
}

Language language_from_string(const std::string& s) {
  if (s == "english") return Language::english;
  if (s == "bangla") return Language::bangla;
  raise(ErrorCode::invalid_input, "unknown language '" + s + "'");
}

double gini_impurity(const std::vector<std::size_t>& class_counts) {
  std::size_t total = 0;
  for (std::size_t c : class_counts) total += c;
  if (total == 0) {
    raise(ErrorCode::invalid_input, "class counts are all zero");
  }
  double sum_sq = 0.0;
  for (std::size_t c : class_counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

bool DecisionTree::seen(int feature, const std::string& value) const {
  const auto& values = seen_categories[static_cast<std::size_t>(feature)];
  return std::binary_search(values.begin(), values.end(), value);
}

namespace {

struct TrainingColumns {
  std::vector<double> age;
  std::array<std::vector<std::string>, 5> cats;  // index 0 unused
  std::vector<int> labels;                       // 0 mild, 1 severe
};

struct BestSplit {
  bool found = false;
  double decrease = 0.0;
  int feature = -1;
  double threshold = 0.0;
  std::string category;
};

class TreeTrainer {
 public:
  TreeTrainer(TrainingColumns cols, std::size_t max_depth,
              std::size_t min_leaf)
      : cols_(std::move(cols)), max_depth_(max_depth), min_leaf_(min_leaf) {}

  DecisionTree train() {
    DecisionTree tree;
    tree.max_depth = max_depth_;
    tree.min_leaf = min_leaf_;
    tree.training_size = cols_.labels.size();
    for (int f = 1; f < 5; ++f) {
      std::set<std::string> uniq(cols_.cats[f].begin(), cols_.cats[f].end());
      tree.seen_categories[static_cast<std::size_t>(f)] =
          std::vector<std::string>(uniq.begin(), uniq.end());
    }
    std::vector<std::size_t> all(cols_.labels.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    tree_ = &tree;
    build(all, 0);
    return tree;
  }

 private:
  std::size_t severe_count(const std::vector<std::size_t>& idx) const {
    std::size_t severe = 0;
    for (std::size_t i : idx) severe += static_cast<std::size_t>(cols_.labels[i]);
    return severe;
  }

  BestSplit best_split(const std::vector<std::size_t>& idx) const {
    const std::size_t n = idx.size();
    const std::size_t severe = severe_count(idx);
    const double parent = gini_from_pair(severe, n);
    BestSplit best;
    if (parent == 0.0) return best;

    // numeric: thresholds are midpoints between consecutive unique ages
    {
      std::vector<std::size_t> order = idx;
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cols_.age[a] < cols_.age[b];
      });
      std::size_t left_n = 0, left_severe = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_n += 1;
        left_severe += static_cast<std::size_t>(cols_.labels[order[i]]);
        if (cols_.age[order[i]] == cols_.age[order[i + 1]]) continue;
        if (left_n < min_leaf_ || n - left_n < min_leaf_) continue;
        const double weighted =
            (static_cast<double>(left_n) * gini_from_pair(left_severe, left_n) +
             static_cast<double>(n - left_n) *
                 gini_from_pair(severe - left_severe, n - left_n)) /
            static_cast<double>(n);
        const double decrease = parent - weighted;
        if (decrease > best.decrease + 1e-12) {
          best.found = true;
          best.decrease = decrease;
          best.feature = kAgeFeature;
          best.threshold = 0.5 * (cols_.age[order[i]] + cols_.age[order[i + 1]]);
        }
      }
    }

    // categorical: one-vs-rest per category, lexicographic candidate order
    for (int f = 1; f < 5; ++f) {
      std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // n, severe
      for (std::size_t i : idx) {
        auto& [cnt, sev] = tally[cols_.cats[f][i]];
        cnt += 1;
        sev += static_cast<std::size_t>(cols_.labels[i]);
      }
      if (tally.size() < 2) continue;
      for (const auto& [category, stat] : tally) {
        const auto [cnt, sev] = stat;
        if (cnt < min_leaf_ || n - cnt < min_leaf_) continue;
        const double weighted =
            (static_cast<double>(cnt) * gini_from_pair(sev, cnt) +
             static_cast<double>(n - cnt) *
                 gini_from_pair(severe - sev, n - cnt)) /
            static_cast<double>(n);
        const double decrease = parent - weighted;
        if (decrease > best.decrease + 1e-12) {
          best.found = true;
          best.decrease = decrease;
          best.feature = f;
          best.category = category;
        }
      }
    }
    return best;
  }

  int build(const std::vector<std::size_t>& idx, std::size_t depth) {
    const std::size_t n = idx.size();
    const std::size_t severe = severe_count(idx);

    BestSplit split;
    if (depth < max_depth_ && n >= 2 * min_leaf_) split = best_split(idx);

    const int id = static_cast<int>(tree_->nodes.size());
    tree_->nodes.emplace_back();
    if (!split.found) {
      DecisionTree::Node& node = tree_->nodes.back();
      node.is_leaf = true;
      node.samples = n;
      node.counts = {n - severe, severe};
      return id;
    }

    std::vector<std::size_t> left_idx, right_idx;
    for (std::size_t i : idx) {
      const bool goes_left =
          split.feature == kAgeFeature
              ? cols_.age[i] <= split.threshold
              : cols_.cats[split.feature][i] == split.category;
      (goes_left ? left_idx : right_idx).push_back(i);
    }

    {
      DecisionTree::Node& node = tree_->nodes[static_cast<std::size_t>(id)];
      node.is_leaf = false;
      node.feature = split.feature;
      node.threshold = split.threshold;
      node.category = split.category;
      node.samples = n;
      node.majority_left = left_idx.size() >= right_idx.size();
    }
    const int left = build(left_idx, depth + 1);
    const int right = build(right_idx, depth + 1);
    tree_->nodes[static_cast<std::size_t>(id)].left = left;
    tree_->nodes[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  TrainingColumns cols_;
  std::size_t max_depth_;
  std::size_t min_leaf_;
  DecisionTree* tree_ = nullptr;
};

}  // namespace

DecisionTree train_tree(const std::vector<TriageRecord>& records,
                        const std::vector<Severity>& labels,
                        std::size_t max_depth, std::size_t min_leaf,
                        std::uint64_t /*seed*/) {
  if (records.empty() || records.size() != labels.size()) {
    raise(ErrorCode::invalid_input, "records and labels must be non-empty and aligned");
  }
  if (min_leaf < 1) {
    raise(ErrorCode::invalid_config, "min_leaf must be >= 1");
  }
  if (records.size() < 2 * min_leaf) {
    raise(ErrorCode::invalid_input,
          "need at least 2*min_leaf training records");
  }

  TrainingColumns cols;
  cols.age.reserve(records.size());
  cols.labels.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    check_age(records[i].age);
    cols.age.push_back(records[i].age);
    for (int f = 1; f < 5; ++f) {
      cols.cats[f].push_back(categorical_value(records[i], f));
    }
    cols.labels.push_back(labels[i] == Severity::severe ? 1 : 0);
  }

  // training-set mode of house_type, for imputation at inference
  std::map<std::string, std::size_t> house_counts;
  for (const auto& h : cols.cats[3]) house_counts[h] += 1;
  std::string mode;
  std::size_t mode_count = 0;
  for (const auto& [value, count] : house_counts) {
    if (count > mode_count) {
      mode = value;
      mode_count = count;
    }
  }

  TreeTrainer trainer(std::move(cols), max_depth, min_leaf);
  DecisionTree tree = trainer.train();
  tree.imputed_house_type = mode;
  return tree;
}

TriageProbs predict_proba(const DecisionTree& tree, const TriageRecord& record) {
  if (tree.nodes.empty()) {
    raise(ErrorCode::invalid_input, "tree is untrained");
  }
  check_age(record.age);

  int at = 0;
  while (!tree.nodes[static_cast<std::size_t>(at)].is_leaf) {
    const DecisionTree::Node& node = tree.nodes[static_cast<std::size_t>(at)];
    bool go_left;
    if (node.feature == kAgeFeature) {
      go_left = record.age <= node.threshold;
    } else {
      const std::string value = categorical_value(record, node.feature);
      go_left = tree.seen(node.feature, value) ? value == node.category
                                               : node.majority_left;
    }
    at = go_left ? node.left : node.right;
  }

  const auto& counts = tree.nodes[static_cast<std::size_t>(at)].counts;
  const std::size_t total = counts[0] + counts[1];
  if (total == 0) {
    raise(ErrorCode::invalid_input, "reached an empty leaf");
  }
  return TriageProbs{static_cast<double>(counts[0]) / static_cast<double>(total),
                     static_cast<double>(counts[1]) / static_cast<double>(total)};
}

namespace {

std::array<std::size_t, 2> accumulate_importance(
    const DecisionTree& tree, int node_id, std::size_t training_size,
    std::array<double, 5>& importance) {
  const DecisionTree::Node& node = tree.nodes[static_cast<std::size_t>(node_id)];
  if (node.is_leaf) return node.counts;

  const auto left = accumulate_importance(tree, node.left, training_size, importance);
  const auto right = accumulate_importance(tree, node.right, training_size, importance);
  const std::size_t n_left = left[0] + left[1];
  const std::size_t n_right = right[0] + right[1];
  const std::size_t n = n_left + n_right;

  const double parent = gini_from_pair(left[1] + right[1], n);
  const double weighted =
      (static_cast<double>(n_left) * gini_from_pair(left[1], n_left) +
       static_cast<double>(n_right) * gini_from_pair(right[1], n_right)) /
      static_cast<double>(n);
  importance[static_cast<std::size_t>(node.feature)] +=
      static_cast<double>(n) / static_cast<double>(training_size) *
      (parent - weighted);
  return {left[0] + right[0], left[1] + right[1]};
}

}  // namespace

std::array<double, 5> gini_feature_importance(const DecisionTree& tree,
                                              std::size_t training_size) {
  std::array<double, 5> importance{};
  if (tree.nodes.empty() || tree.nodes[0].is_leaf || training_size == 0) {
    return importance;  // single-leaf tree: nothing was split on
  }
  accumulate_importance(tree, 0, training_size, importance);
  double total = 0.0;
  for (double v : importance) total += v;
  if (total > 0.0) {
    for (double& v : importance) v /= total;
  }
  return importance;
}

namespace {

void serialize_node(const DecisionTree& tree, int node_id, std::size_t depth,
                    std::string& out) {
  const DecisionTree::Node& node = tree.nodes[static_cast<std::size_t>(node_id)];
  out.append(2 * (depth + 1), ' ');
  if (node.is_leaf) {
    out += "leaf\tsamples=" + std::to_string(node.samples) +
           "\tmild=" + std::to_string(node.counts[0]) +
           "\tsevere=" + std::to_string(node.counts[1]) + "\n";
    return;
  }
  out += "split\t";
  out += kFeatureNames[static_cast<std::size_t>(node.feature)];
  if (node.feature == kAgeFeature) {
    out += "\t<=\t" + format_number(node.threshold);
  } else {
    out += "\t==\t" + node.category;
  }
  out += "\tsamples=" + std::to_string(node.samples) + "\tmajority=";
  out += node.majority_left ? "left" : "right";
  out += "\n";
  serialize_node(tree, node.left, depth + 1, out);
  serialize_node(tree, node.right, depth + 1, out);
}

int feature_index(const std::string& name) {
  for (std::size_t f = 0; f < kFeatureNames.size(); ++f) {
    if (name == kFeatureNames[f]) return static_cast<int>(f);
  }
  raise(ErrorCode::schema_violation, "tree file: unknown feature '" + name + "'");
}

struct NodeParser {
  const std::vector<std::string>& lines;
  std::size_t pos;
  DecisionTree& tree;

  int parse(std::size_t depth) {
    if (pos >= lines.size()) {
      raise(ErrorCode::schema_violation, "tree file: truncated node list");
    }
    const std::string& raw = lines[pos];
    const std::size_t indent = raw.find_first_not_of(' ');
    if (indent != 2 * (depth + 1)) {
      raise(ErrorCode::schema_violation,
            "tree file: bad indentation at line '" + raw + "'");
    }
    ++pos;
    const auto fields = split_tabs(raw.substr(indent));
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    if (fields[0] == "leaf") {
      if (fields.size() != 4) {
        raise(ErrorCode::schema_violation, "tree file: bad leaf line");
      }
      DecisionTree::Node& node = tree.nodes.back();
      node.is_leaf = true;
      node.samples = parse_count(fields[1], "samples");
      node.counts[0] = parse_count(fields[2], "mild");
      node.counts[1] = parse_count(fields[3], "severe");
      return id;
    }
    if (fields[0] != "split" || fields.size() != 6) {
      raise(ErrorCode::schema_violation, "tree file: bad split line");
    }
    {
      DecisionTree::Node& node = tree.nodes[static_cast<std::size_t>(id)];
      node.is_leaf = false;
      node.feature = feature_index(fields[1]);
      if (fields[2] == "<=") {
        node.threshold = std::stod(fields[3]);
      } else if (fields[2] == "==") {
        node.category = fields[3];
      } else {
        raise(ErrorCode::schema_violation,
              "tree file: unknown split operator '" + fields[2] + "'");
      }
      node.samples = parse_count(fields[4], "samples");
      if (fields[5] == "majority=left") {
        node.majority_left = true;
      } else if (fields[5] == "majority=right") {
        node.majority_left = false;
      } else {
        raise(ErrorCode::schema_violation, "tree file: bad majority field");
      }
    }
    const int left = parse(depth + 1);
    const int right = parse(depth + 1);
    tree.nodes[static_cast<std::size_t>(id)].left = left;
    tree.nodes[static_cast<std::size_t>(id)].right = right;
    return id;
  }
};

}  // namespace

std::string DecisionTree::serialize() const {
  std::string out = "dengue-tree v1\n";
  out += "max_depth\t" + std::to_string(max_depth) + "\n";
  out += "min_leaf\t" + std::to_string(min_leaf) + "\n";
  out += "training_size\t" + std::to_string(training_size) + "\n";
  out += "impute_house_type\t" + imputed_house_type + "\n";
  for (std::size_t f = 1; f < kFeatureNames.size(); ++f) {
    out += "seen\t";
    out += kFeatureNames[f];
    for (const auto& value : seen_categories[f]) {
      out += "\t" + value;
    }
    out += "\n";
  }
  out += "tree\n";
  if (!nodes.empty()) serialize_node(*this, 0, 0, out);
  return out;
}

DecisionTree DecisionTree::deserialize(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty() || lines[0] != "dengue-tree v1") {
    raise(ErrorCode::schema_violation, "tree file: missing 'dengue-tree v1' header");
  }

  DecisionTree tree;
  std::size_t pos = 1;
  for (; pos < lines.size() && lines[pos] != "tree"; ++pos) {
    const auto fields = split_tabs(lines[pos]);
    if (fields[0] == "max_depth") {
      tree.max_depth = std::stoull(fields.at(1));
    } else if (fields[0] == "min_leaf") {
      tree.min_leaf = std::stoull(fields.at(1));
    } else if (fields[0] == "training_size") {
      tree.training_size = std::stoull(fields.at(1));
    } else if (fields[0] == "impute_house_type") {
      tree.imputed_house_type = fields.size() > 1 ? fields[1] : "";
    } else if (fields[0] == "seen") {
      const int f = feature_index(fields.at(1));
      tree.seen_categories[static_cast<std::size_t>(f)] =
          std::vector<std::string>(fields.begin() + 2, fields.end());
    } else {
      raise(ErrorCode::schema_violation,
            "tree file: unknown directive '" + fields[0] + "'");
    }
  }
  if (pos >= lines.size()) {
    raise(ErrorCode::schema_violation, "tree file: missing 'tree' section");
  }
  ++pos;  // skip "tree"
  NodeParser parser{lines, pos, tree};
  parser.parse(0);
  if (parser.pos != lines.size()) {
    raise(ErrorCode::schema_violation, "tree file: trailing lines after the tree");
  }
  return tree;
}

DecisionTree DecisionTree::load(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    raise(ErrorCode::invalid_input, "cannot open tree file '" + path + "'");
  }
  std::ostringstream content;
  content << file.rdbuf();
  return deserialize(content.str());
}

const StringTable& StringTable::builtin() {
  static const StringTable table = parse(embedded::triage_strings_text());
  return table;
}

StringTable StringTable::parse(std::string_view text) {
  StringTable table;
  std::istringstream stream{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      raise(ErrorCode::schema_violation,
            "string table line " + std::to_string(line_no) +
                ": expected 'id<TAB>language<TAB>text'");
    }
    const Language lang = language_from_string(fields[1]);
    auto it = std::find_if(table.entries_.begin(), table.entries_.end(),
                           [&](const auto& e) { return e.first == fields[0]; });
    if (it == table.entries_.end()) {
      table.entries_.emplace_back(fields[0], std::array<std::string, 2>{});
      it = std::prev(table.entries_.end());
    }
    it->second[static_cast<std::size_t>(lang)] = fields[2];
  }
  return table;
}

StringTable StringTable::load(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    raise(ErrorCode::invalid_input, "cannot open string table '" + path + "'");
  }
  std::ostringstream content;
  content << file.rdbuf();
  return parse(content.str());
}

const std::string& StringTable::text(const std::string& message_id,
                                     Language lang) const {
  for (const auto& [id, texts] : entries_) {
    if (id == message_id) {
      const std::string& value = texts[static_cast<std::size_t>(lang)];
      if (value.empty()) {
        raise(ErrorCode::invalid_input,
              "message '" + message_id + "' missing " + to_string(lang) +
                  " translation");
      }
      return value;
    }
  }
  raise(ErrorCode::invalid_input, "unknown message id '" + message_id + "'");
}

std::vector<std::string> StringTable::message_ids() const {
  std::vector<std::string> ids;
  ids.reserve(entries_.size());
  for (const auto& [id, texts] : entries_) ids.push_back(id);
  return ids;
}

TriageResult assess_dengue_risk(double age, Gender gender, AreaType area_type,
                                const std::string& district, Language language,
                                const DecisionTree& model,
                                const std::optional<std::string>& house_type) {
  TriageRecord record;
  record.age = age;
  record.gender = gender;
  record.area_type = area_type;
  record.district = district;
  record.house_type = house_type ? *house_type : model.imputed_house_type;

  const TriageProbs probs = predict_proba(model, record);

  TriageResult result;
  result.language = language;
  // ties predict Severe: the cautious side for a screening tool
  result.prediction = probs.severe >= probs.mild ? Severity::severe : Severity::mild;
  result.confidence = std::max(probs.mild, probs.severe);
  result.rerouted = result.confidence < kRerouteThreshold;

  const StringTable& strings = StringTable::builtin();
  if (result.rerouted) {
    result.recommendation = strings.text("reroute_advice", language);
  } else if (result.prediction == Severity::severe) {
    result.recommendation = strings.text("severe_advice", language);
  } else {
    result.recommendation = strings.text("mild_advice", language);
  }
  return result;
}

ReferenceTreeSpec reference_tree_spec() {
  return ReferenceTreeSpec{data_io::kDengueFixtureSeed,
                           data_io::kDengueFixtureSize, 4, 50, 7};
}

const DecisionTree& reference_tree() {
  static const DecisionTree tree =
      DecisionTree::deserialize(std::string(embedded::dengue_tree_text()));
  return tree;
}

}  // namespace trustml::triage

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

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace trustml::fuzzy {

/// Trapezoidal membership function with breakpoints a <= b <= c <= d:
/// 0 below a and above d, 1 on [b, c], linear ramps in between.
/// +infinity for c and d gives a right-open shoulder.
struct MembershipFunction {
  double a = 0, b = 0, c = 0, d = 0;
  double evaluate(double x) const;
};

struct LinguisticVariable {
  std::string name;
  std::vector<std::pair<std::string, MembershipFunction>> terms;

  const MembershipFunction* find_term(std::string_view term) const;
};

/// Conjunction of (variable, term) conditions implying a risk term, with
/// the clinician-facing texts used in explanations.
struct FuzzyRule {
  int id = 0;
  std::vector<std::pair<std::string, std::string>> antecedent;
  std::string consequent;  // term of the "risk" output variable
  std::string condition_text;
  std::string outcome_text;
};

struct FiredRule {
  int id = 0;
  std::string condition;
  std::string outcome;
  double activation = 0.0;  // in (0, 1]
};

// Rule base: linguistic variables (four inputs plus the "risk" output)
// and the rules over them. Loadable from the plain-text table format of
// core/data/fuzzy_rules.txt so clinicians can inspect and edit it; the
// built-in base is the bundled copy of that same table.
class RuleBase {
 public:
  RuleBase(std::vector<LinguisticVariable> variables,
           std::vector<FuzzyRule> rules);

  static const RuleBase& builtin();
  static RuleBase parse(std::string_view text);
  static RuleBase load(const std::string& path);

  const LinguisticVariable& variable(std::string_view name) const;
  const std::vector<LinguisticVariable>& variables() const {
    return variables_;
  }
  const std::vector<FuzzyRule>& rules() const { return rules_; }

 private:
  void validate() const;

  std::vector<LinguisticVariable> variables_;
  std::vector<FuzzyRule> rules_;
};

/// Evaluates every term of the variable at x.
std::map<std::string, double> fuzzify(const LinguisticVariable& variable,
                                      double x);

// Mamdani engine: AND = min, aggregation = max, centroid defuzzification
// on a fixed 1001-point grid over risk in [0, 1].
class Engine {
 public:
  explicit Engine(RuleBase base);

  /// Rules with activation > 0, sorted by activation descending then id
  /// ascending. Activation is the min over antecedent memberships.
  std::vector<FiredRule> fired_rules(double age, double sbp, double bs,
                                     double hr) const;

  /// Defuzzified risk score in [0, 1]. When no rule fires the score is
  /// 0.5, signalling maximal uncertainty rather than low risk.
  double risk_score(double age, double sbp, double bs, double hr) const;

  const RuleBase& rule_base() const { return base_; }

 private:
  RuleBase base_;
};

/// Shared engine over the built-in rule base.
const Engine& default_engine();

// Convenience entry points over the built-in rule base.
std::vector<FiredRule> get_fired_rules(double age, double sbp, double bs,
                                       double hr);
double risk_score(double age, double sbp, double bs, double hr);

enum class RiskLabel { low, mid, high };

/// Tertile thresholds: score < 0.33 is low, < 0.66 mid, else high.
RiskLabel score_to_label(double score);
std::string to_string(RiskLabel label);  // "low risk" / "mid risk" / "high risk"

}  // namespace trustml::fuzzy

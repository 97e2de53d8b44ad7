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

#include "trustml/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "trustml/error.hpp"
#include "embedded.hpp"

namespace trustml::fuzzy {
namespace {

constexpr std::size_t kGridPoints = 1001;  // defuzzification grid over [0, 1]

void check_finite_input(double x, const char* what) {
  if (!std::isfinite(x)) {
    raise(ErrorCode::invalid_input, std::string(what) + " must be finite");
  }
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_breakpoint(const std::string& token, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    raise(ErrorCode::schema_violation,
          "rule file line " + std::to_string(line_no) +
              ": bad breakpoint '" + token + "'");
  }
}

}  // namespace

double MembershipFunction::evaluate(double x) const {
  if (!(x >= a)) return 0.0;
  if (x < b) return (x - a) / (b - a);
  if (x <= c) return 1.0;
  if (x < d) return (d - x) / (d - c);
  return 0.0;
}

const MembershipFunction* LinguisticVariable::find_term(
    std::string_view term) const {
  for (const auto& [label, fn] : terms) {
    if (label == term) return &fn;
  }
  return nullptr;
}

RuleBase::RuleBase(std::vector<LinguisticVariable> variables,
                   std::vector<FuzzyRule> rules)
    : variables_(std::move(variables)), rules_(std::move(rules)) {
  validate();
}

void RuleBase::validate() const {
  for (const auto& var : variables_) {
    for (const auto& [label, fn] : var.terms) {
      if (!(fn.a <= fn.b && fn.b <= fn.c && fn.c <= fn.d)) {
        raise(ErrorCode::invalid_config,
              "term " + var.name + "." + label +
                  " breakpoints must satisfy a <= b <= c <= d");
      }
    }
  }
  const LinguisticVariable* risk = nullptr;
  for (const auto& var : variables_) {
    if (var.name == "risk") risk = &var;
  }
  if (risk == nullptr) {
    raise(ErrorCode::invalid_config, "rule base lacks a 'risk' output variable");
  }
  std::set<int> ids;
  for (const auto& rule : rules_) {
    if (!ids.insert(rule.id).second) {
      raise(ErrorCode::invalid_config,
            "duplicate rule id " + std::to_string(rule.id));
    }
    if (rule.antecedent.empty()) {
      raise(ErrorCode::invalid_config,
            "rule " + std::to_string(rule.id) + " has an empty antecedent");
    }
    for (const auto& [var_name, term] : rule.antecedent) {
      const auto it =
          std::find_if(variables_.begin(), variables_.end(),
                       [&](const auto& v) { return v.name == var_name; });
      if (it == variables_.end() || it->find_term(term) == nullptr) {
        raise(ErrorCode::invalid_config,
              "rule " + std::to_string(rule.id) + " references unknown term " +
                  var_name + "=" + term);
      }
    }
    if (risk->find_term(rule.consequent) == nullptr) {
      raise(ErrorCode::invalid_config,
            "rule " + std::to_string(rule.id) + " has unknown consequent '" +
                rule.consequent + "'");
    }
  }
}

const LinguisticVariable& RuleBase::variable(std::string_view name) const {
  for (const auto& var : variables_) {
    if (var.name == name) return var;
  }
  raise(ErrorCode::invalid_input,
        "unknown linguistic variable '" + std::string(name) + "'");
}

RuleBase RuleBase::parse(std::string_view text) {
  std::vector<LinguisticVariable> variables;
  std::vector<FuzzyRule> rules;

  auto variable_slot = [&variables](const std::string& name) -> LinguisticVariable& {
    for (auto& var : variables) {
      if (var.name == name) return var;
    }
    variables.push_back(LinguisticVariable{name, {}});
    return variables.back();
  };

  std::istringstream stream{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;

    std::istringstream tokens(line);
    std::string head;
    tokens >> head;
    if (head == "term") {
      std::string var, label, a, b, c, d;
      if (!(tokens >> var >> label >> a >> b >> c >> d)) {
        raise(ErrorCode::schema_violation,
              "rule file line " + std::to_string(line_no) +
                  ": expected 'term <var> <label> <a> <b> <c> <d>'");
      }
      MembershipFunction fn{parse_breakpoint(a, line_no),
                            parse_breakpoint(b, line_no),
                            parse_breakpoint(c, line_no),
                            parse_breakpoint(d, line_no)};
      variable_slot(var).terms.emplace_back(label, fn);
    } else if (head == "rule") {
      // rule <id> <antecedent> <consequent> | <condition> | <outcome>
      std::vector<std::string> parts;
      std::string rest;
      std::getline(tokens, rest);
      std::size_t start = 0;
      while (true) {
        const auto bar = rest.find('|', start);
        parts.push_back(trim(rest.substr(start, bar - start)));
        if (bar == std::string::npos) break;
        start = bar + 1;
      }
      if (parts.size() != 3) {
        raise(ErrorCode::schema_violation,
              "rule file line " + std::to_string(line_no) +
                  ": expected two '|' separators");
      }
      std::istringstream spec(parts[0]);
      FuzzyRule rule;
      std::string antecedent;
      if (!(spec >> rule.id >> antecedent >> rule.consequent)) {
        raise(ErrorCode::schema_violation,
              "rule file line " + std::to_string(line_no) +
                  ": expected '<id> <antecedent> <consequent>'");
      }
      std::size_t pos = 0;
      while (pos <= antecedent.size()) {
        auto amp = antecedent.find('&', pos);
        if (amp == std::string::npos) amp = antecedent.size();
        const std::string clause = antecedent.substr(pos, amp - pos);
        const auto eq = clause.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == clause.size()) {
          raise(ErrorCode::schema_violation,
                "rule file line " + std::to_string(line_no) +
                    ": bad antecedent clause '" + clause + "'");
        }
        rule.antecedent.emplace_back(clause.substr(0, eq), clause.substr(eq + 1));
        pos = amp + 1;
      }
      rule.condition_text = parts[1];
      rule.outcome_text = parts[2];
      rules.push_back(std::move(rule));
    } else {
      raise(ErrorCode::schema_violation,
            "rule file line " + std::to_string(line_no) +
                ": unknown directive '" + head + "'");
    }
  }
  return RuleBase(std::move(variables), std::move(rules));
}

RuleBase RuleBase::load(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    raise(ErrorCode::invalid_input, "cannot open rule file '" + path + "'");
  }
  std::ostringstream content;
  content << file.rdbuf();
  return parse(content.str());
}

const RuleBase& RuleBase::builtin() {
  static const RuleBase base = parse(embedded::fuzzy_rules_text());
  return base;
}

std::map<std::string, double> fuzzify(const LinguisticVariable& variable,
                                      double x) {
  check_finite_input(x, variable.name.c_str());
  std::map<std::string, double> activations;
  for (const auto& [label, fn] : variable.terms) {
    activations[label] = fn.evaluate(x);
  }
  return activations;
}

Engine::Engine(RuleBase base) : base_(std::move(base)) {}

std::vector<FiredRule> Engine::fired_rules(double age, double sbp, double bs,
                                           double hr) const {
  check_finite_input(age, "age");
  check_finite_input(sbp, "sbp");
  check_finite_input(bs, "bs");
  check_finite_input(hr, "hr");
  const std::map<std::string, double> inputs = {
      {"age", age}, {"sbp", sbp}, {"bs", bs}, {"hr", hr}};

  std::vector<FiredRule> fired;
  for (const auto& rule : base_.rules()) {
    double activation = 1.0;
    for (const auto& [var_name, term] : rule.antecedent) {
      const auto input = inputs.find(var_name);
      if (input == inputs.end()) {
        raise(ErrorCode::invalid_config,
              "rule " + std::to_string(rule.id) +
                  " uses non-input variable '" + var_name + "'");
      }
      const MembershipFunction* fn = base_.variable(var_name).find_term(term);
      activation = std::min(activation, fn->evaluate(input->second));
      if (activation == 0.0) break;
    }
    if (activation > 0.0) {
      fired.push_back(FiredRule{rule.id, rule.condition_text,
                                rule.outcome_text, activation});
    }
  }
  std::sort(fired.begin(), fired.end(), [](const FiredRule& x, const FiredRule& y) {
    if (x.activation != y.activation) return x.activation > y.activation;
    return x.id < y.id;
  });
  return fired;
}

double Engine::risk_score(double age, double sbp, double bs, double hr) const {
  const auto fired = fired_rules(age, sbp, bs, hr);
  if (fired.empty()) return 0.5;  // nothing fired: report maximal uncertainty

  // Activation per consequent term (rules clip their term at their
  // activation; max aggregation makes rule order irrelevant).
  std::map<std::string, double> clip_levels;
  for (const auto& rule : base_.rules()) {
    for (const auto& f : fired) {
      if (f.id == rule.id) {
        double& level = clip_levels[rule.consequent];
        level = std::max(level, f.activation);
      }
    }
  }

  const LinguisticVariable& risk = base_.variable("risk");
  double weighted = 0.0;
  double area = 0.0;
  for (std::size_t i = 0; i < kGridPoints; ++i) {
    const double x =
        static_cast<double>(i) / static_cast<double>(kGridPoints - 1);
    double membership = 0.0;
    for (const auto& [term, level] : clip_levels) {
      membership =
          std::max(membership, std::min(level, risk.find_term(term)->evaluate(x)));
    }
    weighted += x * membership;
    area += membership;
  }
  if (area == 0.0) return 0.5;
  return weighted / area;
}

const Engine& default_engine() {
  static const Engine engine{RuleBase::builtin()};
  return engine;
}

std::vector<FiredRule> get_fired_rules(double age, double sbp, double bs,
                                       double hr) {
  return default_engine().fired_rules(age, sbp, bs, hr);
}

double risk_score(double age, double sbp, double bs, double hr) {
  return default_engine().risk_score(age, sbp, bs, hr);
}

RiskLabel score_to_label(double score) {
  if (!(score >= 0.0 && score <= 1.0)) {
    raise(ErrorCode::invalid_input, "score must lie in [0, 1]");
  }
  if (score < 0.33) return RiskLabel::low;
  if (score < 0.66) return RiskLabel::mid;
  return RiskLabel::high;
}

std::string to_string(RiskLabel label) {
  switch (label) {
    case RiskLabel::low: return "low risk";
    case RiskLabel::mid: return "mid risk";
    case RiskLabel::high: return "high risk";
  }
  return "high risk";
}

}  // namespace trustml::fuzzy

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

#include <algorithm>
#include <cmath>
#include <limits>

#include "trustml/error.hpp"
#include "trustml/fuzzy.hpp"
#include "trustml/rng.hpp"

using namespace trustml;
using fuzzy::FiredRule;
using fuzzy::FuzzyRule;
using fuzzy::LinguisticVariable;
using fuzzy::MembershipFunction;
using fuzzy::RuleBase;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const FiredRule* find_rule(const std::vector<FiredRule>& fired, int id) {
  for (const auto& rule : fired) {
    if (rule.id == id) return &rule;
  }
  return nullptr;
}

}  // namespace

TEST_CASE("trapezoid evaluation") {
  const MembershipFunction high_bp{130, 140, kInf, kInf};
  CHECK(high_bp.evaluate(145) == 1.0);
  CHECK(high_bp.evaluate(129) == 0.0);
  CHECK(high_bp.evaluate(135) == 0.5);
  CHECK(high_bp.evaluate(140) == 1.0);  // plateau boundary

  const MembershipFunction high_hr{80, 100, kInf, kInf};
  CHECK(high_hr.evaluate(88) == 0.4);

  const MembershipFunction low{0, 0, 4, 5};
  CHECK(low.evaluate(-1) == 0.0);
  CHECK(low.evaluate(0) == 1.0);
  CHECK(low.evaluate(4.5) == 0.5);
  CHECK(low.evaluate(5) == 0.0);
}

TEST_CASE("membership stays within the unit interval on random trapezoids") {
  SeededRng rng(51);
  for (int trial = 0; trial < 500; ++trial) {
    double pts[4];
    for (double& p : pts) p = rng.uniform(-10.0, 10.0);
    std::sort(pts, pts + 4);
    const MembershipFunction fn{pts[0], pts[1], pts[2], pts[3]};
    const double x = rng.uniform(-12.0, 12.0);
    const double mu = fn.evaluate(x);
    CHECK(mu >= 0.0);
    CHECK(mu <= 1.0);
  }
}

TEST_CASE("fuzzify evaluates every term") {
  const auto& sbp = RuleBase::builtin().variable("sbp");
  const auto activations = fuzzy::fuzzify(sbp, 145.0);
  CHECK(activations.at("High") == 1.0);
  CHECK(activations.at("Low") == 0.0);
  CHECK(activations.size() == 3);
  CHECK_THROWS_AS(fuzzy::fuzzify(sbp, std::nan("")), Error);
}

TEST_CASE("the documented clinical case fires rules 1 and 5") {
  const auto fired = fuzzy::get_fired_rules(42, 145, 12.0, 88);

  const FiredRule* rule1 = find_rule(fired, 1);
  REQUIRE(rule1 != nullptr);
  CHECK(rule1->condition == "High BP AND High Blood Sugar");
  CHECK(rule1->outcome == "HIGH RISK");
  CHECK(rule1->activation == 1.0);

  const FiredRule* rule5 = find_rule(fired, 5);
  REQUIRE(rule5 != nullptr);
  CHECK(rule5->condition == "High Heart Rate AND High BP");
  CHECK(rule5->outcome == "HIGH RISK");
  CHECK(rule5->activation == 0.4);

  // sorted by activation descending, ties by id ascending
  for (std::size_t i = 1; i < fired.size(); ++i) {
    const bool ordered =
        fired[i - 1].activation > fired[i].activation ||
        (fired[i - 1].activation == fired[i].activation &&
         fired[i - 1].id < fired[i].id);
    CHECK(ordered);
  }
  CHECK(fired.front().id == 1);
}

TEST_CASE("mid-normal vitals fire only a LOW rule") {
  const auto fired = fuzzy::get_fired_rules(25, 110, 5.0, 70);
  REQUIRE_FALSE(fired.empty());
  for (const auto& rule : fired) {
    CHECK(rule.outcome != "HIGH RISK");
  }
  CHECK(find_rule(fired, 7) != nullptr);
}

TEST_CASE("below the High-BP support no High-BP rule fires") {
  const auto fired = fuzzy::get_fired_rules(42, 129, 12.0, 88);
  CHECK(find_rule(fired, 1) == nullptr);
  CHECK(find_rule(fired, 2) == nullptr);
  CHECK(find_rule(fired, 5) == nullptr);
}

TEST_CASE("every rule fires for at least one documented input") {
  struct Case {
    int rule_id;
    double age, sbp, bs, hr;
  };
  const Case cases[] = {
      {1, 42, 145, 12.0, 88},  // High BP and High BS
      {2, 42, 145, 12.0, 88},  // High Age and High BP
      {3, 25, 110, 12.0, 70},  // High BS alone
      {4, 25, 85, 3.5, 70},    // Low BP, Low BS, Normal HR
      {5, 42, 145, 12.0, 88},  // High HR and High BP
      {6, 42, 110, 12.0, 70},  // High Age and High BS
      {7, 25, 110, 6.0, 70},   // Normal everything
  };
  for (const auto& c : cases) {
    const auto fired = fuzzy::get_fired_rules(c.age, c.sbp, c.bs, c.hr);
    CHECK_MESSAGE(find_rule(fired, c.rule_id) != nullptr,
                  "rule ", c.rule_id, " did not fire");
  }
}

TEST_CASE("risk score for the single LOW-rule case is the LOW centroid") {
  // only rule 4 fires (at 1.0), so the score is the centroid of the LOW
  // term (0,0,0.2,0.4): 0.1556 by direct integration
  const auto fired = fuzzy::get_fired_rules(25, 85, 3.5, 70);
  REQUIRE(fired.size() == 1);
  CHECK(fired[0].id == 4);
  CHECK(fired[0].activation == 1.0);
  const double score = fuzzy::risk_score(25, 85, 3.5, 70);
  CHECK(score == doctest::Approx(0.155556).epsilon(2e-3));
  CHECK(fuzzy::score_to_label(score) == fuzzy::RiskLabel::low);
}

TEST_CASE("no fired rule yields the 0.5 uncertainty score") {
  // a deliberately narrow rule base that nothing in range activates
  std::vector<LinguisticVariable> variables;
  variables.push_back(LinguisticVariable{
      "sbp", {{"Narrow", MembershipFunction{500, 501, 502, 503}}}});
  variables.push_back(LinguisticVariable{
      "risk", {{"HIGH", MembershipFunction{0.6, 0.8, 1, 1}}}});
  std::vector<FuzzyRule> rules;
  rules.push_back(FuzzyRule{1, {{"sbp", "Narrow"}}, "HIGH", "x", "y"});
  const fuzzy::Engine engine{RuleBase(std::move(variables), std::move(rules))};
  CHECK(engine.fired_rules(30, 120, 6, 70).empty());
  CHECK(engine.risk_score(30, 120, 6, 70) == 0.5);
}

TEST_CASE("documented clinical case maps to high risk") {
  const double score = fuzzy::risk_score(42, 145, 12.0, 88);
  CHECK(score > 0.66);
  CHECK(fuzzy::score_to_label(score) == fuzzy::RiskLabel::high);
}

TEST_CASE("score_to_label thresholds") {
  CHECK(fuzzy::score_to_label(0.0) == fuzzy::RiskLabel::low);
  CHECK(fuzzy::score_to_label(0.3299) == fuzzy::RiskLabel::low);
  CHECK(fuzzy::score_to_label(0.33) == fuzzy::RiskLabel::mid);
  CHECK(fuzzy::score_to_label(0.5) == fuzzy::RiskLabel::mid);
  CHECK(fuzzy::score_to_label(0.66) == fuzzy::RiskLabel::high);
  CHECK(fuzzy::score_to_label(0.9) == fuzzy::RiskLabel::high);
  CHECK(fuzzy::score_to_label(1.0) == fuzzy::RiskLabel::high);
  CHECK_THROWS_AS(fuzzy::score_to_label(-0.01), Error);
  CHECK_THROWS_AS(fuzzy::score_to_label(1.01), Error);
  CHECK(fuzzy::to_string(fuzzy::RiskLabel::mid) == "mid risk");
}

TEST_CASE("raising sbp never lowers rule 1 activation") {
  double previous = -1.0;
  for (double sbp = 100; sbp <= 200; sbp += 0.5) {
    const auto fired = fuzzy::get_fired_rules(42, sbp, 12.0, 88);
    const FiredRule* rule1 = find_rule(fired, 1);
    const double activation = rule1 ? rule1->activation : 0.0;
    CHECK(activation >= previous);
    previous = activation;
  }
}

TEST_CASE("risk score is invariant under rule reordering") {
  const RuleBase& base = RuleBase::builtin();
  std::vector<FuzzyRule> reversed(base.rules().rbegin(), base.rules().rend());
  const fuzzy::Engine shuffled{RuleBase(base.variables(), std::move(reversed))};

  SeededRng rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    const double age = rng.uniform(15, 60);
    const double sbp = rng.uniform(70, 200);
    const double bs = rng.uniform(2, 20);
    const double hr = rng.uniform(40, 140);
    CHECK(shuffled.risk_score(age, sbp, bs, hr) ==
          fuzzy::risk_score(age, sbp, bs, hr));
  }
}

TEST_CASE("any in-range input activates at least one term per variable") {
  const RuleBase& base = RuleBase::builtin();
  const struct {
    const char* name;
    double lo, hi;
  } ranges[] = {
      {"age", 10, 70}, {"sbp", 60, 250}, {"bs", 1, 30}, {"hr", 30, 220}};
  SeededRng rng(71);
  for (const auto& range : ranges) {
    const auto& variable = base.variable(range.name);
    for (int trial = 0; trial < 200; ++trial) {
      const double x = rng.uniform(range.lo, range.hi);
      double best = 0.0;
      for (const auto& [term, level] : fuzzy::fuzzify(variable, x)) {
        best = std::max(best, level);
      }
      CHECK(best > 0.0);
    }
  }
}

TEST_CASE("the bundled rule table parses to the builtin behavior") {
  const RuleBase loaded =
      RuleBase::load(std::string(TRUSTML_SOURCE_DATA_DIR) + "/fuzzy_rules.txt");
  CHECK(loaded.rules().size() == RuleBase::builtin().rules().size());
  const fuzzy::Engine engine{loaded};
  const auto fired = engine.fired_rules(42, 145, 12.0, 88);
  const auto builtin_fired = fuzzy::get_fired_rules(42, 145, 12.0, 88);
  REQUIRE(fired.size() == builtin_fired.size());
  for (std::size_t i = 0; i < fired.size(); ++i) {
    CHECK(fired[i].id == builtin_fired[i].id);
    CHECK(fired[i].activation == builtin_fired[i].activation);
    CHECK(fired[i].condition == builtin_fired[i].condition);
  }
  CHECK(engine.risk_score(42, 145, 12.0, 88) ==
        fuzzy::risk_score(42, 145, 12.0, 88));
}

TEST_CASE("rule table parse errors carry line context") {
  CHECK_THROWS_WITH_AS(RuleBase::parse("term sbp High 130"),
                       doctest::Contains("line 1"), Error);
  CHECK_THROWS_AS(RuleBase::parse("bogus directive here"), Error);
  CHECK_THROWS_AS(
      RuleBase::parse("term risk LOW 0 0 0.2 0.4\n"
                      "rule 1 sbp=Missing LOW | a | b"),
      Error);
  // breakpoints out of order
  CHECK_THROWS_AS(RuleBase::parse("term sbp Bad 5 4 3 2"), Error);
  CHECK_THROWS_AS(RuleBase::load("/nonexistent/rules.txt"), Error);
}

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
#include <map>
#include <set>

#include "support/fairness_oracle.hpp"
#include "trustml/error.hpp"
#include "trustml/fairness.hpp"
#include "trustml/rng.hpp"

using namespace trustml;
using fairness::FairnessReport;
using fairness::LabeledOutcomes;
using testing::brute_force_fairness;
using testing::random_fairness_instance;

namespace {

LabeledOutcomes make_outcomes(const std::vector<int>& preds,
                              const std::vector<std::string>& groups) {
  return LabeledOutcomes{preds, std::nullopt, groups};
}

}  // namespace

TEST_CASE("demographic parity difference on worked examples") {
  // identical all-positive rates
  CHECK(fairness::demographic_parity_diff(make_outcomes(
            {1, 1, 1, 1}, {"A", "A", "B", "B"})) == 0.0);

  // rates 0.6 vs 0.2
  const LabeledOutcomes two = make_outcomes(
      {1, 1, 1, 0, 0, 1, 0, 0, 0, 0},
      {"A", "A", "A", "A", "A", "B", "B", "B", "B", "B"});
  CHECK(fairness::demographic_parity_diff(two) == doctest::Approx(0.4).epsilon(1e-12));

  // three groups: worst pair 0.9 - 0.2
  LabeledOutcomes three;
  auto add_group = [&three](const std::string& name, int positives, int total) {
    for (int i = 0; i < total; ++i) {
      three.predictions.push_back(i < positives ? 1 : 0);
      three.groups.push_back(name);
    }
  };
  add_group("a", 2, 10);
  add_group("b", 5, 10);
  add_group("c", 9, 10);
  CHECK(fairness::demographic_parity_diff(three) ==
        doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("demographic parity error paths") {
  CHECK_THROWS_WITH_AS(
      fairness::demographic_parity_diff(make_outcomes({}, {})),
      doctest::Contains("empty"), Error);
  CHECK_THROWS_AS(
      fairness::demographic_parity_diff(make_outcomes({1, 0}, {"A"})), Error);
  CHECK_THROWS_AS(
      fairness::demographic_parity_diff(make_outcomes({1, 0}, {"A", "A"})),
      Error);
  CHECK_THROWS_AS(
      fairness::demographic_parity_diff(make_outcomes({1, 2}, {"A", "B"})),
      Error);
  try {
    fairness::demographic_parity_diff(make_outcomes({1, 1}, {"A", "A"}));
    FAIL("expected insufficient_groups");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::insufficient_groups);
  }
}

TEST_CASE("equalized odds difference on worked examples") {
  // perfect classifier
  LabeledOutcomes perfect;
  perfect.predictions = {1, 0, 1, 0};
  perfect.truths = std::vector<int>{1, 0, 1, 0};
  perfect.groups = {"A", "A", "B", "B"};
  CHECK(fairness::equalized_odds_diff(perfect) == 0.0);

  // hand-built confusion matrices: TPR gap 0.5, FPR gap 0.5
  LabeledOutcomes mixed;
  mixed.truths = std::vector<int>{1, 1, 0, 0, 1, 1, 0, 0};
  mixed.predictions = {1, 1, 0, 0, 1, 0, 1, 0};
  mixed.groups = {"A", "A", "A", "A", "B", "B", "B", "B"};
  CHECK(fairness::equalized_odds_diff(mixed) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("equalized odds degenerate and missing-truth errors") {
  LabeledOutcomes no_truths = make_outcomes({1, 0, 1, 0}, {"A", "A", "B", "B"});
  try {
    fairness::equalized_odds_diff(no_truths);
    FAIL("expected missing_truths");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::missing_truths);
  }

  LabeledOutcomes degenerate;
  degenerate.predictions = {1, 0, 1, 0};
  degenerate.truths = std::vector<int>{1, 1, 1, 0};  // group A has no negatives
  degenerate.groups = {"A", "A", "B", "B"};
  try {
    fairness::equalized_odds_diff(degenerate);
    FAIL("expected degenerate_group");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::degenerate_group);
    CHECK(std::string(e.what()).find("'A'") != std::string::npos);
    CHECK(std::string(e.what()).find("FPR") != std::string::npos);
  }
}

TEST_CASE("disparate impact on worked examples") {
  // 23 of 100 vs 100 of 100: exactly 0.23
  LabeledOutcomes headline;
  for (int i = 0; i < 100; ++i) {
    headline.predictions.push_back(i < 23 ? 1 : 0);
    headline.groups.push_back("A");
  }
  for (int i = 0; i < 100; ++i) {
    headline.predictions.push_back(1);
    headline.groups.push_back("B");
  }
  CHECK(fairness::disparate_impact(headline) == 0.23);

  CHECK(fairness::disparate_impact(make_outcomes(
            {1, 0, 1, 0}, {"A", "A", "B", "B"})) == 1.0);

  // rates 0.4 and 0.8
  LabeledOutcomes halves;
  for (int i = 0; i < 10; ++i) {
    halves.predictions.push_back(i < 4 ? 1 : 0);
    halves.groups.push_back("A");
  }
  for (int i = 0; i < 10; ++i) {
    halves.predictions.push_back(i < 8 ? 1 : 0);
    halves.groups.push_back("B");
  }
  CHECK(fairness::disparate_impact(halves) == 0.5);

  // all-zero rates: perfect parity by convention
  CHECK(fairness::disparate_impact(make_outcomes(
            {0, 0, 0, 0}, {"A", "A", "B", "B"})) == 1.0);
  // one-sided zero
  CHECK(fairness::disparate_impact(make_outcomes(
            {0, 0, 1, 1}, {"A", "A", "B", "B"})) == 0.0);
}

TEST_CASE("intersectional fairness on worked examples") {
  // sex x age, uniform 0.5 rates
  std::vector<int> preds;
  std::vector<std::string> sex, age;
  auto add_cell = [&](const std::string& s, const std::string& a, int pos,
                      int total) {
    for (int i = 0; i < total; ++i) {
      preds.push_back(i < pos ? 1 : 0);
      sex.push_back(s);
      age.push_back(a);
    }
  };
  add_cell("M", "Y", 5, 10);
  add_cell("M", "O", 5, 10);
  add_cell("F", "Y", 5, 10);
  add_cell("F", "O", 5, 10);
  FairnessReport uniform =
      fairness::intersectional_fairness(preds, std::nullopt, {sex, age});
  CHECK(uniform.dpd == 0.0);
  CHECK(uniform.di == 1.0);
  CHECK(uniform.group_sizes.size() == 4);
  CHECK(uniform.per_group_positive_rates.count("M|Y") == 1);

  // worst pair 0.8 vs 0.2
  preds.clear();
  sex.clear();
  age.clear();
  add_cell("M", "Y", 8, 10);
  add_cell("M", "O", 5, 10);
  add_cell("F", "Y", 5, 10);
  add_cell("F", "O", 2, 10);
  FairnessReport skewed =
      fairness::intersectional_fairness(preds, std::nullopt, {sex, age});
  CHECK(skewed.dpd == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(skewed.di == 0.25);

  // min_group_size exclusion is reported
  preds.clear();
  sex.clear();
  age.clear();
  add_cell("M", "Y", 5, 10);
  add_cell("F", "O", 2, 10);
  add_cell("F", "Y", 1, 3);
  FairnessReport excluded =
      fairness::intersectional_fairness(preds, std::nullopt, {sex, age}, 5);
  CHECK(excluded.excluded_groups == std::vector<std::string>{"F|Y"});
  CHECK(excluded.group_sizes.at("F|Y") == 3);
  CHECK(excluded.per_group_positive_rates.count("F|Y") == 0);

  // every composite group excluded
  CHECK_THROWS_AS(
      fairness::intersectional_fairness(preds, std::nullopt, {sex, age}, 100),
      Error);
}

TEST_CASE("fairness summary matches the individual metrics bit for bit") {
  SeededRng rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    const LabeledOutcomes o = random_fairness_instance(rng);
    const FairnessReport report = fairness::fairness_summary(o);
    CHECK(report.dpd == fairness::demographic_parity_diff(o));
    CHECK(report.di == fairness::disparate_impact(o));
    REQUIRE(report.eod.has_value());
    CHECK(*report.eod == fairness::equalized_odds_diff(o));

    std::size_t total = 0;
    for (const auto& [g, n] : report.group_sizes) total += n;
    CHECK(total == o.predictions.size());
  }

  // without truths: eod absent, the rest present
  const LabeledOutcomes no_truths =
      make_outcomes({1, 0, 0, 1}, {"A", "A", "B", "B"});
  const FairnessReport report = fairness::fairness_summary(no_truths);
  CHECK_FALSE(report.eod.has_value());
  CHECK(report.dpd == fairness::demographic_parity_diff(no_truths));
  CHECK(report.di == fairness::disparate_impact(no_truths));
}

TEST_CASE("randomized brute-force oracle agreement") {
  SeededRng rng(20260810);
  int equal_rate_cases = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const bool equalize = trial % 5 == 0;
    const LabeledOutcomes o = random_fairness_instance(rng, equalize);
    const testing::FairnessOracle oracle = brute_force_fairness(o);

    CHECK(std::fabs(fairness::demographic_parity_diff(o) - oracle.dpd) <= 1e-12);
    CHECK(std::fabs(fairness::disparate_impact(o) - oracle.di) <= 1e-12);
    REQUIRE(oracle.eod_defined);
    CHECK(std::fabs(fairness::equalized_odds_diff(o) - oracle.eod) <= 1e-12);

    // dpd == 0 iff di == 1 whenever some group rate is nonzero
    const double dpd = fairness::demographic_parity_diff(o);
    const double di = fairness::disparate_impact(o);
    const bool any_positive =
        std::any_of(o.predictions.begin(), o.predictions.end(),
                    [](int p) { return p == 1; });
    if (any_positive) {
      CHECK((dpd == 0.0) == (di == 1.0));
    }
    if (dpd == 0.0) ++equal_rate_cases;
  }
  CHECK(equal_rate_cases > 50);  // the generator really exercises the dpd==0 branch
}

TEST_CASE("group relabeling and swapping leave metrics unchanged") {
  SeededRng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const LabeledOutcomes o = random_fairness_instance(rng);
    LabeledOutcomes renamed = o;
    for (auto& g : renamed.groups) g = "prefix-" + g + "-suffix";

    CHECK(fairness::demographic_parity_diff(o) ==
          fairness::demographic_parity_diff(renamed));
    CHECK(fairness::disparate_impact(o) == fairness::disparate_impact(renamed));
    CHECK(fairness::equalized_odds_diff(o) ==
          fairness::equalized_odds_diff(renamed));

    // swapping two group identities
    LabeledOutcomes swapped = o;
    for (auto& g : swapped.groups) {
      if (g == "g0") g = "g1";
      else if (g == "g1") g = "g0";
    }
    CHECK(fairness::demographic_parity_diff(o) ==
          fairness::demographic_parity_diff(swapped));
    CHECK(fairness::disparate_impact(o) == fairness::disparate_impact(swapped));
  }
}

TEST_CASE("intersectional single-column passthrough equals the plain metrics") {
  SeededRng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const LabeledOutcomes o = random_fairness_instance(rng);
    const FairnessReport report =
        fairness::intersectional_fairness(o.predictions, o.truths, {o.groups});
    CHECK(report.dpd == fairness::demographic_parity_diff(o));
    CHECK(report.di == fairness::disparate_impact(o));
    CHECK(*report.eod == fairness::equalized_odds_diff(o));
  }
}

TEST_CASE("metric ranges hold on random inputs") {
  SeededRng rng(31337);
  for (int trial = 0; trial < 300; ++trial) {
    const LabeledOutcomes o = random_fairness_instance(rng);
    const double dpd = fairness::demographic_parity_diff(o);
    const double di = fairness::disparate_impact(o);
    const double eod = fairness::equalized_odds_diff(o);
    CHECK(dpd >= 0.0);
    CHECK(dpd <= 1.0);
    CHECK(di >= 0.0);
    CHECK(di <= 1.0);
    CHECK(eod >= 0.0);
    CHECK(eod <= 1.0);
  }
}

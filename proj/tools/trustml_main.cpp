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

// Batch CLI over the library: fairness audits, federated simulation,
// fuzzy explanations, dengue triage, aid ranking and synthetic data
// generation. Standard output carries only the documented payloads;
// diagnostics go to standard error. Exit codes: 0 success, 2 usage
// error, 3 input/schema error, 4 internal numerical error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trustml/data_io.hpp"
#include "trustml/equity.hpp"
#include "trustml/error.hpp"
#include "trustml/fairness.hpp"
#include "trustml/fedsim.hpp"
#include "trustml/fuzzy.hpp"
#include "trustml/jsonout.hpp"
#include "trustml/privacy.hpp"
#include "trustml/triage.hpp"

namespace {

using namespace trustml;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_config:
      return 2;
    case ErrorCode::training_diverged:
      return 4;
    default:
      return 3;  // input and schema problems
  }
}

// Input files resolve against TRUSTML_DATA_DIR when not found as given.
std::string resolve_input(const std::string& path) {
  namespace fs = std::filesystem;
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("TRUSTML_DATA_DIR")) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  return path;
}

privacy::PrivacyBudget parse_budget(const std::string& epsilon, double delta) {
  if (epsilon == "inf" || epsilon == "infinite") {
    privacy::PrivacyBudget budget = privacy::PrivacyBudget::noiseless();
    budget.delta = delta;
    return budget;
  }
  try {
    std::size_t used = 0;
    const double value = std::stod(epsilon, &used);
    if (used != epsilon.size()) throw std::invalid_argument(epsilon);
    return privacy::PrivacyBudget{value, delta};
  } catch (const std::exception&) {
    raise(ErrorCode::invalid_config,
          "--epsilon must be a number or 'inf', got '" + epsilon + "'");
  }
}

struct AuditOptions {
  std::string input;
  std::string pred_col;
  std::vector<std::string> group_cols;
  std::string truth_col;
  std::size_t min_group_size = 1;
};

void run_audit(const AuditOptions& opt) {
  data_io::Schema schema{"audit", {}};
  schema.columns.push_back(
      {opt.pred_col, data_io::ColumnKind::numeric, true, 0.0, 1.0, {}});
  if (!opt.truth_col.empty()) {
    schema.columns.push_back(
        {opt.truth_col, data_io::ColumnKind::numeric, true, 0.0, 1.0, {}});
  }
  for (const auto& col : opt.group_cols) {
    schema.columns.push_back(
        {col, data_io::ColumnKind::categorical, true, {}, {}, {}});
  }

  const auto table =
      data_io::parse_csv(resolve_input(opt.input), schema, /*fail_fast=*/true);
  for (const auto& warning : table.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }

  auto binary_column = [&table](const std::string& name) {
    std::vector<int> values;
    for (double v : table.numeric_column(name)) {
      if (v != 0.0 && v != 1.0) {
        raise(ErrorCode::invalid_input,
              "column '" + name + "' must contain only 0 or 1");
      }
      values.push_back(static_cast<int>(v));
    }
    return values;
  };

  const std::vector<int> preds = binary_column(opt.pred_col);
  std::optional<std::vector<int>> truths;
  if (!opt.truth_col.empty()) truths = binary_column(opt.truth_col);

  std::vector<std::vector<std::string>> columns;
  for (const auto& col : opt.group_cols) {
    columns.push_back(table.string_column(col));
  }

  const fairness::FairnessReport report = fairness::intersectional_fairness(
      preds, truths, columns, opt.min_group_size);

  JsonWriter json;
  json.begin_object();
  json.key("dpd").value(report.dpd);
  if (report.eod) json.key("eod").value(*report.eod);
  json.key("di").value(report.di);
  json.key("per_group_positive_rates").begin_object();
  for (const auto& [group, rate] : report.per_group_positive_rates) {
    json.key(group).value(rate);
  }
  json.end_object();
  json.key("group_sizes").begin_object();
  for (const auto& [group, size] : report.group_sizes) {
    json.key(group).value(static_cast<std::uint64_t>(size));
  }
  json.end_object();
  json.key("excluded_groups").begin_array();
  for (const auto& group : report.excluded_groups) json.value(group);
  json.end_array();
  json.end_object();
  std::cout << json.str() << "\n";
}

struct FedsimOptions {
  std::string mode = "dense";
  double sparsity = 0.9;
  std::string epsilon = "inf";
  double delta = 1e-5;
  double clip = 10.0;
  std::size_t rounds = 30;
  std::size_t clients = 4;
  std::uint64_t seed = 1;
  std::size_t samples = 500;
  std::size_t features = 10;
  std::size_t local_epochs = 5;
  double learning_rate = 0.5;
  double heterogeneity = 0.0;
};

void run_fedsim(const FedsimOptions& opt) {
  fedsim::FederatedConfig config;
  config.num_clients = opt.clients;
  config.rounds = opt.rounds;
  config.local_epochs = opt.local_epochs;
  config.learning_rate = opt.learning_rate;
  config.sparsity = opt.sparsity;
  config.budget = parse_budget(opt.epsilon, opt.delta);
  config.clip = privacy::ClipConfig{opt.clip};
  config.seed = opt.seed;
  config.samples_per_client = opt.samples;
  config.num_features = opt.features;
  config.heterogeneity = opt.heterogeneity;

  const fedsim::AggregationMode mode =
      opt.mode == "dense" ? fedsim::AggregationMode::dense
      : opt.mode == "sparse" ? fedsim::AggregationMode::sparse
                             : fedsim::AggregationMode::sparse_dp;

  const fedsim::FederatedRun run = fedsim::run_federated(config, mode);
  for (const auto& m : run.history) {
    JsonWriter json;
    json.begin_object();
    json.key("round").value(static_cast<std::uint64_t>(m.round));
    json.key("macro_f1").value(m.macro_f1);
    json.key("bytes_sent").value(m.bytes_sent);
    json.key("global_weights_norm").value(m.global_weights_norm);
    json.end_object();
    std::cout << json.str() << "\n";
  }
}

struct ExplainOptions {
  double age = 0, sbp = 0, bs = 0, hr = 0;
  std::string rules_path;
};

void run_explain(const ExplainOptions& opt) {
  std::optional<fuzzy::Engine> custom;
  if (!opt.rules_path.empty()) {
    custom.emplace(fuzzy::RuleBase::load(resolve_input(opt.rules_path)));
  }
  const fuzzy::Engine& engine = custom ? *custom : fuzzy::default_engine();

  const auto fired = engine.fired_rules(opt.age, opt.sbp, opt.bs, opt.hr);
  if (fired.empty()) {
    std::cout << "No rules fired.\n";
  }
  char line[256];
  for (const auto& rule : fired) {
    std::snprintf(line, sizeof(line), "Rule %d: %s -> %s (activation=%.3f)\n",
                  rule.id, rule.condition.c_str(), rule.outcome.c_str(),
                  rule.activation);
    std::cout << line;
  }
  const double score = engine.risk_score(opt.age, opt.sbp, opt.bs, opt.hr);
  std::cout << "risk score: " << format_number(score) << "\n";
  std::cout << "risk label: " << fuzzy::to_string(fuzzy::score_to_label(score))
            << "\n";
}

struct TriageOptions {
  double age = 0;
  std::string gender;
  std::string area_type;
  std::string district;
  std::string house_type;
  std::string language = "english";
  std::string model_path;
};

void run_triage(const TriageOptions& opt) {
  std::optional<triage::DecisionTree> custom;
  if (!opt.model_path.empty()) {
    custom = triage::DecisionTree::load(resolve_input(opt.model_path));
  }
  const triage::DecisionTree& tree =
      custom ? *custom : triage::reference_tree();

  std::optional<std::string> house;
  if (!opt.house_type.empty()) house = opt.house_type;

  const triage::TriageResult result = triage::assess_dengue_risk(
      opt.age, triage::gender_from_string(opt.gender),
      triage::area_type_from_string(opt.area_type), opt.district,
      triage::language_from_string(opt.language), tree, house);

  JsonWriter json;
  json.begin_object();
  json.key("prediction").value(triage::to_string(result.prediction));
  json.key("confidence").value(result.confidence);
  json.key("recommendation").value(result.recommendation);
  json.key("rerouted").value(result.rerouted);
  json.key("language").value(triage::to_string(result.language));
  json.end_object();
  std::cout << json.str() << "\n";
}

struct RankAidOptions {
  std::string input;
  double lambda = 1.0;
  std::uint64_t seed = 1;
  bool verbose = false;
};

void run_rank_aid(const RankAidOptions& opt) {
  const auto table = data_io::parse_csv(resolve_input(opt.input),
                                        data_io::pdna_schema(),
                                        /*fail_fast=*/true);
  const auto records = data_io::pdna_from_table(table);
  const auto targets = data_io::vulnerability_targets(records);

  equity::DebiasConfig config = equity::reference_training_config();
  config.seed = opt.seed;
  config.lambda = 0.0;
  const equity::FairModel baseline =
      equity::train_fair_regressor(records, targets, config);
  config.lambda = opt.lambda;
  const equity::FairModel fair =
      equity::train_fair_regressor(records, targets, config);

  const auto baseline_ranking = generate_priority_ranking(records, baseline);
  const auto fair_ranking = generate_priority_ranking(records, fair);
  const auto shift = equity::ranking_shift(baseline_ranking, fair_ranking);

  std::vector<double> baseline_scores, fair_scores;
  std::vector<equity::RegionType> regions;
  for (const auto& r : records) {
    baseline_scores.push_back(baseline.priority_score(r));
    fair_scores.push_back(fair.priority_score(r));
    regions.push_back(r.region_type);
  }
  const double spd_baseline =
      equity::statistical_parity_difference(baseline_scores, regions);
  const double spd_fair =
      equity::statistical_parity_difference(fair_scores, regions);

  std::cout << equity::render_ranking(fair_ranking, opt.verbose) << "\n";

  JsonWriter json;
  json.begin_object();
  json.key("lambda").value(opt.lambda);
  json.key("seed").value(static_cast<std::uint64_t>(opt.seed));
  json.key("spd_baseline").value(spd_baseline);
  json.key("spd_fair").value(spd_fair);
  json.key("spd_reduction_fraction")
      .value(spd_baseline > 0.0 ? (spd_baseline - spd_fair) / spd_baseline
                                : 0.0);
  json.key("changed_fraction").value(shift.changed_fraction);
  json.key("rank_deltas").begin_object();
  for (const auto& [name, delta] : shift.rank_deltas) {
    json.key(name).value(static_cast<std::int64_t>(delta));
  }
  json.end_object();
  json.key("ranking").begin_array();
  for (const auto& e : fair_ranking.entries) {
    json.begin_object();
    json.key("rank").value(static_cast<std::uint64_t>(e.rank));
    json.key("name").value(e.name);
    json.key("priority").value(e.priority);
    json.key("region").value(equity::to_string(e.region_type));
    json.end_object();
  }
  json.end_array();
  json.end_object();
  std::cout << json.str() << "\n";
}

struct GenDataOptions {
  std::string kind;
  std::uint64_t seed = 1;
  std::size_t n = 0;  // 0 = kind default
  std::string out;
};

void run_gen_data(const GenDataOptions& opt) {
  std::size_t rows = 0;
  if (opt.kind == "dengue") {
    const std::size_t n = opt.n > 0 ? opt.n : data_io::kDengueFixtureSize;
    const auto [records, labels] = data_io::synth_dengue(opt.seed, n);
    std::ofstream file(opt.out, std::ios::binary);
    if (!file) raise(ErrorCode::invalid_input, "cannot write '" + opt.out + "'");
    file << data_io::dengue_to_csv(records, labels);
    rows = records.size();
  } else if (opt.kind == "pdna") {
    if (opt.n > 0) {
      std::cerr << "warning: --n ignored; the pdna table always has 87 rows\n";
    }
    const auto [records, targets] = data_io::synth_pdna(opt.seed);
    std::ofstream file(opt.out, std::ios::binary);
    if (!file) raise(ErrorCode::invalid_input, "cannot write '" + opt.out + "'");
    file << data_io::pdna_to_csv(records);
    rows = records.size();
  } else {  // clients
    fedsim::FederatedConfig config;
    config.num_clients = 4;
    config.samples_per_client = opt.n > 0 ? opt.n : 250;
    config.num_features = 10;
    config.heterogeneity = 0.5;
    config.seed = opt.seed;
    const auto clients = fedsim::partition_synthetic(config);

    std::vector<std::string> header = {"client_id"};
    for (std::size_t j = 0; j < config.num_features; ++j) {
      header.push_back("f" + std::to_string(j));
    }
    header.push_back("label");
    std::vector<std::vector<std::string>> table_rows;
    for (const auto& client : clients) {
      for (std::size_t i = 0; i < client.features.size(); ++i) {
        std::vector<std::string> row = {std::to_string(client.client_id)};
        for (double v : client.features[i]) row.push_back(format_number(v));
        row.push_back(std::to_string(client.labels[i]));
        table_rows.push_back(std::move(row));
      }
    }
    data_io::write_csv_file(opt.out, header, table_rows);
    rows = table_rows.size();
  }

  JsonWriter json;
  json.begin_object();
  json.key("kind").value(opt.kind);
  json.key("out").value(opt.out);
  json.key("rows").value(static_cast<std::uint64_t>(rows));
  json.key("seed").value(static_cast<std::uint64_t>(opt.seed));
  json.end_object();
  std::cout << json.str() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trustml: trustworthy-ML toolkit for health applications"};
  app.require_subcommand(1);

  AuditOptions audit;
  CLI::App* audit_cmd =
      app.add_subcommand("audit", "Group fairness audit over a CSV file");
  audit_cmd->add_option("--input", audit.input, "Input CSV path")->required();
  audit_cmd->add_option("--pred-col", audit.pred_col, "Binary prediction column")
      ->required();
  audit_cmd
      ->add_option("--group-cols", audit.group_cols,
                   "Sensitive attribute column(s), comma separated")
      ->required()
      ->delimiter(',');
  audit_cmd->add_option("--truth-col", audit.truth_col,
                        "Binary ground-truth column (enables EOD)");
  audit_cmd->add_option("--min-group-size", audit.min_group_size,
                        "Exclude composite groups smaller than this");

  FedsimOptions fed;
  CLI::App* fedsim_cmd = app.add_subcommand(
      "fedsim", "Deterministic federated learning simulation");
  fedsim_cmd->add_option("--mode", fed.mode, "Aggregation mode")
      ->required()
      ->check(CLI::IsMember({"dense", "sparse", "sparse_dp"}));
  fedsim_cmd->add_option("--sparsity", fed.sparsity, "Zeroed fraction in [0,1)");
  fedsim_cmd->add_option("--epsilon", fed.epsilon, "Privacy epsilon or 'inf'");
  fedsim_cmd->add_option("--delta", fed.delta, "Privacy delta");
  fedsim_cmd->add_option("--clip", fed.clip, "L2 clip norm");
  fedsim_cmd->add_option("--rounds", fed.rounds, "Federated rounds");
  fedsim_cmd->add_option("--clients", fed.clients, "Number of clients");
  fedsim_cmd->add_option("--seed", fed.seed, "Random seed");
  fedsim_cmd->add_option("--samples", fed.samples, "Samples per client");
  fedsim_cmd->add_option("--features", fed.features, "Feature count");
  fedsim_cmd->add_option("--local-epochs", fed.local_epochs,
                         "Local training epochs per round");
  fedsim_cmd->add_option("--lr", fed.learning_rate, "Local learning rate");
  fedsim_cmd->add_option("--heterogeneity", fed.heterogeneity,
                         "Label skew strength in [0,1]");

  ExplainOptions explain;
  CLI::App* explain_cmd = app.add_subcommand(
      "explain", "Fuzzy clinical explanation for maternal vitals");
  explain_cmd->add_option("--age", explain.age, "Age [years]")->required();
  explain_cmd->add_option("--sbp", explain.sbp, "Systolic BP [mmHg]")->required();
  explain_cmd->add_option("--bs", explain.bs, "Blood sugar [mmol/L]")->required();
  explain_cmd->add_option("--hr", explain.hr, "Heart rate [bpm]")->required();
  explain_cmd->add_option("--rules", explain.rules_path,
                          "Custom rule table (defaults to the built-in base)");

  TriageOptions triage_opt;
  CLI::App* triage_cmd =
      app.add_subcommand("triage", "Dengue triage with confidence rerouting");
  triage_cmd->add_option("--age", triage_opt.age, "Age [years]")->required();
  triage_cmd->add_option("--gender", triage_opt.gender, "Gender")
      ->required()
      ->check(CLI::IsMember({"male", "female"}));
  triage_cmd->add_option("--area-type", triage_opt.area_type, "Area type")
      ->required()
      ->check(CLI::IsMember({"urban", "rural"}));
  triage_cmd->add_option("--district", triage_opt.district, "District")
      ->required();
  triage_cmd->add_option("--house-type", triage_opt.house_type,
                         "House type (imputed with the training mode if absent)");
  triage_cmd->add_option("--language", triage_opt.language, "Output language")
      ->required()
      ->check(CLI::IsMember({"english", "bangla"}));
  triage_cmd->add_option("--model", triage_opt.model_path,
                         "Serialized tree (defaults to the bundled tree)");

  RankAidOptions rank;
  CLI::App* rank_cmd = app.add_subcommand(
      "rank-aid", "Adversarially debiased aid priority ranking");
  rank_cmd->add_option("--input", rank.input, "Upazila CSV (pdna schema)")
      ->required();
  rank_cmd->add_option("--lambda", rank.lambda, "Gradient reversal strength");
  rank_cmd->add_option("--seed", rank.seed, "Training seed");
  rank_cmd->add_flag("--verbose", rank.verbose, "Annotate regions in the text ranking");

  GenDataOptions gen;
  CLI::App* gen_cmd =
      app.add_subcommand("gen-data", "Write seeded synthetic fixture files");
  gen_cmd->add_option("--kind", gen.kind, "Fixture kind")
      ->required()
      ->check(CLI::IsMember({"dengue", "pdna", "clients"}));
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--n", gen.n, "Row count (dengue) or samples per client");
  gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
    if (audit_cmd->parsed()) run_audit(audit);
    if (fedsim_cmd->parsed()) run_fedsim(fed);
    if (explain_cmd->parsed()) run_explain(explain);
    if (triage_cmd->parsed()) run_triage(triage_opt);
    if (rank_cmd->parsed()) run_rank_aid(rank);
    if (gen_cmd->parsed()) run_gen_data(gen);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const trustml::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}

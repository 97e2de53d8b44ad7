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

// Maintainer tool: regenerates the bundled trained artifacts in
// core/data (reference dengue tree, reference fair model, pdna fixture
// CSV) from their pinned seeds, then prints sanity diagnostics. Run from
// the repository root after changing a generator or training routine,
// and re-run cmake so the embedded copies pick up the new bytes.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "trustml/data_io.hpp"
#include "trustml/equity.hpp"
#include "trustml/fedsim.hpp"
#include "trustml/triage.hpp"

namespace {

using namespace trustml;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  file << content;
  if (!file) {
    std::cerr << "failed to write " << path << "\n";
    std::exit(1);
  }
  std::cout << "wrote " << path << " (" << content.size() << " bytes)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regenerate the bundled trained fixtures"};
  std::string out_dir = "core/data";
  app.add_option("--out-dir", out_dir, "Target directory (default core/data)");
  CLI11_PARSE(app, argc, argv);

  // reference dengue tree
  const triage::ReferenceTreeSpec spec = triage::reference_tree_spec();
  const auto [dengue_records, dengue_labels] =
      data_io::synth_dengue(spec.generator_seed, spec.sample_count);
  const triage::DecisionTree tree =
      triage::train_tree(dengue_records, dengue_labels, spec.max_depth,
                         spec.min_leaf, spec.train_seed);
  write_file(out_dir + "/dengue_tree.txt", tree.serialize());

  const triage::TriageResult doc_case = triage::assess_dengue_risk(
      8, triage::Gender::male, triage::AreaType::urban, "Dhaka",
      triage::Language::bangla, tree);
  std::cout << "  doc case (8/male/urban/Dhaka): "
            << triage::to_string(doc_case.prediction)
            << " confidence=" << doc_case.confidence
            << " rerouted=" << doc_case.rerouted << "\n";
  const auto importance = triage::gini_feature_importance(tree, spec.sample_count);
  for (std::size_t f = 0; f < triage::kFeatureNames.size(); ++f) {
    std::cout << "  importance[" << triage::kFeatureNames[f]
              << "]=" << importance[f] << "\n";
  }

  // pdna fixture table + reference fair model
  const auto [upazilas, targets] = data_io::synth_pdna(data_io::kPdnaFixtureSeed);
  write_file(out_dir + "/pdna_fixture.csv", data_io::pdna_to_csv(upazilas));

  const equity::DebiasConfig config = equity::reference_training_config();
  const equity::FairModel model =
      equity::train_fair_regressor(upazilas, targets, config);
  write_file(out_dir + "/pdna_model.txt", model.serialize());

  const auto ranking = equity::generate_priority_ranking(upazilas, model);
  std::cout << "  top of the fair ranking:\n";
  for (std::size_t i = 0; i < 3 && i < ranking.entries.size(); ++i) {
    const auto& e = ranking.entries[i];
    std::cout << "    rank " << e.rank << ": " << e.name
              << " priority=" << e.priority << "\n";
  }

  equity::DebiasConfig base_config = config;
  base_config.lambda = 0.0;
  const equity::FairModel baseline =
      equity::train_fair_regressor(upazilas, targets, base_config);
  std::vector<double> base_scores, fair_scores;
  std::vector<equity::RegionType> regions;
  for (const auto& r : upazilas) {
    base_scores.push_back(baseline.priority_score(r));
    fair_scores.push_back(model.priority_score(r));
    regions.push_back(r.region_type);
  }
  std::cout << "  spd baseline="
            << equity::statistical_parity_difference(base_scores, regions)
            << " fair="
            << equity::statistical_parity_difference(fair_scores, regions)
            << "\n";
  return 0;
}

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

#include "trustml/equity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "trustml/error.hpp"
#include "trustml/rng.hpp"
#include "embedded.hpp"

namespace trustml::equity {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double bce_with_logits(double logit, double label) {
  // max(z,0) - y*z + log(1+exp(-|z|))
  return std::max(logit, 0.0) - label * logit +
         std::log1p(std::exp(-std::fabs(logit)));
}

std::array<double, 3> raw_features(const UpazilaRecord& r) {
  return {r.poverty_rate, r.damage_usd_m, r.affected_population};
}

void check_records(const std::vector<UpazilaRecord>& records) {
  if (records.empty()) {
    raise(ErrorCode::invalid_input, "no records");
  }
  for (const auto& r : records) {
    for (double v : raw_features(r)) {
      if (!std::isfinite(v)) {
        raise(ErrorCode::invalid_input,
              "record '" + r.name + "' has a non-finite feature");
      }
    }
  }
}

struct ForwardPass {
  std::vector<std::array<double, 3>> inputs;   // standardized
  std::vector<std::vector<double>> hidden;     // tanh activations
  std::vector<double> scores;                  // predictor sigmoid outputs
  std::vector<double> adv_logits;
};

ForwardPass forward_all(const FairModel& m,
                        const std::vector<UpazilaRecord>& records) {
  ForwardPass fwd;
  fwd.inputs.reserve(records.size());
  fwd.hidden.reserve(records.size());
  for (const auto& r : records) {
    const auto x = m.standardize(r);
    std::vector<double> h(m.hidden_width);
    for (std::size_t j = 0; j < m.hidden_width; ++j) {
      double z = m.b1[j];
      for (std::size_t k = 0; k < m.input_dim; ++k) {
        z += m.w1[j * m.input_dim + k] * x[k];
      }
      h[j] = std::tanh(z);
    }
    double z2 = m.b2;
    double za = m.ba;
    for (std::size_t j = 0; j < m.hidden_width; ++j) {
      z2 += m.w2[j] * h[j];
      za += m.wa[j] * h[j];
    }
    fwd.inputs.push_back(x);
    fwd.scores.push_back(sigmoid(z2));
    fwd.adv_logits.push_back(za);
    fwd.hidden.push_back(std::move(h));
  }
  return fwd;
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void append_vector(std::string& out, const char* name,
                   const std::vector<double>& values) {
  out += name;
  for (double v : values) {
    out += '\t';
    out += format_full(v);
  }
  out += '\n';
}

}  // namespace

std::string to_string(RegionType r) {
  return r == RegionType::haor ? "Haor" : "non-Haor";
}

RegionType region_from_string(const std::string& s) {
  if (s == "Haor") return RegionType::haor;
  if (s == "non-Haor") return RegionType::non_haor;
  raise(ErrorCode::invalid_input, "unknown region_type '" + s + "'");
}

std::array<double, 3> FairModel::standardize(const UpazilaRecord& r) const {
  const auto raw = raw_features(r);
  std::array<double, 3> x{};
  for (std::size_t k = 0; k < 3; ++k) {
    x[k] = (raw[k] - feature_mean[k]) / feature_std[k];
  }
  return x;
}

double FairModel::priority_score(const UpazilaRecord& r) const {
  return forward_all(*this, {r}).scores[0];
}

double FairModel::adversary_prob(const UpazilaRecord& r) const {
  return sigmoid(forward_all(*this, {r}).adv_logits[0]);
}

std::vector<double> grl_backward(const std::vector<double>& upstream_gradient,
                                 double lambda) {
  std::vector<double> out(upstream_gradient.size());
  for (std::size_t i = 0; i < upstream_gradient.size(); ++i) {
    out[i] = -lambda * upstream_gradient[i];
  }
  return out;
}

Losses compute_losses(const FairModel& model,
                      const std::vector<UpazilaRecord>& records,
                      const std::vector<double>& targets) {
  check_records(records);
  if (targets.size() != records.size()) {
    raise(ErrorCode::invalid_input, "targets and records misaligned");
  }
  const ForwardPass fwd = forward_all(model, records);
  const auto n = static_cast<double>(records.size());
  Losses losses;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double diff = fwd.scores[i] - targets[i];
    losses.mse += diff * diff;
    losses.adversary_bce += bce_with_logits(
        fwd.adv_logits[i],
        records[i].region_type == RegionType::haor ? 1.0 : 0.0);
  }
  losses.mse /= n;
  losses.adversary_bce /= n;
  return losses;
}

Gradients compute_gradients(const FairModel& model,
                            const std::vector<UpazilaRecord>& records,
                            const std::vector<double>& targets,
                            double lambda) {
  check_records(records);
  if (targets.size() != records.size()) {
    raise(ErrorCode::invalid_input, "targets and records misaligned");
  }
  const std::size_t hidden = model.hidden_width;
  const std::size_t input = model.input_dim;
  const auto n = static_cast<double>(records.size());

  Gradients g;
  g.w1.assign(hidden * input, 0.0);
  g.b1.assign(hidden, 0.0);
  g.w2.assign(hidden, 0.0);
  g.wa.assign(hidden, 0.0);

  const ForwardPass fwd = forward_all(model, records);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double region =
        records[i].region_type == RegionType::haor ? 1.0 : 0.0;
    const double score = fwd.scores[i];
    // d(mse)/d(z2) = 2*(score-t)/n * score*(1-score)
    const double e_pred =
        2.0 * (score - targets[i]) / n * score * (1.0 - score);
    // d(bce)/d(za) = (sigmoid(za) - region)/n
    const double e_adv = (sigmoid(fwd.adv_logits[i]) - region) / n;

    g.b2 += e_pred;
    g.ba += e_adv;
    // encoder gradient: predictor path plus the adversary path routed
    // through the reversal layer
    for (std::size_t j = 0; j < hidden; ++j) {
      const double h = fwd.hidden[i][j];
      g.w2[j] += e_pred * h;
      g.wa[j] += e_adv * h;
      const double upstream_pred = e_pred * model.w2[j];
      const double upstream_adv = e_adv * model.wa[j];
      const double dh = upstream_pred + grl_backward({upstream_adv}, lambda)[0];
      const double dz1 = dh * (1.0 - h * h);
      g.b1[j] += dz1;
      for (std::size_t k = 0; k < input; ++k) {
        g.w1[j * input + k] += dz1 * fwd.inputs[i][k];
      }
    }
  }
  return g;
}

FairModel train_fair_regressor(const std::vector<UpazilaRecord>& records,
                               const std::vector<double>& targets,
                               const DebiasConfig& config) {
  check_records(records);
  if (records.size() < 4) {
    raise(ErrorCode::invalid_input, "need at least 4 records to train");
  }
  if (targets.size() != records.size()) {
    raise(ErrorCode::invalid_input, "targets and records misaligned");
  }
  for (double t : targets) {
    if (!(t >= 0.0 && t <= 1.0)) {
      raise(ErrorCode::invalid_input, "targets must lie in [0, 1]");
    }
  }
  if (!(config.lambda >= 0.0) || config.hidden_width < 1 ||
      config.epochs < 1 || !(config.learning_rate > 0.0)) {
    raise(ErrorCode::invalid_config, "bad debias configuration");
  }

  FairModel model;
  model.input_dim = 3;
  model.hidden_width = config.hidden_width;

  // standardization statistics from the training records
  const auto n = static_cast<double>(records.size());
  for (std::size_t k = 0; k < 3; ++k) {
    double mean = 0.0;
    for (const auto& r : records) mean += raw_features(r)[k];
    mean /= n;
    double var = 0.0;
    for (const auto& r : records) {
      const double d = raw_features(r)[k] - mean;
      var += d * d;
    }
    var /= n;
    model.feature_mean[k] = mean;
    model.feature_std[k] = var > 0.0 ? std::sqrt(var) : 1.0;
  }

  SeededRng rng(mix_seed(config.seed, 0xFA1));
  const double r1 = 1.0 / std::sqrt(3.0);
  const double r2 = 1.0 / std::sqrt(static_cast<double>(config.hidden_width));
  model.w1.resize(config.hidden_width * 3);
  for (double& w : model.w1) w = rng.uniform(-r1, r1);
  model.b1.assign(config.hidden_width, 0.0);
  model.w2.resize(config.hidden_width);
  for (double& w : model.w2) w = rng.uniform(-r2, r2);
  model.wa.resize(config.hidden_width);
  for (double& w : model.wa) w = rng.uniform(-r2, r2);

  model.history.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const Losses losses = compute_losses(model, records, targets);
    if (!std::isfinite(losses.mse) || !std::isfinite(losses.adversary_bce)) {
      raise(ErrorCode::training_diverged,
            "training diverged at epoch " + std::to_string(epoch));
    }
    model.history.push_back(EpochLosses{losses.mse, losses.adversary_bce});

    const Gradients g = compute_gradients(model, records, targets, config.lambda);
    const double lr = config.learning_rate;
    for (std::size_t i = 0; i < model.w1.size(); ++i) model.w1[i] -= lr * g.w1[i];
    for (std::size_t j = 0; j < config.hidden_width; ++j) {
      model.b1[j] -= lr * g.b1[j];
      model.w2[j] -= lr * g.w2[j];
      model.wa[j] -= lr * g.wa[j];
    }
    model.b2 -= lr * g.b2;
    model.ba -= lr * g.ba;
  }
  return model;
}

double statistical_parity_difference(const std::vector<double>& scores,
                                     const std::vector<RegionType>& regions) {
  if (scores.empty() || scores.size() != regions.size()) {
    raise(ErrorCode::invalid_input, "scores and regions misaligned");
  }
  double haor_sum = 0.0, other_sum = 0.0;
  std::size_t haor_n = 0, other_n = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (regions[i] == RegionType::haor) {
      haor_sum += scores[i];
      ++haor_n;
    } else {
      other_sum += scores[i];
      ++other_n;
    }
  }
  if (haor_n == 0 || other_n == 0) {
    raise(ErrorCode::insufficient_groups, "both regions must be present");
  }
  return std::fabs(haor_sum / static_cast<double>(haor_n) -
                   other_sum / static_cast<double>(other_n));
}

double regional_fairness_gap(const std::vector<double>& scores,
                             const std::vector<double>& targets,
                             const std::vector<RegionType>& regions) {
  if (scores.empty() || scores.size() != targets.size() ||
      scores.size() != regions.size()) {
    raise(ErrorCode::invalid_input, "scores, targets and regions misaligned");
  }
  std::vector<double> residuals(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    residuals[i] = std::fabs(scores[i] - targets[i]);
  }
  return statistical_parity_difference(residuals, regions);
}

PriorityRanking generate_priority_ranking(
    const std::vector<UpazilaRecord>& records, const FairModel& model) {
  check_records(records);
  PriorityRanking ranking;
  ranking.entries.reserve(records.size());
  for (const auto& r : records) {
    ranking.entries.push_back(
        RankedUpazila{0, r.name, model.priority_score(r), r.region_type});
  }
  std::sort(ranking.entries.begin(), ranking.entries.end(),
            [](const RankedUpazila& a, const RankedUpazila& b) {
              if (a.priority != b.priority) return a.priority > b.priority;
              return a.name < b.name;
            });
  for (std::size_t i = 0; i < ranking.entries.size(); ++i) {
    ranking.entries[i].rank = i + 1;
  }
  return ranking;
}

std::string render_ranking(const PriorityRanking& ranking, bool verbose) {
  std::string out;
  char buf[160];
  for (const auto& e : ranking.entries) {
    if (verbose) {
      std::snprintf(buf, sizeof(buf), "Rank %zu: %s (priority=%.4f, %s region)\n",
                    e.rank, e.name.c_str(), e.priority,
                    to_string(e.region_type).c_str());
    } else {
      std::snprintf(buf, sizeof(buf), "Rank %zu: %s (priority=%.4f)\n", e.rank,
                    e.name.c_str(), e.priority);
    }
    out += buf;
  }
  return out;
}

RankingShift ranking_shift(const PriorityRanking& baseline,
                           const PriorityRanking& fair) {
  if (baseline.entries.size() != fair.entries.size()) {
    raise(ErrorCode::invalid_input, "rankings cover different upazila sets");
  }
  std::map<std::string, std::size_t> fair_rank;
  for (const auto& e : fair.entries) fair_rank[e.name] = e.rank;

  RankingShift shift;
  std::size_t changed = 0;
  std::map<std::string, long> deltas;
  for (const auto& e : baseline.entries) {
    const auto it = fair_rank.find(e.name);
    if (it == fair_rank.end()) {
      raise(ErrorCode::invalid_input,
            "upazila '" + e.name + "' missing from the fair ranking");
    }
    const long delta = static_cast<long>(e.rank) - static_cast<long>(it->second);
    deltas[e.name] = delta;
    changed += delta != 0;
  }
  shift.changed_fraction =
      static_cast<double>(changed) / static_cast<double>(baseline.entries.size());
  shift.rank_deltas.assign(deltas.begin(), deltas.end());
  return shift;
}

std::string FairModel::serialize() const {
  std::string out = "fair-model v1\n";
  out += "input_dim\t" + std::to_string(input_dim) + "\n";
  out += "hidden_width\t" + std::to_string(hidden_width) + "\n";
  append_vector(out, "feature_mean",
                {feature_mean.begin(), feature_mean.end()});
  append_vector(out, "feature_std", {feature_std.begin(), feature_std.end()});
  append_vector(out, "w1", w1);
  append_vector(out, "b1", b1);
  append_vector(out, "w2", w2);
  append_vector(out, "b2", {b2});
  append_vector(out, "wa", wa);
  append_vector(out, "ba", {ba});
  return out;
}

FairModel FairModel::deserialize(const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  if (!std::getline(stream, line) || line != "fair-model v1") {
    raise(ErrorCode::schema_violation, "model file: missing 'fair-model v1' header");
  }
  FairModel model;
  std::map<std::string, std::vector<double>> vectors;
  while (std::getline(stream, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string name;
    fields >> name;
    if (name == "input_dim") {
      fields >> model.input_dim;
    } else if (name == "hidden_width") {
      fields >> model.hidden_width;
    } else {
      std::vector<double> values;
      double v = 0;
      while (fields >> v) values.push_back(v);
      vectors[name] = std::move(values);
    }
  }
  auto take = [&vectors](const char* name, std::size_t expect) {
    const auto it = vectors.find(name);
    if (it == vectors.end() || it->second.size() != expect) {
      raise(ErrorCode::schema_violation,
            std::string("model file: bad or missing '") + name + "' row");
    }
    return it->second;
  };
  const auto mean = take("feature_mean", 3);
  const auto stdev = take("feature_std", 3);
  std::copy(mean.begin(), mean.end(), model.feature_mean.begin());
  std::copy(stdev.begin(), stdev.end(), model.feature_std.begin());
  model.w1 = take("w1", model.hidden_width * model.input_dim);
  model.b1 = take("b1", model.hidden_width);
  model.w2 = take("w2", model.hidden_width);
  model.b2 = take("b2", 1)[0];
  model.wa = take("wa", model.hidden_width);
  model.ba = take("ba", 1)[0];
  return model;
}

FairModel FairModel::load(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    raise(ErrorCode::invalid_input, "cannot open model file '" + path + "'");
  }
  std::ostringstream content;
  content << file.rdbuf();
  return deserialize(content.str());
}

DebiasConfig reference_training_config() {
  DebiasConfig config;
  config.lambda = 1.0;
  config.hidden_width = 8;
  config.epochs = 200;
  config.learning_rate = 0.05;
  config.seed = 12;
  return config;
}

const FairModel& reference_model() {
  static const FairModel model =
      FairModel::deserialize(std::string(embedded::pdna_model_text()));
  return model;
}

}  // namespace trustml::equity

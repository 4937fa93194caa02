// Copyright 2026 The getda Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "getda/config.hpp"

#include <openssl/sha.h>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "getda/error.hpp"
#include "json.hpp"

namespace getda {
namespace {

using nlohmann::json;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw InvalidInput(std::string(what) + ": expected a JSON object");
  std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!names.count(item.key())) throw InvalidInput(std::string(what) + ": unknown key '" + item.key() + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json shift_json(const ShiftSpec& s) {
  return json{{"class_count", s.class_count},
              {"dim", s.dim},
              {"samples_per_class_source", s.samples_per_class_source},
              {"samples_per_class_target", s.samples_per_class_target},
              {"rotation_angle", s.rotation_angle},
              {"translation", s.translation},
              {"scale", s.scale},
              {"source_noise_std", s.source_noise_std},
              {"target_noise_std", s.target_noise_std},
              {"seed", s.seed}};
}

void shift_from(const json& j, ShiftSpec& s) {
  check_keys(j,
             {"class_count", "dim", "samples_per_class_source", "samples_per_class_target", "rotation_angle",
              "translation", "scale", "source_noise_std", "target_noise_std", "seed"},
             "shift");
  read(j, "class_count", s.class_count);
  read(j, "dim", s.dim);
  read(j, "samples_per_class_source", s.samples_per_class_source);
  read(j, "samples_per_class_target", s.samples_per_class_target);
  read(j, "rotation_angle", s.rotation_angle);
  read(j, "translation", s.translation);
  read(j, "scale", s.scale);
  read(j, "source_noise_std", s.source_noise_std);
  read(j, "target_noise_std", s.target_noise_std);
  read(j, "seed", s.seed);
}

json train_json(const TrainConfig& t) {
  return json{{"method", std::string(to_string(t.method))},
              {"epochs", t.epochs},
              {"warmup_epochs", t.warmup_epochs},
              {"batch_size", t.batch_size},
              {"hidden", t.hidden},
              {"temperature", t.temperature},
              {"gamma_pi", t.gamma_pi},
              {"gamma_mu", t.gamma_mu},
              {"gamma_q", t.gamma_q},
              {"prior_update", std::string(to_string(t.prior_update))},
              {"momentum", t.sgd.momentum},
              {"weight_decay", t.sgd.weight_decay},
              {"feature_lr", t.sgd.feature_lr},
              {"classifier_lr", t.sgd.classifier_lr},
              {"omega", t.sgd.omega},
              {"alpha", t.sgd.alpha},
              {"pl_threshold", t.pl_threshold},
              {"online_generative_labels", t.online_generative_labels},
              {"soft_generative_labels", t.soft_generative_labels},
              {"q_refresh", std::string(to_string(t.q_refresh))},
              {"streaming_decay", t.streaming_decay},
              {"dump_class_proportions", t.dump_class_proportions},
              {"disable_kl_f", t.ablation.disable_kl_f},
              {"disable_kl_g", t.ablation.disable_kl_g},
              {"disable_fusion", t.ablation.disable_fusion},
              {"generative_labels_only", t.ablation.generative_labels_only},
              {"checkpoint_every", t.checkpoint_every},
              {"seed", t.seed}};
}

void train_from(const json& j, TrainConfig& t) {
  check_keys(j,
             {"method", "epochs", "warmup_epochs", "batch_size", "hidden", "temperature", "gamma_pi", "gamma_mu",
              "gamma_q", "prior_update", "momentum", "weight_decay", "feature_lr", "classifier_lr", "omega", "alpha",
              "pl_threshold", "online_generative_labels", "soft_generative_labels", "q_refresh", "streaming_decay",
              "dump_class_proportions", "disable_kl_f", "disable_kl_g", "disable_fusion",
              "generative_labels_only", "checkpoint_every", "seed"},
             "train");
  if (j.contains("method")) t.method = parse_method(j.at("method").get<std::string>());
  read(j, "epochs", t.epochs);
  read(j, "warmup_epochs", t.warmup_epochs);
  read(j, "batch_size", t.batch_size);
  read(j, "hidden", t.hidden);
  read(j, "temperature", t.temperature);
  read(j, "gamma_pi", t.gamma_pi);
  read(j, "gamma_mu", t.gamma_mu);
  read(j, "gamma_q", t.gamma_q);
  if (j.contains("prior_update")) t.prior_update = parse_prior_update(j.at("prior_update").get<std::string>());
  read(j, "momentum", t.sgd.momentum);
  read(j, "weight_decay", t.sgd.weight_decay);
  read(j, "feature_lr", t.sgd.feature_lr);
  read(j, "classifier_lr", t.sgd.classifier_lr);
  read(j, "omega", t.sgd.omega);
  read(j, "alpha", t.sgd.alpha);
  read(j, "pl_threshold", t.pl_threshold);
  read(j, "online_generative_labels", t.online_generative_labels);
  read(j, "soft_generative_labels", t.soft_generative_labels);
  if (j.contains("q_refresh")) t.q_refresh = parse_q_refresh(j.at("q_refresh").get<std::string>());
  read(j, "streaming_decay", t.streaming_decay);
  read(j, "dump_class_proportions", t.dump_class_proportions);
  read(j, "disable_kl_f", t.ablation.disable_kl_f);
  read(j, "disable_kl_g", t.ablation.disable_kl_g);
  read(j, "disable_fusion", t.ablation.disable_fusion);
  read(j, "generative_labels_only", t.ablation.generative_labels_only);
  read(j, "checkpoint_every", t.checkpoint_every);
  read(j, "seed", t.seed);
}

json cell_json(const CellConfig& c) {
  return json{{"shift", shift_json(c.shift)},
              {"train", train_json(c.train)},
              {"scenario", std::string(to_string(c.scenario))},
              {"keep_fraction", c.keep_fraction},
              {"shots_per_class", c.shots_per_class}};
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
}

}  // namespace

void CellConfig::validate() const {
  shift.validate();
  train.validate();
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) throw InvalidInput("config: keep_fraction must be in (0,1]");
  if (scenario == Scenario::kSsda && shots_per_class < 1) throw InvalidInput("config: SSDA needs shots_per_class >= 1");
  if (shots_per_class < 0) throw InvalidInput("config: shots_per_class must be >= 0");
}

void ExperimentConfig::validate() const {
  if (methods.empty() || scenarios.empty() || imbalances.empty() || seeds.empty()) {
    throw InvalidInput("config: methods, scenarios, imbalances and seeds must be non-empty");
  }
  if (output_dir.empty()) throw InvalidInput("config: output_dir must be set");
  for (const CellConfig& c : cells()) c.validate();
}

std::vector<CellConfig> ExperimentConfig::cells() const {
  std::vector<CellConfig> out;
  for (Method m : methods) {
    for (Scenario s : scenarios) {
      for (double keep : imbalances) {
        for (std::uint64_t seed : seeds) {
          CellConfig c;
          c.shift = shift;
          c.shift.seed = seed;
          c.train = train;
          c.train.method = m;
          c.train.seed = seed;
          if (m != Method::kGet) c.train.ablation = AblationFlags{};
          c.scenario = s;
          c.keep_fraction = keep;
          c.shots_per_class = shots_per_class;
          out.push_back(std::move(c));
        }
      }
    }
  }
  return out;
}

std::string to_json(const CellConfig& cell) { return cell_json(cell).dump(); }

std::string to_json(const ExperimentConfig& config) {
  json methods = json::array();
  for (Method m : config.methods) methods.push_back(std::string(to_string(m)));
  json scenarios = json::array();
  for (Scenario s : config.scenarios) scenarios.push_back(std::string(to_string(s)));
  return json{{"shift", shift_json(config.shift)},
              {"train", train_json(config.train)},
              {"methods", methods},
              {"scenarios", scenarios},
              {"imbalances", config.imbalances},
              {"seeds", config.seeds},
              {"shots_per_class", config.shots_per_class},
              {"output_dir", config.output_dir}}
      .dump(2);
}

CellConfig cell_from_json(const std::string& text) {
  const json j = parse(text);
  check_keys(j, {"shift", "train", "scenario", "keep_fraction", "shots_per_class"}, "cell");
  CellConfig c;
  try {
    if (j.contains("shift")) shift_from(j.at("shift"), c.shift);
    if (j.contains("train")) train_from(j.at("train"), c.train);
    if (j.contains("scenario")) c.scenario = parse_scenario(j.at("scenario").get<std::string>());
    read(j, "keep_fraction", c.keep_fraction);
    read(j, "shots_per_class", c.shots_per_class);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig experiment_from_json(const std::string& text) {
  const json j = parse(text);
  check_keys(j, {"shift", "train", "methods", "scenarios", "imbalances", "seeds", "shots_per_class", "output_dir"},
             "experiment");
  ExperimentConfig c;
  try {
    if (j.contains("shift")) shift_from(j.at("shift"), c.shift);
    if (j.contains("train")) train_from(j.at("train"), c.train);
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (j.contains("scenarios")) {
      c.scenarios.clear();
      for (const auto& s : j.at("scenarios")) c.scenarios.push_back(parse_scenario(s.get<std::string>()));
    }
    read(j, "imbalances", c.imbalances);
    read(j, "seeds", c.seeds);
    read(j, "shots_per_class", c.shots_per_class);
    read(j, "output_dir", c.output_dir);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  return c;
}

std::string config_hash(const CellConfig& cell) {
  const std::string text = to_json(cell);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(text.data()), text.size(), digest);
  char hex[17];
  for (int i = 0; i < 8; ++i) std::snprintf(hex + 2 * i, 3, "%02x", digest[i]);
  return std::string(hex, 16);
}

ShiftSpec standard_shift() {
  ShiftSpec s;
  s.class_count = 6;
  s.dim = 16;
  s.rotation_angle = std::numbers::pi / 5.0;
  return s;
}

}  // namespace getda

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
// Experiment configuration, JSON round trip and content hashing.

#ifndef GETDA_CONFIG_HPP_
#define GETDA_CONFIG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "getda/baselines.hpp"
#include "getda/datasynth.hpp"
#include "getda/trainer.hpp"

namespace getda {

// One cell of an experiment matrix: everything that determines a run.
struct CellConfig {
  ShiftSpec shift;
  TrainConfig train;
  Scenario scenario = Scenario::kUda;
  // Fraction of samples kept in the first half of the classes; 1 = balanced.
  double keep_fraction = 1.0;
  int shots_per_class = 3;  // SSDA only

  void validate() const;
};

struct ExperimentConfig {
  ShiftSpec shift;
  TrainConfig train;
  std::vector<Method> methods = {Method::kGet};
  std::vector<Scenario> scenarios = {Scenario::kUda};
  std::vector<double> imbalances = {1.0};
  std::vector<std::uint64_t> seeds = {0};
  int shots_per_class = 3;
  std::string output_dir = "runs";

  void validate() const;
  // Cells in method, scenario, imbalance, seed order. The seed drives both the
  // data and the training RNG.
  std::vector<CellConfig> cells() const;
};

// Canonical JSON text (sorted keys, shortest round-trip doubles).
std::string to_json(const CellConfig& cell);
std::string to_json(const ExperimentConfig& config);
CellConfig cell_from_json(const std::string& text);
// Missing keys keep their defaults; unknown keys are an error.
ExperimentConfig experiment_from_json(const std::string& text);

// First 16 hex digits of SHA-256 over the canonical JSON of the cell.
std::string config_hash(const CellConfig& cell);

// Benchmark defaults: C=6, d=16, rotation pi/5 and a translation.
ShiftSpec standard_shift();

}  // namespace getda

#endif  // GETDA_CONFIG_HPP_

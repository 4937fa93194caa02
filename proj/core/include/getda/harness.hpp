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
// Experiment orchestration: one run per matrix cell, JSONL records, CSV
// summaries.
//
// Layout under the output directory:
//   <hash>/config.json    canonical cell config
//   <hash>/record.jsonl   one object per finished epoch (".partial" while running)
//   <hash>/checkpoint.bin latest checkpoint when checkpoint_every > 0
//   summary.csv           final-epoch mean and std per method/scenario/imbalance
//   curves.csv            per-epoch metrics of every cell (report only)

#ifndef GETDA_HARNESS_HPP_
#define GETDA_HARNESS_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "getda/config.hpp"
#include "getda/datasynth.hpp"
#include "getda/metrics.hpp"
#include "getda/trainer.hpp"

namespace getda {

struct CellResult {
  CellConfig cell;
  std::string hash;
  std::vector<MetricsRow> rows;  // one per epoch
  bool skipped = false;          // record already on disk
  bool failed = false;
  std::string error;
};

// make_domain_pair followed by apply_class_imbalance when keep_fraction < 1.
DomainPair build_domain(const CellConfig& cell);

MetricsRow metrics_row(const CellConfig& cell, const EpochRecord& record);

// JSON object for one epoch, and its inverse.
std::string record_line(const CellConfig& cell, const std::string& hash, const EpochRecord& record);
MetricsRow parse_record_line(const std::string& line);
std::vector<MetricsRow> read_record(const std::filesystem::path& path);

// Trains one cell into <out>/<hash>/, or loads the finished record when it is
// already there. Errors are captured in the result rather than thrown.
CellResult run_cell(const CellConfig& cell, const std::filesystem::path& out);

// GET_THREADS if set and positive, else the hardware concurrency (>= 1).
int worker_limit();

// Runs every cell on up to `threads` workers (0 = worker_limit()) and writes
// summary.csv. Throws IoError before training if `out` is not writable.
std::vector<CellResult> run_matrix(const ExperimentConfig& config, int threads = 0);

// Aggregates the final epoch of each cell; rows follow first appearance.
void write_summary(const std::filesystem::path& path, const std::vector<CellResult>& cells);

// Rebuilds summary.csv and curves.csv from the cell directories under `out`.
// Returns the number of cells found.
int report(const std::filesystem::path& out);

}  // namespace getda

#endif  // GETDA_HARNESS_HPP_

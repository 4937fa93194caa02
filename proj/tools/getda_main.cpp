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
// getda: synthesize shifted domains, train single runs, run experiment
// matrices and rebuild reports.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "getda/config.hpp"
#include "getda/datasynth.hpp"
#include "getda/error.hpp"
#include "getda/harness.hpp"

namespace {

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Overrides {
  std::string config_path;
  std::string methods;
  std::string scenarios;
  std::optional<double> imbalance;
  std::string seeds;
  std::optional<double> gamma_q;
  std::optional<double> gamma_pi;
  std::optional<int> epochs;
  std::string out;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Experiment JSON file; flags override its values")->check(CLI::ExistingFile);
  cmd->add_option("--method", o.methods, "get|pl|minent|nc|source_only (comma list for matrix)");
  cmd->add_option("--scenario", o.scenarios, "uda|pda|ssda (comma list for matrix)");
  cmd->add_option("--imbalance", o.imbalance, "Keep fraction for the first half of the classes")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seeds", o.seeds, "Comma-separated seeds, e.g. 0,1,2");
  cmd->add_option("--gamma-q", o.gamma_q, "Weight of the generative labels in the mixup")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--gamma-pi", o.gamma_pi, "Prior EMA rate")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--epochs", o.epochs, "Training epochs after warm-up")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", o.out, "Output directory (file for synth, '-' for stdout)");
}

getda::ExperimentConfig resolve(const Overrides& o) {
  getda::ExperimentConfig c;
  c.shift = getda::standard_shift();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    std::stringstream text;
    text << in.rdbuf();
    c = getda::experiment_from_json(text.str());
  }
  if (!o.methods.empty()) {
    c.methods.clear();
    for (const auto& m : split(o.methods)) c.methods.push_back(getda::parse_method(m));
  }
  if (!o.scenarios.empty()) {
    c.scenarios.clear();
    for (const auto& s : split(o.scenarios)) c.scenarios.push_back(getda::parse_scenario(s));
  }
  if (o.imbalance) c.imbalances = {*o.imbalance};
  if (!o.seeds.empty()) {
    c.seeds.clear();
    for (const auto& s : split(o.seeds)) c.seeds.push_back(std::stoull(s));
  }
  if (o.gamma_q) c.train.gamma_q = *o.gamma_q;
  if (o.gamma_pi) c.train.gamma_pi = *o.gamma_pi;
  if (o.epochs) c.train.epochs = *o.epochs;
  if (!o.out.empty()) c.output_dir = o.out;
  return c;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return std::isfinite(v) ? buf : "nan";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generative pseudo-label domain adaptation experiments"};
  app.require_subcommand(1);

  Overrides synth_o, train_o, matrix_o;
  auto* synth = app.add_subcommand("synth", "Write a synthetic domain pair as CSV");
  add_common(synth, synth_o);
  auto* train = app.add_subcommand("train", "Train one cell");
  add_common(train, train_o);
  auto* matrix = app.add_subcommand("matrix", "Run method x scenario x imbalance x seed");
  add_common(matrix, matrix_o);
  int threads = 0;
  matrix->add_option("--threads", threads, "Worker count (default GET_THREADS or all cores)")->check(CLI::NonNegativeNumber);
  std::string report_dir = "runs";
  auto* report = app.add_subcommand("report", "Rebuild summary.csv and curves.csv from a run directory");
  report->add_option("--out", report_dir, "Run directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      const getda::ExperimentConfig c = resolve(synth_o);
      const getda::CellConfig cell = c.cells().front();
      cell.validate();
      const getda::DomainPair pair = getda::build_domain(cell);
      if (synth_o.out.empty() || synth_o.out == "-") {
        getda::write_domain_csv(std::cout, pair);
      } else {
        std::ofstream out(synth_o.out);
        if (!out) throw getda::IoError("cannot write " + synth_o.out);
        getda::write_domain_csv(out, pair);
      }
      return 0;
    }
    if (train->parsed()) {
      const getda::ExperimentConfig c = resolve(train_o);
      const getda::CellConfig cell = c.cells().front();
      const getda::CellResult r = getda::run_cell(cell, c.output_dir);
      if (r.failed) {
        std::cerr << "error: " << r.error << '\n';
        return 1;
      }
      const getda::MetricsRow& last = r.rows.back();
      std::cout << r.hash << (r.skipped ? " (cached)" : "") << " epoch " << last.epoch << " accuracy "
                << fmt(last.accuracy) << " balanced " << fmt(last.balanced_accuracy) << " labels "
                << fmt(last.pseudo_label_accuracy) << " prior_kl " << fmt(last.prior_kl) << '\n';
      return 0;
    }
    if (matrix->parsed()) {
      const getda::ExperimentConfig c = resolve(matrix_o);
      const auto results = getda::run_matrix(c, threads);
      int failed = 0;
      for (const auto& r : results) {
        if (!r.failed) continue;
        ++failed;
        std::cerr << "cell " << r.hash << " failed: " << r.error << '\n';
      }
      std::cout << results.size() << " cells, " << failed << " failed; summary in " << c.output_dir
                << "/summary.csv\n";
      return failed == 0 ? 0 : 2;
    }
    if (report->parsed()) {
      const int n = getda::report(report_dir);
      std::cout << n << " cells; wrote summary.csv and curves.csv in " << report_dir << '\n';
      return 0;
    }
  } catch (const getda::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

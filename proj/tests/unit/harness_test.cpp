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


#include "getda/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "getda/config.hpp"
#include "getda/error.hpp"

namespace getda {
namespace {

namespace fs = std::filesystem;

ExperimentConfig small_experiment(const fs::path& out) {
  ExperimentConfig e;
  e.shift = standard_shift();
  e.shift.samples_per_class_source = 20;
  e.shift.samples_per_class_target = 20;
  e.train.epochs = 2;
  e.train.warmup_epochs = 3;
  e.train.hidden = {8, 6};
  e.methods = {Method::kGet, Method::kPl};
  e.scenarios = {Scenario::kUda};
  e.seeds = {1, 2, 3};
  e.output_dir = out.string();
  return e;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  return dir;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Matrix, CountsRecordsAndSummaryRows) {
  const fs::path out = fresh_dir("getda_harness_count");
  const auto results = run_matrix(small_experiment(out), 1);
  ASSERT_EQ(results.size(), 6u);
  int records = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    if (!entry.is_directory()) continue;
    EXPECT_TRUE(fs::exists(entry.path() / "config.json"));
    records += fs::exists(entry.path() / "record.jsonl");
  }
  EXPECT_EQ(records, 6);
  const auto csv = read_csv(out / "summary.csv");
  ASSERT_EQ(csv.size(), 3u);
  EXPECT_EQ(csv[0][0], "method");
  EXPECT_EQ(csv[1][0], "get");
  EXPECT_EQ(csv[2][0], "pl");
  EXPECT_EQ(csv[1][3], "3");
  EXPECT_EQ(csv[1][4], "0");
  fs::remove_all(out);
}

TEST(Matrix, ResumeSkipsFinishedCells) {
  const fs::path out = fresh_dir("getda_harness_resume");
  const ExperimentConfig e = small_experiment(out);
  run_matrix(e, 1);
  const std::string before = slurp(out / "summary.csv");
  const auto again = run_matrix(e, 1);
  for (const auto& r : again) {
    EXPECT_TRUE(r.skipped);
    EXPECT_EQ(r.rows.size(), 3u);
  }
  EXPECT_EQ(slurp(out / "summary.csv"), before);
  fs::remove_all(out);
}

TEST(Matrix, AggregateEqualsHandMean) {
  const fs::path out = fresh_dir("getda_harness_mean");
  run_matrix(small_experiment(out), 1);
  std::map<std::string, std::vector<double>> finals;
  for (const auto& entry : fs::directory_iterator(out)) {
    if (!entry.is_directory()) continue;
    std::ifstream in(entry.path() / "record.jsonl");
    std::string line, last;
    while (std::getline(in, line))
      if (!line.empty()) last = line;
    const auto j = nlohmann::json::parse(last);
    finals[j.at("method").get<std::string>()].push_back(j.at("balanced_accuracy").get<double>());
  }
  const auto csv = read_csv(out / "summary.csv");
  for (std::size_t r = 1; r < csv.size(); ++r) {
    const auto& v = finals.at(csv[r][0]);
    ASSERT_EQ(v.size(), 3u);
    const double mean = (v[0] + v[1] + v[2]) / 3.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    EXPECT_NEAR(std::stod(csv[r][7]), mean, 5e-7);
    EXPECT_NEAR(std::stod(csv[r][8]), std::sqrt(ss / 2.0), 5e-7);
  }
  fs::remove_all(out);
}

TEST(Matrix, FailedCellDoesNotStopOthers) {
  const fs::path out = fresh_dir("getda_harness_fail");
  const ExperimentConfig e = small_experiment(out);
  fs::create_directories(out);
  // A plain file where one cell wants its directory.
  const std::string blocked = config_hash(e.cells()[1]);
  std::ofstream(out / blocked) << "x";
  const auto results = run_matrix(e, 1);
  int failed = 0;
  for (const auto& r : results) {
    if (r.hash == blocked) {
      EXPECT_TRUE(r.failed);
      EXPECT_FALSE(r.error.empty());
    } else {
      EXPECT_FALSE(r.failed) << r.error;
    }
    failed += r.failed;
  }
  EXPECT_EQ(failed, 1);
  const auto csv = read_csv(out / "summary.csv");
  EXPECT_EQ(csv[1][4], "1");
  fs::remove_all(out);
}

TEST(Matrix, UnwritableOutputFailsBeforeTraining) {
  const fs::path base = fresh_dir("getda_harness_unwritable");
  fs::create_directories(base);
  std::ofstream(base / "file") << "x";
  ExperimentConfig e = small_experiment(base / "file" / "sub");
  EXPECT_THROW(run_matrix(e, 1), IoError);
  fs::remove_all(base);
}

TEST(Report, RebuildsSummaryAndCurves) {
  const fs::path out = fresh_dir("getda_harness_report");
  run_matrix(small_experiment(out), 1);
  const std::string summary = slurp(out / "summary.csv");
  EXPECT_EQ(report(out), 6);
  EXPECT_EQ(slurp(out / "summary.csv"), summary);
  const auto curves = read_csv(out / "curves.csv");
  ASSERT_EQ(curves.size(), 1u + 6u * 3u);
  EXPECT_EQ(curves[0][5], "epoch");
  EXPECT_EQ(curves[1][0], "get");
  EXPECT_EQ(curves[1][5], "0");
  EXPECT_THROW(report(out / "missing"), IoError);
  fs::remove_all(out);
}

TEST(Record, LineRoundTripWithNaN) {
  CellConfig cell;
  cell.train.method = Method::kPl;
  cell.train.seed = 4;
  EpochRecord rec;
  rec.epoch = 2;
  rec.target.accuracy = 0.75;
  rec.target.balanced_accuracy = 0.5;
  rec.target.per_class_recall = {1.0, 0.0};
  rec.fused_label_accuracy = 0.625;
  rec.generative_label_accuracy = std::nan("");
  rec.prior_kl = std::nan("");
  const std::string line = record_line(cell, "abc", rec);
  const auto j = nlohmann::json::parse(line);
  EXPECT_TRUE(j.at("prior_kl").is_null());
  EXPECT_EQ(j.at("config_hash"), "abc");
  const MetricsRow row = parse_record_line(line);
  EXPECT_EQ(row.method, "pl");
  EXPECT_EQ(row.seed, 4u);
  EXPECT_EQ(row.epoch, 2);
  EXPECT_EQ(row.accuracy, 0.75);
  EXPECT_EQ(row.per_class_recall, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(row.pseudo_label_accuracy, 0.625);
  EXPECT_TRUE(std::isnan(row.prior_kl));
}

TEST(Domain, BuildAppliesImbalanceAndShots) {
  CellConfig cell;
  cell.shift = standard_shift();
  cell.scenario = Scenario::kSsda;
  cell.shots_per_class = 2;
  cell.keep_fraction = 0.3;
  const DomainPair pair = build_domain(cell);
  EXPECT_EQ(pair.target_labeled().size(), 12u);
  EXPECT_EQ(pair.target_unlabeled().rows(), 390);
}

TEST(Threads, EnvironmentCap) {
  ::setenv("GET_THREADS", "3", 1);
  EXPECT_EQ(worker_limit(), 3);
  ::setenv("GET_THREADS", "zero", 1);
  EXPECT_GE(worker_limit(), 1);
  ::unsetenv("GET_THREADS");
}

}  // namespace
}  // namespace getda

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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "getda/checkpoint.hpp"
#include "getda/error.hpp"
#include "json.hpp"

namespace getda {
namespace fs = std::filesystem;
namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double as_number(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return kNaN;
  return j.at(key).get<double>();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string format(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct Stats {
  double mean = kNaN;
  double std = kNaN;
};

// Mean and sample standard deviation over the finite values.
Stats stats(const std::vector<double>& values) {
  std::vector<double> v;
  for (double x : values) {
    if (std::isfinite(x)) v.push_back(x);
  }
  Stats s;
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) {
    s.std = 0.0;
    return s;
  }
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return s;
}

std::string keep_label(double keep) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", keep);
  return buf;
}

}  // namespace

DomainPair build_domain(const CellConfig& cell) {
  DomainPair pair = make_domain_pair(cell.shift, cell.scenario, cell.scenario == Scenario::kSsda ? cell.shots_per_class : 0);
  if (cell.keep_fraction < 1.0) return apply_class_imbalance(pair, cell.keep_fraction);
  return pair;
}

MetricsRow metrics_row(const CellConfig& cell, const EpochRecord& record) {
  MetricsRow row;
  row.method = std::string(to_string(cell.train.method));
  row.scenario = std::string(to_string(cell.scenario));
  row.seed = cell.train.seed;
  row.epoch = record.epoch;
  row.accuracy = record.target.accuracy;
  row.balanced_accuracy = record.target.balanced_accuracy;
  row.per_class_recall = record.target.per_class_recall;
  row.pseudo_label_accuracy = record.fused_label_accuracy;
  row.generative_label_accuracy = record.generative_label_accuracy;
  row.prior_kl = record.prior_kl;
  return row;
}

std::string record_line(const CellConfig& cell, const std::string& hash, const EpochRecord& r) {
  json recall = json::array();
  for (double v : r.target.per_class_recall) recall.push_back(number(v));
  json j{{"config_hash", hash},
         {"method", std::string(to_string(cell.train.method))},
         {"scenario", std::string(to_string(cell.scenario))},
         {"keep_fraction", cell.keep_fraction},
         {"seed", cell.train.seed},
         {"epoch", r.epoch},
         {"accuracy", number(r.target.accuracy)},
         {"balanced_accuracy", number(r.target.balanced_accuracy)},
         {"per_class_recall", recall},
         {"pseudo_label_accuracy", number(r.fused_label_accuracy)},
         {"generative_label_accuracy", number(r.generative_label_accuracy)},
         {"prior_kl", number(r.prior_kl)},
         {"objective_g", number(r.objective_g)},
         {"objective_f", number(r.objective_f)},
         {"loss_total", number(r.loss.total)},
         {"loss_supervised", number(r.loss.supervised)},
         {"loss_classifier_space", number(r.loss.classifier_space)},
         {"loss_embedding_space", number(r.loss.embedding_space)},
         {"loss_logit_labels", number(r.loss.logit_labels)},
         {"loss_entropy", number(r.loss.entropy)}};
  auto dump = [&](const char* key, const Simplex& v) {
    if (v.size() > 0) j[key] = std::vector<double>(v.data(), v.data() + v.size());
  };
  dump("p_g_mean", r.p_g_mean);
  dump("q_g_mean", r.q_g_mean);
  dump("p_f_mean", r.p_f_mean);
  dump("q_f_mean", r.q_f_mean);
  return j.dump();
}

MetricsRow parse_record_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw IoError(std::string("record: ") + e.what());
  }
  MetricsRow row;
  row.method = j.value("method", "");
  row.scenario = j.value("scenario", "");
  row.seed = j.value("seed", std::uint64_t{0});
  row.epoch = j.value("epoch", 0);
  row.accuracy = as_number(j, "accuracy");
  row.balanced_accuracy = as_number(j, "balanced_accuracy");
  if (j.contains("per_class_recall")) {
    for (const auto& v : j.at("per_class_recall")) row.per_class_recall.push_back(v.is_null() ? kNaN : v.get<double>());
  }
  row.pseudo_label_accuracy = as_number(j, "pseudo_label_accuracy");
  row.generative_label_accuracy = as_number(j, "generative_label_accuracy");
  row.prior_kl = as_number(j, "prior_kl");
  return row;
}

std::vector<MetricsRow> read_record(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<MetricsRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_record_line(line));
  }
  return rows;
}

CellResult run_cell(const CellConfig& cell, const fs::path& out) {
  CellResult result;
  result.cell = cell;
  try {
    cell.validate();
    result.hash = config_hash(cell);
    const fs::path dir = out / result.hash;
    const fs::path record_path = dir / "record.jsonl";
    if (fs::exists(record_path)) {
      result.rows = read_record(record_path);
      result.skipped = true;
      return result;
    }
    fs::create_directories(dir);
    write_text(dir / "config.json", json::parse(to_json(cell)).dump(2) + "\n");

    const fs::path partial = dir / "record.jsonl.partial";
    std::ofstream log(partial, std::ios::trunc);
    if (!log) throw IoError("cannot write " + partial.string());

    const DomainPair pair = build_domain(cell);
    TrainHooks hooks;
    hooks.on_epoch = [&](const EpochRecord& r) {
      log << record_line(cell, result.hash, r) << '\n';
      log.flush();
      result.rows.push_back(metrics_row(cell, r));
    };
    hooks.on_checkpoint = [&](const TrainerState& s) {
      save_checkpoint(dir / "checkpoint.bin", Checkpoint{result.hash, s});
    };
    train(cell.train, pair, hooks);
    log.close();
    if (!log) throw IoError("write failed for " + partial.string());
    fs::rename(partial, record_path);
  } catch (const std::exception& e) {
    // The partial record stays on disk next to the error.
    result.failed = true;
    result.error = e.what();
  }
  return result;
}

int worker_limit() {
  if (const char* env = std::getenv("GET_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 1024));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<CellResult> run_matrix(const ExperimentConfig& config, int threads) {
  config.validate();
  const fs::path out = config.output_dir;
  {
    std::error_code ec;
    fs::create_directories(out, ec);
    const fs::path probe = out / ".write_probe";
    std::ofstream p(probe);
    if (ec || !p) throw IoError("output directory " + out.string() + " is not writable");
    p.close();
    fs::remove(probe, ec);
  }
  const std::vector<CellConfig> cells = config.cells();
  std::vector<CellResult> results(cells.size());
  const int workers = std::max(1, std::min<int>(threads > 0 ? threads : worker_limit(), static_cast<int>(cells.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) results[i] = run_cell(cells[i], out);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  write_summary(out / "summary.csv", results);
  return results;
}

void write_summary(const fs::path& path, const std::vector<CellResult>& cells) {
  struct Group {
    std::string method, scenario, keep;
    std::vector<double> acc, bal, label, kl;
    int runs = 0;
    int failed = 0;
  };
  std::vector<Group> groups;
  std::map<std::string, std::size_t> index;
  for (const CellResult& c : cells) {
    const std::string method(to_string(c.cell.train.method));
    const std::string scenario(to_string(c.cell.scenario));
    const std::string keep = keep_label(c.cell.keep_fraction);
    const std::string key = method + '\x1f' + scenario + '\x1f' + keep;
    auto [it, inserted] = index.emplace(key, groups.size());
    if (inserted) groups.push_back(Group{method, scenario, keep, {}, {}, {}, {}, 0, 0});
    Group& g = groups[it->second];
    ++g.runs;
    if (c.failed || c.rows.empty()) {
      ++g.failed;
      continue;
    }
    const MetricsRow& last = c.rows.back();
    g.acc.push_back(last.accuracy);
    g.bal.push_back(last.balanced_accuracy);
    g.label.push_back(last.pseudo_label_accuracy);
    g.kl.push_back(last.prior_kl);
  }
  std::ostringstream out;
  out << "method,scenario,keep_fraction,runs,failed,accuracy_mean,accuracy_std,balanced_accuracy_mean,"
         "balanced_accuracy_std,pseudo_label_accuracy_mean,pseudo_label_accuracy_std,prior_kl_mean,prior_kl_std\n";
  for (const Group& g : groups) {
    const Stats a = stats(g.acc), b = stats(g.bal), l = stats(g.label), k = stats(g.kl);
    out << g.method << ',' << g.scenario << ',' << g.keep << ',' << g.runs << ',' << g.failed << ',' << format(a.mean)
        << ',' << format(a.std) << ',' << format(b.mean) << ',' << format(b.std) << ',' << format(l.mean) << ','
        << format(l.std) << ',' << format(k.mean) << ',' << format(k.std) << '\n';
  }
  write_text(path, out.str());
}

int report(const fs::path& out) {
  if (!fs::is_directory(out)) throw IoError(out.string() + " is not a directory");
  std::vector<CellResult> cells;
  for (const auto& entry : fs::directory_iterator(out)) {
    if (!entry.is_directory()) continue;
    const fs::path config_path = entry.path() / "config.json";
    if (!fs::exists(config_path)) continue;
    std::ifstream in(config_path);
    std::stringstream text;
    text << in.rdbuf();
    CellResult c;
    c.cell = cell_from_json(text.str());
    c.hash = entry.path().filename().string();
    const fs::path record = entry.path() / "record.jsonl";
    const fs::path partial = entry.path() / "record.jsonl.partial";
    if (fs::exists(record)) {
      c.rows = read_record(record);
    } else {
      c.failed = true;
      if (fs::exists(partial)) c.rows = read_record(partial);
    }
    cells.push_back(std::move(c));
  }
  auto key = [](const CellResult& c) {
    return std::make_tuple(static_cast<int>(c.cell.train.method), static_cast<int>(c.cell.scenario),
                           c.cell.keep_fraction, c.cell.train.seed, c.hash);
  };
  std::sort(cells.begin(), cells.end(), [&](const CellResult& a, const CellResult& b) { return key(a) < key(b); });
  write_summary(out / "summary.csv", cells);

  std::ostringstream curves;
  curves << "method,scenario,keep_fraction,seed,config_hash,epoch,accuracy,balanced_accuracy,pseudo_label_accuracy,"
            "generative_label_accuracy,prior_kl\n";
  for (const CellResult& c : cells) {
    for (const MetricsRow& r : c.rows) {
      curves << r.method << ',' << r.scenario << ',' << keep_label(c.cell.keep_fraction) << ',' << r.seed << ','
             << c.hash << ',' << r.epoch << ',' << format(r.accuracy) << ',' << format(r.balanced_accuracy) << ','
             << format(r.pseudo_label_accuracy) << ',' << format(r.generative_label_accuracy) << ','
             << format(r.prior_kl) << '\n';
    }
  }
  write_text(out / "curves.csv", curves.str());
  return static_cast<int>(cells.size());
}

}  // namespace getda

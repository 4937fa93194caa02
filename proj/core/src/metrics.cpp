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
#include "getda/metrics.hpp"

#include <cmath>
#include <limits>

#include "getda/error.hpp"

namespace getda {

ClassificationMetrics classification_metrics(const Labels& truth, const Labels& predicted,
                                             const std::vector<int>& class_set) {
  if (truth.size() != predicted.size()) throw InvalidInput("classification_metrics: size mismatch");
  if (class_set.empty()) throw InvalidInput("classification_metrics: empty class set");
  ClassificationMetrics out;
  if (truth.empty()) throw InvalidInput("classification_metrics: no samples");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i] ? 1 : 0;
  out.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());

  double recall_sum = 0.0;
  int counted = 0;
  out.per_class_recall.reserve(class_set.size());
  for (int c : class_set) {
    std::size_t support = 0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (truth[i] != c) continue;
      ++support;
      hits += predicted[i] == c ? 1 : 0;
    }
    if (support == 0) {
      out.per_class_recall.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    const double recall = static_cast<double>(hits) / static_cast<double>(support);
    out.per_class_recall.push_back(recall);
    recall_sum += recall;
    ++counted;
  }
  out.balanced_accuracy = counted > 0 ? recall_sum / counted : 0.0;
  return out;
}

Labels restricted_argmax(const Matrix& scores, const std::vector<int>& class_set) {
  if (class_set.empty()) throw InvalidInput("restricted_argmax: empty class set");
  Labels out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    int best = class_set.front();
    for (int c : class_set) {
      if (c < 0 || c >= scores.cols()) throw InvalidInput("restricted_argmax: class index out of range");
      if (scores(r, c) > scores(r, best) || (scores(r, c) == scores(r, best) && c < best)) best = c;
    }
    out[static_cast<std::size_t>(r)] = best;
  }
  return out;
}

Evaluator::Evaluator(const DomainPair& pair) : pair_(&pair) {}

ClassificationMetrics Evaluator::evaluate_network(const Network& net) const {
  const ForwardPass pass = net.predict(pair_->target_unlabeled());
  return evaluate_predictions(restricted_argmax(pass.logits, pair_->target_class_set()));
}

ClassificationMetrics Evaluator::evaluate_predictions(const Labels& predicted) const {
  return classification_metrics(pair_->target_truth(TruthAccess{}), predicted, pair_->target_class_set());
}

double Evaluator::label_accuracy(const ProbabilityMatrix& labels) const {
  const Labels& truth = pair_->target_truth(TruthAccess{});
  if (static_cast<std::size_t>(labels.rows()) != truth.size()) {
    throw InvalidInput("label_accuracy: row count does not match the target set");
  }
  if (truth.empty()) return std::numeric_limits<double>::quiet_NaN();
  const Labels predicted = argmax_rows(labels);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == predicted[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(truth.size());
}

Simplex Evaluator::true_class_frequencies() const {
  const Labels& truth = pair_->target_truth(TruthAccess{});
  Simplex freq = Simplex::Zero(pair_->class_count());
  for (int y : truth) freq(y) += 1.0;
  if (!truth.empty()) freq /= static_cast<double>(truth.size());
  return freq;
}

double Evaluator::prior_kl(const Simplex& prior) const {
  if (prior.size() != pair_->class_count()) throw InvalidInput("prior_kl: prior size mismatch");
  return kl_divergence(prior, true_class_frequencies());
}

}  // namespace getda

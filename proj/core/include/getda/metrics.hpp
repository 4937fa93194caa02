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
// Target-domain evaluation. Evaluator is the only code path that reads the
// hidden target labels of a DomainPair.

#ifndef GETDA_METRICS_HPP_
#define GETDA_METRICS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "getda/datasynth.hpp"
#include "getda/network.hpp"
#include "getda/numerics.hpp"

namespace getda {

struct ClassificationMetrics {
  double accuracy = 0.0;
  // Mean of per_class_recall.
  double balanced_accuracy = 0.0;
  // Indexed like the class set passed to classification_metrics.
  std::vector<double> per_class_recall;
};

// Accuracy and per-class recall over the classes in `class_set`. Classes in the
// set without any true sample are left out of the balanced mean (recall NaN).
ClassificationMetrics classification_metrics(const Labels& truth, const Labels& predicted,
                                             const std::vector<int>& class_set);

// Argmax over the columns listed in `class_set` only.
Labels restricted_argmax(const Matrix& scores, const std::vector<int>& class_set);

// One evaluation row per (run, epoch).
struct MetricsRow {
  std::string method;
  std::string scenario;
  std::uint64_t seed = 0;
  int epoch = 0;
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  std::vector<double> per_class_recall;
  // Accuracy of the fused labels (yhat_g) and of the bank labels; NaN when the
  // method produces none.
  double pseudo_label_accuracy = 0.0;
  double generative_label_accuracy = 0.0;
  // KL(pi || true target frequencies); NaN for methods without a prior.
  double prior_kl = 0.0;
};

class Evaluator {
 public:
  explicit Evaluator(const DomainPair& pair);

  // Network logits argmaxed over target_class_set.
  ClassificationMetrics evaluate_network(const Network& net) const;
  ClassificationMetrics evaluate_predictions(const Labels& predicted) const;

  // Fraction of unlabeled target rows whose argmax label is correct.
  double label_accuracy(const ProbabilityMatrix& labels) const;

  // Empirical class frequencies of the unlabeled target set, length C.
  Simplex true_class_frequencies() const;

  // KL(prior || true frequencies) with the frequencies clamped at kLogEpsilon.
  double prior_kl(const Simplex& prior) const;

 private:
  const DomainPair* pair_;
};

}  // namespace getda

#endif  // GETDA_METRICS_HPP_

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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "getda/datasynth.hpp"
#include "getda/network.hpp"

namespace getda {
namespace {

DomainPair imbalanced_pair() {
  ShiftSpec s;
  s.class_count = 6;
  s.dim = 4;
  s.seed = 2;
  return apply_class_imbalance(make_domain_pair(s, Scenario::kUda), 0.3);
}

TEST(ClassificationMetrics, Perfect) {
  const Labels y = {0, 1, 2, 2, 1};
  const auto m = classification_metrics(y, y, {0, 1, 2});
  EXPECT_EQ(m.accuracy, 1.0);
  EXPECT_EQ(m.balanced_accuracy, 1.0);
  EXPECT_EQ(m.per_class_recall, (std::vector<double>{1.0, 1.0, 1.0}));
}

TEST(ClassificationMetrics, MajorityPredictorOnImbalancedSet) {
  Labels truth;
  for (int c = 0; c < 6; ++c)
    for (int k = 0; k < (c < 3 ? 30 : 100); ++k) truth.push_back(c);
  const Labels pred(truth.size(), 3);
  const auto m = classification_metrics(truth, pred, {0, 1, 2, 3, 4, 5});
  EXPECT_NEAR(m.accuracy, 100.0 / 390.0, 1e-15);
  EXPECT_NEAR(m.accuracy, 0.2564, 1e-4);
  EXPECT_NEAR(m.balanced_accuracy, 1.0 / 6.0, 1e-15);
}

TEST(ClassificationMetrics, MissingClassIsSkipped) {
  const auto m = classification_metrics({0, 0, 1}, {0, 1, 1}, {0, 1, 2});
  EXPECT_NEAR(m.balanced_accuracy, 0.75, 1e-15);
  EXPECT_TRUE(std::isnan(m.per_class_recall[2]));
}

TEST(RestrictedArgmax, IgnoresClassesOutsideSet) {
  Matrix s(2, 4);
  s << 0.1, 0.2, 0.9, 0.0, 0.5, 0.5, 0.0, 3.0;
  EXPECT_EQ(restricted_argmax(s, {0, 1}), (Labels{1, 0}));
  EXPECT_EQ(restricted_argmax(s, {0, 1, 2, 3}), (Labels{2, 3}));
}

TEST(Evaluator, PriorKlOfUniform) {
  const DomainPair pair = imbalanced_pair();
  const Evaluator ev(pair);
  const Simplex freq = ev.true_class_frequencies();
  double ref = 0.0;
  for (int c = 0; c < 6; ++c) ref += (1.0 / 6) * std::log((1.0 / 6) / (c < 3 ? 30.0 / 390 : 100.0 / 390));
  EXPECT_NEAR(ev.prior_kl(Simplex::Constant(6, 1.0 / 6)), ref, 1e-12);
  EXPECT_NEAR(ref, 0.171203, 1e-6);
  EXPECT_NEAR(ev.prior_kl(freq), 0.0, 1e-15);
}

TEST(Evaluator, NetworkPredictionsAndLabelAccuracy) {
  const DomainPair pair = imbalanced_pair();
  const Evaluator ev(pair);
  NetworkShape shape;
  shape.input_dim = 4;
  shape.hidden = {3};
  shape.class_count = 6;
  Network net(shape, 1);
  net.parameters().head.weight.setZero();
  net.parameters().head.bias.setZero();
  net.parameters().head.bias(4) = 1.0;
  const auto m = ev.evaluate_network(net);
  EXPECT_NEAR(m.accuracy, 100.0 / 390.0, 1e-15);
  EXPECT_NEAR(m.balanced_accuracy, 1.0 / 6.0, 1e-15);
  const Matrix all_four = one_hot(Labels(390, 4), 6);
  EXPECT_NEAR(ev.label_accuracy(all_four), 100.0 / 390.0, 1e-15);
  EXPECT_EQ(ev.evaluate_predictions(Labels(390, 4)).accuracy, m.accuracy);
}

TEST(Evaluator, PdaRestrictsToTargetClasses) {
  ShiftSpec s;
  s.class_count = 6;
  s.dim = 4;
  const DomainPair pair = make_domain_pair(s, Scenario::kPda);
  NetworkShape shape;
  shape.input_dim = 4;
  shape.hidden = {3};
  shape.class_count = 6;
  Network net(shape, 1);
  net.parameters().head.weight.setZero();
  net.parameters().head.bias.setZero();
  net.parameters().head.bias(5) = 2.0;  // outside the target set
  net.parameters().head.bias(1) = 1.0;
  const auto m = Evaluator(pair).evaluate_network(net);
  EXPECT_EQ(m.per_class_recall.size(), 3u);
  EXPECT_NEAR(m.accuracy, 1.0 / 3.0, 1e-15);
  EXPECT_EQ(m.per_class_recall[1], 1.0);
}

}  // namespace
}  // namespace getda

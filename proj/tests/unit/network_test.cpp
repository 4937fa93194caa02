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


#include "getda/network.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "getda/error.hpp"
#include "oracle.hpp"

namespace getda {
namespace {

NetworkShape small_shape() {
  NetworkShape s;
  s.input_dim = 4;
  s.hidden = {6, 5};
  s.class_count = 3;
  return s;
}

void to_naive(const ParameterSet& p, std::vector<oracle::NaiveLayer>& extractor, oracle::NaiveLayer& head) {
  extractor.clear();
  for (const Layer& l : p.extractor) {
    extractor.push_back({oracle::to_rows(l.weight), std::vector<double>(l.bias.data(), l.bias.data() + l.bias.size())});
  }
  head = {oracle::to_rows(p.head.weight),
          std::vector<double>(p.head.bias.data(), p.head.bias.data() + p.head.bias.size())};
}

TEST(Network, ZeroHeadGivesZeroLogits) {
  Network net(small_shape(), 1);
  net.parameters().head.weight.setZero();
  net.parameters().head.bias.setZero();
  std::mt19937_64 rng(2);
  const Matrix x = oracle::random_matrix(rng, 3, 4);
  const ForwardPass out = net.predict(x);
  EXPECT_EQ(out.logits.cwiseAbs().maxCoeff(), 0.0);
  const Matrix p = softmax_rows(out.logits);
  EXPECT_NEAR(p(0, 0), 1.0 / 3, 1e-15);
}

TEST(Network, ForwardIsDeterministic) {
  Network net(small_shape(), 7);
  Matrix x(1, 4);
  x << 0.1, -0.4, 2.0, 0.3;
  const ForwardPass a = net.forward(x);
  const ForwardPass b = net.forward(x);
  EXPECT_TRUE(a.logits == b.logits);
  EXPECT_TRUE(a.features == b.features);
  Network twin(small_shape(), 7);
  EXPECT_TRUE(twin.predict(x).logits == a.logits);
}

TEST(Network, LogitsMatchNaiveProducts) {
  Network net(small_shape(), 3);
  std::mt19937_64 rng(4);
  const Matrix x = oracle::random_matrix(rng, 5, 4);
  const ForwardPass out = net.predict(x);
  std::vector<oracle::NaiveLayer> ext;
  oracle::NaiveLayer head;
  to_naive(net.parameters(), ext, head);
  oracle::Rows feats, logits;
  oracle::naive_forward(ext, head, oracle::to_rows(x), feats, logits);
  EXPECT_LT(oracle::max_abs_diff(out.logits, oracle::to_matrix(logits)), 1e-12);
  EXPECT_LT(oracle::max_abs_diff(out.features, oracle::to_matrix(feats)), 1e-12);
  EXPECT_EQ(out.features.cols(), small_shape().feature_dim());
}

TEST(Network, InitScaleAndZeroBiases) {
  Network net(small_shape(), 9);
  const auto& p = net.parameters();
  for (const Layer& l : p.extractor) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.weight.cols()));
    EXPECT_LE(l.weight.cwiseAbs().maxCoeff(), bound);
    EXPECT_EQ(l.bias.cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_EQ(p.head.bias.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Network, DimensionMismatchThrows) {
  Network net(small_shape(), 1);
  EXPECT_THROW(net.forward(Matrix::Zero(2, 3)), InvalidInput);
}

TEST(Network, BackwardNeedsForward) {
  Network net(small_shape(), 1);
  EXPECT_THROW(net.backward(Matrix::Zero(1, 3), Matrix()), StateError);
}

TEST(Network, ZeroUpstreamGivesZeroGradients) {
  Network net(small_shape(), 1);
  std::mt19937_64 rng(4);
  net.forward(oracle::random_matrix(rng, 5, 4));
  const ParameterSet g = net.backward(Matrix::Zero(5, 3), Matrix());
  for (const auto& t : g.tensors())
    for (double v : t) EXPECT_EQ(v, 0.0);
}

TEST(Network, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(12);
  Network net(small_shape(), 5);
  const Matrix x = oracle::random_matrix(rng, 5, 4);
  // Linear functional of both outputs, so the two upstream paths are exercised
  // together.
  const Matrix a = oracle::random_matrix(rng, 5, 3);
  const Matrix b = oracle::random_matrix(rng, 5, 5);
  auto loss = [&] {
    const ForwardPass out = net.predict(x);
    return (a.array() * out.logits.array()).sum() + (b.array() * out.features.array()).sum();
  };
  net.forward(x);
  const ParameterSet grads = net.backward(a, b);
  auto values = net.parameters().tensors();
  const auto analytic = grads.tensors();
  ASSERT_EQ(values.size(), analytic.size());
  for (std::size_t t = 0; t < values.size(); ++t) {
    EXPECT_LT(oracle::fd_max_relative_error(values[t], analytic[t], loss), 1e-4) << "tensor " << t;
  }
}

TEST(Network, BackwardIsLinearInUpstream) {
  std::mt19937_64 rng(13);
  Network net(small_shape(), 5);
  const Matrix x = oracle::random_matrix(rng, 4, 4);
  const Matrix a = oracle::random_matrix(rng, 4, 3);
  const Matrix b = oracle::random_matrix(rng, 4, 5);
  net.forward(x);
  const ParameterSet g1 = net.backward(a, b);
  const ParameterSet g2 = net.backward(2.0 * a, 2.0 * b);
  const auto t1 = g1.tensors();
  const auto t2 = g2.tensors();
  for (std::size_t t = 0; t < t1.size(); ++t)
    for (std::size_t i = 0; i < t1[t].size(); ++i) EXPECT_NEAR(t2[t][i], 2.0 * t1[t][i], 1e-12);
}

TEST(Sgd, ScheduleEndpoints) {
  SgdState s;
  s.max_iterations = 100;
  EXPECT_DOUBLE_EQ(s.learning_rate(ParamGroup::kFeatureExtractor), 0.001);
  EXPECT_DOUBLE_EQ(s.learning_rate(ParamGroup::kClassifier), 0.01);
  EXPECT_DOUBLE_EQ(s.learning_rate(ParamGroup::kEmbeddingPrototypes), 0.01);
  s.iteration = 100;
  const double expected = std::pow(11.0, -0.75);
  EXPECT_NEAR(s.schedule_factor(), expected, 1e-15);
  EXPECT_NEAR(s.schedule_factor(), 0.16556, 1e-5);
  EXPECT_NEAR(s.learning_rate(ParamGroup::kClassifier), 0.01 * expected, 1e-15);
}

TEST(Sgd, RateIsPositiveAndNonIncreasing) {
  SgdState s;
  s.max_iterations = 37;
  double last = s.schedule_factor();
  for (std::int64_t i = 1; i <= 37; ++i) {
    s.iteration = i;
    const double now = s.schedule_factor();
    EXPECT_GT(now, 0.0);
    EXPECT_LE(now, last);
    last = now;
  }
}

TEST(Sgd, ZeroGradientZeroDecayIsNoOp) {
  Network net(small_shape(), 2);
  const ParameterSet before = net.parameters();
  SgdState s;
  s.config.weight_decay = 0.0;
  s.max_iterations = 10;
  const ParameterSet zeros = net.parameters().zeros_like();
  auto slots = network_slots(net.parameters(), zeros);
  sgd_step(s, slots);
  const auto a = before.tensors();
  const auto b = net.parameters().tensors();
  for (std::size_t t = 0; t < a.size(); ++t)
    for (std::size_t i = 0; i < a[t].size(); ++i) EXPECT_EQ(a[t][i], b[t][i]);
  EXPECT_EQ(s.iteration, 1);
}

TEST(Sgd, MomentumUpdateByHand) {
  std::vector<double> value = {1.0, -2.0};
  const std::vector<double> grad = {0.5, 0.25};
  SgdState s;
  s.max_iterations = 4;
  const std::vector<ParamSlot> slots = {{value, grad, ParamGroup::kClassifier}};
  sgd_step(s, slots);
  // v = g + 1e-3 * p; p -= 0.01 * v
  const double v0 = 0.5 + 1e-3 * 1.0;
  const double v1 = 0.25 + 1e-3 * -2.0;
  EXPECT_NEAR(value[0], 1.0 - 0.01 * v0, 1e-15);
  EXPECT_NEAR(value[1], -2.0 - 0.01 * v1, 1e-15);
  const double p0 = value[0];
  const double p1 = value[1];
  sgd_step(s, slots);
  const double lr = 0.01 * std::pow(1.0 + 10.0 / 4.0, -0.75);
  const double w0 = 0.9 * v0 + 0.5 + 1e-3 * p0;
  const double w1 = 0.9 * v1 + 0.25 + 1e-3 * p1;
  EXPECT_NEAR(value[0], p0 - lr * w0, 1e-15);
  EXPECT_NEAR(value[1], p1 - lr * w1, 1e-15);
}

TEST(Sgd, EmbeddingGroupHasNoDecay) {
  std::vector<double> value = {3.0};
  const std::vector<double> grad = {0.0};
  SgdState s;
  const std::vector<ParamSlot> slots = {{value, grad, ParamGroup::kEmbeddingPrototypes}};
  sgd_step(s, slots);
  EXPECT_EQ(value[0], 3.0);
}

TEST(Sgd, NonFiniteGradientThrows) {
  std::vector<double> value = {1.0};
  const std::vector<double> grad = {std::numeric_limits<double>::quiet_NaN()};
  SgdState s;
  const std::vector<ParamSlot> slots = {{value, grad, ParamGroup::kClassifier}};
  EXPECT_THROW(sgd_step(s, slots), TrainingDiverged);
  EXPECT_EQ(value[0], 1.0);
}

TEST(Sgd, PrototypeViewTracksHeadWeights) {
  Network net(small_shape(), 2);
  const Matrix& protos = net.classifier_prototypes();
  const Matrix before = protos;
  ParameterSet grads = net.parameters().zeros_like();
  grads.head.weight.setOnes();
  SgdState s;
  auto slots = network_slots(net.parameters(), grads);
  sgd_step(s, slots);
  EXPECT_TRUE(protos == net.parameters().head.weight);
  EXPECT_GT((protos - before).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Sgd, SlotGroups) {
  Network net(small_shape(), 2);
  const ParameterSet g = net.parameters().zeros_like();
  const auto slots = network_slots(net.parameters(), g);
  ASSERT_EQ(slots.size(), 6u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(slots[i].group, ParamGroup::kFeatureExtractor);
  EXPECT_EQ(slots[4].group, ParamGroup::kClassifier);
  EXPECT_EQ(slots[5].group, ParamGroup::kClassifier);
}

}  // namespace
}  // namespace getda

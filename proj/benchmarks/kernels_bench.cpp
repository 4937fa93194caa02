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


#include <benchmark/benchmark.h>

#include <random>

#include "getda/network.hpp"
#include "getda/numerics.hpp"
#include "getda/objective.hpp"
#include "getda/regularizer.hpp"

namespace {

using namespace getda;

Matrix filled(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

void BM_Softmax(benchmark::State& state) {
  const Matrix logits = filled(state.range(0), state.range(1), 1);
  for (auto _ : state) benchmark::DoNotOptimize(softmax_rows(logits, 0.1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Softmax)->Args({64, 6})->Args({512, 6})->Args({512, 64});

void BM_CosineMatrix(benchmark::State& state) {
  const Matrix f = filled(state.range(0), state.range(1), 2);
  const Matrix w = filled(6, state.range(1), 3);
  for (auto _ : state) benchmark::DoNotOptimize(cosine_matrix(f, w));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CosineMatrix)->Args({64, 16})->Args({512, 16})->Args({512, 128});

void BM_Auxiliary(benchmark::State& state) {
  const Matrix p = softmax_rows(filled(state.range(0), state.range(1), 4));
  for (auto _ : state) benchmark::DoNotOptimize(auxiliary_distribution(p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Auxiliary)->Args({64, 6})->Args({1024, 6})->Args({1024, 64});

void BM_EvaluateBatch(benchmark::State& state) {
  const auto batch = state.range(0);
  NetworkShape shape;
  shape.input_dim = 16;
  shape.hidden = {32, 16};
  shape.class_count = 6;
  Network net(shape, 5);
  const Matrix xs = filled(batch, 16, 6);
  Labels ys(static_cast<std::size_t>(batch));
  for (Eigen::Index i = 0; i < batch; ++i) ys[static_cast<std::size_t>(i)] = static_cast<int>(i % 6);
  const Matrix xt = filled(batch, 16, 7);
  EmbeddingPrototypes mf{l2_normalize_rows(filled(6, 16, 8))};
  BatchInputs in;
  in.supervised_x = &xs;
  in.supervised_y = &ys;
  in.target_x = &xt;
  in.embedding = &mf;
  in.prior = Vector::Constant(6, 1.0 / 6.0);
  BatchTargets targets;
  targets.classifier_space = softmax_rows(filled(batch, 6, 9));
  targets.embedding_space = softmax_rows(filled(batch, 6, 10));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_batch(net, in, targets));
  state.SetItemsProcessed(state.iterations() * batch * 2);
}
BENCHMARK(BM_EvaluateBatch)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();

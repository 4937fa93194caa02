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

#ifndef GETDA_NETWORK_HPP_
#define GETDA_NETWORK_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "getda/numerics.hpp"

namespace getda {

// Dense layer y = x W^T + b with W stored out x in.
struct Layer {
  Matrix weight;
  Vector bias;
};

// All trainable tensors of the two-stage model. Also used to hold gradients.
struct ParameterSet {
  std::vector<Layer> extractor;
  // C x d_f; row c doubles as the classifier prototype of class c.
  Layer head;

  ParameterSet zeros_like() const;
  bool all_finite() const;

  // Flat views over every tensor in a fixed order: extractor layers
  // (weight, bias) followed by the head (weight, bias).
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
};

enum class ParamGroup {
  kFeatureExtractor,
  kClassifier,
  // Learnable embedding prototypes: classifier rate, no weight decay.
  kEmbeddingPrototypes,
};

struct NetworkShape {
  int input_dim = 0;
  std::vector<int> hidden = {64, 32};
  int class_count = 0;

  int feature_dim() const { return hidden.empty() ? input_dim : hidden.back(); }
  void validate() const;
};

struct ForwardPass {
  FeatureMatrix features;
  Matrix logits;
};

// g(phi(x; theta_f); theta_g): tanh MLP feature extractor followed by a
// linear classifier head.
class Network {
 public:
  Network(NetworkShape shape, std::uint64_t seed);
  Network(NetworkShape shape, ParameterSet params);

  const NetworkShape& shape() const { return shape_; }
  const ParameterSet& parameters() const { return params_; }
  ParameterSet& parameters() { return params_; }

  // Row c of the head weight. Returned by reference so callers always see the
  // current weights.
  const Matrix& classifier_prototypes() const { return params_.head.weight; }

  // Forward pass that caches activations for a following backward().
  ForwardPass forward(const FeatureMatrix& x);
  // Forward pass without touching the cache.
  ForwardPass predict(const FeatureMatrix& x) const;

  // Exact gradients for the cached batch given dL/dlogits and dL/dfeatures.
  // Either upstream matrix may be empty (treated as zero). The two paths sum
  // at the feature extractor. Throws StateError without a cached forward.
  ParameterSet backward(const Matrix& grad_logits, const Matrix& grad_features) const;

  void clear_cache() { cache_.reset(); }
  bool has_cache() const { return cache_.has_value(); }

 private:
  struct Cache {
    // activations[0] is the input, activations[k] the output of layer k.
    std::vector<Matrix> activations;
  };

  ForwardPass run(const FeatureMatrix& x, Cache* cache) const;

  NetworkShape shape_;
  ParameterSet params_;
  std::optional<Cache> cache_;
};

struct SgdConfig {
  double momentum = 0.9;
  double weight_decay = 1e-3;
  double feature_lr = 1e-3;
  double classifier_lr = 1e-2;
  double omega = 10.0;
  double alpha = 0.75;
};

// One trainable tensor handed to the optimizer.
struct ParamSlot {
  std::span<double> value;
  std::span<const double> grad;
  ParamGroup group;
};

struct SgdState {
  SgdConfig config;
  std::int64_t iteration = 0;
  std::int64_t max_iterations = 1;
  // One momentum buffer per slot, sized on the first step.
  std::vector<std::vector<double>> velocity;

  // eta_0 * (1 + omega * i / I_max)^(-alpha) at the current iteration.
  double learning_rate(ParamGroup group) const;
  double schedule_factor() const;
};

// v <- momentum * v + grad + weight_decay * value; value <- value - eta_i * v.
// Embedding-prototype slots skip the weight-decay term.
// Increments the iteration counter once. Throws TrainingDiverged on a
// non-finite gradient before modifying anything.
void sgd_step(SgdState& state, std::span<const ParamSlot> slots);

// Slots for every network tensor paired with the matching gradient tensor.
std::vector<ParamSlot> network_slots(ParameterSet& params, const ParameterSet& grads);

}  // namespace getda

#endif  // GETDA_NETWORK_HPP_

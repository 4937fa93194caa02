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

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "getda/error.hpp"

namespace getda {
namespace {

std::span<double> view(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> view(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<const double> view(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}
std::span<const double> view(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Layer init_layer(int out, int in, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Layer layer;
  layer.weight.resize(out, in);
  for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = dist(rng);
  layer.bias = Vector::Zero(out);
  return layer;
}

}  // namespace

ParameterSet ParameterSet::zeros_like() const {
  ParameterSet out;
  for (const Layer& l : extractor) {
    out.extractor.push_back({Matrix::Zero(l.weight.rows(), l.weight.cols()), Vector::Zero(l.bias.size())});
  }
  out.head = {Matrix::Zero(head.weight.rows(), head.weight.cols()), Vector::Zero(head.bias.size())};
  return out;
}

bool ParameterSet::all_finite() const {
  for (const Layer& l : extractor) {
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  }
  return head.weight.allFinite() && head.bias.allFinite();
}

std::vector<std::span<double>> ParameterSet::tensors() {
  std::vector<std::span<double>> out;
  for (Layer& l : extractor) {
    out.push_back(view(l.weight));
    out.push_back(view(l.bias));
  }
  out.push_back(view(head.weight));
  out.push_back(view(head.bias));
  return out;
}

std::vector<std::span<const double>> ParameterSet::tensors() const {
  std::vector<std::span<const double>> out;
  for (const Layer& l : extractor) {
    out.push_back(view(l.weight));
    out.push_back(view(l.bias));
  }
  out.push_back(view(head.weight));
  out.push_back(view(head.bias));
  return out;
}

void NetworkShape::validate() const {
  if (input_dim < 1) throw InvalidInput("NetworkShape: input_dim must be >= 1");
  if (class_count < 2) throw InvalidInput("NetworkShape: class_count must be >= 2");
  for (int h : hidden) {
    if (h < 1) throw InvalidInput("NetworkShape: hidden widths must be >= 1");
  }
}

Network::Network(NetworkShape shape, std::uint64_t seed) : shape_(std::move(shape)) {
  shape_.validate();
  std::mt19937_64 rng(seed);
  int in = shape_.input_dim;
  for (int width : shape_.hidden) {
    params_.extractor.push_back(init_layer(width, in, rng));
    in = width;
  }
  params_.head = init_layer(shape_.class_count, in, rng);
}

Network::Network(NetworkShape shape, ParameterSet params)
    : shape_(std::move(shape)), params_(std::move(params)) {
  shape_.validate();
  if (params_.extractor.size() != shape_.hidden.size()) {
    throw InvalidInput("Network: parameter layer count does not match shape");
  }
  int in = shape_.input_dim;
  for (std::size_t k = 0; k < shape_.hidden.size(); ++k) {
    const Layer& l = params_.extractor[k];
    if (l.weight.rows() != shape_.hidden[k] || l.weight.cols() != in || l.bias.size() != shape_.hidden[k]) {
      throw InvalidInput("Network: layer " + std::to_string(k) + " has the wrong shape");
    }
    in = shape_.hidden[k];
  }
  if (params_.head.weight.rows() != shape_.class_count || params_.head.weight.cols() != in ||
      params_.head.bias.size() != shape_.class_count) {
    throw InvalidInput("Network: classifier head has the wrong shape");
  }
}

ForwardPass Network::run(const FeatureMatrix& x, Cache* cache) const {
  if (x.cols() != shape_.input_dim) {
    throw InvalidInput("Network::forward: input has " + std::to_string(x.cols()) + " columns, expected " +
                       std::to_string(shape_.input_dim));
  }
  require_finite(x, "Network::forward");
  Matrix a = x;
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(a);
  }
  for (const Layer& l : params_.extractor) {
    Matrix z = a * l.weight.transpose();
    z.rowwise() += l.bias.transpose();
    a = z.array().tanh().matrix();
    if (cache) cache->activations.push_back(a);
  }
  ForwardPass out;
  out.logits = a * params_.head.weight.transpose();
  out.logits.rowwise() += params_.head.bias.transpose();
  out.features = std::move(a);
  return out;
}

ForwardPass Network::forward(const FeatureMatrix& x) {
  Cache cache;
  ForwardPass out = run(x, &cache);
  cache_ = std::move(cache);
  return out;
}

ForwardPass Network::predict(const FeatureMatrix& x) const { return run(x, nullptr); }

ParameterSet Network::backward(const Matrix& grad_logits, const Matrix& grad_features) const {
  if (!cache_) throw StateError("Network::backward called without a cached forward pass");
  const auto& acts = cache_->activations;
  const Matrix& features = acts.back();
  const Eigen::Index n = features.rows();
  const bool has_logit_grad = grad_logits.size() > 0;
  const bool has_feature_grad = grad_features.size() > 0;
  if (has_logit_grad && (grad_logits.rows() != n || grad_logits.cols() != shape_.class_count)) {
    throw InvalidInput("Network::backward: logit gradient has the wrong shape");
  }
  if (has_feature_grad && (grad_features.rows() != n || grad_features.cols() != features.cols())) {
    throw InvalidInput("Network::backward: feature gradient has the wrong shape");
  }

  ParameterSet grads = params_.zeros_like();
  Matrix upstream = Matrix::Zero(n, features.cols());
  if (has_logit_grad) {
    grads.head.weight = grad_logits.transpose() * features;
    grads.head.bias = grad_logits.colwise().sum().transpose();
    upstream += grad_logits * params_.head.weight;
  }
  if (has_feature_grad) upstream += grad_features;

  for (std::size_t k = params_.extractor.size(); k-- > 0;) {
    const Matrix& out = acts[k + 1];
    const Matrix& in = acts[k];
    const Matrix dz = (upstream.array() * (1.0 - out.array().square())).matrix();
    grads.extractor[k].weight = dz.transpose() * in;
    grads.extractor[k].bias = dz.colwise().sum().transpose();
    if (k > 0) upstream = dz * params_.extractor[k].weight;
  }
  return grads;
}

double SgdState::schedule_factor() const {
  const double horizon = static_cast<double>(std::max<std::int64_t>(max_iterations, 1));
  return std::pow(1.0 + config.omega * static_cast<double>(iteration) / horizon, -config.alpha);
}

double SgdState::learning_rate(ParamGroup group) const {
  const double base = group == ParamGroup::kFeatureExtractor ? config.feature_lr : config.classifier_lr;
  return base * schedule_factor();
}

void sgd_step(SgdState& state, std::span<const ParamSlot> slots) {
  for (const ParamSlot& slot : slots) {
    if (slot.value.size() != slot.grad.size()) {
      throw InvalidInput("sgd_step: gradient shape does not match parameter");
    }
    for (double g : slot.grad) {
      if (!std::isfinite(g)) {
        throw TrainingDiverged("sgd_step: non-finite gradient at iteration " + std::to_string(state.iteration));
      }
    }
  }
  if (state.velocity.empty()) {
    for (const ParamSlot& slot : slots) state.velocity.emplace_back(slot.value.size(), 0.0);
  } else if (state.velocity.size() != slots.size()) {
    throw InvalidInput("sgd_step: slot count changed between steps");
  }
  const SgdConfig& cfg = state.config;
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const ParamSlot& slot = slots[s];
    std::vector<double>& v = state.velocity[s];
    if (v.size() != slot.value.size()) throw InvalidInput("sgd_step: slot size changed between steps");
    const double lr = state.learning_rate(slot.group);
    const double decay = slot.group == ParamGroup::kEmbeddingPrototypes ? 0.0 : cfg.weight_decay;
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = cfg.momentum * v[i] + slot.grad[i] + decay * slot.value[i];
      slot.value[i] -= lr * v[i];
    }
  }
  ++state.iteration;
}

std::vector<ParamSlot> network_slots(ParameterSet& params, const ParameterSet& grads) {
  auto values = params.tensors();
  auto gs = grads.tensors();
  if (values.size() != gs.size()) throw InvalidInput("network_slots: gradient layout mismatch");
  std::vector<ParamSlot> out;
  out.reserve(values.size());
  const std::size_t head_start = values.size() - 2;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.push_back({values[i], gs[i], i >= head_start ? ParamGroup::kClassifier : ParamGroup::kFeatureExtractor});
  }
  return out;
}

}  // namespace getda

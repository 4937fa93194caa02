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

// Per-batch training loss (negated M-step objective) and its exact gradient.
//
//   L = (1/N_s) sum_s CE(y_s, softmax(logits_s))
//     + (1/B) sum_j sum_c -yg_jc log P_g(c|f_j)      P_g against head rows
//     + (1/B) sum_j sum_c -yf_jc log P_f(c|f_j)      P_f against mu_f
//     + (1/sum w) sum_j w_j CE(yl_j, softmax(logits_j))   baselines
//     + (1/B) sum_j H(softmax(logits_j))               MinEnt
//
// Every term is optional; the supervised and target rows share one forward
// pass so the feature-extractor gradients of all terms add up.

#ifndef GETDA_OBJECTIVE_HPP_
#define GETDA_OBJECTIVE_HPP_

#include "getda/network.hpp"
#include "getda/numerics.hpp"
#include "getda/regularizer.hpp"

namespace getda {

// Soft targets for the target rows of one batch. An empty matrix turns the
// corresponding term off.
struct BatchTargets {
  ProbabilityMatrix classifier_space;   // yhat_g, paired with P_g
  ProbabilityMatrix embedding_space;    // yhat_f, paired with P_f
  ProbabilityMatrix logit_labels;       // CE on network logits
  Vector logit_weights;                 // per-row mask for logit_labels; empty = all ones
  bool entropy_minimization = false;
};

struct LossBreakdown {
  double total = 0.0;
  double supervised = 0.0;
  double classifier_space = 0.0;
  double embedding_space = 0.0;
  double logit_labels = 0.0;
  double entropy = 0.0;
};

struct BatchGradients {
  ParameterSet network;
  // Gradient with respect to the embedding prototypes (zeros when the
  // embedding-space term is off).
  FeatureMatrix embedding_prototypes;
};

struct BatchInputs {
  const FeatureMatrix* supervised_x = nullptr;  // may be null or empty
  const Labels* supervised_y = nullptr;
  const FeatureMatrix* target_x = nullptr;      // may be null or empty
  const EmbeddingPrototypes* embedding = nullptr;
  Simplex prior;
  double temperature = 1.0;
};

struct BatchResult {
  LossBreakdown loss;
  // Forward outputs for the target rows (before any update).
  ForwardPass target;
  BatchGradients gradients;
};

// Runs one cached forward pass over [supervised; target] rows, evaluates L
// and back-propagates it. The network's cache holds this batch afterwards.
BatchResult evaluate_batch(Network& net, const BatchInputs& inputs, const BatchTargets& targets);

// Gradient of (1/B) sum_j sum_c -y_jc log softmax_c(log pi_c + cos(f_j, m_c)/tau)
// with respect to the features and the prototypes. Returns the loss value.
double prototype_cross_entropy(const FeatureMatrix& features, const FeatureMatrix& prototypes,
                               const Simplex& prior, double temperature, const ProbabilityMatrix& targets,
                               FeatureMatrix* grad_features, FeatureMatrix* grad_prototypes);

// Mean Shannon entropy of softmax(logits) over rows, with its gradient.
double mean_entropy(const Matrix& logits, Matrix* grad_logits);

// Weighted soft-label cross entropy on logits, normalized by the weight sum.
double logit_cross_entropy(const Matrix& logits, const ProbabilityMatrix& targets, const Vector& weights,
                           Matrix* grad_logits);

}  // namespace getda

#endif  // GETDA_OBJECTIVE_HPP_

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
// Comparison label generators that share the trainer: pseudo-labeling (PL),
// entropy minimization (MinEnt), nearest centroid (NC) and source-only.

#ifndef GETDA_BASELINES_HPP_
#define GETDA_BASELINES_HPP_

#include <string_view>
#include <vector>

#include "getda/numerics.hpp"

namespace getda {

// Training method of a run. kGet is the full generative model; the rest are
// the baselines.
enum class Method { kGet, kPl, kMinEnt, kNc, kSourceOnly };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);

struct PseudoLabels {
  ProbabilityMatrix labels;  // one-hot argmax
  Vector mask;               // 1 where max softmax >= threshold, else 0
};

// Hard pseudo labels from logits. Threshold must lie in [0, 1).
PseudoLabels pl_labels(const Matrix& logits, double threshold = 0.0);

// Mean Shannon entropy of softmax(logits); fills the logit gradient if asked.
double minent_loss(const Matrix& logits, Matrix* grad_logits = nullptr);

// One-hot argmax cosine similarity to unit-norm centroids, ties to the
// smaller index.
ProbabilityMatrix nc_labels(const FeatureMatrix& features, const FeatureMatrix& centroids);

}  // namespace getda

#endif  // GETDA_BASELINES_HPP_

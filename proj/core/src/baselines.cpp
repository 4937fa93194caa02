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
#include "getda/baselines.hpp"

#include <cmath>
#include <string>

#include "getda/error.hpp"
#include "getda/objective.hpp"

namespace getda {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kGet: return "get";
    case Method::kPl: return "pl";
    case Method::kMinEnt: return "minent";
    case Method::kNc: return "nc";
    case Method::kSourceOnly: return "source_only";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  for (Method m : {Method::kGet, Method::kPl, Method::kMinEnt, Method::kNc, Method::kSourceOnly}) {
    if (text == to_string(m)) return m;
  }
  throw InvalidInput("unknown method '" + std::string(text) + "' (expected get|pl|minent|nc|source_only)");
}

PseudoLabels pl_labels(const Matrix& logits, double threshold) {
  if (!(threshold >= 0.0 && threshold < 1.0)) throw InvalidInput("pl_labels: threshold must be in [0,1)");
  const ProbabilityMatrix p = softmax_rows(logits);
  PseudoLabels out;
  out.labels = one_hot(argmax_rows(p), static_cast<int>(logits.cols()));
  out.mask = Vector::Zero(logits.rows());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) out.mask(r) = p.row(r).maxCoeff() >= threshold ? 1.0 : 0.0;
  return out;
}

double minent_loss(const Matrix& logits, Matrix* grad_logits) { return mean_entropy(logits, grad_logits); }

ProbabilityMatrix nc_labels(const FeatureMatrix& features, const FeatureMatrix& centroids) {
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    if (std::abs(centroids.row(c).norm() - 1.0) > 1e-9) {
      throw InvalidInput("nc_labels: centroid " + std::to_string(c) + " is not unit norm");
    }
  }
  return one_hot(argmax_rows(cosine_matrix(features, centroids)), static_cast<int>(centroids.rows()));
}

}  // namespace getda

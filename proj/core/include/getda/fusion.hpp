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

#ifndef GETDA_FUSION_HPP_
#define GETDA_FUSION_HPP_

#include "getda/numerics.hpp"

namespace getda {

// Final soft training targets for the classifier-space and embedding-space
// losses.
struct FusedLabels {
  ProbabilityMatrix g;
  ProbabilityMatrix f;
  double gamma_q = 0.2;
};

// Row-wise (1 - gamma_q) * q + gamma_q * generative, with gamma_q in [0, 1].
ProbabilityMatrix mixup_labels(const ProbabilityMatrix& q, const ProbabilityMatrix& generative, double gamma_q);

}  // namespace getda

#endif  // GETDA_FUSION_HPP_

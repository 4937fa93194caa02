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

#include "getda/fusion.hpp"

#include "getda/error.hpp"

namespace getda {

ProbabilityMatrix mixup_labels(const ProbabilityMatrix& q, const ProbabilityMatrix& generative, double gamma_q) {
  if (q.rows() != generative.rows() || q.cols() != generative.cols()) {
    throw InvalidInput("mixup_labels: shape mismatch");
  }
  if (!(gamma_q >= 0.0 && gamma_q <= 1.0)) throw InvalidInput("mixup_labels: gamma_q must be in [0,1]");
  // Exact endpoints keep the reduction identities bit-for-bit.
  if (gamma_q == 0.0) return q;
  if (gamma_q == 1.0) return generative;
  return (1.0 - gamma_q) * q + gamma_q * generative;
}

}  // namespace getda

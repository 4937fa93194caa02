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

// Structure-similarity regularization.
//
// Predictive label distributions are built in the classifier space (P_g,
// against the head weights) and in the embedding space (P_f, against the
// learnable embedding prototypes). Each is paired with a balanced auxiliary
// distribution
//   Q(c|j) = [P(c|j) / sqrt(sum_j P(c|j))] / sum_c' [P(c'|j) / sqrt(sum_j P(c'|j))]
// that trades fidelity to P (row-wise KL) against the entropy of the class
// proportions of Q.

#ifndef GETDA_REGULARIZER_HPP_
#define GETDA_REGULARIZER_HPP_

#include "getda/generative_classifier.hpp"
#include "getda/numerics.hpp"

namespace getda {

// Learnable per-class vectors in the embedding space. Refreshed from the
// memory bank at the start of every epoch and then trained by SGD.
struct EmbeddingPrototypes {
  FeatureMatrix vectors;
};

struct RegularizerOutput {
  ProbabilityMatrix p;
  ProbabilityMatrix q;
  double objective = 0.0;
  Simplex class_proportions;
};

// P_g: posterior against the classifier prototypes (head weight rows).
ProbabilityMatrix predictive_g(const FeatureMatrix& features, const FeatureMatrix& classifier_prototypes,
                               const Simplex& prior, double temperature);

// P_f: posterior against the embedding prototypes.
ProbabilityMatrix predictive_f(const FeatureMatrix& features, const EmbeddingPrototypes& prototypes,
                               const Simplex& prior, double temperature);

// Closed-form balanced auxiliary distribution. Column sums are taken over all
// rows of `p`, so pass the full unlabeled target set. A column with zero mass
// is treated as holding kLogEpsilon and reported on stderr.
ProbabilityMatrix auxiliary_distribution(const ProbabilityMatrix& p);

// Same rescaling with caller-supplied column masses (any positive multiple of
// the column sums gives the same result).
ProbabilityMatrix auxiliary_distribution(const ProbabilityMatrix& p, const Vector& column_mass);

// (1/N) sum_j KL(Q_j || P_j) + sum_c Qbar_c log Qbar_c, with Qbar the column
// means of Q.
double objective_value(const ProbabilityMatrix& q, const ProbabilityMatrix& p);

// Convenience bundle: Q, objective and class proportions for a given P.
RegularizerOutput regularize(ProbabilityMatrix p);

// Value copy of the bank prototypes; later updates to either side do not
// propagate.
EmbeddingPrototypes reinit_embedding_prototypes(const MemoryBank& bank);

// Streaming alternative to the full-pass column sums: an EMA of per-batch
// column means, used to rescale batch posteriors.
class StreamingColumnMass {
 public:
  StreamingColumnMass(int class_count, double decay);

  void observe(const ProbabilityMatrix& batch_p);
  const Vector& mass() const { return mass_; }
  ProbabilityMatrix auxiliary(const ProbabilityMatrix& batch_p) const;

 private:
  Vector mass_;
  double decay_;
};

}  // namespace getda

#endif  // GETDA_REGULARIZER_HPP_

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

#include "getda/regularizer.hpp"

#include <cmath>
#include <iostream>

#include "getda/error.hpp"

namespace getda {

ProbabilityMatrix predictive_g(const FeatureMatrix& features, const FeatureMatrix& classifier_prototypes,
                               const Simplex& prior, double temperature) {
  return prototype_posterior(features, classifier_prototypes, prior, temperature);
}

ProbabilityMatrix predictive_f(const FeatureMatrix& features, const EmbeddingPrototypes& prototypes,
                               const Simplex& prior, double temperature) {
  return prototype_posterior(features, prototypes.vectors, prior, temperature);
}

ProbabilityMatrix auxiliary_distribution(const ProbabilityMatrix& p, const Vector& column_mass) {
  if (column_mass.size() != p.cols()) throw InvalidInput("auxiliary_distribution: column mass size mismatch");
  Vector inv_sqrt(p.cols());
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    double mass = column_mass(c);
    if (!(mass > 0.0)) {
      std::clog << "warning: auxiliary_distribution: class " << c
                << " has zero predicted mass; treating it as " << kLogEpsilon << '\n';
      mass = kLogEpsilon;
    }
    inv_sqrt(c) = 1.0 / std::sqrt(mass);
  }
  ProbabilityMatrix q = p * inv_sqrt.asDiagonal();
  for (Eigen::Index r = 0; r < q.rows(); ++r) {
    const double total = q.row(r).sum();
    if (!(total > 0.0)) throw InvalidInput("auxiliary_distribution: row with no probability mass");
    q.row(r) /= total;
  }
  return q;
}

ProbabilityMatrix auxiliary_distribution(const ProbabilityMatrix& p) {
  require_row_stochastic(p, "auxiliary_distribution");
  return auxiliary_distribution(p, p.colwise().sum().transpose());
}

double objective_value(const ProbabilityMatrix& q, const ProbabilityMatrix& p) {
  if (q.rows() != p.rows() || q.cols() != p.cols()) throw InvalidInput("objective_value: shape mismatch");
  if (q.rows() == 0) throw InvalidInput("objective_value: empty input");
  const double n = static_cast<double>(q.rows());
  const Vector qbar = column_means(q);
  double neg_entropy = 0.0;
  for (Eigen::Index c = 0; c < qbar.size(); ++c) {
    if (qbar(c) > 0.0) neg_entropy += qbar(c) * std::log(qbar(c));
  }
  return kl_rows(q, p) / n + neg_entropy;
}

RegularizerOutput regularize(ProbabilityMatrix p) {
  RegularizerOutput out;
  out.q = auxiliary_distribution(p);
  out.objective = objective_value(out.q, p);
  out.class_proportions = column_means(out.q);
  out.p = std::move(p);
  return out;
}

EmbeddingPrototypes reinit_embedding_prototypes(const MemoryBank& bank) {
  return EmbeddingPrototypes{bank.prototypes()};
}

StreamingColumnMass::StreamingColumnMass(int class_count, double decay)
    : mass_(Vector::Constant(class_count, 1.0 / class_count)), decay_(decay) {
  if (class_count < 1) throw InvalidInput("StreamingColumnMass: class_count must be >= 1");
  if (!(decay > 0.0 && decay <= 1.0)) throw InvalidInput("StreamingColumnMass: decay must be in (0,1]");
}

void StreamingColumnMass::observe(const ProbabilityMatrix& batch_p) {
  if (batch_p.rows() == 0) return;
  if (batch_p.cols() != mass_.size()) throw InvalidInput("StreamingColumnMass: class count mismatch");
  mass_ = (1.0 - decay_) * mass_ + decay_ * column_means(batch_p);
}

ProbabilityMatrix StreamingColumnMass::auxiliary(const ProbabilityMatrix& batch_p) const {
  return auxiliary_distribution(batch_p, mass_);
}

}  // namespace getda

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

// Online target-domain generative classifier.
//
// A C-component mixture over target features whose posterior is
//   p(c | f) = softmax_c(log pi_c + cos(f, mu_c) / tau).
// The prior pi and the unit-norm prototypes mu live in a MemoryBank and are
// refreshed by exponential moving averages once per mini-batch.

#ifndef GETDA_GENERATIVE_CLASSIFIER_HPP_
#define GETDA_GENERATIVE_CLASSIFIER_HPP_

#include <iosfwd>
#include <string_view>

#include "getda/numerics.hpp"

namespace getda {

// How the batch likelihood estimate P-bar is turned into a distribution.
enum class PriorUpdate {
  // Softmax each sample's scaled similarities, then average over the batch.
  kSoftmaxThenMean,
  // Average the scaled similarities over the batch, then softmax the mean.
  kMeanThenNormalize,
};

std::string_view to_string(PriorUpdate mode);
PriorUpdate parse_prior_update(std::string_view text);

struct BankConfig {
  double temperature = 1.0;
  double prior_decay = 0.1;
  double prototype_decay = 0.9;
  PriorUpdate prior_update = PriorUpdate::kSoftmaxThenMean;

  void validate() const;
};

// log pi_c + cos(f_j, prototype_c) / tau, softmaxed over c. Shared by the
// bank posterior and the regularizer's P_g / P_f.
ProbabilityMatrix prototype_posterior(const FeatureMatrix& features, const FeatureMatrix& prototypes,
                                      const Simplex& prior, double temperature);

class MemoryBank {
 public:
  // Uniform prior and L2-normalized copies of `initial_prototypes` (C x d_f).
  // Throws DegenerateInit on zero, duplicate or mis-shaped prototypes.
  static MemoryBank init(int class_count, int feature_dim, const BankConfig& config,
                         const FeatureMatrix& initial_prototypes);

  // Restores a bank from persisted state; invariants are re-checked.
  static MemoryBank restore(const BankConfig& config, Simplex prior, FeatureMatrix prototypes);

  int class_count() const { return static_cast<int>(prior_.size()); }
  int feature_dim() const { return static_cast<int>(prototypes_.cols()); }
  const Simplex& prior() const { return prior_; }
  const FeatureMatrix& prototypes() const { return prototypes_; }
  const BankConfig& config() const { return config_; }

  ProbabilityMatrix posterior(const FeatureMatrix& features) const;

  // One-hot argmax of the posterior (ties to the smaller class index).
  ProbabilityMatrix pseudo_label(const FeatureMatrix& features) const;
  Labels pseudo_label_indices(const FeatureMatrix& features) const;

  // pi <- (1 - gamma_pi) pi + gamma_pi P-bar, where P-bar comes from cosine
  // similarities to the classifier prototypes; renormalized afterwards.
  // No-op on an empty batch.
  void update_prior(const FeatureMatrix& batch_features, const FeatureMatrix& classifier_prototypes);

  // Batch-level estimate P-bar used by update_prior.
  Simplex batch_prior_estimate(const FeatureMatrix& batch_features,
                               const FeatureMatrix& classifier_prototypes) const;

  // EMA of each class prototype toward the mean of the features assigned to
  // it by argmax posterior; unassigned classes keep their prototype.
  void update_prototypes(const FeatureMatrix& batch_features);

  // Debug dump: class,prior,p0..p{d-1}.
  void write_csv(std::ostream& out) const;

 private:
  MemoryBank(BankConfig config, Simplex prior, FeatureMatrix prototypes);

  BankConfig config_;
  Simplex prior_;
  FeatureMatrix prototypes_;
};

}  // namespace getda

#endif  // GETDA_GENERATIVE_CLASSIFIER_HPP_

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

#include "getda/generative_classifier.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "getda/error.hpp"

namespace getda {
namespace {

// Two normalized prototypes closer than this in cosine count as duplicates.
constexpr double kDuplicateCosine = 1.0 - 1e-12;

}  // namespace

std::string_view to_string(PriorUpdate mode) {
  return mode == PriorUpdate::kSoftmaxThenMean ? "softmax_then_mean" : "mean_then_normalize";
}

PriorUpdate parse_prior_update(std::string_view text) {
  if (text == "softmax_then_mean") return PriorUpdate::kSoftmaxThenMean;
  if (text == "mean_then_normalize") return PriorUpdate::kMeanThenNormalize;
  throw InvalidInput("unknown prior_update '" + std::string(text) + "'");
}

void BankConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidInput("BankConfig: temperature must be positive");
  }
  if (!(prior_decay >= 0.0 && prior_decay <= 1.0)) throw InvalidInput("BankConfig: gamma_pi must be in [0,1]");
  if (!(prototype_decay >= 0.0 && prototype_decay <= 1.0)) {
    throw InvalidInput("BankConfig: gamma_mu must be in [0,1]");
  }
}

ProbabilityMatrix prototype_posterior(const FeatureMatrix& features, const FeatureMatrix& prototypes,
                                      const Simplex& prior, double temperature) {
  if (prior.size() != prototypes.rows()) throw InvalidInput("prototype_posterior: prior size != class count");
  if (!is_simplex(prior)) throw InvalidInput("prototype_posterior: prior is not on the simplex");
  if (!(temperature > 0.0)) throw InvalidInput("prototype_posterior: temperature must be positive");
  Matrix scores = cosine_matrix(features, prototypes) / temperature;
  for (Eigen::Index c = 0; c < scores.cols(); ++c) scores.col(c).array() += clamped_log(prior(c));
  return softmax_rows(scores, 1.0);
}

MemoryBank::MemoryBank(BankConfig config, Simplex prior, FeatureMatrix prototypes)
    : config_(config), prior_(std::move(prior)), prototypes_(std::move(prototypes)) {}

MemoryBank MemoryBank::init(int class_count, int feature_dim, const BankConfig& config,
                            const FeatureMatrix& initial_prototypes) {
  config.validate();
  if (class_count < 2 || feature_dim < 1) throw DegenerateInit("MemoryBank::init: bad dimensions");
  if (initial_prototypes.rows() != class_count || initial_prototypes.cols() != feature_dim) {
    throw DegenerateInit("MemoryBank::init: expected " + std::to_string(class_count) + " x " +
                         std::to_string(feature_dim) + " prototypes");
  }
  if (!initial_prototypes.allFinite()) throw DegenerateInit("MemoryBank::init: non-finite prototype");
  FeatureMatrix normalized;
  try {
    normalized = l2_normalize_rows(initial_prototypes);
  } catch (const DegenerateVector&) {
    throw DegenerateInit("MemoryBank::init: zero prototype");
  }
  for (int a = 0; a < class_count; ++a) {
    for (int b = a + 1; b < class_count; ++b) {
      if (normalized.row(a).dot(normalized.row(b)) >= kDuplicateCosine) {
        throw DegenerateInit("MemoryBank::init: prototypes " + std::to_string(a) + " and " + std::to_string(b) +
                             " coincide");
      }
    }
  }
  return MemoryBank(config, Simplex::Constant(class_count, 1.0 / class_count), std::move(normalized));
}

MemoryBank MemoryBank::restore(const BankConfig& config, Simplex prior, FeatureMatrix prototypes) {
  config.validate();
  if (prior.size() != prototypes.rows()) throw InvalidInput("MemoryBank::restore: shape mismatch");
  if (!is_simplex(prior)) throw InvalidInput("MemoryBank::restore: prior is not on the simplex");
  for (Eigen::Index c = 0; c < prototypes.rows(); ++c) {
    if (std::abs(prototypes.row(c).norm() - 1.0) > kSimplexTolerance) {
      throw InvalidInput("MemoryBank::restore: prototype is not unit norm");
    }
  }
  return MemoryBank(config, std::move(prior), std::move(prototypes));
}

ProbabilityMatrix MemoryBank::posterior(const FeatureMatrix& features) const {
  return prototype_posterior(features, prototypes_, prior_, config_.temperature);
}

Labels MemoryBank::pseudo_label_indices(const FeatureMatrix& features) const {
  // A uniform prior and a positive temperature do not change the argmax; skip
  // them so the labels match a plain nearest-centroid rule bit for bit.
  if ((prior_.array() == prior_(0)).all()) return argmax_rows(cosine_matrix(features, prototypes_));
  return argmax_rows(posterior(features));
}

ProbabilityMatrix MemoryBank::pseudo_label(const FeatureMatrix& features) const {
  return one_hot(pseudo_label_indices(features), class_count());
}

Simplex MemoryBank::batch_prior_estimate(const FeatureMatrix& batch_features,
                                         const FeatureMatrix& classifier_prototypes) const {
  if (classifier_prototypes.rows() != class_count()) {
    throw InvalidInput("update_prior: classifier prototype count != class count");
  }
  const Matrix scores = cosine_matrix(batch_features, classifier_prototypes) / config_.temperature;
  switch (config_.prior_update) {
    case PriorUpdate::kSoftmaxThenMean:
      return column_means(softmax_rows(scores, 1.0));
    case PriorUpdate::kMeanThenNormalize:
      return softmax(column_means(scores), 1.0);
  }
  return column_means(softmax_rows(scores, 1.0));
}

void MemoryBank::update_prior(const FeatureMatrix& batch_features, const FeatureMatrix& classifier_prototypes) {
  if (batch_features.rows() == 0) return;
  const double gamma = config_.prior_decay;
  if (gamma == 0.0) return;
  const Simplex estimate = batch_prior_estimate(batch_features, classifier_prototypes);
  Simplex next = (1.0 - gamma) * prior_ + gamma * estimate;
  next /= next.sum();
  prior_ = std::move(next);
}

void MemoryBank::update_prototypes(const FeatureMatrix& batch_features) {
  if (batch_features.rows() == 0) return;
  const double gamma = config_.prototype_decay;
  const Labels assigned = pseudo_label_indices(batch_features);
  if (gamma == 0.0) return;
  const int c_count = class_count();
  FeatureMatrix sums = FeatureMatrix::Zero(c_count, feature_dim());
  std::vector<int> counts(static_cast<std::size_t>(c_count), 0);
  for (std::size_t j = 0; j < assigned.size(); ++j) {
    sums.row(assigned[j]) += batch_features.row(static_cast<Eigen::Index>(j));
    ++counts[static_cast<std::size_t>(assigned[j])];
  }
  for (int c = 0; c < c_count; ++c) {
    const int n = counts[static_cast<std::size_t>(c)];
    if (n == 0) continue;
    const RowVector mean = sums.row(c) / static_cast<double>(n);
    const RowVector blended = (1.0 - gamma) * prototypes_.row(c) + gamma * mean;
    const double norm = blended.norm();
    // An exactly cancelling blend has no direction; keep the old prototype.
    if (norm > 0.0 && std::isfinite(norm)) prototypes_.row(c) = blended / norm;
  }
}

void MemoryBank::write_csv(std::ostream& out) const {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "class,prior";
  for (int k = 0; k < feature_dim(); ++k) out << ",p" << k;
  out << '\n';
  for (int c = 0; c < class_count(); ++c) {
    out << c << ',' << prior_(c);
    for (int k = 0; k < feature_dim(); ++k) out << ',' << prototypes_(c, k);
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace getda

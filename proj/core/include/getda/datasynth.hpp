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

// Seeded synthetic source/target domain pairs.
//
// Source class means sit on a circle of radius 5 inside a random 2-D
// subspace of R^d. Target means are the source means pushed through
//   m_t = scale * R(angle) * m_s + translation
// where R rotates every coordinate plane (x0,x1), (x2,x3), ... by `angle`
// (a trailing odd coordinate is left fixed). Samples are the class mean
// plus isotropic Gaussian noise.

#ifndef GETDA_DATASYNTH_HPP_
#define GETDA_DATASYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "getda/numerics.hpp"

namespace getda {

enum class Scenario { kUda, kPda, kSsda };

std::string_view to_string(Scenario scenario);
Scenario parse_scenario(std::string_view text);

struct ShiftSpec {
  int class_count = 6;
  int dim = 16;
  int samples_per_class_source = 100;
  int samples_per_class_target = 100;
  double rotation_angle = 0.0;
  // Empty means the zero vector; otherwise must have `dim` entries.
  std::vector<double> translation;
  double scale = 1.0;
  double source_noise_std = 1.0;
  double target_noise_std = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  Vector translation_vector() const;
};

struct LabeledDataset {
  FeatureMatrix features;
  Labels labels;
  int class_count = 0;

  std::size_t size() const { return labels.size(); }
  bool empty() const { return labels.empty(); }
  void validate() const;
};

class DomainPair;

// Passkey for the hidden target labels. Only evaluation code and the
// generator's own post-processing can mint one, so training code that merely
// holds a DomainPair cannot read target ground truth.
class TruthAccess {
 private:
  TruthAccess() = default;
  friend class Evaluator;
  friend DomainPair apply_class_imbalance(const DomainPair& pair, double keep_fraction);
  friend void write_domain_csv(std::ostream& out, const DomainPair& pair);
};

class DomainPair {
 public:
  DomainPair(LabeledDataset source, FeatureMatrix target_unlabeled, Labels target_truth,
             LabeledDataset target_labeled, Scenario scenario, std::vector<int> target_class_set,
             std::uint64_t seed);

  const LabeledDataset& source() const { return source_; }
  const FeatureMatrix& target_unlabeled() const { return target_unlabeled_; }
  const LabeledDataset& target_labeled() const { return target_labeled_; }
  Scenario scenario() const { return scenario_; }
  const std::vector<int>& target_class_set() const { return target_class_set_; }
  int class_count() const { return source_.class_count; }
  int dim() const { return static_cast<int>(source_.features.cols()); }
  std::uint64_t seed() const { return seed_; }

  const Labels& target_truth(TruthAccess) const { return target_truth_; }

 private:
  LabeledDataset source_;
  FeatureMatrix target_unlabeled_;
  Labels target_truth_;
  LabeledDataset target_labeled_;
  Scenario scenario_;
  std::vector<int> target_class_set_;
  std::uint64_t seed_;
};

// Noise-free class means for a spec: C x d matrices for each domain plus the
// d x 2 orthonormal basis of the class subspace.
struct ClassGeometry {
  Matrix basis;
  Matrix source_means;
  Matrix target_means;
};

ClassGeometry class_geometry(const ShiftSpec& spec);

// d x d block rotation used for the target transform.
Matrix block_rotation(int dim, double angle);

// Number of classes treated as "first half" by PDA and the imbalance recipe.
int first_half_class_count(int class_count);

DomainPair make_domain_pair(const ShiftSpec& spec, Scenario scenario, int shots_per_class = 0);

// Keeps ceil(keep_fraction * n_c) target samples for each of the first
// ceil(C/2) classes; every other class, the source and the labeled target
// split are untouched.
DomainPair apply_class_imbalance(const DomainPair& pair, double keep_fraction);

// Seeded permutation of 0..n-1 cut into consecutive batches; the last batch
// may be short. Reproducible from (seed, epoch).
std::vector<std::vector<std::size_t>> minibatches(std::size_t n, std::size_t batch_size,
                                                  std::uint64_t seed, std::uint64_t epoch);

// Columnar CSV: f0..f{d-1},label,domain,split. Unlabeled target rows carry
// their hidden label for offline inspection.
void write_domain_csv(std::ostream& out, const DomainPair& pair);

}  // namespace getda

#endif  // GETDA_DATASYNTH_HPP_

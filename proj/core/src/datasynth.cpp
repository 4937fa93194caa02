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

#include "getda/datasynth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "getda/error.hpp"

namespace getda {
namespace {

constexpr double kCircleRadius = 5.0;

// Independent RNG streams derived from the spec seed.
enum class Stream : std::uint32_t { kGeometry = 1, kSource, kTarget, kLabeled, kImbalance, kBatches };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream, std::uint64_t extra = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(extra),
                    static_cast<std::uint32_t>(extra >> 32)};
  return std::mt19937_64(seq);
}

Matrix sample_classes(const Matrix& means, const std::vector<int>& classes, int per_class,
                      double noise_std, std::mt19937_64& rng, Labels& labels) {
  const Eigen::Index dim = means.cols();
  Matrix out(static_cast<Eigen::Index>(classes.size()) * per_class, dim);
  labels.clear();
  labels.reserve(static_cast<std::size_t>(out.rows()));
  std::normal_distribution<double> noise(0.0, noise_std);
  Eigen::Index row = 0;
  for (int c : classes) {
    for (int i = 0; i < per_class; ++i, ++row) {
      for (Eigen::Index k = 0; k < dim; ++k) out(row, k) = means(c, k) + noise(rng);
      labels.push_back(c);
    }
  }
  return out;
}

std::vector<int> all_classes(int class_count) {
  std::vector<int> out(static_cast<std::size_t>(class_count));
  for (int c = 0; c < class_count; ++c) out[static_cast<std::size_t>(c)] = c;
  return out;
}

}  // namespace

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::kUda:
      return "uda";
    case Scenario::kPda:
      return "pda";
    case Scenario::kSsda:
      return "ssda";
  }
  return "uda";
}

Scenario parse_scenario(std::string_view text) {
  if (text == "uda") return Scenario::kUda;
  if (text == "pda") return Scenario::kPda;
  if (text == "ssda") return Scenario::kSsda;
  throw InvalidInput("unknown scenario '" + std::string(text) + "' (expected uda|pda|ssda)");
}

void ShiftSpec::validate() const {
  if (class_count < 2) throw InvalidInput("ShiftSpec: class_count must be >= 2");
  if (dim < 2) throw InvalidInput("ShiftSpec: dim must be >= 2");
  if (samples_per_class_source < 1 || samples_per_class_target < 1) {
    throw InvalidInput("ShiftSpec: samples per class must be >= 1");
  }
  if (!(scale > 0.0) || !(source_noise_std > 0.0) || !(target_noise_std > 0.0)) {
    throw InvalidInput("ShiftSpec: scale and noise std must be positive");
  }
  if (!std::isfinite(rotation_angle) || !std::isfinite(scale) || !std::isfinite(source_noise_std) ||
      !std::isfinite(target_noise_std)) {
    throw InvalidInput("ShiftSpec: non-finite parameter");
  }
  if (!translation.empty() && static_cast<int>(translation.size()) != dim) {
    throw InvalidInput("ShiftSpec: translation must have `dim` entries");
  }
  for (double t : translation) {
    if (!std::isfinite(t)) throw InvalidInput("ShiftSpec: non-finite translation");
  }
}

Vector ShiftSpec::translation_vector() const {
  if (translation.empty()) return Vector::Zero(dim);
  return Eigen::Map<const Vector>(translation.data(), static_cast<Eigen::Index>(translation.size()));
}

void LabeledDataset::validate() const {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw InvalidInput("LabeledDataset: label count does not match feature rows");
  }
  for (int y : labels) {
    if (y < 0 || y >= class_count) throw InvalidInput("LabeledDataset: label out of range");
  }
  if (!features.allFinite()) throw InvalidInput("LabeledDataset: non-finite features");
}

DomainPair::DomainPair(LabeledDataset source, FeatureMatrix target_unlabeled, Labels target_truth,
                       LabeledDataset target_labeled, Scenario scenario,
                       std::vector<int> target_class_set, std::uint64_t seed)
    : source_(std::move(source)),
      target_unlabeled_(std::move(target_unlabeled)),
      target_truth_(std::move(target_truth)),
      target_labeled_(std::move(target_labeled)),
      scenario_(scenario),
      target_class_set_(std::move(target_class_set)),
      seed_(seed) {
  source_.validate();
  target_labeled_.validate();
  const int c_count = source_.class_count;
  if (target_labeled_.class_count != c_count) {
    throw InvalidInput("DomainPair: labeled target class count differs from source");
  }
  if (static_cast<std::size_t>(target_unlabeled_.rows()) != target_truth_.size()) {
    throw InvalidInput("DomainPair: hidden truth size differs from target rows");
  }
  if (target_unlabeled_.rows() > 0 && target_unlabeled_.cols() != source_.features.cols()) {
    throw InvalidInput("DomainPair: target dimension differs from source");
  }
  std::vector<bool> in_set(static_cast<std::size_t>(c_count), false);
  for (int c : target_class_set_) {
    if (c < 0 || c >= c_count) throw InvalidInput("DomainPair: target class out of range");
    in_set[static_cast<std::size_t>(c)] = true;
  }
  for (int y : target_truth_) {
    if (y < 0 || y >= c_count || !in_set[static_cast<std::size_t>(y)]) {
      throw InvalidInput("DomainPair: target label outside target_class_set");
    }
  }
  const bool full = static_cast<int>(target_class_set_.size()) == c_count;
  switch (scenario_) {
    case Scenario::kUda:
      if (!target_labeled_.empty() || !full) throw InvalidInput("DomainPair: invalid UDA pair");
      break;
    case Scenario::kPda:
      if (!target_labeled_.empty() || full) throw InvalidInput("DomainPair: invalid PDA pair");
      break;
    case Scenario::kSsda:
      if (!full) throw InvalidInput("DomainPair: invalid SSDA pair");
      break;
  }
}

Matrix block_rotation(int dim, double angle) {
  Matrix r = Matrix::Identity(dim, dim);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  for (int k = 0; k + 1 < dim; k += 2) {
    r(k, k) = c;
    r(k, k + 1) = -s;
    r(k + 1, k) = s;
    r(k + 1, k + 1) = c;
  }
  return r;
}

int first_half_class_count(int class_count) { return (class_count + 1) / 2; }

ClassGeometry class_geometry(const ShiftSpec& spec) {
  spec.validate();
  auto rng = make_rng(spec.seed, Stream::kGeometry);
  std::normal_distribution<double> gauss(0.0, 1.0);
  // Gram-Schmidt on two Gaussian directions; redraw on the (measure-zero)
  // chance of a degenerate pair.
  Vector u(spec.dim);
  Vector v(spec.dim);
  for (;;) {
    for (int k = 0; k < spec.dim; ++k) u(k) = gauss(rng);
    for (int k = 0; k < spec.dim; ++k) v(k) = gauss(rng);
    const double un = u.norm();
    if (un < 1e-8) continue;
    u /= un;
    v -= u.dot(v) * u;
    const double vn = v.norm();
    if (vn < 1e-8) continue;
    v /= vn;
    break;
  }
  ClassGeometry g;
  g.basis.resize(spec.dim, 2);
  g.basis.col(0) = u;
  g.basis.col(1) = v;
  g.source_means.resize(spec.class_count, spec.dim);
  for (int c = 0; c < spec.class_count; ++c) {
    const double a = 2.0 * std::numbers::pi * c / spec.class_count;
    g.source_means.row(c) = (kCircleRadius * (std::cos(a) * u + std::sin(a) * v)).transpose();
  }
  const Matrix rot = block_rotation(spec.dim, spec.rotation_angle);
  const RowVector shift = spec.translation_vector().transpose();
  g.target_means = spec.scale * (g.source_means * rot.transpose());
  g.target_means.rowwise() += shift;
  return g;
}

DomainPair make_domain_pair(const ShiftSpec& spec, Scenario scenario, int shots_per_class) {
  spec.validate();
  if (shots_per_class < 0) throw InvalidInput("make_domain_pair: shots_per_class must be >= 0");
  if (scenario == Scenario::kSsda && shots_per_class < 1) {
    throw InvalidInput("make_domain_pair: SSDA requires shots_per_class >= 1");
  }
  const ClassGeometry g = class_geometry(spec);
  const std::vector<int> classes = all_classes(spec.class_count);

  LabeledDataset source;
  source.class_count = spec.class_count;
  {
    auto rng = make_rng(spec.seed, Stream::kSource);
    source.features = sample_classes(g.source_means, classes, spec.samples_per_class_source,
                                     spec.source_noise_std, rng, source.labels);
  }

  std::vector<int> target_classes = classes;
  if (scenario == Scenario::kPda) {
    target_classes.resize(static_cast<std::size_t>(first_half_class_count(spec.class_count)));
  }

  Labels truth;
  FeatureMatrix target;
  {
    auto rng = make_rng(spec.seed, Stream::kTarget);
    target = sample_classes(g.target_means, target_classes, spec.samples_per_class_target,
                            spec.target_noise_std, rng, truth);
  }

  LabeledDataset labeled;
  labeled.class_count = spec.class_count;
  labeled.features.resize(0, spec.dim);
  if (scenario == Scenario::kSsda) {
    auto rng = make_rng(spec.seed, Stream::kLabeled);
    labeled.features = sample_classes(g.target_means, classes, shots_per_class, spec.target_noise_std,
                                      rng, labeled.labels);
  }
  return DomainPair(std::move(source), std::move(target), std::move(truth), std::move(labeled),
                    scenario, std::move(target_classes), spec.seed);
}

DomainPair apply_class_imbalance(const DomainPair& pair, double keep_fraction) {
  if (!(keep_fraction > 0.0) || keep_fraction > 1.0) {
    throw InvalidInput("apply_class_imbalance: keep_fraction must be in (0, 1]");
  }
  const Labels& truth = pair.target_truth(TruthAccess{});
  const int c_count = pair.class_count();
  const int reduced = first_half_class_count(c_count);

  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(c_count));
  for (std::size_t i = 0; i < truth.size(); ++i) by_class[static_cast<std::size_t>(truth[i])].push_back(i);
  for (int c : pair.target_class_set()) {
    if (by_class[static_cast<std::size_t>(c)].empty()) {
      throw InvalidInput("apply_class_imbalance: target class " + std::to_string(c) + " has no samples");
    }
  }

  auto rng = make_rng(pair.seed(), Stream::kImbalance);
  std::vector<bool> keep(truth.size(), true);
  for (int c = 0; c < reduced; ++c) {
    auto& members = by_class[static_cast<std::size_t>(c)];
    if (members.empty()) continue;
    const auto n_keep = static_cast<std::size_t>(
        std::ceil(keep_fraction * static_cast<double>(members.size()) - 1e-9));
    std::vector<std::size_t> shuffled = members;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (std::size_t k = n_keep; k < shuffled.size(); ++k) keep[shuffled[k]] = false;
  }

  std::vector<Eigen::Index> rows;
  Labels kept_truth;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (keep[i]) {
      rows.push_back(static_cast<Eigen::Index>(i));
      kept_truth.push_back(truth[i]);
    }
  }
  FeatureMatrix kept(static_cast<Eigen::Index>(rows.size()), pair.target_unlabeled().cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    kept.row(static_cast<Eigen::Index>(k)) = pair.target_unlabeled().row(rows[k]);
  }
  return DomainPair(pair.source(), std::move(kept), std::move(kept_truth), pair.target_labeled(),
                    pair.scenario(), pair.target_class_set(), pair.seed());
}

std::vector<std::vector<std::size_t>> minibatches(std::size_t n, std::size_t batch_size,
                                                  std::uint64_t seed, std::uint64_t epoch) {
  if (batch_size == 0) throw InvalidInput("minibatches: batch_size must be >= 1");
  std::vector<std::vector<std::size_t>> out;
  if (n == 0) return out;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto rng = make_rng(seed, Stream::kBatches, epoch);
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t start = 0; start < n; start += batch_size) {
    const std::size_t stop = std::min(n, start + batch_size);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(stop));
  }
  return out;
}

void write_domain_csv(std::ostream& out, const DomainPair& pair) {
  const int dim = pair.dim();
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (int k = 0; k < dim; ++k) out << 'f' << k << ',';
  out << "label,domain,split\n";
  auto emit = [&](const FeatureMatrix& x, const Labels& y, const char* domain, const char* split) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      for (int k = 0; k < dim; ++k) out << x(r, k) << ',';
      out << y[static_cast<std::size_t>(r)] << ',' << domain << ',' << split << '\n';
    }
  };
  emit(pair.source().features, pair.source().labels, "source", "labeled");
  emit(pair.target_labeled().features, pair.target_labeled().labels, "target", "labeled");
  emit(pair.target_unlabeled(), pair.target_truth(TruthAccess{}), "target", "unlabeled");
  out.precision(old_precision);
}

}  // namespace getda

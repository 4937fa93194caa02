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

#include "getda/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "getda/error.hpp"

namespace getda {

double clamped_log(double p) { return std::log(std::max(p, kLogEpsilon)); }

ProbabilityMatrix softmax_rows(const Matrix& logits, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidInput("softmax_rows: temperature must be positive and finite");
  }
  require_finite(logits, "softmax_rows");
  ProbabilityMatrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double shift = logits.row(r).maxCoeff();
    double total = 0.0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      const double e = std::exp((logits(r, c) - shift) / temperature);
      out(r, c) = e;
      total += e;
    }
    out.row(r) /= total;
  }
  return out;
}

Vector softmax(const Vector& logits, double temperature) {
  Matrix row = logits.transpose();
  return softmax_rows(row, temperature).row(0).transpose();
}

double cosine_similarity(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b) {
  if (a.size() != b.size()) {
    throw InvalidInput("cosine_similarity: dimension mismatch");
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw DegenerateVector("cosine_similarity: zero-norm vector");
  }
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

Matrix cosine_matrix(const FeatureMatrix& features, const FeatureMatrix& prototypes) {
  if (features.cols() != prototypes.cols()) {
    throw InvalidInput("cosine_matrix: feature dim " + std::to_string(features.cols()) +
                       " != prototype dim " + std::to_string(prototypes.cols()));
  }
  const Vector fn = features.rowwise().norm();
  const Vector pn = prototypes.rowwise().norm();
  if (fn.size() > 0 && fn.minCoeff() == 0.0) {
    throw DegenerateVector("cosine_matrix: zero-norm feature row");
  }
  if (pn.size() > 0 && pn.minCoeff() == 0.0) {
    throw DegenerateVector("cosine_matrix: zero-norm prototype row");
  }
  Matrix dots = features * prototypes.transpose();
  for (Eigen::Index r = 0; r < dots.rows(); ++r) {
    for (Eigen::Index c = 0; c < dots.cols(); ++c) {
      dots(r, c) = std::clamp(dots(r, c) / (fn(r) * pn(c)), -1.0, 1.0);
    }
  }
  return dots;
}

double kl_rows(const ProbabilityMatrix& q, const ProbabilityMatrix& p) {
  if (q.rows() != p.rows() || q.cols() != p.cols()) {
    throw InvalidInput("kl_rows: shape mismatch");
  }
  double total = 0.0;
  for (Eigen::Index r = 0; r < q.rows(); ++r) {
    for (Eigen::Index c = 0; c < q.cols(); ++c) {
      const double qv = q(r, c);
      if (qv > 0.0) total += qv * (std::log(qv) - clamped_log(p(r, c)));
    }
  }
  return total;
}

double kl_divergence(const Vector& q, const Vector& p) {
  if (q.size() != p.size()) throw InvalidInput("kl_divergence: size mismatch");
  double total = 0.0;
  for (Eigen::Index c = 0; c < q.size(); ++c) {
    if (q(c) > 0.0) total += q(c) * (std::log(q(c)) - clamped_log(p(c)));
  }
  return total;
}

double entropy(const Simplex& dist) {
  double h = 0.0;
  for (Eigen::Index c = 0; c < dist.size(); ++c) {
    if (dist(c) > 0.0) h -= dist(c) * std::log(dist(c));
  }
  return std::max(h, 0.0);
}

FeatureMatrix l2_normalize_rows(const FeatureMatrix& m) {
  FeatureMatrix out = m;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double n = out.row(r).norm();
    if (n == 0.0 || !std::isfinite(n)) {
      throw DegenerateVector("l2_normalize_rows: row " + std::to_string(r) + " has zero norm");
    }
    out.row(r) /= n;
  }
  return out;
}

int argmax(const Eigen::Ref<const Vector>& v) {
  int best = 0;
  for (Eigen::Index c = 1; c < v.size(); ++c) {
    if (v(c) > v(best)) best = static_cast<int>(c);
  }
  return best;
}

Labels argmax_rows(const Matrix& m) {
  Labels out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    int best = 0;
    for (Eigen::Index c = 1; c < m.cols(); ++c) {
      if (m(r, c) > m(r, best)) best = static_cast<int>(c);
    }
    out[static_cast<std::size_t>(r)] = best;
  }
  return out;
}

ProbabilityMatrix one_hot(const Labels& labels, int class_count) {
  ProbabilityMatrix out = ProbabilityMatrix::Zero(static_cast<Eigen::Index>(labels.size()), class_count);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count) {
      throw InvalidInput("one_hot: label " + std::to_string(labels[i]) + " out of range");
    }
    out(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return out;
}

Vector column_means(const Matrix& m) {
  if (m.rows() == 0) return Vector::Zero(m.cols());
  return m.colwise().mean().transpose();
}

bool is_simplex(const Vector& v, double tolerance) {
  if (!v.allFinite() || v.size() == 0) return false;
  if (v.minCoeff() < -tolerance) return false;
  return std::abs(v.sum() - 1.0) <= tolerance;
}

bool is_row_stochastic(const Matrix& m, double tolerance) {
  if (!m.allFinite()) return false;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (m.row(r).minCoeff() < -tolerance || m.row(r).maxCoeff() > 1.0 + tolerance) return false;
    if (std::abs(m.row(r).sum() - 1.0) > tolerance) return false;
  }
  return true;
}

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
  if (!m.allFinite()) throw InvalidInput(std::string(what) + ": non-finite input");
}

void require_row_stochastic(const Matrix& m, const char* what) {
  if (!is_row_stochastic(m)) throw InvalidInput(std::string(what) + ": matrix is not row-stochastic");
}

}  // namespace getda

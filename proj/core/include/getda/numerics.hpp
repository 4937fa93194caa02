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

// Numerically stable kernels shared by every module. All computation is in
// double precision; all functions are pure.

#ifndef GETDA_NUMERICS_HPP_
#define GETDA_NUMERICS_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace getda {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// N x d matrix of feature embeddings (one sample per row).
using FeatureMatrix = Matrix;
// N x C row-stochastic matrix (one distribution over classes per row).
using ProbabilityMatrix = Matrix;
// A point on the probability simplex.
using Simplex = Vector;

using Labels = std::vector<int>;

// Lower clamp applied to every probability before a log.
inline constexpr double kLogEpsilon = 1e-12;
// Tolerance used when validating simplex / row-stochastic invariants.
inline constexpr double kSimplexTolerance = 1e-9;

double clamped_log(double p);

// Row-wise softmax of logits / temperature, log-sum-exp stabilized.
ProbabilityMatrix softmax_rows(const Matrix& logits, double temperature = 1.0);
Vector softmax(const Vector& logits, double temperature = 1.0);

double cosine_similarity(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b);

// N x C matrix of cosine similarities between rows of `features` and rows of
// `prototypes`.
Matrix cosine_matrix(const FeatureMatrix& features, const FeatureMatrix& prototypes);

// Sum over rows of KL(q_row || p_row); p is clamped at kLogEpsilon.
double kl_rows(const ProbabilityMatrix& q, const ProbabilityMatrix& p);

// KL(q || p) between two distributions.
double kl_divergence(const Vector& q, const Vector& p);

// Shannon entropy in nats.
double entropy(const Simplex& dist);

FeatureMatrix l2_normalize_rows(const FeatureMatrix& m);

// Index of the largest entry per row; ties go to the smaller index.
Labels argmax_rows(const Matrix& m);
int argmax(const Eigen::Ref<const Vector>& v);

ProbabilityMatrix one_hot(const Labels& labels, int class_count);

Vector column_means(const Matrix& m);

bool is_simplex(const Vector& v, double tolerance = kSimplexTolerance);
bool is_row_stochastic(const Matrix& m, double tolerance = kSimplexTolerance);

// Throw InvalidInput when the check fails.
void require_finite(const Eigen::Ref<const Matrix>& m, const char* what);
void require_row_stochastic(const Matrix& m, const char* what);

}  // namespace getda

#endif  // GETDA_NUMERICS_HPP_

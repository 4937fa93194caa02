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

#include "getda/objective.hpp"

#include <cmath>
#include <string>

#include "getda/error.hpp"

namespace getda {
namespace {

Matrix log_softmax_rows(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    const double shift = z.row(r).maxCoeff();
    const double lse = shift + std::log((z.row(r).array() - shift).exp().sum());
    out.row(r) = z.row(r).array() - lse;
  }
  return out;
}

void require_targets(const ProbabilityMatrix& y, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (y.rows() != rows || y.cols() != cols) {
    throw InvalidInput(std::string("evaluate_batch: ") + what + " targets have shape " + std::to_string(y.rows()) +
                       "x" + std::to_string(y.cols()) + ", expected " + std::to_string(rows) + "x" +
                       std::to_string(cols));
  }
  require_finite(y, what);
}

}  // namespace

double prototype_cross_entropy(const FeatureMatrix& features, const FeatureMatrix& prototypes,
                               const Simplex& prior, double temperature, const ProbabilityMatrix& targets,
                               FeatureMatrix* grad_features, FeatureMatrix* grad_prototypes) {
  const Eigen::Index b = features.rows();
  const Eigen::Index c_count = prototypes.rows();
  if (features.cols() != prototypes.cols()) throw InvalidInput("prototype_cross_entropy: dimension mismatch");
  if (prior.size() != c_count) throw InvalidInput("prototype_cross_entropy: prior size mismatch");
  if (targets.rows() != b || targets.cols() != c_count) {
    throw InvalidInput("prototype_cross_entropy: target shape mismatch");
  }
  if (b == 0) {
    if (grad_features) *grad_features = FeatureMatrix::Zero(0, features.cols());
    if (grad_prototypes) *grad_prototypes = FeatureMatrix::Zero(c_count, prototypes.cols());
    return 0.0;
  }
  const Vector fn = features.rowwise().norm();
  const Vector pn = prototypes.rowwise().norm();
  if (fn.minCoeff() == 0.0) throw DegenerateVector("prototype_cross_entropy: zero-norm feature");
  if (pn.minCoeff() == 0.0) throw DegenerateVector("prototype_cross_entropy: zero-norm prototype");
  const FeatureMatrix f_hat = fn.cwiseInverse().asDiagonal() * features;
  const FeatureMatrix m_hat = pn.cwiseInverse().asDiagonal() * prototypes;
  const Matrix sim = f_hat * m_hat.transpose();

  Matrix z = sim / temperature;
  for (Eigen::Index c = 0; c < c_count; ++c) z.col(c).array() += clamped_log(prior(c));
  const Matrix log_p = log_softmax_rows(z);
  const double inv_b = 1.0 / static_cast<double>(b);
  const double loss = -(targets.array() * log_p.array()).sum() * inv_b;

  if (grad_features || grad_prototypes) {
    const Matrix p = log_p.array().exp().matrix();
    const Vector target_mass = targets.rowwise().sum();
    // dL/dsim
    const Matrix g = ((target_mass.asDiagonal() * p - targets) * (inv_b / temperature)).eval();
    const Matrix gs = g.cwiseProduct(sim);
    if (grad_features) {
      const Vector row_gs = gs.rowwise().sum();
      *grad_features = fn.cwiseInverse().asDiagonal() * (g * m_hat - row_gs.asDiagonal() * f_hat);
    }
    if (grad_prototypes) {
      const Vector col_gs = gs.colwise().sum().transpose();
      *grad_prototypes = pn.cwiseInverse().asDiagonal() * (g.transpose() * f_hat - col_gs.asDiagonal() * m_hat);
    }
  }
  return loss;
}

double logit_cross_entropy(const Matrix& logits, const ProbabilityMatrix& targets, const Vector& weights,
                           Matrix* grad_logits) {
  const Eigen::Index b = logits.rows();
  if (targets.rows() != b || targets.cols() != logits.cols()) {
    throw InvalidInput("logit_cross_entropy: target shape mismatch");
  }
  const Vector w = weights.size() == 0 ? Vector::Ones(b) : weights;
  if (w.size() != b) throw InvalidInput("logit_cross_entropy: weight size mismatch");
  const double total_weight = w.sum();
  if (grad_logits) *grad_logits = Matrix::Zero(b, logits.cols());
  if (b == 0 || !(total_weight > 0.0)) return 0.0;
  const Matrix log_p = log_softmax_rows(logits);
  double loss = 0.0;
  for (Eigen::Index r = 0; r < b; ++r) loss -= w(r) * targets.row(r).dot(log_p.row(r));
  loss /= total_weight;
  if (grad_logits) {
    const Matrix p = log_p.array().exp().matrix();
    for (Eigen::Index r = 0; r < b; ++r) {
      if (w(r) == 0.0) continue;
      grad_logits->row(r) = (w(r) / total_weight) * (targets.row(r).sum() * p.row(r) - targets.row(r));
    }
  }
  return loss;
}

double mean_entropy(const Matrix& logits, Matrix* grad_logits) {
  const Eigen::Index b = logits.rows();
  if (grad_logits) *grad_logits = Matrix::Zero(b, logits.cols());
  if (b == 0) return 0.0;
  const Matrix log_p = log_softmax_rows(logits);
  const Matrix p = log_p.array().exp().matrix();
  const double inv_b = 1.0 / static_cast<double>(b);
  double total = 0.0;
  for (Eigen::Index r = 0; r < b; ++r) {
    const double h = -p.row(r).dot(log_p.row(r));
    total += h;
    if (grad_logits) {
      grad_logits->row(r) = -inv_b * (p.row(r).array() * (log_p.row(r).array() + h)).matrix();
    }
  }
  return total * inv_b;
}

BatchResult evaluate_batch(Network& net, const BatchInputs& inputs, const BatchTargets& targets) {
  const int c_count = net.shape().class_count;
  const int d_in = net.shape().input_dim;
  const Eigen::Index n_s = inputs.supervised_x ? inputs.supervised_x->rows() : 0;
  const Eigen::Index n_t = inputs.target_x ? inputs.target_x->rows() : 0;
  if (n_s + n_t == 0) throw InvalidInput("evaluate_batch: empty batch");
  if (n_s > 0 && (!inputs.supervised_y || static_cast<Eigen::Index>(inputs.supervised_y->size()) != n_s)) {
    throw InvalidInput("evaluate_batch: supervised labels missing or mis-sized");
  }

  Matrix x(n_s + n_t, d_in);
  if (n_s > 0) x.topRows(n_s) = *inputs.supervised_x;
  if (n_t > 0) x.bottomRows(n_t) = *inputs.target_x;
  const ForwardPass pass = net.forward(x);

  const Eigen::Index d_f = pass.features.cols();
  Matrix grad_logits = Matrix::Zero(n_s + n_t, c_count);
  Matrix grad_features = Matrix::Zero(n_s + n_t, d_f);
  Matrix grad_head = Matrix::Zero(c_count, d_f);

  BatchResult result;
  result.gradients.embedding_prototypes =
      inputs.embedding ? FeatureMatrix::Zero(inputs.embedding->vectors.rows(), inputs.embedding->vectors.cols())
                       : FeatureMatrix();
  LossBreakdown& loss = result.loss;

  if (n_s > 0) {
    Matrix g;
    loss.supervised = logit_cross_entropy(pass.logits.topRows(n_s), one_hot(*inputs.supervised_y, c_count),
                                          Vector(), &g);
    grad_logits.topRows(n_s) += g;
  }

  const Simplex prior = inputs.prior.size() == 0 ? Simplex::Constant(c_count, 1.0 / c_count) : inputs.prior;
  if (n_t > 0) {
    const FeatureMatrix feats = pass.features.bottomRows(n_t);
    const Matrix logits = pass.logits.bottomRows(n_t);
    if (targets.classifier_space.size() > 0) {
      require_targets(targets.classifier_space, n_t, c_count, "classifier-space");
      FeatureMatrix g_f;
      FeatureMatrix g_w;
      loss.classifier_space = prototype_cross_entropy(feats, net.classifier_prototypes(), prior,
                                                      inputs.temperature, targets.classifier_space, &g_f, &g_w);
      grad_features.bottomRows(n_t) += g_f;
      grad_head += g_w;
    }
    if (targets.embedding_space.size() > 0) {
      require_targets(targets.embedding_space, n_t, c_count, "embedding-space");
      if (!inputs.embedding) throw InvalidInput("evaluate_batch: embedding-space term needs embedding prototypes");
      FeatureMatrix g_f;
      FeatureMatrix g_m;
      loss.embedding_space = prototype_cross_entropy(feats, inputs.embedding->vectors, prior, inputs.temperature,
                                                     targets.embedding_space, &g_f, &g_m);
      grad_features.bottomRows(n_t) += g_f;
      result.gradients.embedding_prototypes += g_m;
    }
    if (targets.logit_labels.size() > 0) {
      require_targets(targets.logit_labels, n_t, c_count, "logit");
      Matrix g;
      loss.logit_labels = logit_cross_entropy(logits, targets.logit_labels, targets.logit_weights, &g);
      grad_logits.bottomRows(n_t) += g;
    }
    if (targets.entropy_minimization) {
      Matrix g;
      loss.entropy = mean_entropy(logits, &g);
      grad_logits.bottomRows(n_t) += g;
    }
    result.target.features = feats;
    result.target.logits = logits;
  }
  loss.total = loss.supervised + loss.classifier_space + loss.embedding_space + loss.logit_labels + loss.entropy;
  if (!std::isfinite(loss.total)) throw TrainingDiverged("evaluate_batch: non-finite loss");

  result.gradients.network = net.backward(grad_logits, grad_features);
  result.gradients.network.head.weight += grad_head;
  return result;
}

}  // namespace getda

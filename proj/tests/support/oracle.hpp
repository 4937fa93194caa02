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


// Reference implementations for tests. Everything here is written with plain
// loops over std::vector so it shares no code with the library kernels.

#ifndef GETDA_TESTS_ORACLE_HPP_
#define GETDA_TESTS_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "getda/numerics.hpp"

namespace getda::oracle {

using Rows = std::vector<std::vector<double>>;

inline constexpr double kEps = 1e-12;

inline Rows to_rows(const Matrix& m) {
  Rows out(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[r][c] = m(r, c);
  return out;
}

inline Matrix to_matrix(const Rows& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
  return m;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) worst = std::max(worst, std::abs(a(r, c) - b(r, c)));
  return worst;
}

inline std::vector<double> softmax(const std::vector<double>& z) {
  double top = z[0];
  for (double v : z) top = std::max(top, v);
  std::vector<double> out(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - top);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

inline double safe_log(double p) { return std::log(std::max(p, kEps)); }

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  return dot(a, b) / std::sqrt(dot(a, a) * dot(b, b));
}

inline double kl_rows(const Rows& q, const Rows& p) {
  double total = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j)
    for (std::size_t c = 0; c < q[j].size(); ++c)
      if (q[j][c] > 0.0) total += q[j][c] * (std::log(q[j][c]) - safe_log(p[j][c]));
  return total;
}

inline std::vector<double> col_means(const Rows& m) {
  std::vector<double> out(m[0].size(), 0.0);
  for (const auto& row : m)
    for (std::size_t c = 0; c < row.size(); ++c) out[c] += row[c];
  for (double& v : out) v /= static_cast<double>(m.size());
  return out;
}

inline double kl_to_uniform(const std::vector<double>& dist) {
  const double u = 1.0 / static_cast<double>(dist.size());
  double total = 0.0;
  for (double v : dist)
    if (v > 0.0) total += v * std::log(v / u);
  return total;
}

// (1/N) KL(Q||P) + sum_c Qbar_c log Qbar_c, with the entropy part written as
// KL(Qbar || uniform) - log C.
inline double objective(const Rows& q, const Rows& p) {
  const double n = static_cast<double>(q.size());
  const std::vector<double> qbar = col_means(q);
  return kl_rows(q, p) / n + kl_to_uniform(qbar) - std::log(static_cast<double>(qbar.size()));
}

inline Rows auxiliary(const Rows& p) {
  const std::size_t n = p.size();
  const std::size_t c_count = p[0].size();
  std::vector<double> col(c_count, 0.0);
  for (const auto& row : p)
    for (std::size_t c = 0; c < c_count; ++c) col[c] += row[c];
  Rows q(n, std::vector<double>(c_count));
  for (std::size_t j = 0; j < n; ++j) {
    double z = 0.0;
    for (std::size_t c = 0; c < c_count; ++c) {
      q[j][c] = p[j][c] / std::sqrt(std::max(col[c], kEps));
      z += q[j][c];
    }
    for (double& v : q[j]) v /= z;
  }
  return q;
}

// softmax_c(log pi_c + cos(f_j, m_c) / tau)
inline Rows posterior(const Rows& features, const Rows& protos, const std::vector<double>& prior, double tau) {
  Rows out;
  for (const auto& f : features) {
    std::vector<double> z(protos.size());
    for (std::size_t c = 0; c < protos.size(); ++c) z[c] = safe_log(prior[c]) + cosine(f, protos[c]) / tau;
    out.push_back(softmax(z));
  }
  return out;
}

// Euclidean projection of one row onto the probability simplex.
inline std::vector<double> project_simplex(const std::vector<double>& v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumsum += u[k];
    const double t = (cumsum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
  return out;
}

// Projected gradient descent on the objective over row-stochastic Q, started
// at `start`, with Armijo backtracking. Returns the best value seen.
inline double projected_gradient_minimum(const Rows& p, const Rows& start, int steps) {
  const std::size_t n = p.size();
  const std::size_t c_count = p[0].size();
  Rows q = start;
  double best = objective(q, p);
  double step = 1.0;
  for (int it = 0; it < steps; ++it) {
    const std::vector<double> qbar = col_means(q);
    Rows grad(n, std::vector<double>(c_count));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t c = 0; c < c_count; ++c)
        grad[j][c] = (safe_log(q[j][c]) - safe_log(p[j][c]) + 1.0 + safe_log(qbar[c]) + 1.0) / n;
    const double f0 = objective(q, p);
    bool moved = false;
    for (int tries = 0; tries < 40 && !moved; ++tries) {
      Rows cand(n);
      double decrease = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> row(c_count);
        for (std::size_t c = 0; c < c_count; ++c) row[c] = q[j][c] - step * grad[j][c];
        cand[j] = project_simplex(row);
        for (std::size_t c = 0; c < c_count; ++c) decrease += grad[j][c] * (q[j][c] - cand[j][c]);
      }
      const double f1 = objective(cand, p);
      if (f1 <= f0 - 1e-4 * decrease && f1 < f0) {
        q = std::move(cand);
        best = std::min(best, f1);
        step *= 2.0;
        moved = true;
      } else {
        step *= 0.5;
      }
    }
    if (!moved) break;
  }
  return best;
}

// Naive forward pass of a tanh MLP followed by a linear head.
struct NaiveLayer {
  Rows weight;  // out x in
  std::vector<double> bias;
};

inline std::vector<double> affine(const NaiveLayer& l, const std::vector<double>& in) {
  std::vector<double> out(l.weight.size());
  for (std::size_t o = 0; o < l.weight.size(); ++o) {
    double s = l.bias[o];
    for (std::size_t i = 0; i < in.size(); ++i) s += l.weight[o][i] * in[i];
    out[o] = s;
  }
  return out;
}

inline void naive_forward(const std::vector<NaiveLayer>& extractor, const NaiveLayer& head, const Rows& x,
                          Rows& features, Rows& logits) {
  features.clear();
  logits.clear();
  for (const auto& row : x) {
    std::vector<double> a = row;
    for (const auto& l : extractor) {
      a = affine(l, a);
      for (double& v : a) v = std::tanh(v);
    }
    features.push_back(a);
    logits.push_back(affine(head, a));
  }
}

// Central differences over every entry of `values`. Returns the largest
// relative error against `analytic`; the denominator is floored at 1e-3 so
// near-zero gradients do not blow up the ratio.
inline double fd_max_relative_error(std::span<double> values, std::span<const double> analytic,
                                    const std::function<double()>& loss, double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + h;
    const double up = loss();
    values[i] = saved - h;
    const double down = loss();
    values[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-3});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / scale);
  }
  return worst;
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = g(rng);
  return m;
}

inline Matrix random_stochastic(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double spread = 1.0) {
  Matrix logits = random_matrix(rng, rows, cols, spread);
  Matrix out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    std::vector<double> z(static_cast<std::size_t>(cols));
    for (Eigen::Index c = 0; c < cols; ++c) z[c] = logits(r, c);
    const auto s = softmax(z);
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = s[c];
  }
  return out;
}

}  // namespace getda::oracle

#endif  // GETDA_TESTS_ORACLE_HPP_

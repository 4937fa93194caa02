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
// Classification-EM training loop.
//
// warm-up on source -> memory bank init, then every epoch:
//   reinit mu_f from the bank, E-step (P_g, P_f over the whole target set),
//   C-step (Q_g, Q_f, bank labels, mixup), M-step (one SGD pass over
//   lock-stepped source/target mini-batches with per-batch bank updates),
//   evaluation.

#ifndef GETDA_TRAINER_HPP_
#define GETDA_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "getda/baselines.hpp"
#include "getda/datasynth.hpp"
#include "getda/fusion.hpp"
#include "getda/generative_classifier.hpp"
#include "getda/metrics.hpp"
#include "getda/network.hpp"
#include "getda/objective.hpp"
#include "getda/regularizer.hpp"

namespace getda {

struct AblationFlags {
  bool disable_kl_f = false;
  bool disable_kl_g = false;
  // Train on Q only (gamma_q forced to 0).
  bool disable_fusion = false;
  // Train the logits on the bank labels alone: both KL terms off, gamma_q 1.
  bool generative_labels_only = false;
};

// How the auxiliary distributions are refreshed.
enum class QRefresh {
  kEpoch,      // full target pass at the C-step
  kStreaming,  // per batch, column masses tracked by an EMA
};

std::string_view to_string(QRefresh mode);
QRefresh parse_q_refresh(std::string_view text);

struct TrainConfig {
  Method method = Method::kGet;
  int epochs = 30;
  int warmup_epochs = 10;
  int batch_size = 32;
  std::vector<int> hidden = {64, 32};
  double temperature = 1.0;
  double gamma_pi = 0.1;
  double gamma_mu = 0.9;
  double gamma_q = 0.2;
  PriorUpdate prior_update = PriorUpdate::kSoftmaxThenMean;
  SgdConfig sgd;
  double pl_threshold = 0.0;
  // Refresh the bank labels from the current network on every batch instead
  // of once per epoch at the C-step.
  bool online_generative_labels = false;
  // Use the bank posterior instead of its one-hot argmax as Y_M.
  bool soft_generative_labels = false;
  QRefresh q_refresh = QRefresh::kEpoch;
  double streaming_decay = 0.1;
  // Record column means of P_g, Q_g, P_f, Q_f in every epoch record.
  bool dump_class_proportions = false;
  AblationFlags ablation;
  int checkpoint_every = 0;
  std::uint64_t seed = 0;

  void validate() const;
  // gamma_q after the ablation flags are applied.
  double effective_gamma_q() const;
  bool uses_kl_g() const;
  bool uses_kl_f() const;
};

// Mutable training state; everything a checkpoint needs.
struct TrainerState {
  ParameterSet params;
  SgdState sgd;
  Simplex prior;
  FeatureMatrix bank_prototypes;
  FeatureMatrix embedding_prototypes;
  int epoch = 0;
};

struct EpochRecord {
  int epoch = 0;  // 0 = after warm-up
  ClassificationMetrics target;
  double fused_label_accuracy = 0.0;
  double generative_label_accuracy = 0.0;
  double prior_kl = 0.0;
  double objective_g = 0.0;
  double objective_f = 0.0;
  LossBreakdown loss;  // batch means over the epoch
  // Filled when dump_class_proportions is set.
  Simplex p_g_mean, q_g_mean, p_f_mean, q_f_mean;
};

struct RunRecord {
  std::string config_hash;
  std::vector<EpochRecord> epochs;
};

struct EStepResult {
  FeatureMatrix features;
  ProbabilityMatrix p_g;
  ProbabilityMatrix p_f;
};

struct CStepResult {
  ProbabilityMatrix q_g;
  ProbabilityMatrix q_f;
  ProbabilityMatrix generative;  // one-hot bank labels
  FusedLabels fused;
};

struct TrainHooks {
  std::function<void(const EpochRecord&)> on_epoch;
  // Target labels handed to the loss for each M-step batch.
  std::function<void(int epoch, int batch, const ProbabilityMatrix& labels)> on_batch_labels;
  std::function<void(const TrainerState&)> on_checkpoint;
  // Called with the epochs completed so far before an error propagates.
  std::function<void(const RunRecord&, const std::string& what)> on_failure;
};

// Supervised source training; returns the unit-norm per-class mean source
// feature. Throws DegenerateInit if a class has no source sample.
FeatureMatrix warmup(Network& net, const LabeledDataset& source, const TrainConfig& config);

EStepResult e_step(const Network& net, const MemoryBank& bank, const EmbeddingPrototypes& embedding,
                   const FeatureMatrix& target_x);

// One-hot bank labels, or the bank posterior when `soft` is set.
ProbabilityMatrix generative_labels(const MemoryBank& bank, const FeatureMatrix& features, bool soft);

CStepResult c_step(const EStepResult& e, const MemoryBank& bank, double gamma_q, bool soft_generative = false);

class Trainer {
 public:
  Trainer(TrainConfig config, const DomainPair& pair);

  // Runs warm-up and every epoch.
  RunRecord run(const TrainHooks& hooks = {});

  // Pieces of run(), exposed for tests.
  void warm_start();
  EpochRecord run_epoch(int epoch, const TrainHooks& hooks);
  EpochRecord evaluate(int epoch) const;

  const Network& network() const { return net_; }
  Network& network() { return net_; }
  const MemoryBank& bank() const;
  const EmbeddingPrototypes& embedding() const { return embedding_; }
  const TrainConfig& config() const { return config_; }
  TrainerState state(int epoch) const;

 private:
  int steps_per_epoch() const;
  void m_step_epoch(int epoch, const CStepResult* labels, const ProbabilityMatrix* epoch_labels,
                    const TrainHooks& hooks, EpochRecord& record);

  TrainConfig config_;
  const DomainPair* pair_;
  Network net_;
  std::optional<MemoryBank> bank_;  // set by warm_start()
  std::optional<StreamingColumnMass> stream_g_;
  std::optional<StreamingColumnMass> stream_f_;
  EmbeddingPrototypes embedding_;
  SgdState sgd_;
};

RunRecord train(const TrainConfig& config, const DomainPair& pair, const TrainHooks& hooks = {});

}  // namespace getda

#endif  // GETDA_TRAINER_HPP_

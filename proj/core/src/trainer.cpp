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
#include "getda/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "getda/error.hpp"

namespace getda {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Batch-order keys; warm-up and main epochs never share a shuffle.
constexpr std::uint64_t kWarmupKey = std::uint64_t{1} << 40;
enum BatchSet : std::uint64_t { kSourceSet = 0, kTargetSet = 1, kLabeledSet = 2 };

std::uint64_t batch_key(int epoch, BatchSet set) { return static_cast<std::uint64_t>(epoch) * 3 + set; }

Matrix gather_rows(const Matrix& m, const std::vector<std::size_t>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(idx[i]));
  return out;
}

Labels gather_labels(const Labels& y, const std::vector<std::size_t>& idx) {
  Labels out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = y[idx[i]];
  return out;
}

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw InvalidInput(std::string("TrainConfig: ") + what + " must be in [0,1]");
}

std::uint64_t network_seed(std::uint64_t seed) { return seed * 0x9E3779B97F4A7C15ULL + 0x6E6574ULL; }

void accumulate(LossBreakdown& sum, const LossBreakdown& l) {
  sum.total += l.total;
  sum.supervised += l.supervised;
  sum.classifier_space += l.classifier_space;
  sum.embedding_space += l.embedding_space;
  sum.logit_labels += l.logit_labels;
  sum.entropy += l.entropy;
}

void scale(LossBreakdown& l, double s) {
  l.total *= s;
  l.supervised *= s;
  l.classifier_space *= s;
  l.embedding_space *= s;
  l.logit_labels *= s;
  l.entropy *= s;
}

}  // namespace

std::string_view to_string(QRefresh mode) {
  return mode == QRefresh::kEpoch ? "epoch" : "streaming";
}

QRefresh parse_q_refresh(std::string_view text) {
  if (text == "epoch") return QRefresh::kEpoch;
  if (text == "streaming") return QRefresh::kStreaming;
  throw InvalidInput("unknown q_refresh '" + std::string(text) + "' (expected epoch|streaming)");
}

void TrainConfig::validate() const {
  if (epochs < 0) throw InvalidInput("TrainConfig: epochs must be >= 0");
  if (warmup_epochs < 0) throw InvalidInput("TrainConfig: warmup_epochs must be >= 0");
  if (batch_size < 1) throw InvalidInput("TrainConfig: batch_size must be >= 1");
  for (int h : hidden) {
    if (h < 1) throw InvalidInput("TrainConfig: hidden widths must be >= 1");
  }
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw InvalidInput("TrainConfig: temperature must be > 0");
  check_unit(gamma_pi, "gamma_pi");
  check_unit(gamma_mu, "gamma_mu");
  check_unit(gamma_q, "gamma_q");
  if (!(sgd.momentum >= 0.0 && sgd.momentum < 1.0)) throw InvalidInput("TrainConfig: momentum must be in [0,1)");
  if (!(sgd.weight_decay >= 0.0)) throw InvalidInput("TrainConfig: weight_decay must be >= 0");
  if (!(sgd.feature_lr > 0.0) || !(sgd.classifier_lr > 0.0)) throw InvalidInput("TrainConfig: learning rates must be > 0");
  if (!(sgd.omega >= 0.0) || !(sgd.alpha >= 0.0)) throw InvalidInput("TrainConfig: omega and alpha must be >= 0");
  if (!(pl_threshold >= 0.0 && pl_threshold < 1.0)) throw InvalidInput("TrainConfig: pl_threshold must be in [0,1)");
  if (!(streaming_decay > 0.0 && streaming_decay <= 1.0)) throw InvalidInput("TrainConfig: streaming_decay must be in (0,1]");
  if (checkpoint_every < 0) throw InvalidInput("TrainConfig: checkpoint_every must be >= 0");
  if (ablation.generative_labels_only && ablation.disable_fusion) {
    throw InvalidInput("TrainConfig: generative_labels_only and disable_fusion are mutually exclusive");
  }
  const bool any_ablation = ablation.disable_kl_f || ablation.disable_kl_g || ablation.disable_fusion ||
                            ablation.generative_labels_only;
  if (any_ablation && method != Method::kGet) throw InvalidInput("TrainConfig: ablation flags apply to method get only");
}

double TrainConfig::effective_gamma_q() const {
  if (ablation.disable_fusion) return 0.0;
  if (ablation.generative_labels_only) return 1.0;
  return gamma_q;
}

bool TrainConfig::uses_kl_g() const { return !ablation.disable_kl_g && !ablation.generative_labels_only; }
bool TrainConfig::uses_kl_f() const { return !ablation.disable_kl_f && !ablation.generative_labels_only; }

FeatureMatrix warmup(Network& net, const LabeledDataset& source, const TrainConfig& config) {
  if (source.empty()) throw InvalidInput("warmup: empty source set");
  const int c_count = net.shape().class_count;
  std::vector<int> counts(static_cast<std::size_t>(c_count), 0);
  for (int y : source.labels) ++counts[static_cast<std::size_t>(y)];
  for (int c = 0; c < c_count; ++c) {
    if (counts[static_cast<std::size_t>(c)] == 0) {
      throw DegenerateInit("warmup: class " + std::to_string(c) + " has no source sample");
    }
  }
  const std::size_t batch = static_cast<std::size_t>(config.batch_size);
  const std::size_t steps = (source.size() + batch - 1) / batch;
  SgdState sgd{config.sgd, 0, std::max<std::int64_t>(1, static_cast<std::int64_t>(steps) * config.warmup_epochs), {}};
  for (int e = 0; e < config.warmup_epochs; ++e) {
    int k = 0;
    for (const auto& idx : minibatches(source.size(), batch, config.seed, kWarmupKey + static_cast<std::uint64_t>(e))) {
      const FeatureMatrix x = gather_rows(source.features, idx);
      const Labels y = gather_labels(source.labels, idx);
      BatchInputs in;
      in.supervised_x = &x;
      in.supervised_y = &y;
      try {
        BatchResult r = evaluate_batch(net, in, BatchTargets{});
        auto slots = network_slots(net.parameters(), r.gradients.network);
        sgd_step(sgd, slots);
      } catch (const TrainingDiverged& err) {
        throw TrainingDiverged("warm-up epoch " + std::to_string(e + 1) + " batch " + std::to_string(k) + ": " +
                               err.what());
      }
      ++k;
    }
  }
  net.clear_cache();

  const FeatureMatrix feats = net.predict(source.features).features;
  FeatureMatrix means = FeatureMatrix::Zero(c_count, feats.cols());
  for (std::size_t i = 0; i < source.size(); ++i) {
    means.row(source.labels[i]) += feats.row(static_cast<Eigen::Index>(i));
  }
  for (int c = 0; c < c_count; ++c) {
    const double norm = means.row(c).norm();
    if (!(norm > 0.0)) throw DegenerateInit("warmup: class " + std::to_string(c) + " has a zero mean feature");
    means.row(c) /= norm;
  }
  return means;
}

EStepResult e_step(const Network& net, const MemoryBank& bank, const EmbeddingPrototypes& embedding,
                   const FeatureMatrix& target_x) {
  EStepResult out;
  out.features = net.predict(target_x).features;
  const double tau = bank.config().temperature;
  out.p_g = predictive_g(out.features, net.classifier_prototypes(), bank.prior(), tau);
  out.p_f = predictive_f(out.features, embedding, bank.prior(), tau);
  return out;
}

ProbabilityMatrix generative_labels(const MemoryBank& bank, const FeatureMatrix& features, bool soft) {
  return soft ? bank.posterior(features) : bank.pseudo_label(features);
}

CStepResult c_step(const EStepResult& e, const MemoryBank& bank, double gamma_q, bool soft_generative) {
  CStepResult out;
  out.q_g = auxiliary_distribution(e.p_g);
  out.q_f = auxiliary_distribution(e.p_f);
  out.generative = generative_labels(bank, e.features, soft_generative);
  out.fused.gamma_q = gamma_q;
  out.fused.g = mixup_labels(out.q_g, out.generative, gamma_q);
  out.fused.f = mixup_labels(out.q_f, out.generative, gamma_q);
  return out;
}

Trainer::Trainer(TrainConfig config, const DomainPair& pair)
    : config_(std::move(config)),
      pair_(&pair),
      net_(NetworkShape{pair.dim(), config_.hidden, pair.class_count()}, network_seed(config_.seed)) {
  config_.validate();
  sgd_.config = config_.sgd;
  sgd_.max_iterations = std::max<std::int64_t>(1, static_cast<std::int64_t>(steps_per_epoch()) * config_.epochs);
}

const MemoryBank& Trainer::bank() const {
  if (!bank_) throw StateError("Trainer: memory bank used before warm_start()");
  return *bank_;
}

int Trainer::steps_per_epoch() const {
  const std::size_t b = static_cast<std::size_t>(config_.batch_size);
  const std::size_t src = (pair_->source().size() + b - 1) / b;
  if (config_.method == Method::kSourceOnly) return static_cast<int>(src);
  const std::size_t tgt = (static_cast<std::size_t>(pair_->target_unlabeled().rows()) + b - 1) / b;
  return static_cast<int>(std::max(src, tgt));
}

void Trainer::warm_start() {
  const FeatureMatrix init = warmup(net_, pair_->source(), config_);
  BankConfig bc;
  bc.temperature = config_.temperature;
  // NC keeps a frozen uniform prior.
  bc.prior_decay = config_.method == Method::kNc ? 0.0 : config_.gamma_pi;
  bc.prototype_decay = config_.gamma_mu;
  bc.prior_update = config_.prior_update;
  bank_ = MemoryBank::init(pair_->class_count(), static_cast<int>(init.cols()), bc, init);
  embedding_ = reinit_embedding_prototypes(*bank_);
  stream_g_.emplace(pair_->class_count(), config_.streaming_decay);
  stream_f_.emplace(pair_->class_count(), config_.streaming_decay);
}

TrainerState Trainer::state(int epoch) const {
  TrainerState s;
  s.params = net_.parameters();
  s.sgd = sgd_;
  if (bank_) {
    s.prior = bank_->prior();
    s.bank_prototypes = bank_->prototypes();
  }
  s.embedding_prototypes = embedding_.vectors;
  s.epoch = epoch;
  return s;
}

EpochRecord Trainer::evaluate(int epoch) const {
  EpochRecord r;
  r.epoch = epoch;
  r.fused_label_accuracy = kNaN;
  r.generative_label_accuracy = kNaN;
  r.objective_g = kNaN;
  r.objective_f = kNaN;
  r.prior_kl = kNaN;
  if (pair_->target_unlabeled().rows() == 0) {
    r.target.accuracy = kNaN;
    r.target.balanced_accuracy = kNaN;
    return r;
  }
  const Evaluator ev(*pair_);
  r.target = ev.evaluate_network(net_);
  if (config_.method == Method::kGet && bank_) r.prior_kl = ev.prior_kl(bank_->prior());
  return r;
}

EpochRecord Trainer::run_epoch(int epoch, const TrainHooks& hooks) {
  if (!bank_) throw StateError("Trainer: run_epoch() before warm_start()");
  if (!net_.parameters().all_finite()) {
    throw TrainingDiverged("epoch " + std::to_string(epoch) + ": non-finite network parameters");
  }
  const FeatureMatrix& target_x = pair_->target_unlabeled();
  const bool has_target = target_x.rows() > 0;
  double fused_acc = kNaN;
  double generative_acc = kNaN;
  double obj_g = kNaN;
  double obj_f = kNaN;
  std::optional<CStepResult> cstep;
  std::optional<ProbabilityMatrix> epoch_labels;
  struct {
    Simplex p_g, q_g, p_f, q_f;
  } means;

  if (config_.method == Method::kGet) {
    embedding_ = reinit_embedding_prototypes(*bank_);
    // Fresh vectors get fresh momentum.
    const std::size_t slot = net_.parameters().tensors().size();
    if (sgd_.velocity.size() > slot) std::fill(sgd_.velocity[slot].begin(), sgd_.velocity[slot].end(), 0.0);
    if (has_target) {
      const EStepResult e = e_step(net_, *bank_, embedding_, target_x);
      cstep = c_step(e, *bank_, config_.effective_gamma_q(), config_.soft_generative_labels);
      obj_g = objective_value(cstep->q_g, e.p_g);
      obj_f = objective_value(cstep->q_f, e.p_f);
      if (config_.dump_class_proportions) {
        means.p_g = column_means(e.p_g);
        means.q_g = column_means(cstep->q_g);
        means.p_f = column_means(e.p_f);
        means.q_f = column_means(cstep->q_f);
      }
      const Evaluator ev(*pair_);
      fused_acc = ev.label_accuracy(cstep->fused.g);
      generative_acc = ev.label_accuracy(cstep->generative);
    }
  } else if (config_.method == Method::kNc && has_target) {
    epoch_labels = nc_labels(net_.predict(target_x).features, bank_->prototypes());
    fused_acc = generative_acc = Evaluator(*pair_).label_accuracy(*epoch_labels);
  } else if (config_.method == Method::kPl && has_target) {
    fused_acc = Evaluator(*pair_).label_accuracy(pl_labels(net_.predict(target_x).logits).labels);
  }

  EpochRecord record;
  m_step_epoch(epoch, cstep ? &*cstep : nullptr, epoch_labels ? &*epoch_labels : nullptr, hooks, record);

  const LossBreakdown loss = record.loss;
  record = evaluate(epoch);
  record.loss = loss;
  record.fused_label_accuracy = fused_acc;
  record.generative_label_accuracy = generative_acc;
  record.objective_g = obj_g;
  record.objective_f = obj_f;
  record.p_g_mean = means.p_g;
  record.q_g_mean = means.q_g;
  record.p_f_mean = means.p_f;
  record.q_f_mean = means.q_f;
  return record;
}

void Trainer::m_step_epoch(int epoch, const CStepResult* labels, const ProbabilityMatrix* epoch_labels,
                           const TrainHooks& hooks, EpochRecord& record) {
  const LabeledDataset& source = pair_->source();
  const LabeledDataset& labeled = pair_->target_labeled();
  const FeatureMatrix& target_x = pair_->target_unlabeled();
  const std::size_t b = static_cast<std::size_t>(config_.batch_size);
  const bool use_target = config_.method != Method::kSourceOnly && target_x.rows() > 0;
  const auto src_batches = minibatches(source.size(), b, config_.seed, batch_key(epoch, kSourceSet));
  const auto tgt_batches =
      use_target ? minibatches(static_cast<std::size_t>(target_x.rows()), b, config_.seed, batch_key(epoch, kTargetSet))
                 : std::vector<std::vector<std::size_t>>{};
  const auto lab_batches = config_.method == Method::kSourceOnly
                               ? std::vector<std::vector<std::size_t>>{}
                               : minibatches(labeled.size(), b, config_.seed, batch_key(epoch, kLabeledSet));
  const int steps = steps_per_epoch();
  const bool kl_g = config_.uses_kl_g();
  const bool kl_f = config_.uses_kl_f();
  const double gamma_q = config_.effective_gamma_q();

  LossBreakdown sum;
  for (int k = 0; k < steps; ++k) {
    const auto& sb = src_batches[static_cast<std::size_t>(k) % src_batches.size()];
    FeatureMatrix xs = gather_rows(source.features, sb);
    Labels ys = gather_labels(source.labels, sb);
    if (!lab_batches.empty()) {
      const auto& lb = lab_batches[static_cast<std::size_t>(k) % lab_batches.size()];
      const FeatureMatrix xl = gather_rows(labeled.features, lb);
      FeatureMatrix stacked(xs.rows() + xl.rows(), xs.cols());
      stacked << xs, xl;
      xs = std::move(stacked);
      const Labels yl = gather_labels(labeled.labels, lb);
      ys.insert(ys.end(), yl.begin(), yl.end());
    }

    BatchInputs in;
    in.supervised_x = &xs;
    in.supervised_y = &ys;
    in.temperature = config_.temperature;
    in.prior = bank_->prior();
    BatchTargets targets;
    FeatureMatrix xt;
    if (use_target) {
      const auto& tb = tgt_batches[static_cast<std::size_t>(k) % tgt_batches.size()];
      xt = gather_rows(target_x, tb);
      in.target_x = &xt;
      switch (config_.method) {
        case Method::kGet: {
          ProbabilityMatrix yg;
          ProbabilityMatrix yf;
          if (config_.q_refresh == QRefresh::kStreaming) {
            const FeatureMatrix feats = net_.predict(xt).features;
            const ProbabilityMatrix pg = predictive_g(feats, net_.classifier_prototypes(), bank_->prior(), config_.temperature);
            const ProbabilityMatrix pf = predictive_f(feats, embedding_, bank_->prior(), config_.temperature);
            stream_g_->observe(pg);
            stream_f_->observe(pf);
            const ProbabilityMatrix gen = config_.online_generative_labels
                                              ? generative_labels(*bank_, feats, config_.soft_generative_labels)
                                              : gather_rows(labels->generative, tb);
            yg = mixup_labels(stream_g_->auxiliary(pg), gen, gamma_q);
            yf = mixup_labels(stream_f_->auxiliary(pf), gen, gamma_q);
          } else if (config_.online_generative_labels) {
            const ProbabilityMatrix gen =
                generative_labels(*bank_, net_.predict(xt).features, config_.soft_generative_labels);
            yg = mixup_labels(gather_rows(labels->q_g, tb), gen, gamma_q);
            yf = mixup_labels(gather_rows(labels->q_f, tb), gen, gamma_q);
          } else {
            yg = gather_rows(labels->fused.g, tb);
            yf = gather_rows(labels->fused.f, tb);
          }
          if (!kl_g && !kl_f) {
            targets.logit_labels = yg;
          } else {
            if (kl_g) targets.classifier_space = yg;
            if (kl_f) targets.embedding_space = std::move(yf);
          }
          in.embedding = &embedding_;
          if (hooks.on_batch_labels) hooks.on_batch_labels(epoch, k, yg);
          break;
        }
        case Method::kNc:
          targets.logit_labels = config_.online_generative_labels
                                     ? nc_labels(net_.predict(xt).features, bank_->prototypes())
                                     : gather_rows(*epoch_labels, tb);
          if (hooks.on_batch_labels) hooks.on_batch_labels(epoch, k, targets.logit_labels);
          break;
        case Method::kPl: {
          PseudoLabels pl = pl_labels(net_.predict(xt).logits, config_.pl_threshold);
          targets.logit_labels = std::move(pl.labels);
          targets.logit_weights = std::move(pl.mask);
          if (hooks.on_batch_labels) hooks.on_batch_labels(epoch, k, targets.logit_labels);
          break;
        }
        case Method::kMinEnt:
          targets.entropy_minimization = true;
          break;
        case Method::kSourceOnly:
          break;
      }
    }

    BatchResult r;
    try {
      r = evaluate_batch(net_, in, targets);
    } catch (const TrainingDiverged& e) {
      throw TrainingDiverged("epoch " + std::to_string(epoch) + " batch " + std::to_string(k) + ": " + e.what());
    }
    accumulate(sum, r.loss);

    // Bank sees the pre-step features and the pre-step classifier weights.
    if (use_target && (config_.method == Method::kGet || config_.method == Method::kNc)) {
      bank_->update_prior(r.target.features, net_.classifier_prototypes());
      bank_->update_prototypes(r.target.features);
    }

    std::vector<ParamSlot> slots = network_slots(net_.parameters(), r.gradients.network);
    if (config_.method == Method::kGet) {
      if (r.gradients.embedding_prototypes.size() == 0) {
        r.gradients.embedding_prototypes = FeatureMatrix::Zero(embedding_.vectors.rows(), embedding_.vectors.cols());
      }
      slots.push_back(ParamSlot{{embedding_.vectors.data(), static_cast<std::size_t>(embedding_.vectors.size())},
                                {r.gradients.embedding_prototypes.data(),
                                 static_cast<std::size_t>(r.gradients.embedding_prototypes.size())},
                                ParamGroup::kEmbeddingPrototypes});
    }
    try {
      sgd_step(sgd_, slots);
    } catch (const TrainingDiverged& e) {
      throw TrainingDiverged("epoch " + std::to_string(epoch) + " batch " + std::to_string(k) + ": " + e.what());
    }
  }
  net_.clear_cache();
  if (steps > 0) scale(sum, 1.0 / steps);
  record.loss = sum;
}

RunRecord Trainer::run(const TrainHooks& hooks) {
  RunRecord record;
  try {
    warm_start();
    record.epochs.push_back(evaluate(0));
    if (hooks.on_epoch) hooks.on_epoch(record.epochs.back());
    for (int e = 1; e <= config_.epochs; ++e) {
      record.epochs.push_back(run_epoch(e, hooks));
      if (hooks.on_epoch) hooks.on_epoch(record.epochs.back());
      if (hooks.on_checkpoint && config_.checkpoint_every > 0 &&
          (e % config_.checkpoint_every == 0 || e == config_.epochs)) {
        hooks.on_checkpoint(state(e));
      }
    }
  } catch (const std::exception& ex) {
    if (hooks.on_failure) hooks.on_failure(record, ex.what());
    throw;
  }
  return record;
}

RunRecord train(const TrainConfig& config, const DomainPair& pair, const TrainHooks& hooks) {
  Trainer trainer(config, pair);
  return trainer.run(hooks);
}

}  // namespace getda

// Copyright 2026 The Factex Authors.
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

#include "factex/training.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "factex/errors.hpp"
#include "factex/evaluation.hpp"
#include "factex/parallel.hpp"

namespace factex {

namespace {
using nlohmann::json;
}

void TrainConfig::validate() const {
  model.validate();
  if (lr <= 0.0) throw UsageError("train: lr must be positive");
  if (batch_size < 1) throw UsageError("train: batch_size must be >= 1");
  if (max_epochs < 1) throw UsageError("train: max_epochs must be >= 1");
  if (eval_every_steps < 1)
    throw UsageError("train: eval_every_steps must be >= 1");
  if (warmup_frac < 0.0 || warmup_frac >= 1.0)
    throw UsageError("train: warmup_frac must be in [0, 1)");
  if (oracle_k < 1 || top_n < 1)
    throw UsageError("train: oracle_k and top_n must be >= 1");
}

double lr_multiplier(long long step, long long warmup, long long total) {
  if (step <= 0) return 0.0;
  if (warmup > 0 && step <= warmup)
    return static_cast<double>(step) / static_cast<double>(warmup);
  if (step >= total) return 0.0;
  return static_cast<double>(total - step) /
         static_cast<double>(total - warmup);
}

std::vector<std::vector<int>> make_batches(int n_instances, int batch_size,
                                           std::uint64_t seed, int epoch) {
  if (batch_size < 1) throw UsageError("make_batches: batch_size must be >= 1");
  std::vector<int> order(static_cast<std::size_t>(n_instances));
  for (int i = 0; i < n_instances; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(mix_seed(seed, 0xba7c4e5u, static_cast<std::uint64_t>(epoch)));
  rng.shuffle(order);
  std::vector<std::vector<int>> batches;
  for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(order.size(), b + static_cast<std::size_t>(batch_size));
    batches.emplace_back(order.begin() + static_cast<long>(b),
                         order.begin() + static_cast<long>(end));
  }
  return batches;
}

AdamW::AdamW(const ModelParams& shape, double beta1, double beta2, double eps,
             double weight_decay)
    : beta1_(beta1), beta2_(beta2), eps_(eps), weight_decay_(weight_decay) {
  for_each_param(const_cast<ModelParams&>(shape),
                 [&](const std::string&, Tensor& t, bool) {
                   m_.push_back(t.zeros_like());
                   v_.push_back(t.zeros_like());
                 });
}

void AdamW::step(ModelParams& params, const ModelParams& grads, double lr) {
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));

  std::size_t idx = 0;
  std::vector<std::pair<Tensor*, bool>> targets;
  for_each_param(params, [&](const std::string&, Tensor& t, bool decay) {
    targets.emplace_back(&t, decay);
  });
  for_each_param(const_cast<ModelParams&>(grads),
                 [&](const std::string&, Tensor& g, bool) {
                   Tensor& t = *targets[idx].first;
                   const bool decay = targets[idx].second;
                   Tensor& m = m_[idx];
                   Tensor& v = v_[idx];
                   for (std::size_t i = 0; i < t.size(); ++i) {
                     m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
                     v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
                     const double mhat = m[i] / bc1;
                     const double vhat = v[i] / bc2;
                     double update = mhat / (std::sqrt(vhat) + eps_);
                     if (decay && weight_decay_ != 0.0)
                       update += weight_decay_ * t[i];
                     t[i] -= lr * update;
                   }
                   ++idx;
                 });
}

double clip_global_norm(ModelParams& grads, double max_norm) {
  double sq = 0.0;
  for_each_param(grads, [&](const std::string&, Tensor& g, bool) {
    for (std::size_t i = 0; i < g.size(); ++i) sq += g[i] * g[i];
  });
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for_each_param(grads, [&](const std::string&, Tensor& g, bool) {
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= scale;
    });
  }
  return norm;
}

namespace {

struct PreparedInstance {
  EncodedInput encoded;
  Targets targets;
};

std::string checkpoint_name(long long step) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "step_%06lld.ckpt", step);
  return std::string(buf);
}

double validation_metric(const TrainConfig& cfg,
                         const std::vector<Instance>& val,
                         const std::vector<OracleSelection>& val_oracles,
                         const ModelParams& params, const Vocab& vocab) {
  if (cfg.model.kind == ModelKind::veracity) {
    const auto preds = predict_veracity_split(
        val, cfg.model, params, vocab,
        cfg.model.veracity_input == VeracityInput::oracles ? &val_oracles
                                                           : nullptr);
    std::vector<int> golds;
    golds.reserve(val.size());
    for (const auto& inst : val) golds.push_back(static_cast<int>(inst.label));
    return macro_f1_report(preds, golds).macro_f1;
  }
  const auto results =
      explain_split(val, cfg.model, params, vocab, cfg.top_n);
  return mean_rouge2_f1(results);
}

}  // namespace

std::string history_to_jsonl(const TrainHistory& history) {
  std::string out;
  for (const auto& p : history.points) {
    json j;
    j["checkpoint"] = p.checkpoint;
    j["step"] = p.step;
    j["train_loss"] = p.train_loss;
    j["val_metric"] = p.val_metric;
    out += j.dump();
    out += '\n';
  }
  return out;
}

TrainResult train_model(const TrainConfig& config,
                        const std::vector<Instance>& train_split,
                        const std::vector<Instance>& val_split) {
  config.validate();
  if (train_split.empty() || val_split.empty())
    throw DataError("train_model: empty split");

  const Vocab vocab = build_vocab(train_split, config.min_freq);

  // Oracle labels for the explanation objective; also the evidence source
  // for veracity models reading oracle selections.
  const bool needs_train_oracles =
      config.model.kind != ModelKind::veracity ||
      config.model.veracity_input == VeracityInput::oracles;
  std::vector<OracleSelection> train_oracles, val_oracles;
  if (needs_train_oracles)
    train_oracles = batch_greedy_oracle(train_split, config.oracle_k);
  if (config.model.kind == ModelKind::veracity &&
      config.model.veracity_input == VeracityInput::oracles)
    val_oracles = batch_greedy_oracle(val_split, config.oracle_k);

  // Encodings are deterministic; build them once up front.
  std::vector<PreparedInstance> prepared(train_split.size());
  parallel_for(train_split.size(), [&](std::size_t i) {
    const Instance& inst = train_split[i];
    PreparedInstance& p = prepared[i];
    if (config.model.kind == ModelKind::veracity) {
      const OracleSelection* sel =
          config.model.veracity_input == VeracityInput::oracles
              ? &train_oracles[i]
              : nullptr;
      const auto evidence =
          veracity_evidence(inst, config.model.veracity_input, sel);
      p.encoded = encode_instance(inst, vocab, TaskKind::veracity,
                                  config.model.encoder, &evidence);
    } else {
      p.encoded = encode_instance(inst, vocab, config.model.task(),
                                  config.model.encoder);
    }
    if (needs_train_oracles) p.targets.sentence_labels = train_oracles[i].labels;
    p.targets.veracity_label = static_cast<int>(inst.label);
  });

  Rng init_rng(mix_seed(config.seed, 0x1217a3u));
  ModelParams params = init_params(config.model, vocab.size(), init_rng);
  ModelParams grads = zeros_like(params);
  AdamW opt(params, config.adam_beta1, config.adam_beta2, config.adam_eps,
            config.weight_decay);

  const int n = static_cast<int>(train_split.size());
  const long long steps_per_epoch =
      (n + config.batch_size - 1) / config.batch_size;
  const long long total_steps = steps_per_epoch * config.max_epochs;
  const long long warmup =
      config.warmup_steps >= 0
          ? config.warmup_steps
          : static_cast<long long>(config.warmup_frac *
                                   static_cast<double>(total_steps));

  const bool to_disk = !config.out_dir.empty();
  if (to_disk) std::filesystem::create_directories(config.out_dir);
  std::ofstream history_out;
  if (to_disk) {
    history_out.open(config.out_dir + "/history.jsonl", std::ios::binary);
    if (!history_out)
      throw DataError("cannot write history in " + config.out_dir);
  }

  TrainResult result;
  result.vocab = vocab;
  TrainHistory& history = result.history;
  double best_metric = -1.0;
  long long step = 0;
  double loss_accum = 0.0;
  long long loss_count = 0;
  long long last_recorded_step = -1;

  auto record_point = [&](long long at_step) {
    if (at_step == last_recorded_step) return;
    const double metric =
        validation_metric(config, val_split, val_oracles, params, vocab);
    EvalPoint pt;
    pt.step = at_step;
    pt.train_loss = loss_count > 0 ? loss_accum / static_cast<double>(loss_count)
                                   : 0.0;
    pt.val_metric = metric;
    pt.checkpoint = checkpoint_name(at_step);
    if (to_disk)
      save_checkpoint(config.out_dir + "/" + pt.checkpoint, config.model,
                      vocab, params);
    history.points.push_back(pt);
    if (to_disk) {
      json j;
      j["checkpoint"] = pt.checkpoint;
      j["step"] = pt.step;
      j["train_loss"] = pt.train_loss;
      j["val_metric"] = pt.val_metric;
      history_out << j.dump() << '\n';
    }
    if (metric > best_metric) {
      best_metric = metric;
      history.best_index = history.points.size() - 1;
      result.best_params = params;
      result.best_checkpoint =
          to_disk ? config.out_dir + "/" + pt.checkpoint : pt.checkpoint;
    }
    loss_accum = 0.0;
    loss_count = 0;
    last_recorded_step = at_step;
  };

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto batches =
        make_batches(n, config.batch_size, config.seed, epoch);
    for (const auto& batch : batches) {
      ++step;
      for_each_param(grads, [](const std::string&, Tensor& g, bool) { g.zero(); });

      // Gradients accumulate serially in batch order so results do not
      // depend on the worker count; the matrix kernels underneath are the
      // parallel part.
      double batch_loss = 0.0;
      ForwardTrace trace;
      for (std::size_t bi = 0; bi < batch.size(); ++bi) {
        const auto& p = prepared[static_cast<std::size_t>(batch[bi])];
        const std::uint64_t drop_seed =
            mix_seed(config.seed, 0xd207u, static_cast<std::uint64_t>(step),
                     static_cast<std::uint64_t>(batch[bi]));
        model_forward(p.encoded, params, config.model, /*train_mode=*/true,
                      drop_seed, &trace);
        batch_loss += model_loss(trace.pred, p.targets, p.encoded,
                                 config.loss_weights, config.model.kind);
        model_backward(trace, p.encoded, p.targets, config.loss_weights,
                       params, config.model, grads);
      }
      const double inv = 1.0 / static_cast<double>(batch.size());
      batch_loss *= inv;
      for_each_param(grads, [&](const std::string&, Tensor& g, bool) {
        for (std::size_t i = 0; i < g.size(); ++i) g[i] *= inv;
      });

      if (!std::isfinite(batch_loss)) {
        if (to_disk)
          save_checkpoint(config.out_dir + "/diverged_" +
                              checkpoint_name(step),
                          config.model, vocab, params);
        throw NumericError("train_model: non-finite loss at step " +
                           std::to_string(step));
      }

      clip_global_norm(grads, config.clip_norm);
      opt.step(params, grads,
               config.lr * lr_multiplier(step, warmup, total_steps));

      loss_accum += batch_loss;
      ++loss_count;

      if (epoch > 1 && step % config.eval_every_steps == 0)
        record_point(step);
    }
    record_point(step);  // epoch end
  }

  if (history.points.empty())
    throw NumericError("train_model: no evaluation points recorded");
  return result;
}

}  // namespace factex

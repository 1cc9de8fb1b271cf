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

#ifndef FACTEX_MODEL_HPP_
#define FACTEX_MODEL_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "factex/encoder.hpp"
#include "factex/heads.hpp"
#include "factex/rng.hpp"
#include "factex/tensor.hpp"
#include "factex/vocab.hpp"

namespace factex {

enum class ModelKind { explain, veracity, joint };
enum class VeracityInput { ruling, oracles, justification };

std::string model_kind_name(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);
std::string veracity_input_name(VeracityInput vi);
std::optional<VeracityInput> parse_veracity_input(std::string_view name);

struct ModelConfig {
  EncoderConfig encoder;
  ModelKind kind = ModelKind::joint;
  VeracityInput veracity_input = VeracityInput::ruling;
  int hidden_explain = 100;
  int hidden_veracity = 150;
  int hidden_joint = 100;

  void validate() const;
  TaskKind task() const;
};

struct EncoderLayerParams {
  Tensor wq, bq, wk, bk, wv, bv, wo, bo;
  Tensor ln1_g, ln1_b;
  Tensor ff_w1, ff_b1, ff_w2, ff_b2;
  Tensor ln2_g, ln2_b;
};

// Every learnable tensor of encoder + the active head. Gradient buffers are
// just a zeroed copy of this structure.
struct ModelParams {
  Tensor tok_emb;  // [vocab, model_dim]
  Tensor pos_emb;  // [window, model_dim], positions local to each window
  std::vector<EncoderLayerParams> layers;
  ExplainHeadParams explain;
  VeracityHeadParams veracity;
  CrossStitchParams stitch;
  ModelKind kind = ModelKind::joint;
};

// Fixed-order enumeration of the parameters that exist for params.kind.
// fn(name, tensor, decays); the same order on two structurally equal
// ModelParams pairs tensors up for the optimizer and checkpoints.
template <typename Params, typename Fn>
void for_each_param(Params& p, Fn&& fn) {
  fn("embed.tok", p.tok_emb, true);
  fn("embed.pos", p.pos_emb, true);
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    auto& lay = p.layers[l];
    const std::string pre = "layer" + std::to_string(l) + ".";
    fn(pre + "attn.wq", lay.wq, true);
    fn(pre + "attn.bq", lay.bq, false);
    fn(pre + "attn.wk", lay.wk, true);
    fn(pre + "attn.bk", lay.bk, false);
    fn(pre + "attn.wv", lay.wv, true);
    fn(pre + "attn.bv", lay.bv, false);
    fn(pre + "attn.wo", lay.wo, true);
    fn(pre + "attn.bo", lay.bo, false);
    fn(pre + "ln1.g", lay.ln1_g, false);
    fn(pre + "ln1.b", lay.ln1_b, false);
    fn(pre + "ff.w1", lay.ff_w1, true);
    fn(pre + "ff.b1", lay.ff_b1, false);
    fn(pre + "ff.w2", lay.ff_w2, true);
    fn(pre + "ff.b2", lay.ff_b2, false);
    fn(pre + "ln2.g", lay.ln2_g, false);
    fn(pre + "ln2.b", lay.ln2_b, false);
  }
  switch (p.kind) {
    case ModelKind::explain:
      fn("explain.w1", p.explain.w1, true);
      fn("explain.b1", p.explain.b1, false);
      fn("explain.w2", p.explain.w2, true);
      fn("explain.b2", p.explain.b2, false);
      break;
    case ModelKind::veracity:
      fn("veracity.w1", p.veracity.w1, true);
      fn("veracity.b1", p.veracity.b1, false);
      fn("veracity.w2", p.veracity.w2, true);
      fn("veracity.b2", p.veracity.b2, false);
      break;
    case ModelKind::joint:
      fn("stitch.sub_e1.w", p.stitch.sub_e1_w, true);
      fn("stitch.sub_e1.b", p.stitch.sub_e1_b, false);
      fn("stitch.sub_e2.w", p.stitch.sub_e2_w, true);
      fn("stitch.sub_e2.b", p.stitch.sub_e2_b, false);
      fn("stitch.sub_f1.w", p.stitch.sub_f1_w, true);
      fn("stitch.sub_f1.b", p.stitch.sub_f1_b, false);
      fn("stitch.sub_f2.w", p.stitch.sub_f2_w, true);
      fn("stitch.sub_f2.b", p.stitch.sub_f2_b, false);
      fn("stitch.alpha", p.stitch.alpha, false);
      fn("stitch.beta_e", p.stitch.beta_e, false);
      fn("stitch.beta_f", p.stitch.beta_f, false);
      fn("stitch.out_e.w", p.stitch.out_e_w, true);
      fn("stitch.out_e.b", p.stitch.out_e_b, false);
      fn("stitch.out_f.w", p.stitch.out_f_w, true);
      fn("stitch.out_f.b", p.stitch.out_f_b, false);
      break;
  }
}

// Normal(0, 0.02) weights, zero biases, unit LayerNorm gains; alpha starts
// near task isolation ([[0.9, 0.1], [0.1, 0.9]]) and beta at (0.5, 0.5).
ModelParams init_params(const ModelConfig& config, int vocab_size, Rng& rng);
ModelParams zeros_like(const ModelParams& params);

std::size_t param_count(const ModelParams& params);

// ---- forward / backward ----------------------------------------------

struct LayerTrace {
  Tensor x_in;
  Tensor q, k, v;
  std::vector<Tensor> attn;  // per head, softmaxed [T, T]
  Tensor heads_concat;
  Tensor attn_proj;
  Tensor r1, ln1_xhat, x1;
  std::vector<double> ln1_invstd;
  Tensor ff_pre, ff_act, ff_out;
  Tensor r2, ln2_xhat, x_out;
  std::vector<double> ln2_invstd;
};

struct WindowTrace {
  WindowSlice slice;
  Tensor x0;
  std::vector<LayerTrace> layers;
  const Tensor& output() const { return layers.back().x_out; }
};

struct HeadTrace {
  Tensor c_sent;   // [N, d] sentence markers after dropout
  Tensor c_claim;  // [1, d] claim marker after dropout (0 rows if absent)
  std::vector<double> drop_c_sent, drop_c_claim;
  // single-task heads
  Tensor st_hidden, st_hidden_dropped;
  std::vector<double> drop_st_hidden;
  // joint head
  Tensor he1, he2, hf1, hf2;          // subspace outputs
  Tensor he1_d, he2_d, hf1_d, hf2_d;  // after dropout
  std::vector<double> drop_he1, drop_he2, drop_hf1, drop_hf2;
  Tensor mix_e, mix_f;  // cross-stitch outputs, per sentence
  Tensor pooled_f;      // [1, hidden]
  std::vector<double> logits_e;
  std::array<double, kNumLabels> logits_f{};
};

struct ForwardTrace {
  std::vector<WindowTrace> windows;
  std::vector<int> cover;  // how many windows cover each position
  Tensor merged;           // [L, d]
  HeadTrace head;
  Prediction pred;
};

// Runs the sliding-window encoder and the active head. Dropout is sampled
// from dropout_seed only when train_mode; eval mode is deterministic.
Prediction model_forward(const EncodedInput& encoded,
                         const ModelParams& params, const ModelConfig& config,
                         bool train_mode, std::uint64_t dropout_seed,
                         ForwardTrace* trace);

struct Targets {
  std::vector<std::uint8_t> sentence_labels;  // oracle y, >= kept_sentences
  int veracity_label = -1;
};

double model_loss(const Prediction& pred, const Targets& targets,
                  const EncodedInput& encoded, const LossWeights& weights,
                  ModelKind kind);

// Accumulates d loss / d params into grads (same structure as params).
void model_backward(const ForwardTrace& trace, const EncodedInput& encoded,
                    const Targets& targets, const LossWeights& weights,
                    const ModelParams& params, const ModelConfig& config,
                    ModelParams& grads);

// ---- checkpoints -------------------------------------------------------

struct Checkpoint {
  ModelConfig config;
  Vocab vocab;
  ModelParams params;
};

// Versioned container: magic + JSON header (config, vocab, tensor index)
// followed by raw little-endian doubles.
void save_checkpoint(const std::string& path, const ModelConfig& config,
                     const Vocab& vocab, const ModelParams& params);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace factex

#endif  // FACTEX_MODEL_HPP_

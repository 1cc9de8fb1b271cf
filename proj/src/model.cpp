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

#include "factex/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "factex/errors.hpp"

namespace factex {

namespace {

using nlohmann::json;

constexpr double kLnEps = 1e-5;
constexpr double kInitStd = 0.02;

double gelu(double x) {
  return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2));
}

double gelu_grad(double x) {
  constexpr double kInvSqrt2Pi = 0.3989422804014327;
  return 0.5 * (1.0 + std::erf(x * M_SQRT1_2)) +
         x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

Tensor normal_init(std::size_t rows, std::size_t cols, Rng& rng) {
  Tensor t(rows, cols);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.normal(0.0, kInitStd);
  return t;
}

void apply_dropout(Tensor& x, double rate, bool train, Rng& rng,
                   std::vector<double>& mask) {
  mask.clear();
  if (!train || rate <= 0.0 || x.size() == 0) return;
  mask.resize(x.size());
  const double scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask[i] = rng.next_double() < rate ? 0.0 : scale;
    x[i] *= mask[i];
  }
}

void dropout_backward(Tensor& dx, const std::vector<double>& mask) {
  if (mask.empty()) return;
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= mask[i];
}

void layernorm_forward(const Tensor& x, const Tensor& g, const Tensor& b,
                       Tensor& y, Tensor& xhat, std::vector<double>& invstd) {
  const std::size_t rows = x.rows(), d = x.cols();
  y = Tensor(rows, d);
  xhat = Tensor(rows, d);
  invstd.assign(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* xr = x.row(i);
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += xr[j];
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double c = xr[j] - mean;
      var += c * c;
    }
    var /= static_cast<double>(d);
    const double is = 1.0 / std::sqrt(var + kLnEps);
    invstd[i] = is;
    double* xh = xhat.row(i);
    double* yr = y.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      xh[j] = (xr[j] - mean) * is;
      yr[j] = g[j] * xh[j] + b[j];
    }
  }
}

void layernorm_backward(const Tensor& dy, const Tensor& xhat,
                        const std::vector<double>& invstd, const Tensor& g,
                        Tensor& dx, Tensor& dg, Tensor& db) {
  const std::size_t rows = dy.rows(), d = dy.cols();
  dx = Tensor(rows, d);
  for (std::size_t i = 0; i < rows; ++i) {
    const double* dyr = dy.row(i);
    const double* xh = xhat.row(i);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double dxh = dyr[j] * g[j];
      m1 += dxh;
      m2 += dxh * xh[j];
      dg[j] += dyr[j] * xh[j];
      db[j] += dyr[j];
    }
    m1 /= static_cast<double>(d);
    m2 /= static_cast<double>(d);
    double* dxr = dx.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const double dxh = dyr[j] * g[j];
      dxr[j] = invstd[i] * (dxh - m1 - xh[j] * m2);
    }
  }
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t width) {
  Tensor out(x.rows(), width);
  for (std::size_t i = 0; i < x.rows(); ++i)
    std::memcpy(out.row(i), x.row(i) + begin, width * sizeof(double));
  return out;
}

void add_into_cols(Tensor& dst, const Tensor& src, std::size_t begin) {
  for (std::size_t i = 0; i < src.rows(); ++i) {
    double* d = dst.row(i) + begin;
    const double* s = src.row(i);
    for (std::size_t j = 0; j < src.cols(); ++j) d[j] += s[j];
  }
}

// One transformer layer, post-norm wiring:
//   x1 = LN1(x + Attn(x)); out = LN2(x1 + FFN(x1))
void layer_forward(const Tensor& x, const EncoderLayerParams& p, int heads,
                   LayerTrace& tr) {
  const std::size_t t = x.rows(), d = x.cols();
  const std::size_t dk = d / static_cast<std::size_t>(heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  tr.x_in = x;
  tr.q = Tensor(t, d);
  tr.k = Tensor(t, d);
  tr.v = Tensor(t, d);
  linear(x, p.wq, p.bq, tr.q);
  linear(x, p.wk, p.bk, tr.k);
  linear(x, p.wv, p.bv, tr.v);

  tr.attn.assign(static_cast<std::size_t>(heads), Tensor());
  tr.heads_concat = Tensor(t, d);
  for (int h = 0; h < heads; ++h) {
    const std::size_t off = static_cast<std::size_t>(h) * dk;
    Tensor qh = slice_cols(tr.q, off, dk);
    Tensor kh = slice_cols(tr.k, off, dk);
    Tensor vh = slice_cols(tr.v, off, dk);
    Tensor scores(t, t);
    matmul_transb(qh, kh, scores);
    Tensor& a = tr.attn[static_cast<std::size_t>(h)];
    a = Tensor(t, t);
    for (std::size_t i = 0; i < t; ++i) {
      double* srow = scores.row(i);
      for (std::size_t j = 0; j < t; ++j) srow[j] *= scale;
      softmax_row(srow, a.row(i), t);
    }
    Tensor oh(t, dk);
    matmul(a, vh, oh);
    for (std::size_t i = 0; i < t; ++i)
      std::memcpy(tr.heads_concat.row(i) + off, oh.row(i),
                  dk * sizeof(double));
  }

  tr.attn_proj = Tensor(t, d);
  linear(tr.heads_concat, p.wo, p.bo, tr.attn_proj);

  tr.r1 = x;
  for (std::size_t i = 0; i < tr.r1.size(); ++i) tr.r1[i] += tr.attn_proj[i];
  layernorm_forward(tr.r1, p.ln1_g, p.ln1_b, tr.x1, tr.ln1_xhat,
                    tr.ln1_invstd);

  tr.ff_pre = Tensor(t, p.ff_w1.cols());
  linear(tr.x1, p.ff_w1, p.ff_b1, tr.ff_pre);
  tr.ff_act = tr.ff_pre;
  for (std::size_t i = 0; i < tr.ff_act.size(); ++i)
    tr.ff_act[i] = gelu(tr.ff_pre[i]);
  tr.ff_out = Tensor(t, d);
  linear(tr.ff_act, p.ff_w2, p.ff_b2, tr.ff_out);

  tr.r2 = tr.x1;
  for (std::size_t i = 0; i < tr.r2.size(); ++i) tr.r2[i] += tr.ff_out[i];
  layernorm_forward(tr.r2, p.ln2_g, p.ln2_b, tr.x_out, tr.ln2_xhat,
                    tr.ln2_invstd);
}

// Returns d loss / d layer-input while accumulating parameter grads.
Tensor layer_backward(const Tensor& d_out, const LayerTrace& tr,
                      const EncoderLayerParams& p, EncoderLayerParams& gp,
                      int heads) {
  const std::size_t t = tr.x_in.rows(), d = tr.x_in.cols();
  const std::size_t dk = d / static_cast<std::size_t>(heads);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));

  Tensor d_r2;
  layernorm_backward(d_out, tr.ln2_xhat, tr.ln2_invstd, p.ln2_g, d_r2,
                     gp.ln2_g, gp.ln2_b);

  // r2 = x1 + ff_out
  Tensor d_ff_out = d_r2;
  Tensor d_ff_act(t, p.ff_w2.rows());
  matmul_transb(d_ff_out, p.ff_w2, d_ff_act);
  matmul_transa_acc(tr.ff_act, d_ff_out, gp.ff_w2);
  for (std::size_t i = 0; i < t; ++i) {
    const double* r = d_ff_out.row(i);
    for (std::size_t j = 0; j < d; ++j) gp.ff_b2[j] += r[j];
  }
  Tensor d_ff_pre = d_ff_act;
  for (std::size_t i = 0; i < d_ff_pre.size(); ++i)
    d_ff_pre[i] *= gelu_grad(tr.ff_pre[i]);
  Tensor d_x1_ffn(t, d);
  matmul_transb(d_ff_pre, p.ff_w1, d_x1_ffn);
  matmul_transa_acc(tr.x1, d_ff_pre, gp.ff_w1);
  for (std::size_t i = 0; i < t; ++i) {
    const double* r = d_ff_pre.row(i);
    for (std::size_t j = 0; j < d_ff_pre.cols(); ++j) gp.ff_b1[j] += r[j];
  }

  Tensor d_x1 = d_r2;
  for (std::size_t i = 0; i < d_x1.size(); ++i) d_x1[i] += d_x1_ffn[i];

  Tensor d_r1;
  layernorm_backward(d_x1, tr.ln1_xhat, tr.ln1_invstd, p.ln1_g, d_r1,
                     gp.ln1_g, gp.ln1_b);

  // r1 = x_in + attn_proj
  Tensor d_attn_proj = d_r1;
  Tensor d_heads_concat(t, d);
  matmul_transb(d_attn_proj, p.wo, d_heads_concat);
  matmul_transa_acc(tr.heads_concat, d_attn_proj, gp.wo);
  for (std::size_t i = 0; i < t; ++i) {
    const double* r = d_attn_proj.row(i);
    for (std::size_t j = 0; j < d; ++j) gp.bo[j] += r[j];
  }

  Tensor d_q(t, d), d_k(t, d), d_v(t, d);
  for (int h = 0; h < heads; ++h) {
    const std::size_t off = static_cast<std::size_t>(h) * dk;
    const Tensor& a = tr.attn[static_cast<std::size_t>(h)];
    Tensor qh = slice_cols(tr.q, off, dk);
    Tensor kh = slice_cols(tr.k, off, dk);
    Tensor vh = slice_cols(tr.v, off, dk);
    Tensor d_oh = slice_cols(d_heads_concat, off, dk);

    Tensor d_a(t, t);
    matmul_transb(d_oh, vh, d_a);
    Tensor d_vh(t, dk);
    matmul_transa_acc(a, d_oh, d_vh);

    Tensor d_scores(t, t);
    for (std::size_t i = 0; i < t; ++i) {
      const double* ar = a.row(i);
      const double* dar = d_a.row(i);
      double inner = 0.0;
      for (std::size_t j = 0; j < t; ++j) inner += dar[j] * ar[j];
      double* dsr = d_scores.row(i);
      for (std::size_t j = 0; j < t; ++j)
        dsr[j] = ar[j] * (dar[j] - inner) * scale;
    }

    Tensor d_qh(t, dk);
    matmul(d_scores, kh, d_qh);
    Tensor d_kh(t, dk);
    matmul_transa_acc(d_scores, qh, d_kh);

    add_into_cols(d_q, d_qh, off);
    add_into_cols(d_k, d_kh, off);
    add_into_cols(d_v, d_vh, off);
  }

  Tensor d_x = d_r1;
  Tensor tmp(t, d);
  matmul_transb(d_q, p.wq, tmp);
  for (std::size_t i = 0; i < d_x.size(); ++i) d_x[i] += tmp[i];
  matmul_transb(d_k, p.wk, tmp);
  for (std::size_t i = 0; i < d_x.size(); ++i) d_x[i] += tmp[i];
  matmul_transb(d_v, p.wv, tmp);
  for (std::size_t i = 0; i < d_x.size(); ++i) d_x[i] += tmp[i];

  matmul_transa_acc(tr.x_in, d_q, gp.wq);
  matmul_transa_acc(tr.x_in, d_k, gp.wk);
  matmul_transa_acc(tr.x_in, d_v, gp.wv);
  for (std::size_t i = 0; i < t; ++i) {
    const double* rq = d_q.row(i);
    const double* rk = d_k.row(i);
    const double* rv = d_v.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      gp.bq[j] += rq[j];
      gp.bk[j] += rk[j];
      gp.bv[j] += rv[j];
    }
  }
  return d_x;
}

}  // namespace

std::string model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::explain: return "explain";
    case ModelKind::veracity: return "veracity";
    case ModelKind::joint: return "joint";
  }
  return "joint";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  if (name == "explain") return ModelKind::explain;
  if (name == "veracity") return ModelKind::veracity;
  if (name == "joint") return ModelKind::joint;
  return std::nullopt;
}

std::string veracity_input_name(VeracityInput vi) {
  switch (vi) {
    case VeracityInput::ruling: return "ruling";
    case VeracityInput::oracles: return "oracles";
    case VeracityInput::justification: return "justification";
  }
  return "ruling";
}

std::optional<VeracityInput> parse_veracity_input(std::string_view name) {
  if (name == "ruling") return VeracityInput::ruling;
  if (name == "oracles") return VeracityInput::oracles;
  if (name == "justification") return VeracityInput::justification;
  return std::nullopt;
}

void ModelConfig::validate() const {
  encoder.validate();
  if (hidden_explain < 1 || hidden_veracity < 1 || hidden_joint < 1)
    throw UsageError("model: hidden sizes must be >= 1");
}

TaskKind ModelConfig::task() const {
  switch (kind) {
    case ModelKind::explain: return TaskKind::explanation;
    case ModelKind::veracity: return TaskKind::veracity;
    case ModelKind::joint: return TaskKind::joint;
  }
  return TaskKind::joint;
}

ModelParams init_params(const ModelConfig& config, int vocab_size, Rng& rng) {
  config.validate();
  const std::size_t d = static_cast<std::size_t>(config.encoder.model_dim);
  const std::size_t ff = static_cast<std::size_t>(config.encoder.ff_dim);

  ModelParams p;
  p.kind = config.kind;
  p.tok_emb = normal_init(static_cast<std::size_t>(vocab_size), d, rng);
  p.pos_emb = normal_init(static_cast<std::size_t>(config.encoder.window), d,
                          rng);
  p.layers.resize(static_cast<std::size_t>(config.encoder.layers));
  for (auto& lay : p.layers) {
    lay.wq = normal_init(d, d, rng);
    lay.bq = Tensor(d);
    lay.wk = normal_init(d, d, rng);
    lay.bk = Tensor(d);
    lay.wv = normal_init(d, d, rng);
    lay.bv = Tensor(d);
    lay.wo = normal_init(d, d, rng);
    lay.bo = Tensor(d);
    lay.ln1_g = Tensor(d);
    lay.ln1_g.fill(1.0);
    lay.ln1_b = Tensor(d);
    lay.ff_w1 = normal_init(d, ff, rng);
    lay.ff_b1 = Tensor(ff);
    lay.ff_w2 = normal_init(ff, d, rng);
    lay.ff_b2 = Tensor(d);
    lay.ln2_g = Tensor(d);
    lay.ln2_g.fill(1.0);
    lay.ln2_b = Tensor(d);
  }

  switch (config.kind) {
    case ModelKind::explain: {
      const std::size_t h = static_cast<std::size_t>(config.hidden_explain);
      p.explain.w1 = normal_init(d, h, rng);
      p.explain.b1 = Tensor(h);
      p.explain.w2 = normal_init(h, 1, rng);
      p.explain.b2 = Tensor(1);
      break;
    }
    case ModelKind::veracity: {
      const std::size_t h = static_cast<std::size_t>(config.hidden_veracity);
      p.veracity.w1 = normal_init(d, h, rng);
      p.veracity.b1 = Tensor(h);
      p.veracity.w2 = normal_init(h, kNumLabels, rng);
      p.veracity.b2 = Tensor(kNumLabels);
      break;
    }
    case ModelKind::joint: {
      const std::size_t h = static_cast<std::size_t>(config.hidden_joint);
      auto& s = p.stitch;
      s.sub_e1_w = normal_init(d, h, rng);
      s.sub_e1_b = Tensor(h);
      s.sub_e2_w = normal_init(d, h, rng);
      s.sub_e2_b = Tensor(h);
      s.sub_f1_w = normal_init(d, h, rng);
      s.sub_f1_b = Tensor(h);
      s.sub_f2_w = normal_init(d, h, rng);
      s.sub_f2_b = Tensor(h);
      s.alpha = Tensor(2, 2);
      s.alpha.at(0, 0) = 0.9;
      s.alpha.at(0, 1) = 0.1;
      s.alpha.at(1, 0) = 0.1;
      s.alpha.at(1, 1) = 0.9;
      s.beta_e = Tensor(2);
      s.beta_e.fill(0.5);
      s.beta_f = Tensor(2);
      s.beta_f.fill(0.5);
      s.out_e_w = normal_init(h, 1, rng);
      s.out_e_b = Tensor(1);
      s.out_f_w = normal_init(h, kNumLabels, rng);
      s.out_f_b = Tensor(kNumLabels);
      break;
    }
  }
  return p;
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams z = params;
  for_each_param(z, [](const std::string&, Tensor& t, bool) { t.zero(); });
  return z;
}

std::size_t param_count(const ModelParams& params) {
  std::size_t n = 0;
  for_each_param(const_cast<ModelParams&>(params),
                 [&](const std::string&, Tensor& t, bool) { n += t.size(); });
  return n;
}

Prediction model_forward(const EncodedInput& encoded,
                         const ModelParams& params, const ModelConfig& config,
                         bool train_mode, std::uint64_t dropout_seed,
                         ForwardTrace* trace) {
  const int seq_len = static_cast<int>(encoded.token_ids.size());
  if (seq_len == 0) throw NumericError("model_forward: empty encoding");
  const std::size_t d = static_cast<std::size_t>(config.encoder.model_dim);
  if (params.tok_emb.cols() != d)
    throw NumericError("model_forward: params do not match config");
  if (params.kind != config.kind)
    throw NumericError("model_forward: params built for a different kind");

  ForwardTrace local;
  ForwardTrace& tr = trace ? *trace : local;
  tr = ForwardTrace();
  Rng drop_rng(dropout_seed);
  const double rate = config.encoder.dropout;

  // Each window is embedded and encoded independently, with positions local
  // to the window.
  const auto slices =
      window_split(seq_len, config.encoder.window, config.encoder.overlap);
  tr.windows.resize(slices.size());
  for (std::size_t w = 0; w < slices.size(); ++w) {
    WindowTrace& wt = tr.windows[w];
    wt.slice = slices[w];
    const std::size_t t = static_cast<std::size_t>(wt.slice.length);
    wt.x0 = Tensor(t, d);
    for (std::size_t i = 0; i < t; ++i) {
      const int id = encoded.token_ids[static_cast<std::size_t>(
          wt.slice.offset) + i];
      const double* te = params.tok_emb.row(static_cast<std::size_t>(id));
      const double* pe = params.pos_emb.row(i);
      double* x = wt.x0.row(i);
      for (std::size_t j = 0; j < d; ++j) x[j] = te[j] + pe[j];
    }
    wt.layers.resize(params.layers.size());
    const Tensor* cur = &wt.x0;
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
      layer_forward(*cur, params.layers[l], config.encoder.heads,
                    wt.layers[l]);
      cur = &wt.layers[l].x_out;
    }
  }

  // Merge: positions covered by two windows take the elementwise mean.
  tr.cover.assign(static_cast<std::size_t>(seq_len), 0);
  tr.merged = Tensor(static_cast<std::size_t>(seq_len), d);
  for (const auto& wt : tr.windows)
    for (int i = 0; i < wt.slice.length; ++i)
      ++tr.cover[static_cast<std::size_t>(wt.slice.offset + i)];
  for (const auto& wt : tr.windows) {
    const Tensor& out = wt.output();
    for (int i = 0; i < wt.slice.length; ++i) {
      const std::size_t pos = static_cast<std::size_t>(wt.slice.offset + i);
      const double inv = 1.0 / static_cast<double>(tr.cover[pos]);
      const double* src = out.row(static_cast<std::size_t>(i));
      double* dst = tr.merged.row(pos);
      for (std::size_t j = 0; j < d; ++j) dst[j] += inv * src[j];
    }
  }

  HeadTrace& h = tr.head;
  const int claim_pos = encoded.claim_cls();
  const auto sent_pos = encoded.sentence_cls();
  const std::size_t n_sent = sent_pos.size();

  if (config.kind != ModelKind::explain && claim_pos < 0)
    throw NumericError("model_forward: encoding lacks a claim marker");
  if (config.kind != ModelKind::veracity && n_sent == 0)
    throw NumericError("model_forward: encoding has no sentence markers");

  h.c_claim = Tensor(claim_pos >= 0 ? 1 : 0, d);
  if (claim_pos >= 0)
    std::memcpy(h.c_claim.row(0),
                tr.merged.row(static_cast<std::size_t>(claim_pos)),
                d * sizeof(double));
  apply_dropout(h.c_claim, rate, train_mode, drop_rng, h.drop_c_claim);

  h.c_sent = Tensor(n_sent, d);
  for (std::size_t i = 0; i < n_sent; ++i)
    std::memcpy(h.c_sent.row(i),
                tr.merged.row(static_cast<std::size_t>(sent_pos[i])),
                d * sizeof(double));
  apply_dropout(h.c_sent, rate, train_mode, drop_rng, h.drop_c_sent);

  Prediction& pred = tr.pred;
  switch (config.kind) {
    case ModelKind::explain: {
      h.st_hidden = Tensor(n_sent, params.explain.w1.cols());
      linear(h.c_sent, params.explain.w1, params.explain.b1, h.st_hidden);
      h.st_hidden_dropped = h.st_hidden;
      apply_dropout(h.st_hidden_dropped, rate, train_mode, drop_rng,
                    h.drop_st_hidden);
      h.logits_e.resize(n_sent);
      pred.explanation_scores.resize(n_sent);
      for (std::size_t i = 0; i < n_sent; ++i) {
        double z = params.explain.b2[0];
        const double* hr = h.st_hidden_dropped.row(i);
        for (std::size_t j = 0; j < h.st_hidden_dropped.cols(); ++j)
          z += hr[j] * params.explain.w2.at(j, 0);
        h.logits_e[i] = z;
        pred.explanation_scores[i] = sigmoid(z);
      }
      break;
    }
    case ModelKind::veracity: {
      h.st_hidden = Tensor(1, params.veracity.w1.cols());
      linear(h.c_claim, params.veracity.w1, params.veracity.b1, h.st_hidden);
      h.st_hidden_dropped = h.st_hidden;
      apply_dropout(h.st_hidden_dropped, rate, train_mode, drop_rng,
                    h.drop_st_hidden);
      Tensor logits(1, kNumLabels);
      linear(h.st_hidden_dropped, params.veracity.w2, params.veracity.b2,
             logits);
      for (int c = 0; c < kNumLabels; ++c)
        h.logits_f[static_cast<std::size_t>(c)] = logits[static_cast<std::size_t>(c)];
      softmax_row(h.logits_f.data(), pred.veracity_probs.data(), kNumLabels);
      break;
    }
    case ModelKind::joint: {
      const auto& s = params.stitch;
      h.he1 = Tensor(n_sent, s.sub_e1_w.cols());
      h.he2 = Tensor(n_sent, s.sub_e2_w.cols());
      linear(h.c_sent, s.sub_e1_w, s.sub_e1_b, h.he1);
      linear(h.c_sent, s.sub_e2_w, s.sub_e2_b, h.he2);
      h.hf1 = Tensor(1, s.sub_f1_w.cols());
      h.hf2 = Tensor(1, s.sub_f2_w.cols());
      linear(h.c_claim, s.sub_f1_w, s.sub_f1_b, h.hf1);
      linear(h.c_claim, s.sub_f2_w, s.sub_f2_b, h.hf2);

      h.he1_d = h.he1;
      apply_dropout(h.he1_d, rate, train_mode, drop_rng, h.drop_he1);
      h.he2_d = h.he2;
      apply_dropout(h.he2_d, rate, train_mode, drop_rng, h.drop_he2);
      h.hf1_d = h.hf1;
      apply_dropout(h.hf1_d, rate, train_mode, drop_rng, h.drop_hf1);
      h.hf2_d = h.hf2;
      apply_dropout(h.hf2_d, rate, train_mode, drop_rng, h.drop_hf2);

      cross_stitch_mix(h.he1_d, h.he2_d, h.hf1_d, h.hf2_d, s.alpha, s.beta_e,
                       s.beta_f, h.mix_e, h.mix_f);

      // The veracity side pools the per-sentence mixtures by mean.
      const std::size_t hj = h.mix_f.cols();
      h.pooled_f = Tensor(1, hj);
      for (std::size_t i = 0; i < n_sent; ++i) {
        const double* r = h.mix_f.row(i);
        for (std::size_t j = 0; j < hj; ++j) h.pooled_f[j] += r[j];
      }
      for (std::size_t j = 0; j < hj; ++j)
        h.pooled_f[j] /= static_cast<double>(n_sent);

      h.logits_e.resize(n_sent);
      pred.explanation_scores.resize(n_sent);
      for (std::size_t i = 0; i < n_sent; ++i) {
        double z = s.out_e_b[0];
        const double* r = h.mix_e.row(i);
        for (std::size_t j = 0; j < h.mix_e.cols(); ++j)
          z += r[j] * s.out_e_w.at(j, 0);
        h.logits_e[i] = z;
        pred.explanation_scores[i] = sigmoid(z);
      }
      Tensor logits(1, kNumLabels);
      linear(h.pooled_f, s.out_f_w, s.out_f_b, logits);
      for (int c = 0; c < kNumLabels; ++c)
        h.logits_f[static_cast<std::size_t>(c)] = logits[static_cast<std::size_t>(c)];
      softmax_row(h.logits_f.data(), pred.veracity_probs.data(), kNumLabels);
      break;
    }
  }
  return pred;
}

double model_loss(const Prediction& pred, const Targets& targets,
                  const EncodedInput& encoded, const LossWeights& weights,
                  ModelKind kind) {
  const std::size_t kept = static_cast<std::size_t>(encoded.kept_sentences);
  auto explanation_part = [&]() {
    if (targets.sentence_labels.size() < kept)
      throw NumericError("model_loss: oracle labels shorter than encoding");
    std::vector<std::uint8_t> labels(targets.sentence_labels.begin(),
                                     targets.sentence_labels.begin() +
                                         static_cast<long>(kept));
    std::vector<std::uint8_t> mask(kept, 1);
    return loss_explanation(pred.explanation_scores, labels, mask);
  };
  switch (kind) {
    case ModelKind::explain:
      return explanation_part();
    case ModelKind::veracity:
      return loss_veracity(pred.veracity_probs, targets.veracity_label);
    case ModelKind::joint:
      return loss_joint(explanation_part(),
                        loss_veracity(pred.veracity_probs,
                                      targets.veracity_label),
                        weights);
  }
  return 0.0;
}

void model_backward(const ForwardTrace& tr, const EncodedInput& encoded,
                    const Targets& targets, const LossWeights& weights,
                    const ModelParams& params, const ModelConfig& config,
                    ModelParams& grads) {
  const std::size_t d = static_cast<std::size_t>(config.encoder.model_dim);
  const HeadTrace& h = tr.head;
  const std::size_t n_sent = h.c_sent.rows();

  // Loss seeds. The mean BCE gradient w.r.t. a sentence logit is
  // (sigma(z) - y) / n; softmax cross-entropy gives probs - onehot.
  std::vector<double> d_logit_e(n_sent, 0.0);
  std::array<double, kNumLabels> d_logits_f{};
  const double w_e = config.kind == ModelKind::joint ? weights.gamma : 1.0;
  const double w_f = config.kind == ModelKind::joint ? weights.eta : 1.0;

  if (config.kind != ModelKind::veracity) {
    if (targets.sentence_labels.size() < n_sent)
      throw NumericError("model_backward: oracle labels shorter than encoding");
    for (std::size_t i = 0; i < n_sent; ++i) {
      const double y = targets.sentence_labels[i] ? 1.0 : 0.0;
      d_logit_e[i] = w_e * (tr.pred.explanation_scores[i] - y) /
                     static_cast<double>(n_sent);
    }
  }
  if (config.kind != ModelKind::explain) {
    if (targets.veracity_label < 0 || targets.veracity_label >= kNumLabels)
      throw NumericError("model_backward: missing veracity label");
    for (int c = 0; c < kNumLabels; ++c) {
      const double onehot = c == targets.veracity_label ? 1.0 : 0.0;
      d_logits_f[static_cast<std::size_t>(c)] =
          w_f * (tr.pred.veracity_probs[static_cast<std::size_t>(c)] - onehot);
    }
  }

  Tensor d_c_sent(n_sent, d);
  Tensor d_c_claim(h.c_claim.rows(), d);

  switch (config.kind) {
    case ModelKind::explain: {
      const auto& hp = params.explain;
      auto& hg = grads.explain;
      Tensor d_hidden(n_sent, hp.w1.cols());
      for (std::size_t i = 0; i < n_sent; ++i) {
        const double g = d_logit_e[i];
        const double* hr = h.st_hidden_dropped.row(i);
        double* dh = d_hidden.row(i);
        for (std::size_t j = 0; j < d_hidden.cols(); ++j) {
          hg.w2.at(j, 0) += g * hr[j];
          dh[j] = g * hp.w2.at(j, 0);
        }
        hg.b2[0] += g;
      }
      dropout_backward(d_hidden, h.drop_st_hidden);
      matmul_transa_acc(h.c_sent, d_hidden, hg.w1);
      for (std::size_t i = 0; i < n_sent; ++i) {
        const double* r = d_hidden.row(i);
        for (std::size_t j = 0; j < d_hidden.cols(); ++j) hg.b1[j] += r[j];
      }
      matmul_transb(d_hidden, hp.w1, d_c_sent);
      break;
    }
    case ModelKind::veracity: {
      const auto& hp = params.veracity;
      auto& hg = grads.veracity;
      Tensor d_hidden(1, hp.w1.cols());
      for (int c = 0; c < kNumLabels; ++c) {
        const double g = d_logits_f[static_cast<std::size_t>(c)];
        hg.b2[static_cast<std::size_t>(c)] += g;
        for (std::size_t j = 0; j < hp.w2.rows(); ++j) {
          hg.w2.at(j, static_cast<std::size_t>(c)) +=
              g * h.st_hidden_dropped[j];
          d_hidden[j] += g * hp.w2.at(j, static_cast<std::size_t>(c));
        }
      }
      dropout_backward(d_hidden, h.drop_st_hidden);
      matmul_transa_acc(h.c_claim, d_hidden, hg.w1);
      for (std::size_t j = 0; j < d_hidden.cols(); ++j) hg.b1[j] += d_hidden[j];
      matmul_transb(d_hidden, hp.w1, d_c_claim);
      break;
    }
    case ModelKind::joint: {
      const auto& s = params.stitch;
      auto& sg = grads.stitch;
      const std::size_t hj = h.mix_e.cols();

      Tensor d_mix_e(n_sent, hj);
      for (std::size_t i = 0; i < n_sent; ++i) {
        const double g = d_logit_e[i];
        const double* r = h.mix_e.row(i);
        double* dm = d_mix_e.row(i);
        for (std::size_t j = 0; j < hj; ++j) {
          sg.out_e_w.at(j, 0) += g * r[j];
          dm[j] = g * s.out_e_w.at(j, 0);
        }
        sg.out_e_b[0] += g;
      }

      Tensor d_pooled(1, hj);
      for (int c = 0; c < kNumLabels; ++c) {
        const double g = d_logits_f[static_cast<std::size_t>(c)];
        sg.out_f_b[static_cast<std::size_t>(c)] += g;
        for (std::size_t j = 0; j < hj; ++j) {
          sg.out_f_w.at(j, static_cast<std::size_t>(c)) += g * h.pooled_f[j];
          d_pooled[j] += g * s.out_f_w.at(j, static_cast<std::size_t>(c));
        }
      }
      Tensor d_mix_f(n_sent, hj);
      for (std::size_t i = 0; i < n_sent; ++i) {
        double* r = d_mix_f.row(i);
        for (std::size_t j = 0; j < hj; ++j)
          r[j] = d_pooled[j] / static_cast<double>(n_sent);
      }

      // Cross-stitch backward: recompute the per-pair mixtures cheaply from
      // the stored subspace activations.
      const double a_ee = s.alpha.at(0, 0), a_ef = s.alpha.at(0, 1);
      const double a_fe = s.alpha.at(1, 0), a_ff = s.alpha.at(1, 1);
      const double be1 = s.beta_e[0], be2 = s.beta_e[1];
      const double bf1 = s.beta_f[0], bf2 = s.beta_f[1];

      Tensor d_he1(n_sent, hj), d_he2(n_sent, hj);
      Tensor d_hf1(1, hj), d_hf2(1, hj);
      double g_aee = 0, g_aef = 0, g_afe = 0, g_aff = 0;
      double g_be1 = 0, g_be2 = 0, g_bf1 = 0, g_bf2 = 0;

      for (std::size_t i = 0; i < n_sent; ++i) {
        const double* e1 = h.he1_d.row(i);
        const double* e2 = h.he2_d.row(i);
        const double* f1 = h.hf1_d.row(0);
        const double* f2 = h.hf2_d.row(0);
        const double* dme = d_mix_e.row(i);
        const double* dmf = d_mix_f.row(i);
        double* de1 = d_he1.row(i);
        double* de2 = d_he2.row(i);
        for (std::size_t j = 0; j < hj; ++j) {
          const double s_e1 = a_ee * e1[j] + a_ef * f1[j];
          const double s_f1 = a_fe * e1[j] + a_ff * f1[j];
          const double s_e2 = a_ee * e2[j] + a_ef * f2[j];
          const double s_f2 = a_fe * e2[j] + a_ff * f2[j];

          g_be1 += dme[j] * s_e1;
          g_be2 += dme[j] * s_e2;
          g_bf1 += dmf[j] * s_f1;
          g_bf2 += dmf[j] * s_f2;

          const double ds_e1 = be1 * dme[j];
          const double ds_e2 = be2 * dme[j];
          const double ds_f1 = bf1 * dmf[j];
          const double ds_f2 = bf2 * dmf[j];

          g_aee += ds_e1 * e1[j] + ds_e2 * e2[j];
          g_aef += ds_e1 * f1[j] + ds_e2 * f2[j];
          g_afe += ds_f1 * e1[j] + ds_f2 * e2[j];
          g_aff += ds_f1 * f1[j] + ds_f2 * f2[j];

          de1[j] = a_ee * ds_e1 + a_fe * ds_f1;
          de2[j] = a_ee * ds_e2 + a_fe * ds_f2;
          d_hf1[j] += a_ef * ds_e1 + a_ff * ds_f1;
          d_hf2[j] += a_ef * ds_e2 + a_ff * ds_f2;
        }
      }
      sg.alpha.at(0, 0) += g_aee;
      sg.alpha.at(0, 1) += g_aef;
      sg.alpha.at(1, 0) += g_afe;
      sg.alpha.at(1, 1) += g_aff;
      sg.beta_e[0] += g_be1;
      sg.beta_e[1] += g_be2;
      sg.beta_f[0] += g_bf1;
      sg.beta_f[1] += g_bf2;

      dropout_backward(d_he1, h.drop_he1);
      dropout_backward(d_he2, h.drop_he2);
      dropout_backward(d_hf1, h.drop_hf1);
      dropout_backward(d_hf2, h.drop_hf2);

      matmul_transa_acc(h.c_sent, d_he1, sg.sub_e1_w);
      matmul_transa_acc(h.c_sent, d_he2, sg.sub_e2_w);
      matmul_transa_acc(h.c_claim, d_hf1, sg.sub_f1_w);
      matmul_transa_acc(h.c_claim, d_hf2, sg.sub_f2_w);
      for (std::size_t i = 0; i < n_sent; ++i) {
        const double* r1 = d_he1.row(i);
        const double* r2 = d_he2.row(i);
        for (std::size_t j = 0; j < hj; ++j) {
          sg.sub_e1_b[j] += r1[j];
          sg.sub_e2_b[j] += r2[j];
        }
      }
      for (std::size_t j = 0; j < hj; ++j) {
        sg.sub_f1_b[j] += d_hf1[j];
        sg.sub_f2_b[j] += d_hf2[j];
      }

      Tensor tmp(n_sent, d);
      matmul_transb(d_he1, s.sub_e1_w, d_c_sent);
      matmul_transb(d_he2, s.sub_e2_w, tmp);
      for (std::size_t i = 0; i < d_c_sent.size(); ++i) d_c_sent[i] += tmp[i];
      Tensor tmp1(1, d);
      matmul_transb(d_hf1, s.sub_f1_w, d_c_claim);
      matmul_transb(d_hf2, s.sub_f2_w, tmp1);
      for (std::size_t i = 0; i < d_c_claim.size(); ++i)
        d_c_claim[i] += tmp1[i];
      break;
    }
  }

  dropout_backward(d_c_sent, h.drop_c_sent);
  dropout_backward(d_c_claim, h.drop_c_claim);

  // Scatter the marker gradients into the merged sequence, then split the
  // merge back onto the windows with the same 1/cover weights.
  Tensor d_merged(tr.merged.rows(), d);
  const int claim_pos = encoded.claim_cls();
  if (claim_pos >= 0 && d_c_claim.rows() == 1) {
    double* row = d_merged.row(static_cast<std::size_t>(claim_pos));
    const double* src = d_c_claim.row(0);
    for (std::size_t j = 0; j < d; ++j) row[j] += src[j];
  }
  const auto sent_pos = encoded.sentence_cls();
  for (std::size_t i = 0; i < sent_pos.size(); ++i) {
    double* row = d_merged.row(static_cast<std::size_t>(sent_pos[i]));
    const double* src = d_c_sent.row(i);
    for (std::size_t j = 0; j < d; ++j) row[j] += src[j];
  }

  for (std::size_t w = 0; w < tr.windows.size(); ++w) {
    const WindowTrace& wt = tr.windows[w];
    const std::size_t t = static_cast<std::size_t>(wt.slice.length);
    Tensor d_out(t, d);
    for (std::size_t i = 0; i < t; ++i) {
      const std::size_t pos = static_cast<std::size_t>(wt.slice.offset) + i;
      const double inv = 1.0 / static_cast<double>(tr.cover[pos]);
      const double* src = d_merged.row(pos);
      double* dst = d_out.row(i);
      for (std::size_t j = 0; j < d; ++j) dst[j] = inv * src[j];
    }

    Tensor d_cur = std::move(d_out);
    for (std::size_t l = params.layers.size(); l-- > 0;) {
      d_cur = layer_backward(d_cur, wt.layers[l], params.layers[l],
                             grads.layers[l], config.encoder.heads);
    }

    for (std::size_t i = 0; i < t; ++i) {
      const int id = encoded.token_ids[static_cast<std::size_t>(
          wt.slice.offset) + i];
      double* te = grads.tok_emb.row(static_cast<std::size_t>(id));
      double* pe = grads.pos_emb.row(i);
      const double* src = d_cur.row(i);
      for (std::size_t j = 0; j < d; ++j) {
        te[j] += src[j];
        pe[j] += src[j];
      }
    }
  }
}

// ---- checkpoints -------------------------------------------------------

namespace {

constexpr char kCheckpointMagic[8] = {'F', 'X', 'C', 'K', 'P', 'T', '0', '1'};

json encoder_config_to_json(const EncoderConfig& e) {
  return json{{"layers", e.layers},       {"model_dim", e.model_dim},
              {"heads", e.heads},         {"ff_dim", e.ff_dim},
              {"window", e.window},       {"overlap", e.overlap},
              {"max_len", e.max_len},     {"dropout", e.dropout}};
}

EncoderConfig encoder_config_from_json(const json& j) {
  EncoderConfig e;
  e.layers = j.at("layers").get<int>();
  e.model_dim = j.at("model_dim").get<int>();
  e.heads = j.at("heads").get<int>();
  e.ff_dim = j.at("ff_dim").get<int>();
  e.window = j.at("window").get<int>();
  e.overlap = j.at("overlap").get<int>();
  e.max_len = j.at("max_len").get<int>();
  e.dropout = j.at("dropout").get<double>();
  return e;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelConfig& config,
                     const Vocab& vocab, const ModelParams& params) {
  json header;
  header["version"] = 1;
  header["config"] = {
      {"encoder", encoder_config_to_json(config.encoder)},
      {"kind", model_kind_name(config.kind)},
      {"veracity_input", veracity_input_name(config.veracity_input)},
      {"hidden_explain", config.hidden_explain},
      {"hidden_veracity", config.hidden_veracity},
      {"hidden_joint", config.hidden_joint},
  };
  header["vocab"] = vocab.regular_tokens();
  json tensors = json::array();
  for_each_param(const_cast<ModelParams&>(params),
                 [&](const std::string& name, Tensor& t, bool) {
                   tensors.push_back(
                       {{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}});
                 });
  header["tensors"] = tensors;
  const std::string head = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint: " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  const std::uint64_t len = head.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  for_each_param(const_cast<ModelParams&>(params),
                 [&](const std::string&, Tensor& t, bool) {
                   out.write(reinterpret_cast<const char*>(t.data()),
                             static_cast<std::streamsize>(t.size() *
                                                          sizeof(double)));
                 });
  if (!out) throw DataError("short write while saving checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw DataError("not a checkpoint file: " + path);
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string head(len, '\0');
  in.read(head.data(), static_cast<std::streamsize>(len));
  if (!in) throw DataError("truncated checkpoint header: " + path);

  Checkpoint ck;
  json header;
  try {
    header = json::parse(head);
    if (header.at("version").get<int>() != 1)
      throw DataError("unsupported checkpoint version in " + path);
    const json& cj = header.at("config");
    ck.config.encoder = encoder_config_from_json(cj.at("encoder"));
    auto kind = parse_model_kind(cj.at("kind").get<std::string>());
    auto vi = parse_veracity_input(cj.at("veracity_input").get<std::string>());
    if (!kind || !vi) throw DataError("bad model kind in checkpoint: " + path);
    ck.config.kind = *kind;
    ck.config.veracity_input = *vi;
    ck.config.hidden_explain = cj.at("hidden_explain").get<int>();
    ck.config.hidden_veracity = cj.at("hidden_veracity").get<int>();
    ck.config.hidden_joint = cj.at("hidden_joint").get<int>();
    ck.vocab = Vocab(header.at("vocab").get<std::vector<std::string>>());
  } catch (const json::exception& e) {
    throw DataError("malformed checkpoint header in " + path + ": " +
                    e.what());
  }

  Rng dummy(0);
  ck.params = init_params(ck.config, ck.vocab.size(), dummy);

  const json& tensors = header.at("tensors");
  std::size_t idx = 0;
  for_each_param(ck.params, [&](const std::string& name, Tensor& t, bool) {
    if (idx >= tensors.size())
      throw DataError("checkpoint tensor list too short: " + path);
    const json& tj = tensors[idx++];
    if (tj.at("name").get<std::string>() != name ||
        tj.at("rows").get<std::size_t>() != t.rows() ||
        tj.at("cols").get<std::size_t>() != t.cols())
      throw DataError("checkpoint tensor mismatch at " + name + ": " + path);
    in.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.size() * sizeof(double)));
  });
  if (!in || idx != tensors.size())
    throw DataError("truncated checkpoint tensors: " + path);
  return ck;
}

}  // namespace factex

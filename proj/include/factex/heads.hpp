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

#ifndef FACTEX_HEADS_HPP_
#define FACTEX_HEADS_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include "factex/corpus.hpp"
#include "factex/tensor.hpp"

namespace factex {

// Per-sentence scores in (0,1) plus a 6-way distribution summing to one.
// Single-task models fill only their half.
struct Prediction {
  std::vector<double> explanation_scores;
  std::array<double, kNumLabels> veracity_probs{};
};

struct LossWeights {
  double gamma = 0.9;  // explanation share
  double eta = 0.1;    // veracity share
};

inline constexpr double kProbEpsilon = 1e-7;  // cross-entropy clamping

// hidden -> sigmoid scoring head (explanation) and hidden -> softmax head
// (veracity); no activation between the two affine maps.
struct ExplainHeadParams {
  Tensor w1, b1;  // model_dim -> hidden
  Tensor w2, b2;  // hidden -> 1
};

struct VeracityHeadParams {
  Tensor w1, b1;  // model_dim -> hidden
  Tensor w2, b2;  // hidden -> 6
};

// Two shared subspaces per task mixed by a 2x2 alpha and combined per task
// by beta, followed by the two prediction layers.
struct CrossStitchParams {
  Tensor sub_e1_w, sub_e1_b, sub_e2_w, sub_e2_b;  // model_dim -> hidden
  Tensor sub_f1_w, sub_f1_b, sub_f2_w, sub_f2_b;
  Tensor alpha;                                   // 2x2: [ee ef; fe ff]
  Tensor beta_e, beta_f;                          // 1x2 each
  Tensor out_e_w, out_e_b;                        // hidden -> 1
  Tensor out_f_w, out_f_b;                        // hidden -> 6
};

// The linear mixing given precomputed subspace vectors. The explanation-side
// inputs are one row per sentence; the veracity-side inputs are a single row
// broadcast across sentences. Outputs have one row per sentence; mixed_f is
// pre-pooling.
//   mixed over subspace pair p: s_e_p = a_ee*h_e_p + a_ef*h_f_p
//                               s_f_p = a_fe*h_e_p + a_ff*h_f_p
//   combined per task:          out_t = beta_t[0]*s_t_1 + beta_t[1]*s_t_2
void cross_stitch_mix(const Tensor& h_e1, const Tensor& h_e2,
                      const Tensor& h_f1, const Tensor& h_f2,
                      const Tensor& alpha, const Tensor& beta_e,
                      const Tensor& beta_f, Tensor& mixed_e, Tensor& mixed_f);

// Scores one vector per sentence row: shared affine, hidden layer, affine,
// sigmoid, with no activation between the affine maps. Throws on empty input.
std::vector<double> explanation_head(const Tensor& sentence_reprs,
                                     const ExplainHeadParams& params);

// Six-way distribution from the claim vector.
std::array<double, kNumLabels> veracity_head(const Tensor& claim_repr,
                                             const VeracityHeadParams& params);

double sigmoid(double z);
void softmax_row(const double* logits, double* probs, std::size_t n);

// Mean binary cross-entropy over masked positions; throws DataError when
// every position is masked out.
double loss_explanation(const std::vector<double>& scores,
                        const std::vector<std::uint8_t>& labels,
                        const std::vector<std::uint8_t>& mask);

// -ln p[gold] with epsilon clamping.
double loss_veracity(const std::array<double, kNumLabels>& probs, int gold);

double loss_joint(double loss_e, double loss_f, const LossWeights& weights);

}  // namespace factex

#endif  // FACTEX_HEADS_HPP_

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

#include "factex/heads.hpp"

#include <algorithm>
#include <cmath>

#include "factex/errors.hpp"

namespace factex {

void cross_stitch_mix(const Tensor& h_e1, const Tensor& h_e2,
                      const Tensor& h_f1, const Tensor& h_f2,
                      const Tensor& alpha, const Tensor& beta_e,
                      const Tensor& beta_f, Tensor& mixed_e, Tensor& mixed_f) {
  const std::size_t n = h_e1.rows();
  const std::size_t dim = h_e1.cols();
  if (!h_e1.same_shape(h_e2) || h_f1.cols() != dim || h_f2.cols() != dim ||
      h_f1.rows() != 1 || h_f2.rows() != 1)
    throw NumericError("cross_stitch_mix: shape mismatch");
  if (alpha.rows() != 2 || alpha.cols() != 2 || beta_e.size() != 2 ||
      beta_f.size() != 2)
    throw NumericError("cross_stitch_mix: bad mixing parameter shapes");

  const double a_ee = alpha.at(0, 0), a_ef = alpha.at(0, 1);
  const double a_fe = alpha.at(1, 0), a_ff = alpha.at(1, 1);

  mixed_e = Tensor(n, dim);
  mixed_f = Tensor(n, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double* e1 = h_e1.row(i);
    const double* e2 = h_e2.row(i);
    const double* f1 = h_f1.row(0);
    const double* f2 = h_f2.row(0);
    double* me = mixed_e.row(i);
    double* mf = mixed_f.row(i);
    for (std::size_t j = 0; j < dim; ++j) {
      const double s_e1 = a_ee * e1[j] + a_ef * f1[j];
      const double s_f1 = a_fe * e1[j] + a_ff * f1[j];
      const double s_e2 = a_ee * e2[j] + a_ef * f2[j];
      const double s_f2 = a_fe * e2[j] + a_ff * f2[j];
      me[j] = beta_e[0] * s_e1 + beta_e[1] * s_e2;
      mf[j] = beta_f[0] * s_f1 + beta_f[1] * s_f2;
    }
  }
}

std::vector<double> explanation_head(const Tensor& sentence_reprs,
                                     const ExplainHeadParams& params) {
  if (sentence_reprs.rows() == 0)
    throw DataError("explanation_head: no sentence vectors");
  Tensor hidden(sentence_reprs.rows(), params.w1.cols());
  linear(sentence_reprs, params.w1, params.b1, hidden);
  std::vector<double> scores(sentence_reprs.rows());
  for (std::size_t i = 0; i < hidden.rows(); ++i) {
    double z = params.b2[0];
    const double* hr = hidden.row(i);
    for (std::size_t j = 0; j < hidden.cols(); ++j)
      z += hr[j] * params.w2.at(j, 0);
    scores[i] = sigmoid(z);
  }
  return scores;
}

std::array<double, kNumLabels> veracity_head(const Tensor& claim_repr,
                                             const VeracityHeadParams& params) {
  if (claim_repr.rows() != 1)
    throw NumericError("veracity_head: expected a single claim vector");
  Tensor hidden(1, params.w1.cols());
  linear(claim_repr, params.w1, params.b1, hidden);
  Tensor logits(1, kNumLabels);
  linear(hidden, params.w2, params.b2, logits);
  std::array<double, kNumLabels> probs{};
  softmax_row(logits.data(), probs.data(), kNumLabels);
  return probs;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void softmax_row(const double* logits, double* probs, std::size_t n) {
  double m = logits[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, logits[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    probs[i] = std::exp(logits[i] - m);
    sum += probs[i];
  }
  for (std::size_t i = 0; i < n; ++i) probs[i] /= sum;
}

namespace {
// NaN passes through so divergence is visible in the loss.
inline double clamp_prob(double p) {
  if (std::isnan(p)) return p;
  return std::min(1.0 - kProbEpsilon, std::max(kProbEpsilon, p));
}
}  // namespace

double loss_explanation(const std::vector<double>& scores,
                        const std::vector<std::uint8_t>& labels,
                        const std::vector<std::uint8_t>& mask) {
  if (scores.size() != labels.size() || scores.size() != mask.size())
    throw NumericError("loss_explanation: length mismatch");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!mask[i]) continue;
    const double p = clamp_prob(scores[i]);
    sum += labels[i] ? -std::log(p) : -std::log(1.0 - p);
    ++count;
  }
  if (count == 0) throw DataError("loss_explanation: all positions masked");
  return sum / static_cast<double>(count);
}

double loss_veracity(const std::array<double, kNumLabels>& probs, int gold) {
  if (gold < 0 || gold >= kNumLabels)
    throw NumericError("loss_veracity: gold class out of range");
  return -std::log(clamp_prob(probs[static_cast<std::size_t>(gold)]));
}

double loss_joint(double loss_e, double loss_f, const LossWeights& weights) {
  if (weights.gamma < 0.0 || weights.eta < 0.0 ||
      (weights.gamma == 0.0 && weights.eta == 0.0))
    throw UsageError("loss_joint: weights must be nonnegative, not both zero");
  return weights.gamma * loss_e + weights.eta * loss_f;
}

}  // namespace factex

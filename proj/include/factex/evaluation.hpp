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

#ifndef FACTEX_EVALUATION_HPP_
#define FACTEX_EVALUATION_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "factex/corpus.hpp"
#include "factex/model.hpp"
#include "factex/oracle.hpp"
#include "factex/rouge.hpp"

namespace factex {

// Indices of the n highest masked scores, ties to the lower index, returned
// in document order; fewer when fewer sentences exist.
std::vector<int> select_top_n(const std::vector<double>& scores,
                              const std::vector<std::uint8_t>& mask, int n);

struct ExplanationResult {
  std::string id;
  std::vector<int> indices;
  std::string text;  // selected sentences joined by a space, document order
  RougeScore rouge1, rouge2, rougeL;
};

ExplanationResult score_explanation(const Instance& instance,
                                    const std::vector<int>& indices);

// Mean F1 per ROUGE variant over a split, scale 0-1.
struct RougeRow {
  std::string system;
  double rouge1_f1 = 0.0;
  double rouge2_f1 = 0.0;
  double rougeL_f1 = 0.0;
  std::size_t count = 0;
};

RougeRow mean_rouge_row(const std::string& system,
                        const std::vector<ExplanationResult>& results);

struct VeracityReport {
  std::array<double, kNumLabels> precision{}, recall{}, f1{};
  double macro_f1 = 0.0;
  std::array<std::array<long long, kNumLabels>, kNumLabels> confusion{};
  std::size_t count = 0;  // confusion is [gold][predicted]
};

// Per-class F1 is zero for classes with neither support nor predictions;
// the macro mean always divides by six.
VeracityReport macro_f1_report(const std::vector<int>& predictions,
                               const std::vector<int>& golds);

// Mean precision/recall/F1 per ROUGE variant of an evidence source against
// the justification, scale 0-1.
struct EvidenceRow {
  std::string source;
  RougeScore rouge1, rouge2, rougeL;  // per-field means over instances
  std::size_t count = 0;
};

// Rows for (a) the full ruling comments and (b) the oracle selections.
std::vector<EvidenceRow> evidence_source_report(
    const std::vector<Instance>& instances,
    const std::vector<OracleSelection>& oracles);

// ---- model-driven inference over a split (parallel across instances) ----

// Explanations from a trained explanation-bearing model: encode, score,
// select top n.
std::vector<ExplanationResult> explain_split(
    const std::vector<Instance>& instances, const ModelConfig& config,
    const ModelParams& params, const Vocab& vocab, int top_n);

// Argmax veracity predictions (ties to the lower class index).
// oracles may be null unless the model reads oracle selections.
std::vector<int> predict_veracity_split(
    const std::vector<Instance>& instances, const ModelConfig& config,
    const ModelParams& params, const Vocab& vocab,
    const std::vector<OracleSelection>* oracles);

double mean_rouge2_f1(const std::vector<ExplanationResult>& results);

// Evidence text a veracity model reads for one instance.
std::vector<std::string> veracity_evidence(const Instance& instance,
                                           VeracityInput input,
                                           const OracleSelection* oracle);

}  // namespace factex

#endif  // FACTEX_EVALUATION_HPP_

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

#include "factex/evaluation.hpp"

#include <algorithm>

#include "factex/errors.hpp"
#include "factex/parallel.hpp"

namespace factex {

std::vector<int> select_top_n(const std::vector<double>& scores,
                              const std::vector<std::uint8_t>& mask, int n) {
  if (n < 1) throw UsageError("select_top_n: n must be >= 1");
  if (scores.size() != mask.size())
    throw NumericError("select_top_n: length mismatch");
  std::vector<int> order;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (mask[i]) order.push_back(static_cast<int>(i));
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return scores[static_cast<std::size_t>(a)] >
           scores[static_cast<std::size_t>(b)];
  });
  if (static_cast<int>(order.size()) > n) order.resize(static_cast<std::size_t>(n));
  std::sort(order.begin(), order.end());
  return order;
}

ExplanationResult score_explanation(const Instance& instance,
                                    const std::vector<int>& indices) {
  ExplanationResult res;
  res.id = instance.id;
  res.indices = indices;
  std::sort(res.indices.begin(), res.indices.end());
  res.text = render_selection(instance.sentences, res.indices);
  const auto cand = tokenize_for_rouge(res.text);
  const auto ref = tokenize_for_rouge(instance.justification);
  res.rouge1 = rouge_n(cand, ref, 1);
  res.rouge2 = rouge_n(cand, ref, 2);
  res.rougeL = rouge_l(cand, ref);
  return res;
}

RougeRow mean_rouge_row(const std::string& system,
                        const std::vector<ExplanationResult>& results) {
  RougeRow row;
  row.system = system;
  row.count = results.size();
  if (results.empty()) return row;
  for (const auto& r : results) {
    row.rouge1_f1 += r.rouge1.f1;
    row.rouge2_f1 += r.rouge2.f1;
    row.rougeL_f1 += r.rougeL.f1;
  }
  const double n = static_cast<double>(results.size());
  row.rouge1_f1 /= n;
  row.rouge2_f1 /= n;
  row.rougeL_f1 /= n;
  return row;
}

VeracityReport macro_f1_report(const std::vector<int>& predictions,
                               const std::vector<int>& golds) {
  if (predictions.empty() || predictions.size() != golds.size())
    throw DataError("macro_f1_report: empty or mismatched inputs");
  VeracityReport rep;
  rep.count = predictions.size();
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const int g = golds[i], p = predictions[i];
    if (g < 0 || g >= kNumLabels || p < 0 || p >= kNumLabels)
      throw DataError("macro_f1_report: class index out of range");
    ++rep.confusion[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)];
  }
  double macro = 0.0;
  for (int c = 0; c < kNumLabels; ++c) {
    const std::size_t cc = static_cast<std::size_t>(c);
    long long tp = rep.confusion[cc][cc], fp = 0, fn = 0;
    for (int o = 0; o < kNumLabels; ++o) {
      if (o == c) continue;
      fp += rep.confusion[static_cast<std::size_t>(o)][cc];
      fn += rep.confusion[cc][static_cast<std::size_t>(o)];
    }
    const double prec =
        tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp)
                    : 0.0;
    const double rec =
        tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn)
                    : 0.0;
    rep.precision[cc] = prec;
    rep.recall[cc] = rec;
    rep.f1[cc] = prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    macro += rep.f1[cc];
  }
  rep.macro_f1 = macro / static_cast<double>(kNumLabels);
  return rep;
}

std::vector<EvidenceRow> evidence_source_report(
    const std::vector<Instance>& instances,
    const std::vector<OracleSelection>& oracles) {
  if (instances.size() != oracles.size())
    throw DataError("evidence_source_report: oracle count mismatch");
  if (instances.empty())
    throw DataError("evidence_source_report: empty split");

  struct Acc {
    RougeScore r1, r2, rl;
  };
  std::vector<Acc> ruling(instances.size()), oracle(instances.size());

  parallel_for(instances.size(), [&](std::size_t i) {
    const auto& inst = instances[i];
    const auto ref = tokenize_for_rouge(inst.justification);
    std::vector<int> all(inst.sentences.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<int>(k);
    const auto full = tokenize_for_rouge(
        render_selection(inst.sentences, all));
    ruling[i] = {rouge_n(full, ref, 1), rouge_n(full, ref, 2),
                 rouge_l(full, ref)};
    const auto sel = tokenize_for_rouge(
        render_selection(inst.sentences, oracles[i].indices));
    oracle[i] = {rouge_n(sel, ref, 1), rouge_n(sel, ref, 2),
                 rouge_l(sel, ref)};
  });

  auto mean_rows = [&](const std::vector<Acc>& acc, const std::string& name) {
    EvidenceRow row;
    row.source = name;
    row.count = acc.size();
    for (const auto& a : acc) {
      row.rouge1.precision += a.r1.precision;
      row.rouge1.recall += a.r1.recall;
      row.rouge1.f1 += a.r1.f1;
      row.rouge2.precision += a.r2.precision;
      row.rouge2.recall += a.r2.recall;
      row.rouge2.f1 += a.r2.f1;
      row.rougeL.precision += a.rl.precision;
      row.rougeL.recall += a.rl.recall;
      row.rougeL.f1 += a.rl.f1;
    }
    const double n = static_cast<double>(acc.size());
    for (RougeScore* s : {&row.rouge1, &row.rouge2, &row.rougeL}) {
      s->precision /= n;
      s->recall /= n;
      s->f1 /= n;
    }
    return row;
  };
  return {mean_rows(ruling, "ruling"), mean_rows(oracle, "ruling-oracle")};
}

std::vector<std::string> veracity_evidence(const Instance& instance,
                                           VeracityInput input,
                                           const OracleSelection* oracle) {
  switch (input) {
    case VeracityInput::ruling:
      return instance.sentences;
    case VeracityInput::oracles: {
      if (!oracle)
        throw DataError("veracity_evidence: oracle selection required");
      std::vector<std::string> out;
      for (int idx : oracle->indices)
        out.push_back(instance.sentences[static_cast<std::size_t>(idx)]);
      return out;
    }
    case VeracityInput::justification:
      return split_sentences(instance.justification);
  }
  return instance.sentences;
}

std::vector<ExplanationResult> explain_split(
    const std::vector<Instance>& instances, const ModelConfig& config,
    const ModelParams& params, const Vocab& vocab, int top_n) {
  if (config.kind == ModelKind::veracity)
    throw UsageError("explain_split: model has no explanation head");
  std::vector<ExplanationResult> out(instances.size());
  parallel_for(instances.size(), [&](std::size_t i) {
    const auto enc = encode_instance(instances[i], vocab, config.task(),
                                     config.encoder);
    const Prediction pred =
        model_forward(enc, params, config, /*train_mode=*/false, 0, nullptr);
    std::vector<std::uint8_t> mask(pred.explanation_scores.size(), 1);
    const auto indices = select_top_n(pred.explanation_scores, mask, top_n);
    out[i] = score_explanation(instances[i], indices);
  });
  return out;
}

std::vector<int> predict_veracity_split(
    const std::vector<Instance>& instances, const ModelConfig& config,
    const ModelParams& params, const Vocab& vocab,
    const std::vector<OracleSelection>* oracles) {
  if (config.kind == ModelKind::explain)
    throw UsageError("predict_veracity_split: model has no veracity head");
  if (config.kind == ModelKind::veracity &&
      config.veracity_input == VeracityInput::oracles && !oracles)
    throw DataError("predict_veracity_split: oracle selections required");
  std::vector<int> out(instances.size());
  parallel_for(instances.size(), [&](std::size_t i) {
    EncodedInput enc;
    if (config.kind == ModelKind::veracity) {
      const OracleSelection* sel = oracles ? &(*oracles)[i] : nullptr;
      const auto evidence =
          veracity_evidence(instances[i], config.veracity_input, sel);
      enc = encode_instance(instances[i], vocab, TaskKind::veracity,
                            config.encoder, &evidence);
    } else {
      enc = encode_instance(instances[i], vocab, TaskKind::joint,
                            config.encoder);
    }
    const Prediction pred =
        model_forward(enc, params, config, /*train_mode=*/false, 0, nullptr);
    int best = 0;
    for (int c = 1; c < kNumLabels; ++c)
      if (pred.veracity_probs[static_cast<std::size_t>(c)] >
          pred.veracity_probs[static_cast<std::size_t>(best)])
        best = c;
    out[i] = best;
  });
  return out;
}

double mean_rouge2_f1(const std::vector<ExplanationResult>& results) {
  if (results.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : results) sum += r.rouge2.f1;
  return sum / static_cast<double>(results.size());
}

}  // namespace factex

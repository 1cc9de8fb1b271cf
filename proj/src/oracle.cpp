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

#include "factex/oracle.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "factex/errors.hpp"
#include "factex/parallel.hpp"

namespace factex {

namespace {

using nlohmann::json;

struct ScoringContext {
  std::vector<std::vector<std::string>> sentence_tokens;
  NgramCounts reference_bigrams;
};

ScoringContext make_context(const std::vector<std::string>& sentences,
                            const std::string& justification) {
  ScoringContext ctx;
  ctx.sentence_tokens.reserve(sentences.size());
  for (const auto& s : sentences)
    ctx.sentence_tokens.push_back(tokenize_for_rouge(s));
  ctx.reference_bigrams = count_ngrams(tokenize_for_rouge(justification), 2);
  return ctx;
}

// ROUGE-2 F1 of the given sentence subset, concatenated in document order.
// Bigrams straddle sentence boundaries, matching what scoring the joined
// text would produce.
double subset_score(const ScoringContext& ctx,
                    const std::vector<int>& sorted_indices) {
  std::vector<std::string> joined;
  for (int idx : sorted_indices) {
    const auto& toks = ctx.sentence_tokens[static_cast<std::size_t>(idx)];
    joined.insert(joined.end(), toks.begin(), toks.end());
  }
  return rouge_from_counts(count_ngrams(joined, 2), ctx.reference_bigrams).f1;
}

OracleSelection make_selection(std::size_t n, std::vector<int> indices,
                               double score) {
  std::sort(indices.begin(), indices.end());
  OracleSelection sel;
  sel.labels.assign(n, 0);
  for (int i : indices) sel.labels[static_cast<std::size_t>(i)] = 1;
  sel.indices = std::move(indices);
  sel.rouge2_f1 = score;
  return sel;
}

}  // namespace

OracleSelection greedy_oracle(const std::vector<std::string>& sentences,
                              const std::string& justification, int k) {
  if (sentences.empty()) throw DataError("greedy_oracle: no sentences");
  if (k < 1) throw DataError("greedy_oracle: k must be >= 1");

  const ScoringContext ctx = make_context(sentences, justification);
  const int n = static_cast<int>(sentences.size());
  std::vector<int> selected;
  double score = 0.0;

  for (int step = 0; step < k; ++step) {
    int best_idx = -1;
    double best_score = score;
    for (int c = 0; c < n; ++c) {
      if (std::find(selected.begin(), selected.end(), c) != selected.end())
        continue;
      std::vector<int> trial = selected;
      trial.push_back(c);
      std::sort(trial.begin(), trial.end());
      const double s = subset_score(ctx, trial);
      if (s > best_score) {  // strict: ties keep the lowest index
        best_score = s;
        best_idx = c;
      }
    }
    if (best_idx < 0) break;  // no strict improvement
    selected.push_back(best_idx);
    score = best_score;
  }
  return make_selection(sentences.size(), selected, score);
}

OracleSelection brute_force_best(const std::vector<std::string>& sentences,
                                 const std::string& justification, int k) {
  if (sentences.empty()) throw DataError("brute_force_best: no sentences");
  const int n = static_cast<int>(sentences.size());
  if (n > kBruteForceMaxSentences)
    throw DataError("brute_force_best: N exceeds enumeration guard");
  if (k < 1) throw DataError("brute_force_best: k must be >= 1");

  const ScoringContext ctx = make_context(sentences, justification);
  std::vector<int> best_set;  // empty set scores 0
  double best_score = 0.0;

  std::vector<int> combo;
  auto recurse = [&](auto&& self, int next, int remaining) -> void {
    if (!combo.empty()) {
      const double s = subset_score(ctx, combo);
      if (s > best_score ||
          (s == best_score && !best_set.empty() && combo < best_set)) {
        best_score = s;
        best_set = combo;
      }
    }
    if (remaining == 0) return;
    for (int c = next; c < n; ++c) {
      combo.push_back(c);
      self(self, c + 1, remaining - 1);
      combo.pop_back();
    }
  };
  recurse(recurse, 0, k);
  return make_selection(sentences.size(), best_set, best_score);
}

OracleSelection lead_k(const std::vector<std::string>& sentences,
                       const std::string& justification, int k) {
  if (k < 1) throw DataError("lead_k: k must be >= 1");
  const int take = std::min<int>(k, static_cast<int>(sentences.size()));
  std::vector<int> indices(static_cast<std::size_t>(take));
  for (int i = 0; i < take; ++i) indices[static_cast<std::size_t>(i)] = i;
  const ScoringContext ctx = make_context(sentences, justification);
  return make_selection(sentences.size(), indices, subset_score(ctx, indices));
}

OracleSelection independent_top_k(const std::vector<std::string>& sentences,
                                  const std::string& justification, int k) {
  if (sentences.empty()) throw DataError("independent_top_k: no sentences");
  if (k < 1) throw DataError("independent_top_k: k must be >= 1");
  const ScoringContext ctx = make_context(sentences, justification);
  const int n = static_cast<int>(sentences.size());
  std::vector<std::pair<double, int>> scored;
  scored.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    scored.emplace_back(subset_score(ctx, {i}), i);
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<int> indices;
  for (int i = 0; i < std::min(k, n); ++i) indices.push_back(scored[i].second);
  std::sort(indices.begin(), indices.end());
  return make_selection(sentences.size(), indices,
                        subset_score(ctx, indices));
}

std::string render_selection(const std::vector<std::string>& sentences,
                             const std::vector<int>& indices) {
  std::vector<int> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (int idx : sorted) {
    if (!out.empty()) out.push_back(' ');
    out += sentences[static_cast<std::size_t>(idx)];
  }
  return out;
}

std::vector<OracleSelection> batch_greedy_oracle(
    const std::vector<Instance>& instances, int k) {
  std::vector<OracleSelection> out(instances.size());
  parallel_for(instances.size(), [&](std::size_t i) {
    out[i] = greedy_oracle(instances[i].sentences,
                           instances[i].justification, k);
  });
  return out;
}

std::vector<OracleSelection> batch_greedy_oracle_serial(
    const std::vector<Instance>& instances, int k) {
  std::vector<OracleSelection> out(instances.size());
  serial_for(instances.size(), [&](std::size_t i) {
    out[i] = greedy_oracle(instances[i].sentences,
                           instances[i].justification, k);
  });
  return out;
}

void write_oracles_jsonl(const std::string& path,
                         const std::vector<Instance>& instances,
                         const std::vector<OracleSelection>& selections) {
  if (instances.size() != selections.size())
    throw DataError("write_oracles_jsonl: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write oracle file: " + path);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    json j;
    j["id"] = instances[i].id;
    j["indices"] = selections[i].indices;
    j["n"] = instances[i].sentences.size();
    j["rouge2_f1"] = selections[i].rouge2_f1;
    out << j.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

std::vector<OracleSelection> read_oracles_jsonl(
    const std::string& path, const std::vector<Instance>& instances) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open oracle file: " + path);
  std::unordered_map<std::string, OracleSelection> by_id;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      OracleSelection sel;
      sel.indices = j.at("indices").get<std::vector<int>>();
      sel.rouge2_f1 = j.at("rouge2_f1").get<double>();
      const std::size_t n = j.at("n").get<std::size_t>();
      sel.labels.assign(n, 0);
      for (int idx : sel.indices) {
        if (idx < 0 || static_cast<std::size_t>(idx) >= n)
          throw DataError("oracle index out of range in " + path);
        sel.labels[static_cast<std::size_t>(idx)] = 1;
      }
      by_id[j.at("id").get<std::string>()] = std::move(sel);
    } catch (const json::exception& e) {
      throw DataError("malformed oracle line in " + path + ": " + e.what());
    }
  }
  std::vector<OracleSelection> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    auto it = by_id.find(inst.id);
    if (it == by_id.end())
      throw DataError("oracle file missing instance id: " + inst.id);
    if (it->second.labels.size() != inst.sentences.size())
      throw DataError("oracle length mismatch for id: " + inst.id);
    out.push_back(it->second);
  }
  return out;
}

}  // namespace factex

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

// Shared helpers for the test binaries: synthetic corpora and independent
// reference implementations used as oracles against the library code.

#ifndef FACTEX_TESTS_TEST_UTIL_HPP_
#define FACTEX_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "factex/corpus.hpp"
#include "factex/oracle.hpp"
#include "factex/rng.hpp"
#include "factex/rouge.hpp"

namespace factex_test {

inline const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> kWords = {
      "tax",     "budget",  "senate", "vote",    "house",  "report",
      "claim",   "rate",    "percent", "growth", "state",  "federal",
      "county",  "health",  "school", "plan",    "year",   "deficit",
      "jobs",    "energy",  "water",  "law",     "bill",   "audit",
      "mayor",   "program", "fund",   "record",  "data",   "margin"};
  return kWords;
}

inline std::string random_sentence(factex::Rng& rng, int len,
                                   const std::string& extra = "") {
  std::string s;
  const auto& words = word_pool();
  const int insert_at = extra.empty() ? -1 : static_cast<int>(rng.below(
                                                 static_cast<std::uint64_t>(len)));
  for (int i = 0; i < len; ++i) {
    if (i) s += ' ';
    if (i == insert_at) {
      s += extra;
      s += ' ';
    }
    s += words[rng.below(words.size())];
  }
  s += '.';
  // Capitalized so the rule-based splitter recognizes the boundary.
  s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

inline factex::Instance random_instance(factex::Rng& rng, int min_sentences,
                                        int max_sentences) {
  factex::Instance inst;
  inst.id = "synth-" + std::to_string(rng.below(1u << 30));
  inst.claim = random_sentence(rng, 6);
  const int n = min_sentences +
                static_cast<int>(rng.below(static_cast<std::uint64_t>(
                    max_sentences - min_sentences + 1)));
  for (int i = 0; i < n; ++i)
    inst.sentences.push_back(random_sentence(
        rng, 4 + static_cast<int>(rng.below(6))));
  // Justification overlaps a couple of the sentences so oracles have signal.
  const std::size_t a = rng.below(inst.sentences.size());
  const std::size_t b = rng.below(inst.sentences.size());
  inst.justification = inst.sentences[a] + " " + inst.sentences[b];
  inst.label = static_cast<factex::VeracityLabel>(rng.below(6));
  inst.split = factex::Split::train;
  return inst;
}

// Step-by-step greedy reimplementation working on joined strings, kept
// deliberately different from the library's token-level path.
inline factex::OracleSelection reference_greedy(
    const std::vector<std::string>& sentences, const std::string& justification,
    int k) {
  using factex::rouge_n;
  using factex::tokenize_for_rouge;
  const auto ref_tokens = tokenize_for_rouge(justification);

  auto score_of = [&](std::vector<int> idx) {
    std::sort(idx.begin(), idx.end());
    std::string text;
    for (int i : idx) {
      if (!text.empty()) text += ' ';
      text += sentences[static_cast<std::size_t>(i)];
    }
    return rouge_n(tokenize_for_rouge(text), ref_tokens, 2).f1;
  };

  std::vector<int> chosen;
  double total = 0.0;
  for (int round = 0; round < k; ++round) {
    int pick = -1;
    double pick_score = total;
    for (int c = 0; c < static_cast<int>(sentences.size()); ++c) {
      if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
      std::vector<int> trial = chosen;
      trial.push_back(c);
      const double s = score_of(trial);
      if (s > pick_score) {
        pick_score = s;
        pick = c;
      }
    }
    if (pick < 0) break;
    chosen.push_back(pick);
    total = pick_score;
  }

  factex::OracleSelection sel;
  sel.labels.assign(sentences.size(), 0);
  std::sort(chosen.begin(), chosen.end());
  for (int i : chosen) sel.labels[static_cast<std::size_t>(i)] = 1;
  sel.indices = chosen;
  sel.rouge2_f1 = total;
  return sel;
}

// Classic full-table LCS, independent of the library's rolling-row version.
inline std::size_t reference_lcs(const std::vector<std::string>& a,
                                 const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> table(
      a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      table[i][j] = a[i - 1] == b[j - 1]
                        ? table[i - 1][j - 1] + 1
                        : std::max(table[i - 1][j], table[i][j - 1]);
  return table[a.size()][b.size()];
}

// Words disjoint from word_pool; planted sentences are built entirely from
// these, so the oracle labels them exactly and a small encoder can separate
// planted from filler markers.
inline const std::vector<std::string>& salient_pool() {
  static const std::vector<std::string> kWords = {
      "quake",  "ember", "violet", "saffron", "lunar",
      "cobalt", "prism", "tundra", "velvet",  "onyx"};
  return kWords;
}

// Instances whose justification is a verbatim copy of four marked sentences.
struct PlantedInstance {
  factex::Instance instance;
  std::vector<int> planted;  // sorted
};

inline PlantedInstance make_planted_instance(factex::Rng& rng, int id,
                                             int n_sentences) {
  PlantedInstance out;
  factex::Instance& inst = out.instance;
  inst.id = "planted-" + std::to_string(id);
  inst.claim = random_sentence(rng, 5);
  inst.label = static_cast<factex::VeracityLabel>(rng.below(6));
  inst.split = factex::Split::train;

  std::vector<int> order(static_cast<std::size_t>(n_sentences));
  for (int i = 0; i < n_sentences; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);
  out.planted.assign(order.begin(), order.begin() + 4);
  std::sort(out.planted.begin(), out.planted.end());

  const auto& salient = salient_pool();
  for (int i = 0; i < n_sentences; ++i) {
    const bool planted = std::find(out.planted.begin(), out.planted.end(),
                                   i) != out.planted.end();
    if (!planted) {
      inst.sentences.push_back(random_sentence(rng, 6));
      continue;
    }
    std::string s;
    for (int w = 0; w < 6; ++w) {
      if (w) s += ' ';
      s += salient[rng.below(salient.size())];
    }
    s += '.';
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    inst.sentences.push_back(s);
  }
  std::string just;
  for (int i : out.planted) {
    if (!just.empty()) just += ' ';
    just += inst.sentences[static_cast<std::size_t>(i)];
  }
  inst.justification = just;
  return out;
}

}  // namespace factex_test

#endif  // FACTEX_TESTS_TEST_UTIL_HPP_

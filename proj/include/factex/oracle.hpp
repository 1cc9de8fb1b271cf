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

#ifndef FACTEX_ORACLE_HPP_
#define FACTEX_ORACLE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "factex/corpus.hpp"
#include "factex/rouge.hpp"

namespace factex {

// Binary per-sentence selection plus the cumulative ROUGE-2 F1 it achieves
// against the justification. Selected sentences are always rendered in
// document order.
struct OracleSelection {
  std::vector<std::uint8_t> labels;  // length N, 1 = selected
  std::vector<int> indices;          // sorted selected positions
  double rouge2_f1 = 0.0;
};

inline constexpr int kDefaultOracleK = 4;  // average justification length

// Cumulative greedy selection: starting empty, repeatedly add the sentence
// that maximizes the ROUGE-2 F1 of the selected set (concatenated in
// document order) against the justification; stop after k additions or when
// no addition strictly improves the score. Ties go to the lowest index.
OracleSelection greedy_oracle(const std::vector<std::string>& sentences,
                              const std::string& justification, int k);

// Exhaustive maximum over all subsets of size <= k; ties resolved by the
// lexicographically smallest index set. Guarded to N <= 16.
OracleSelection brute_force_best(const std::vector<std::string>& sentences,
                                 const std::string& justification, int k);

inline constexpr int kBruteForceMaxSentences = 16;

// First min(k, N) sentences.
OracleSelection lead_k(const std::vector<std::string>& sentences,
                       const std::string& justification, int k);

// Non-cumulative variant kept for comparison: the k sentences with the
// highest individual ROUGE-2 F1 scores.
OracleSelection independent_top_k(const std::vector<std::string>& sentences,
                                  const std::string& justification, int k);

// Selected sentences joined by a single space, in document order.
std::string render_selection(const std::vector<std::string>& sentences,
                             const std::vector<int>& indices);

// Per-instance oracles for a whole corpus; parallel over instances, output
// order matches input order. The serial variant is the reference path.
std::vector<OracleSelection> batch_greedy_oracle(
    const std::vector<Instance>& instances, int k);
std::vector<OracleSelection> batch_greedy_oracle_serial(
    const std::vector<Instance>& instances, int k);

// Oracle file: one JSON object per line (id, indices, rouge2_f1, n).
void write_oracles_jsonl(const std::string& path,
                         const std::vector<Instance>& instances,
                         const std::vector<OracleSelection>& selections);
std::vector<OracleSelection> read_oracles_jsonl(
    const std::string& path, const std::vector<Instance>& instances);

}  // namespace factex

#endif  // FACTEX_ORACLE_HPP_

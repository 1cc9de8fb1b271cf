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

#ifndef FACTEX_ROUGE_HPP_
#define FACTEX_ROUGE_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace factex {

// Precision/recall/F1 for one ROUGE variant. F1 is the harmonic mean computed
// from exact integer counts; all three are zero when either side has no units
// of the given order.
struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

RougeScore make_rouge_score(double overlap, double candidate_units,
                            double reference_units);

// Lowercases and splits on any non-alphanumeric character (ASCII semantics);
// no stemming, no stopword removal, no empty tokens.
std::vector<std::string> tokenize_for_rouge(std::string_view text);

// Clipped n-gram multiset overlap. precision = overlap / |candidate n-grams|,
// recall = overlap / |reference n-grams|.
RougeScore rouge_n(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, int n);

// Token-level longest common subsequence over the whole sequences.
// precision = LCS / |candidate|, recall = LCS / |reference|.
RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference);

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b);

// Hashed n-gram multiset; the fast path shared with oracle construction.
// Tokens are hashed individually and combined, so distinct n-grams collide
// only with 64-bit probability.
struct NgramCounts {
  std::unordered_map<std::uint64_t, int> counts;
  int total = 0;
};

NgramCounts count_ngrams(const std::vector<std::string>& tokens, int n);

void add_ngrams(const std::vector<std::string>& tokens, int n,
                NgramCounts& out);

RougeScore rouge_from_counts(const NgramCounts& candidate,
                             const NgramCounts& reference);

}  // namespace factex

#endif  // FACTEX_ROUGE_HPP_

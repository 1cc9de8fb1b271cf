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

#include "factex/rouge.hpp"

#include <algorithm>

#include "factex/hash.hpp"

namespace factex {

RougeScore make_rouge_score(double overlap, double candidate_units,
                            double reference_units) {
  RougeScore s;
  if (candidate_units <= 0.0 || reference_units <= 0.0) return s;
  s.precision = overlap / candidate_units;
  s.recall = overlap / reference_units;
  if (s.precision + s.recall > 0.0)
    s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

std::vector<std::string> tokenize_for_rouge(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    const bool alnum = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                       (c >= 'A' && c <= 'Z');
    if (alnum) {
      cur.push_back(static_cast<char>(
          (c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

void add_ngrams(const std::vector<std::string>& tokens, int n,
                NgramCounts& out) {
  if (n < 1 || tokens.size() < static_cast<std::size_t>(n)) return;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (int j = 0; j < n; ++j) {
      h = fnv1a64(tokens[i + j], h);
      h = fnv1a64(std::string_view("\x1f", 1), h);
    }
    ++out.counts[h];
    ++out.total;
  }
}

NgramCounts count_ngrams(const std::vector<std::string>& tokens, int n) {
  NgramCounts out;
  add_ngrams(tokens, n, out);
  return out;
}

RougeScore rouge_from_counts(const NgramCounts& candidate,
                             const NgramCounts& reference) {
  long long overlap = 0;
  for (const auto& [key, count] : candidate.counts) {
    auto it = reference.counts.find(key);
    if (it != reference.counts.end())
      overlap += std::min(count, it->second);  // clipped
  }
  return make_rouge_score(static_cast<double>(overlap),
                          static_cast<double>(candidate.total),
                          static_cast<double>(reference.total));
}

RougeScore rouge_n(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference, int n) {
  return rouge_from_counts(count_ngrams(candidate, n),
                           count_ngrams(reference, n));
}

std::size_t lcs_length(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1])
        cur[j] = prev[j - 1] + 1;
      else
        cur[j] = std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(const std::vector<std::string>& candidate,
                   const std::vector<std::string>& reference) {
  const std::size_t lcs = lcs_length(candidate, reference);
  return make_rouge_score(static_cast<double>(lcs),
                          static_cast<double>(candidate.size()),
                          static_cast<double>(reference.size()));
}

}  // namespace factex

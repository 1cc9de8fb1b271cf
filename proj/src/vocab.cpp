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

#include "factex/vocab.hpp"

#include <algorithm>
#include <map>

#include "factex/errors.hpp"
#include "factex/rouge.hpp"

namespace factex {

Vocab::Vocab() : Vocab(std::vector<std::string>{}) {}

Vocab::Vocab(std::vector<std::string> regular_tokens) {
  id_to_token_ = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
  id_to_token_.insert(id_to_token_.end(),
                      std::make_move_iterator(regular_tokens.begin()),
                      std::make_move_iterator(regular_tokens.end()));
  for (std::size_t i = 0; i < id_to_token_.size(); ++i)
    token_to_id_.emplace(id_to_token_[i], static_cast<int>(i));
}

int Vocab::encode(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

std::vector<std::string> Vocab::regular_tokens() const {
  return std::vector<std::string>(id_to_token_.begin() + kNumSpecials,
                                  id_to_token_.end());
}

Vocab build_vocab(const std::vector<Instance>& train_instances, int min_freq) {
  if (train_instances.empty()) throw DataError("build_vocab: empty corpus");
  if (min_freq < 1) min_freq = 1;

  // std::map keeps the id assignment lexicographic and deterministic.
  std::map<std::string, long long> freq;
  auto count = [&](const std::string& text) {
    for (auto& tok : tokenize_for_rouge(text)) ++freq[tok];
  };
  for (const auto& inst : train_instances) {
    count(inst.claim);
    for (const auto& s : inst.sentences) count(s);
    count(inst.justification);
  }

  std::vector<std::string> kept;
  for (const auto& [tok, n] : freq)
    if (n >= min_freq) kept.push_back(tok);
  return Vocab(std::move(kept));
}

}  // namespace factex

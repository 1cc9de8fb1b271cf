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

#ifndef FACTEX_VOCAB_HPP_
#define FACTEX_VOCAB_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include "factex/corpus.hpp"

namespace factex {

// Word-level vocabulary built from the training split only. Specials occupy
// fixed low ids; unseen tokens map to UNK at encode time.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;
  static constexpr int kSep = 3;
  static constexpr int kNumSpecials = 4;

  Vocab();
  explicit Vocab(std::vector<std::string> regular_tokens);

  int size() const { return static_cast<int>(id_to_token_.size()); }
  int encode(const std::string& token) const;
  const std::string& token(int id) const { return id_to_token_[static_cast<std::size_t>(id)]; }

  // Regular (non-special) tokens in id order, for serialization.
  std::vector<std::string> regular_tokens() const;

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

// Tokens are ROUGE tokens of claim, ruling sentences and justification;
// a token enters the vocabulary when its training frequency reaches
// min_freq. Throws DataError on an empty corpus.
Vocab build_vocab(const std::vector<Instance>& train_instances, int min_freq);

}  // namespace factex

#endif  // FACTEX_VOCAB_HPP_

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

#ifndef FACTEX_ENCODER_HPP_
#define FACTEX_ENCODER_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "factex/corpus.hpp"
#include "factex/vocab.hpp"

namespace factex {

struct EncoderConfig {
  int layers = 2;
  int model_dim = 128;
  int heads = 4;
  int ff_dim = 256;
  int window = 300;
  int overlap = 60;  // windows advance by window - overlap tokens
  int max_len = 1200;
  double dropout = 0.1;

  void validate() const;  // throws UsageError on violation
};

enum class TaskKind { explanation, veracity, joint };

std::string task_name(TaskKind task);

enum class UnitKind : std::uint8_t { claim, ruling_sentence };

// Token-id sequence with the positions of the marker tokens whose final
// representations become unit summaries.
struct EncodedInput {
  std::vector<int> token_ids;
  std::vector<int> cls_positions;       // strictly increasing
  std::vector<UnitKind> unit_kinds;     // one per cls position
  int dropped_sentences = 0;            // whole sentences cut from the tail
  int kept_sentences = 0;               // ruling sentences that survived

  int claim_cls() const;                // -1 when the claim has no marker
  std::vector<int> sentence_cls() const;
};

// Builds the input layout for one task:
//   explanation: claim tokens, SEP, then CLS + tokens per ruling sentence
//                (the claim carries no marker of its own)
//   veracity:    CLS, claim tokens, SEP, evidence tokens (no sentence marks)
//   joint:       CLS (claim), claim tokens, SEP, then CLS + tokens per
//                ruling sentence
// When the encoding would exceed max_len, whole sentences are dropped from
// the tail and counted; the claim alone exceeding max_len is an error.
// evidence_override replaces the ruling sentences (used for veracity models
// reading oracle selections or the justification).
EncodedInput encode_instance(
    const Instance& instance, const Vocab& vocab, TaskKind task,
    const EncoderConfig& config,
    const std::vector<std::string>* evidence_override = nullptr);

struct WindowSlice {
  int offset = 0;
  int length = 0;
};

// Offsets advance by window - overlap until the whole sequence is covered;
// the last window may be shorter, all others share exactly `overlap` tokens
// with their successor.
std::vector<WindowSlice> window_split(int sequence_length, int window,
                                      int overlap);

}  // namespace factex

#endif  // FACTEX_ENCODER_HPP_

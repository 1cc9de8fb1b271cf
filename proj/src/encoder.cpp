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

#include "factex/encoder.hpp"

#include "factex/errors.hpp"
#include "factex/rouge.hpp"

namespace factex {

void EncoderConfig::validate() const {
  if (layers < 1) throw UsageError("encoder: layers must be >= 1");
  if (model_dim < 1 || heads < 1 || model_dim % heads != 0)
    throw UsageError("encoder: model_dim must be divisible by heads");
  if (ff_dim < 1) throw UsageError("encoder: ff_dim must be >= 1");
  if (!(0 < overlap && overlap < window && window <= max_len))
    throw UsageError("encoder: need 0 < overlap < window <= max_len");
  if (dropout < 0.0 || dropout >= 1.0)
    throw UsageError("encoder: dropout must be in [0, 1)");
}

std::string task_name(TaskKind task) {
  switch (task) {
    case TaskKind::explanation: return "explanation";
    case TaskKind::veracity: return "veracity";
    case TaskKind::joint: return "joint";
  }
  return "joint";
}

int EncodedInput::claim_cls() const {
  for (std::size_t i = 0; i < unit_kinds.size(); ++i)
    if (unit_kinds[i] == UnitKind::claim) return cls_positions[i];
  return -1;
}

std::vector<int> EncodedInput::sentence_cls() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < unit_kinds.size(); ++i)
    if (unit_kinds[i] == UnitKind::ruling_sentence)
      out.push_back(cls_positions[i]);
  return out;
}

namespace {

std::vector<int> encode_tokens(const std::string& text, const Vocab& vocab) {
  std::vector<int> ids;
  for (const auto& tok : tokenize_for_rouge(text))
    ids.push_back(vocab.encode(tok));
  return ids;
}

}  // namespace

EncodedInput encode_instance(const Instance& instance, const Vocab& vocab,
                             TaskKind task, const EncoderConfig& config,
                             const std::vector<std::string>* evidence_override) {
  const std::vector<std::string>& evidence =
      evidence_override ? *evidence_override : instance.sentences;

  EncodedInput enc;
  const bool claim_marked = task != TaskKind::explanation;
  const bool sentences_marked = task != TaskKind::veracity;

  if (claim_marked) {
    enc.cls_positions.push_back(0);
    enc.unit_kinds.push_back(UnitKind::claim);
    enc.token_ids.push_back(Vocab::kCls);
  }
  for (int id : encode_tokens(instance.claim, vocab))
    enc.token_ids.push_back(id);
  enc.token_ids.push_back(Vocab::kSep);

  if (static_cast<int>(enc.token_ids.size()) > config.max_len)
    throw DataError("encode_instance: claim alone exceeds max_len (id " +
                    instance.id + ")");

  // Kept sentences form a prefix: the first overflow drops the whole tail,
  // so sentence labels line up with the first kept_sentences positions.
  for (std::size_t s = 0; s < evidence.size(); ++s) {
    std::vector<int> sent_ids = encode_tokens(evidence[s], vocab);
    const int block = static_cast<int>(sent_ids.size()) +
                      (sentences_marked ? 1 : 0);
    if (static_cast<int>(enc.token_ids.size()) + block > config.max_len) {
      enc.dropped_sentences = static_cast<int>(evidence.size() - s);
      break;
    }
    if (sentences_marked) {
      enc.cls_positions.push_back(static_cast<int>(enc.token_ids.size()));
      enc.unit_kinds.push_back(UnitKind::ruling_sentence);
      enc.token_ids.push_back(Vocab::kCls);
    }
    enc.token_ids.insert(enc.token_ids.end(), sent_ids.begin(),
                         sent_ids.end());
    ++enc.kept_sentences;
  }
  return enc;
}

std::vector<WindowSlice> window_split(int sequence_length, int window,
                                      int overlap) {
  if (!(0 < overlap && overlap < window))
    throw UsageError("window_split: need 0 < overlap < window");
  std::vector<WindowSlice> slices;
  if (sequence_length <= 0) return slices;
  const int stride = window - overlap;
  int offset = 0;
  while (true) {
    slices.push_back({offset, std::min(window, sequence_length - offset)});
    if (offset + window >= sequence_length) break;
    offset += stride;
  }
  return slices;
}

}  // namespace factex

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

#include <doctest.h>

#include "factex/errors.hpp"
#include "factex/model.hpp"
#include "test_util.hpp"

using namespace factex;

namespace {

EncoderConfig tiny_encoder() {
  EncoderConfig e;
  e.layers = 1;
  e.model_dim = 8;
  e.heads = 2;
  e.ff_dim = 16;
  e.window = 12;
  e.overlap = 4;
  e.max_len = 120;
  e.dropout = 0.0;
  return e;
}

Instance small_instance() {
  Instance inst;
  inst.id = "t1";
  inst.claim = "mayor cut budget";
  inst.sentences = {"tax rate rose fast.", "school plan was cut.",
                    "energy bill stalled."};
  inst.justification = "school plan was cut.";
  inst.label = VeracityLabel::kFalse;
  inst.split = Split::train;
  return inst;
}

Vocab vocab_for(const std::vector<Instance>& instances) {
  return build_vocab(instances, 1);
}

}  // namespace

TEST_CASE("vocab building respects min_freq and maps unseen to UNK") {
  Instance inst;
  inst.id = "v";
  inst.claim = "a a b";
  inst.sentences = {"c.", "c.", "d."};
  inst.justification = "";
  const Vocab v2 = build_vocab({inst}, 2);
  CHECK(v2.encode("a") != Vocab::kUnk);
  CHECK(v2.encode("c") != Vocab::kUnk);
  CHECK(v2.encode("b") == Vocab::kUnk);
  CHECK(v2.encode("d") == Vocab::kUnk);

  const Vocab v1 = build_vocab({inst}, 1);
  for (const char* t : {"a", "b", "c", "d"})
    CHECK(v1.encode(t) != Vocab::kUnk);
  CHECK(v1.encode("never-seen") == Vocab::kUnk);

  CHECK_THROWS_AS(build_vocab({}, 1), DataError);

  // Specials sit at fixed low ids.
  CHECK(v1.token(Vocab::kPad) == "[PAD]");
  CHECK(v1.token(Vocab::kCls) == "[CLS]");
}

TEST_CASE("encode_instance layouts per task") {
  const auto inst = small_instance();
  const auto vocab = vocab_for({inst});
  const auto cfg = tiny_encoder();

  SUBCASE("joint: claim marker plus one per sentence") {
    const auto enc = encode_instance(inst, vocab, TaskKind::joint, cfg);
    CHECK(enc.cls_positions.size() == 4);
    CHECK(enc.unit_kinds[0] == UnitKind::claim);
    CHECK(enc.claim_cls() == 0);
    CHECK(enc.sentence_cls().size() == 3);
    CHECK(enc.dropped_sentences == 0);
    CHECK(enc.kept_sentences == 3);
    CHECK(enc.token_ids[0] == Vocab::kCls);
    for (int pos : enc.cls_positions)
      CHECK(enc.token_ids[static_cast<std::size_t>(pos)] == Vocab::kCls);
    // Strictly increasing marker positions.
    for (std::size_t i = 1; i < enc.cls_positions.size(); ++i)
      CHECK(enc.cls_positions[i] > enc.cls_positions[i - 1]);
  }
  SUBCASE("explanation: no claim marker") {
    const auto enc = encode_instance(inst, vocab, TaskKind::explanation, cfg);
    CHECK(enc.claim_cls() == -1);
    CHECK(enc.sentence_cls().size() == 3);
    CHECK(enc.token_ids[0] != Vocab::kCls);  // claim tokens come first
  }
  SUBCASE("veracity: single claim marker, unmarked evidence") {
    const auto enc = encode_instance(inst, vocab, TaskKind::veracity, cfg);
    CHECK(enc.claim_cls() == 0);
    CHECK(enc.sentence_cls().empty());
    CHECK(enc.kept_sentences == 3);
  }
  SUBCASE("evidence override replaces the sentences") {
    const std::vector<std::string> ev = {"tax rate rose fast."};
    const auto enc =
        encode_instance(inst, vocab, TaskKind::veracity, cfg, &ev);
    CHECK(enc.kept_sentences == 1);
  }
}

TEST_CASE("encode_instance truncation drops whole trailing sentences") {
  const auto cfg = tiny_encoder();  // max_len 120
  Rng rng(31);
  Instance inst;
  inst.id = "long";
  inst.claim = "law bill vote";
  for (int i = 0; i < 200; ++i)
    inst.sentences.push_back(factex_test::random_sentence(rng, 10));
  inst.justification = "unused.";
  inst.label = VeracityLabel::kTrue;
  const auto vocab = vocab_for({inst});

  const auto enc = encode_instance(inst, vocab, TaskKind::joint, cfg);
  CHECK(static_cast<int>(enc.token_ids.size()) <= cfg.max_len);
  CHECK(enc.kept_sentences + enc.dropped_sentences == 200);
  CHECK(enc.dropped_sentences > 0);

  // Derive the expected kept count from the lengths themselves.
  int expected_kept = 0;
  int used = 1 /*claim cls*/ +
             static_cast<int>(tokenize_for_rouge(inst.claim).size()) +
             1 /*sep*/;
  for (const auto& s : inst.sentences) {
    const int block = 1 + static_cast<int>(tokenize_for_rouge(s).size());
    if (used + block > cfg.max_len) break;
    used += block;
    ++expected_kept;
  }
  CHECK(enc.kept_sentences == expected_kept);

  SUBCASE("claim alone over the limit is an error") {
    Instance big;
    big.id = "big";
    for (int i = 0; i < 200; ++i) big.claim += " word" + std::to_string(i);
    big.sentences = {"a.", "b.", "c."};
    big.justification = "";
    const auto v = vocab_for({big});
    CHECK_THROWS_AS(encode_instance(big, v, TaskKind::joint, cfg), DataError);
  }
  SUBCASE("fitting instance drops nothing") {
    const auto small = small_instance();
    const auto v = vocab_for({small});
    const auto e = encode_instance(small, v, TaskKind::joint, cfg);
    CHECK(e.dropped_sentences == 0);
  }
  SUBCASE("200 ten-token sentences against the production limit") {
    EncoderConfig prod = cfg;
    prod.window = 300;
    prod.overlap = 60;
    prod.max_len = 1200;
    Instance wide;
    wide.id = "wide";
    wide.claim = "Tax vote law.";  // 3 tokens
    for (int i = 0; i < 200; ++i)
      wide.sentences.push_back(factex_test::random_sentence(rng, 10));
    wide.justification = "Unused.";
    const auto v = vocab_for({wide});
    const auto e = encode_instance(wide, v, TaskKind::explanation, prod);
    // claim(3) + SEP = 4 used; each sentence block is CLS + 10 tokens.
    const int expected_kept = (1200 - 4) / 11;
    CHECK(e.kept_sentences == expected_kept);
    CHECK(e.dropped_sentences == 200 - expected_kept);
    CHECK(static_cast<int>(e.token_ids.size()) <= 1200);
  }
}

TEST_CASE("window_split enumerates offsets by window - overlap") {
  SUBCASE("single window cases") {
    const auto one = window_split(250, 300, 60);
    REQUIRE(one.size() == 1);
    CHECK(one[0].offset == 0);
    CHECK(one[0].length == 250);
    const auto exact = window_split(300, 300, 60);
    REQUIRE(exact.size() == 1);
    CHECK(exact[0].length == 300);
  }
  SUBCASE("length 900 gives offsets 0,240,480,720 with a short tail") {
    const auto w = window_split(900, 300, 60);
    REQUIRE(w.size() == 4);
    CHECK(w[0].offset == 0);
    CHECK(w[1].offset == 240);
    CHECK(w[2].offset == 480);
    CHECK(w[3].offset == 720);
    CHECK(w[3].length == 180);
    for (int i = 0; i < 3; ++i) CHECK(w[static_cast<std::size_t>(i)].length == 300);
  }
  SUBCASE("coverage property over 1000 random lengths") {
    Rng rng(32);
    for (int it = 0; it < 1000; ++it) {
      const int len = 1 + static_cast<int>(rng.below(1200));
      const auto slices = window_split(len, 300, 60);
      std::vector<int> cover(static_cast<std::size_t>(len), 0);
      for (const auto& s : slices) {
        CHECK(s.length >= 1);
        CHECK(s.offset + s.length <= len);
        for (int i = 0; i < s.length; ++i)
          ++cover[static_cast<std::size_t>(s.offset + i)];
      }
      for (int c : cover) {
        CHECK(c >= 1);
        CHECK(c <= 2);
      }
      // Consecutive windows share exactly `overlap` tokens except the tail.
      for (std::size_t i = 0; i + 1 < slices.size(); ++i) {
        const int shared = slices[i].offset + slices[i].length -
                           slices[i + 1].offset;
        if (slices[i + 1].length == 300)
          CHECK(shared == 60);
        else
          CHECK(shared <= 60);
      }
    }
  }
}

TEST_CASE("overlap merge is the elementwise mean of the window outputs") {
  const auto cfg = tiny_encoder();
  Rng rng(33);
  Instance inst;
  inst.id = "m";
  inst.claim = "tax vote";
  for (int i = 0; i < 4; ++i)
    inst.sentences.push_back(factex_test::random_sentence(rng, 6));
  inst.justification = "x.";
  inst.label = VeracityLabel::kTrue;
  const auto vocab = vocab_for({inst});
  const auto enc = encode_instance(inst, vocab, TaskKind::joint, cfg);
  REQUIRE(enc.token_ids.size() > 12);  // needs at least two windows

  ModelConfig mc;
  mc.encoder = cfg;
  mc.kind = ModelKind::joint;
  mc.hidden_joint = 10;
  Rng init(7);
  const auto params = init_params(mc, vocab.size(), init);

  ForwardTrace trace;
  model_forward(enc, params, mc, false, 0, &trace);

  REQUIRE(trace.windows.size() >= 2);
  const std::size_t d = static_cast<std::size_t>(cfg.model_dim);
  for (std::size_t pos = 0; pos < enc.token_ids.size(); ++pos) {
    std::vector<const double*> contributors;
    for (const auto& wt : trace.windows) {
      const int local = static_cast<int>(pos) - wt.slice.offset;
      if (local >= 0 && local < wt.slice.length)
        contributors.push_back(wt.output().row(static_cast<std::size_t>(local)));
    }
    REQUIRE(!contributors.empty());
    CHECK(contributors.size() == static_cast<std::size_t>(
                                      trace.cover[pos]));
    for (std::size_t j = 0; j < d; ++j) {
      double mean = 0.0;
      for (const double* c : contributors) mean += c[j];
      mean /= static_cast<double>(contributors.size());
      CHECK(trace.merged.at(pos, j) ==
            doctest::Approx(mean).epsilon(1e-14));
    }
  }
}

TEST_CASE("extract: marker representations match the merged rows") {
  const auto cfg = tiny_encoder();
  const auto inst = small_instance();
  const auto vocab = vocab_for({inst});

  ModelConfig mc;
  mc.encoder = cfg;
  mc.kind = ModelKind::joint;
  mc.hidden_joint = 10;
  Rng init(8);
  const auto params = init_params(mc, vocab.size(), init);

  SUBCASE("joint: claim repr present, one repr per sentence") {
    const auto enc = encode_instance(inst, vocab, TaskKind::joint, cfg);
    ForwardTrace trace;
    model_forward(enc, params, mc, false, 0, &trace);
    CHECK(trace.head.c_claim.rows() == 1);
    CHECK(trace.head.c_sent.rows() == 3);
    // Eval mode applies no dropout, so the extracted rows equal merged rows.
    const auto sent_pos = enc.sentence_cls();
    for (std::size_t i = 0; i < sent_pos.size(); ++i)
      for (std::size_t j = 0; j < trace.head.c_sent.cols(); ++j)
        CHECK(trace.head.c_sent.at(i, j) ==
              trace.merged.at(static_cast<std::size_t>(sent_pos[i]), j));
  }
  SUBCASE("explanation encoding has no claim repr") {
    ModelConfig me = mc;
    me.kind = ModelKind::explain;
    me.hidden_explain = 10;
    Rng r2(9);
    const auto pe = init_params(me, vocab.size(), r2);
    const auto enc = encode_instance(inst, vocab, TaskKind::explanation, cfg);
    ForwardTrace trace;
    model_forward(enc, pe, me, false, 0, &trace);
    CHECK(trace.head.c_claim.rows() == 0);
    CHECK(trace.head.c_sent.rows() == 3);
    CHECK(trace.pred.explanation_scores.size() == 3);
  }
  SUBCASE("veracity encoding has no sentence reprs") {
    ModelConfig mv = mc;
    mv.kind = ModelKind::veracity;
    mv.hidden_veracity = 12;
    Rng r3(10);
    const auto pv = init_params(mv, vocab.size(), r3);
    const auto enc = encode_instance(inst, vocab, TaskKind::veracity, cfg);
    ForwardTrace trace;
    model_forward(enc, pv, mv, false, 0, &trace);
    CHECK(trace.head.c_claim.rows() == 1);
    CHECK(trace.head.c_sent.rows() == 0);
  }
}

TEST_CASE("eval mode forward is bit-identical across runs") {
  const auto cfg = tiny_encoder();
  const auto inst = small_instance();
  const auto vocab = vocab_for({inst});
  ModelConfig mc;
  mc.encoder = cfg;
  mc.kind = ModelKind::joint;
  mc.hidden_joint = 10;
  Rng init(11);
  const auto params = init_params(mc, vocab.size(), init);
  const auto enc = encode_instance(inst, vocab, TaskKind::joint, cfg);

  const auto a = model_forward(enc, params, mc, false, 1, nullptr);
  const auto b = model_forward(enc, params, mc, false, 2, nullptr);
  REQUIRE(a.explanation_scores.size() == b.explanation_scores.size());
  for (std::size_t i = 0; i < a.explanation_scores.size(); ++i)
    CHECK(a.explanation_scores[i] == b.explanation_scores[i]);
  for (int c = 0; c < kNumLabels; ++c)
    CHECK(a.veracity_probs[static_cast<std::size_t>(c)] ==
          b.veracity_probs[static_cast<std::size_t>(c)]);
}

TEST_CASE("config validation") {
  EncoderConfig e = tiny_encoder();
  e.model_dim = 9;  // not divisible by heads
  CHECK_THROWS_AS(e.validate(), UsageError);
  e = tiny_encoder();
  e.overlap = 12;
  CHECK_THROWS_AS(e.validate(), UsageError);
  e = tiny_encoder();
  e.window = 200;
  CHECK_THROWS_AS(e.validate(), UsageError);  // window > max_len
}

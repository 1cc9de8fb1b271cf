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

#include "factex/evaluation.hpp"

#include <doctest.h>

#include "factex/errors.hpp"
#include "factex/report.hpp"
#include "test_util.hpp"

using namespace factex;

TEST_CASE("select_top_n") {
  const std::vector<double> scores{0.9, 0.1, 0.8, 0.7, 0.2};
  const std::vector<std::uint8_t> all(5, 1);
  CHECK(select_top_n(scores, all, 4) == std::vector<int>{0, 2, 3, 4});
  CHECK(select_top_n({0.3, 0.2, 0.1}, {1, 1, 1}, 4) ==
        std::vector<int>{0, 1, 2});
  CHECK(select_top_n({0.5, 0.5}, {1, 1}, 1) == std::vector<int>{0});
  CHECK(select_top_n(scores, {0, 1, 1, 1, 1}, 2) == std::vector<int>{2, 3});
  CHECK_THROWS_AS(select_top_n(scores, all, 0), UsageError);
}

TEST_CASE("macro f1 hand-worked cases") {
  SUBCASE("perfect predictions over all six classes") {
    std::vector<int> golds, preds;
    for (int c = 0; c < 6; ++c) {
      golds.push_back(c);
      preds.push_back(c);
    }
    const auto rep = macro_f1_report(preds, golds);
    CHECK(rep.macro_f1 == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("two active classes padded to six") {
    const std::vector<int> golds{0, 0, 1, 1};
    const std::vector<int> preds{0, 1, 1, 1};
    const auto rep = macro_f1_report(preds, golds);
    CHECK(rep.f1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(rep.f1[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(rep.macro_f1 ==
          doctest::Approx((2.0 / 3.0 + 0.8) / 6.0).epsilon(1e-12));
    CHECK(rep.macro_f1 == doctest::Approx(0.2444).epsilon(1e-3));
  }
  SUBCASE("constant prediction against uniform golds") {
    std::vector<int> golds{0, 1, 2, 3, 4, 5};
    std::vector<int> preds(6, 0);
    const auto rep = macro_f1_report(preds, golds);
    CHECK(rep.macro_f1 ==
          doctest::Approx((2.0 / 7.0) / 6.0).epsilon(1e-12));
    CHECK(rep.macro_f1 == doctest::Approx(0.0476).epsilon(1e-3));
  }
  SUBCASE("confusion row sums equal class supports") {
    Rng rng(61);
    std::vector<int> golds, preds;
    for (int i = 0; i < 100; ++i) {
      golds.push_back(static_cast<int>(rng.below(6)));
      preds.push_back(static_cast<int>(rng.below(6)));
    }
    const auto rep = macro_f1_report(preds, golds);
    for (int c = 0; c < 6; ++c) {
      long long row = 0, support = 0;
      for (int p = 0; p < 6; ++p)
        row += rep.confusion[static_cast<std::size_t>(c)]
                            [static_cast<std::size_t>(p)];
      for (int g : golds)
        if (g == c) ++support;
      CHECK(row == support);
    }
  }
  SUBCASE("invariant under consistent relabeling") {
    Rng rng(62);
    std::vector<int> golds, preds;
    for (int i = 0; i < 60; ++i) {
      golds.push_back(static_cast<int>(rng.below(6)));
      preds.push_back(static_cast<int>(rng.below(6)));
    }
    const int perm[6] = {3, 5, 0, 1, 4, 2};
    std::vector<int> pg, pp;
    for (std::size_t i = 0; i < golds.size(); ++i) {
      pg.push_back(perm[golds[i]]);
      pp.push_back(perm[preds[i]]);
    }
    CHECK(macro_f1_report(preds, golds).macro_f1 ==
          doctest::Approx(macro_f1_report(pp, pg).macro_f1).epsilon(1e-12));
  }
  SUBCASE("empty input throws") {
    CHECK_THROWS_AS(macro_f1_report({}, {}), DataError);
  }
}

TEST_CASE("explanation scoring and perfect-match rows") {
  Instance inst;
  inst.id = "e";
  inst.claim = "claim";
  inst.sentences = {"The mayor cut the budget.", "Parks lost funding.",
                    "Schools lost teachers."};
  inst.justification =
      "The mayor cut the budget. Parks lost funding. Schools lost teachers.";
  const auto res = score_explanation(inst, {0, 1, 2});
  CHECK(res.rouge1.f1 == doctest::Approx(1.0));
  CHECK(res.rouge2.f1 == doctest::Approx(1.0));
  CHECK(res.rougeL.f1 == doctest::Approx(1.0));
  CHECK(res.text ==
        "The mayor cut the budget. Parks lost funding. Schools lost teachers.");

  const auto row = mean_rouge_row("system", {res, res});
  CHECK(row.rouge1_f1 == doctest::Approx(1.0));
  CHECK(row.count == 2);
}

TEST_CASE("oracle row dominates lead row on rouge-2 for planted data") {
  Rng rng(63);
  std::vector<ExplanationResult> lead_rows, oracle_rows;
  for (int i = 0; i < 20; ++i) {
    const auto planted = factex_test::make_planted_instance(rng, i, 9);
    const auto& inst = planted.instance;
    const auto lead = lead_k(inst.sentences, inst.justification, 4);
    const auto orad = greedy_oracle(inst.sentences, inst.justification, 4);
    lead_rows.push_back(score_explanation(inst, lead.indices));
    oracle_rows.push_back(score_explanation(inst, orad.indices));
  }
  const auto lead_row = mean_rouge_row("lead-4", lead_rows);
  const auto oracle_row = mean_rouge_row("oracle", oracle_rows);
  CHECK(oracle_row.rouge2_f1 >= lead_row.rouge2_f1);
  CHECK(oracle_row.rouge2_f1 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("evidence source report") {
  SUBCASE("ruling equal to justification scores 1 everywhere") {
    Instance inst;
    inst.id = "ev";
    inst.claim = "c";
    inst.sentences = {"Alpha beta gamma.", "Delta epsilon zeta.",
                      "Eta theta iota."};
    inst.justification =
        "Alpha beta gamma. Delta epsilon zeta. Eta theta iota.";
    const auto oracles = batch_greedy_oracle({inst}, 4);
    const auto rows = evidence_source_report({inst}, oracles);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
      for (const RougeScore* s : {&row.rouge1, &row.rouge2, &row.rougeL}) {
        CHECK(s->precision == doctest::Approx(1.0));
        CHECK(s->recall == doctest::Approx(1.0));
        CHECK(s->f1 == doctest::Approx(1.0));
      }
    }
  }
  SUBCASE("full ruling has high recall, oracle has higher precision") {
    Rng rng(64);
    std::vector<Instance> instances;
    for (int i = 0; i < 10; ++i) {
      auto planted = factex_test::make_planted_instance(rng, i, 10);
      instances.push_back(planted.instance);
    }
    const auto oracles = batch_greedy_oracle(instances, 4);
    const auto rows = evidence_source_report(instances, oracles);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].source == "ruling");
    CHECK(rows[1].source == "ruling-oracle");
    CHECK(rows[0].rouge1.recall > 0.95);  // justification copied from ruling
    CHECK(rows[1].rouge1.precision > rows[0].rouge1.precision);
  }
}

TEST_CASE("report formatting is deterministic") {
  const RunStamp stamp{"runid123", "cfg456"};
  std::vector<RougeRow> rows{{"lead-4", 0.2811, 0.0696, 0.2438, 1255}};
  const auto a = format_rouge_table(rows, stamp);
  const auto b = format_rouge_table(rows, stamp);
  CHECK(a == b);
  CHECK(a.find("28.11") != std::string::npos);
  CHECK(a.find("6.96") != std::string::npos);
  CHECK(a.find("runid123") != std::string::npos);

  std::vector<int> preds{0, 1, 2, 3, 4, 5}, golds{0, 1, 2, 3, 4, 5};
  const auto rep = macro_f1_report(preds, golds);
  CHECK(format_veracity_report(rep, stamp) ==
        format_veracity_report(rep, stamp));
  CHECK(format_veracity_report(rep, stamp).find("macro-f1 1.0000") !=
        std::string::npos);
}

TEST_CASE("model-driven inference over a split") {
  Rng rng(65);
  std::vector<Instance> instances;
  for (int i = 0; i < 6; ++i)
    instances.push_back(factex_test::random_instance(rng, 3, 6));
  const Vocab vocab = build_vocab(instances, 1);

  SUBCASE("explanations from an untrained joint model are well-formed") {
    ModelConfig mc;
    mc.encoder = {1, 8, 2, 16, 12, 4, 200, 0.0};
    mc.kind = ModelKind::joint;
    mc.hidden_joint = 8;
    Rng init(66);
    const auto params = init_params(mc, vocab.size(), init);
    const auto results = explain_split(instances, mc, params, vocab, 4);
    REQUIRE(results.size() == instances.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
      CHECK(results[i].id == instances[i].id);
      CHECK(results[i].indices.size() ==
            std::min<std::size_t>(4, instances[i].sentences.size()));
      CHECK(!results[i].text.empty());
    }
  }
  SUBCASE("veracity prediction reading oracle evidence") {
    ModelConfig mc;
    mc.encoder = {1, 8, 2, 16, 12, 4, 200, 0.0};
    mc.kind = ModelKind::veracity;
    mc.veracity_input = VeracityInput::oracles;
    mc.hidden_veracity = 8;
    Rng init(67);
    const auto params = init_params(mc, vocab.size(), init);
    const auto oracles = batch_greedy_oracle(instances, 4);
    const auto preds =
        predict_veracity_split(instances, mc, params, vocab, &oracles);
    REQUIRE(preds.size() == instances.size());
    for (int p : preds) {
      CHECK(p >= 0);
      CHECK(p < kNumLabels);
    }
    // The oracle selections are required for this input mode.
    CHECK_THROWS_AS(
        predict_veracity_split(instances, mc, params, vocab, nullptr),
        DataError);
  }
}

TEST_CASE("veracity evidence variants") {
  Instance inst;
  inst.id = "vv";
  inst.claim = "c";
  inst.sentences = {"One two three.", "Four five six.", "Seven eight nine."};
  inst.justification = "Four five six. Extra tail.";
  OracleSelection sel;
  sel.labels = {0, 1, 0};
  sel.indices = {1};
  sel.rouge2_f1 = 0.5;

  CHECK(veracity_evidence(inst, VeracityInput::ruling, nullptr) ==
        inst.sentences);
  CHECK(veracity_evidence(inst, VeracityInput::oracles, &sel) ==
        std::vector<std::string>{"Four five six."});
  CHECK(veracity_evidence(inst, VeracityInput::justification, nullptr) ==
        std::vector<std::string>{"Four five six.", "Extra tail."});
  CHECK_THROWS_AS(veracity_evidence(inst, VeracityInput::oracles, nullptr),
                  DataError);
}

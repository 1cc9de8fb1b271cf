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

#include "factex/report.hpp"

#include <cstdarg>
#include <cstdio>
#include <fstream>

#include "factex/errors.hpp"

namespace factex {

namespace {

using nlohmann::json;

void appendf(std::string& out, const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  out += buf;
}

double pct(double x) { return 100.0 * x; }

std::string stamp_line(const char* title, const RunStamp& stamp) {
  std::string out;
  appendf(out, "# %s (run %s, config %s)\n", title, stamp.run_id.c_str(),
          stamp.config_hash.c_str());
  return out;
}

}  // namespace

std::string format_rouge_table(const std::vector<RougeRow>& rows,
                               const RunStamp& stamp) {
  std::string out = stamp_line("explanation rouge f1", stamp);
  appendf(out, "%-22s %9s %9s %9s %8s\n", "system", "ROUGE-1", "ROUGE-2",
          "ROUGE-L", "n");
  for (const auto& r : rows)
    appendf(out, "%-22s %9.2f %9.2f %9.2f %8zu\n", r.system.c_str(),
            pct(r.rouge1_f1), pct(r.rouge2_f1), pct(r.rougeL_f1), r.count);
  return out;
}

json rouge_table_json(const std::vector<RougeRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"system", r.system},
                   {"rouge1_f1", pct(r.rouge1_f1)},
                   {"rouge2_f1", pct(r.rouge2_f1)},
                   {"rougeL_f1", pct(r.rougeL_f1)},
                   {"count", r.count}});
  return arr;
}

std::string format_veracity_report(const VeracityReport& report,
                                   const RunStamp& stamp) {
  std::string out = stamp_line("veracity prediction", stamp);
  appendf(out, "%-15s %9s %9s %9s\n", "class", "precision", "recall", "f1");
  for (int c = 0; c < kNumLabels; ++c) {
    const std::size_t cc = static_cast<std::size_t>(c);
    appendf(out, "%-15s %9.4f %9.4f %9.4f\n",
            label_name(static_cast<VeracityLabel>(c)).c_str(),
            report.precision[cc], report.recall[cc], report.f1[cc]);
  }
  appendf(out, "macro-f1 %.4f over %zu instances\n", report.macro_f1,
          report.count);
  out += "confusion (rows = gold, cols = predicted):\n";
  for (int g = 0; g < kNumLabels; ++g) {
    appendf(out, "%-15s",
            label_name(static_cast<VeracityLabel>(g)).c_str());
    for (int p = 0; p < kNumLabels; ++p)
      appendf(out, " %6lld",
              report.confusion[static_cast<std::size_t>(g)]
                              [static_cast<std::size_t>(p)]);
    out += '\n';
  }
  return out;
}

json veracity_report_json(const VeracityReport& report) {
  json per_class = json::array();
  for (int c = 0; c < kNumLabels; ++c) {
    const std::size_t cc = static_cast<std::size_t>(c);
    per_class.push_back({{"label", label_name(static_cast<VeracityLabel>(c))},
                         {"precision", report.precision[cc]},
                         {"recall", report.recall[cc]},
                         {"f1", report.f1[cc]}});
  }
  json confusion = json::array();
  for (const auto& row : report.confusion) confusion.push_back(row);
  return json{{"per_class", per_class},
              {"macro_f1", report.macro_f1},
              {"confusion", confusion},
              {"count", report.count}};
}

std::string format_evidence_table(const std::vector<EvidenceRow>& rows,
                                  const RunStamp& stamp) {
  std::string out = stamp_line("evidence sources vs justification", stamp);
  appendf(out, "%-15s", "source");
  for (const char* v : {"R1", "R2", "RL"})
    appendf(out, " %5s-P %5s-R %5s-F1", v, v, v);
  out += '\n';
  for (const auto& r : rows) {
    appendf(out, "%-15s", r.source.c_str());
    for (const RougeScore* s : {&r.rouge1, &r.rouge2, &r.rougeL})
      appendf(out, " %7.2f %7.2f %8.2f", pct(s->precision), pct(s->recall),
              pct(s->f1));
    out += '\n';
  }
  return out;
}

json evidence_table_json(const std::vector<EvidenceRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    auto score = [](const RougeScore& s) {
      return json{{"precision", 100.0 * s.precision},
                  {"recall", 100.0 * s.recall},
                  {"f1", 100.0 * s.f1}};
    };
    arr.push_back({{"source", r.source},
                   {"rouge1", score(r.rouge1)},
                   {"rouge2", score(r.rouge2)},
                   {"rougeL", score(r.rougeL)},
                   {"count", r.count}});
  }
  return arr;
}

std::string format_corpus_stats(const CorpusStats& stats) {
  std::string out;
  appendf(out, "instances: train %zu, val %zu, test %zu (total %zu)\n",
          stats.count_train, stats.count_val, stats.count_test, stats.total());
  appendf(out, "ruling comments: %.2f sentences / %.2f words on average\n",
          stats.mean_sentences_per_ruling, stats.mean_words_per_ruling);
  appendf(out, "justifications:  %.2f sentences / %.2f words on average\n",
          stats.mean_sentences_per_just, stats.mean_words_per_just);
  return out;
}

json corpus_stats_json(const CorpusStats& stats) {
  return json{{"count_train", stats.count_train},
              {"count_val", stats.count_val},
              {"count_test", stats.count_test},
              {"mean_sentences_per_ruling", stats.mean_sentences_per_ruling},
              {"mean_words_per_ruling", stats.mean_words_per_ruling},
              {"mean_sentences_per_just", stats.mean_sentences_per_just},
              {"mean_words_per_just", stats.mean_words_per_just}};
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << content;
}

}  // namespace factex

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

#ifndef FACTEX_REPORT_HPP_
#define FACTEX_REPORT_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "factex/corpus.hpp"
#include "factex/evaluation.hpp"

namespace factex {

// Identifies a run: both hashes are pure functions of the resolved config
// and the input files, so identical runs stamp identical reports.
struct RunStamp {
  std::string run_id;
  std::string config_hash;
};

// ROUGE F1 means per system, percentages with two decimals.
std::string format_rouge_table(const std::vector<RougeRow>& rows,
                               const RunStamp& stamp);
nlohmann::json rouge_table_json(const std::vector<RougeRow>& rows);

std::string format_veracity_report(const VeracityReport& report,
                                   const RunStamp& stamp);
nlohmann::json veracity_report_json(const VeracityReport& report);

std::string format_evidence_table(const std::vector<EvidenceRow>& rows,
                                  const RunStamp& stamp);
nlohmann::json evidence_table_json(const std::vector<EvidenceRow>& rows);

std::string format_corpus_stats(const CorpusStats& stats);
nlohmann::json corpus_stats_json(const CorpusStats& stats);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace factex

#endif  // FACTEX_REPORT_HPP_

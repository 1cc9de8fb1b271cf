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

#ifndef FACTEX_CORPUS_HPP_
#define FACTEX_CORPUS_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace factex {

enum class Split { train, val, test };

std::string split_name(Split s);
std::optional<Split> parse_split(std::string_view name);

// Six-way veracity label with a stable 0-5 integer encoding in this order.
enum class VeracityLabel : int {
  kTrue = 0,
  kFalse = 1,
  kHalfTrue = 2,
  kBarelyTrue = 3,
  kMostlyTrue = 4,
  kPantsOnFire = 5,
};

inline constexpr int kNumLabels = 6;

std::string label_name(VeracityLabel label);
// Accepts the canonical names plus space/hyphen variants ("pants-fire",
// "pants on fire", "BARELY TRUE", ...). Empty optional when unparseable.
std::optional<VeracityLabel> parse_label(std::string_view text);

// One TSV row as read from disk, before any filtering.
struct RawRecord {
  std::string id;
  std::string label;
  std::string claim;
  std::string ruling_comments;
  std::string justification;
  Split split = Split::train;
  std::map<std::string, std::string> extra;  // carried opaque, never modeled
  std::size_t line_no = 0;
};

// One preprocessed claim: ruling sentences with the justification and
// label-leaking sentences removed.
struct Instance {
  std::string id;
  std::string claim;
  std::vector<std::string> sentences;
  std::string justification;
  VeracityLabel label = VeracityLabel::kTrue;
  Split split = Split::train;
};

struct Rejection {
  std::size_t line_no = 0;
  std::string id;
  std::string reason;
};

struct CorpusStats {
  std::size_t count_train = 0;
  std::size_t count_val = 0;
  std::size_t count_test = 0;
  double mean_sentences_per_ruling = 0.0;
  double mean_words_per_ruling = 0.0;
  double mean_sentences_per_just = 0.0;
  double mean_words_per_just = 0.0;

  std::size_t total() const { return count_train + count_val + count_test; }
};

// Column layout of the input TSV. -1 means "the last column of the row".
struct TsvColumns {
  int id = 0;
  int label = 1;
  int claim = 2;
  int ruling = 3;
  int justification = -1;
};

struct LoadResult {
  std::vector<RawRecord> records;
  std::vector<Rejection> rejections;
};

// Reads one tab-separated file; every well-formed line becomes a RawRecord
// tagged with the given split. Malformed lines (wrong column count, empty or
// duplicate id) go to the rejection list, never silently dropped. Throws
// DataError if the file cannot be opened.
LoadResult load_tsv(const std::string& path, Split split,
                    const TsvColumns& columns = TsvColumns());

// Rule-based splitter: a sentence ends at '.', '?' or '!' followed by
// whitespace and then an uppercase letter or digit, unless the token ending
// at a period is a known abbreviation ("U.S.", "Rep.", "approx.", ...).
// Output sentences are trimmed and never empty.
std::vector<std::string> split_sentences(std::string_view text);

// Lowercased, whitespace-collapsed form used for sentence matching.
std::string normalize_for_match(std::string_view text);

// The six label strings plus hyphen/space variants; config-overridable.
std::vector<std::string> default_leak_phrases();

using PreprocessResult = std::variant<Instance, Rejection>;

// Applies the corpus filters to one record: sentences matching a
// justification sentence are removed (a trailing contiguous match is trimmed
// first), then sentences containing any leak phrase (case-insensitive
// substring), and the record is rejected if fewer than three sentences
// remain or its label does not parse.
PreprocessResult preprocess(const RawRecord& record,
                            const std::vector<std::string>& leak_phrases);

// Re-applies the sentence-level filters to an already-built instance.
// preprocess output is a fixed point of this.
Instance refilter(const Instance& instance,
                  const std::vector<std::string>& leak_phrases);

// Split counts and corpus-wide means; a word is a ROUGE token.
// Throws DataError on an empty list.
CorpusStats corpus_stats(const std::vector<Instance>& instances);

// Canonical intermediate format: one JSON object per line, stable field
// order, UTF-8.
void write_instances_jsonl(const std::string& path,
                           const std::vector<Instance>& instances);
std::vector<Instance> read_instances_jsonl(const std::string& path);

std::string instance_to_json_line(const Instance& instance);
Instance instance_from_json_line(const std::string& line);

void write_rejections_tsv(const std::string& path,
                          const std::vector<Rejection>& rejections);

}  // namespace factex

#endif  // FACTEX_CORPUS_HPP_

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

#include "factex/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "factex/errors.hpp"
#include "factex/rouge.hpp"

namespace factex {

namespace {

using nlohmann::json;

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

inline char to_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](char c) { return to_lower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Abbreviations whose trailing period does not end a sentence.
const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> kAbbrev = {
      "u.s.",    "u.k.",  "u.n.",  "d.c.",  "a.m.", "p.m.",  "rep.",
      "reps.",   "sen.",  "sens.", "gov.",  "gen.", "col.",  "sgt.",
      "lt.",     "mr.",   "mrs.",  "ms.",   "dr.",  "jr.",   "sr.",
      "st.",     "vs.",   "etc.",  "inc.",  "corp.", "co.",  "approx.",
      "no.",     "nos.",  "jan.",  "feb.",  "mar.", "apr.",  "jun.",
      "jul.",    "aug.",  "sep.",  "sept.", "oct.", "nov.",  "dec.",
  };
  return kAbbrev;
}

bool is_guarded_abbreviation(std::string_view text, std::size_t period_pos) {
  std::size_t start = period_pos;
  while (start > 0 && !is_space(static_cast<unsigned char>(text[start - 1])))
    --start;
  std::string token = lowercase(text.substr(start, period_pos - start + 1));
  return abbreviations().count(token) > 0;
}

}  // namespace

std::string split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

std::optional<Split> parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "val" || name == "validation" || name == "valid")
    return Split::val;
  if (name == "test") return Split::test;
  return std::nullopt;
}

std::string label_name(VeracityLabel label) {
  switch (label) {
    case VeracityLabel::kTrue: return "true";
    case VeracityLabel::kFalse: return "false";
    case VeracityLabel::kHalfTrue: return "half-true";
    case VeracityLabel::kBarelyTrue: return "barely-true";
    case VeracityLabel::kMostlyTrue: return "mostly-true";
    case VeracityLabel::kPantsOnFire: return "pants-on-fire";
  }
  return "true";
}

std::optional<VeracityLabel> parse_label(std::string_view text) {
  std::string norm = lowercase(trim(text));
  std::replace(norm.begin(), norm.end(), ' ', '-');
  if (norm == "true") return VeracityLabel::kTrue;
  if (norm == "false") return VeracityLabel::kFalse;
  if (norm == "half-true") return VeracityLabel::kHalfTrue;
  if (norm == "barely-true") return VeracityLabel::kBarelyTrue;
  if (norm == "mostly-true") return VeracityLabel::kMostlyTrue;
  if (norm == "pants-on-fire" || norm == "pants-fire")
    return VeracityLabel::kPantsOnFire;
  return std::nullopt;
}

LoadResult load_tsv(const std::string& path, Split split,
                    const TsvColumns& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open TSV file: " + path);

  LoadResult result;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  const int max_explicit = std::max(
      {columns.id, columns.label, columns.claim, columns.ruling,
       columns.justification});

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }

    const int ncols = static_cast<int>(fields.size());
    const int just_col =
        columns.justification < 0 ? ncols - 1 : columns.justification;
    if (max_explicit >= ncols || just_col >= ncols || just_col < 0 ||
        just_col == columns.id || just_col == columns.label ||
        just_col == columns.claim || just_col == columns.ruling) {
      result.rejections.push_back({line_no, "", "bad_columns"});
      continue;
    }

    RawRecord rec;
    rec.line_no = line_no;
    rec.split = split;
    rec.id = fields[columns.id];
    rec.label = fields[columns.label];
    rec.claim = fields[columns.claim];
    rec.ruling_comments = fields[columns.ruling];
    rec.justification = fields[just_col];
    for (int c = 0; c < ncols; ++c) {
      if (c == columns.id || c == columns.label || c == columns.claim ||
          c == columns.ruling || c == just_col)
        continue;
      rec.extra["col" + std::to_string(c)] = fields[c];
    }

    if (rec.id.empty()) {
      result.rejections.push_back({line_no, "", "empty_id"});
      continue;
    }
    if (!seen_ids.insert(rec.id).second) {
      result.rejections.push_back({line_no, rec.id, "duplicate_id"});
      continue;
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::size_t begin = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;

    std::size_t next = i + 1;
    if (next >= text.size() ||
        !is_space(static_cast<unsigned char>(text[next])))
      continue;
    while (next < text.size() &&
           is_space(static_cast<unsigned char>(text[next])))
      ++next;
    if (next >= text.size()) continue;
    const char follower = text[next];
    const bool starts_sentence =
        (follower >= 'A' && follower <= 'Z') ||
        (follower >= '0' && follower <= '9');
    if (!starts_sentence) continue;
    if (c == '.' && is_guarded_abbreviation(text, i)) continue;

    std::string_view piece = trim(text.substr(begin, i + 1 - begin));
    if (!piece.empty()) sentences.emplace_back(piece);
    begin = next;
  }
  std::string_view tail = trim(text.substr(begin));
  if (!tail.empty()) sentences.emplace_back(tail);
  return sentences;
}

std::string normalize_for_match(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (is_space(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(to_lower(c));
  }
  return out;
}

std::vector<std::string> default_leak_phrases() {
  return {
      "true",          "false",        "half-true",   "half true",
      "barely-true",   "barely true",  "mostly-true", "mostly true",
      "pants-on-fire", "pants on fire", "pants-fire",  "pants fire",
  };
}

namespace {

bool contains_leak(const std::string& sentence,
                   const std::vector<std::string>& leak_lower) {
  const std::string lower = lowercase(sentence);
  for (const auto& phrase : leak_lower)
    if (!phrase.empty() && lower.find(phrase) != std::string::npos)
      return true;
  return false;
}

std::vector<std::string> filter_sentences(
    std::vector<std::string> sentences,
    const std::vector<std::string>& justification_sentences,
    const std::vector<std::string>& leak_lower) {
  std::vector<std::string> just_norm;
  just_norm.reserve(justification_sentences.size());
  for (const auto& s : justification_sentences)
    just_norm.push_back(normalize_for_match(s));

  // The justification sits at the end of the ruling comments when present;
  // trim a trailing contiguous match before falling back to per-sentence
  // matching anywhere.
  const std::size_t nj = just_norm.size();
  if (nj > 0 && sentences.size() >= nj) {
    bool suffix_match = true;
    for (std::size_t i = 0; i < nj; ++i) {
      if (normalize_for_match(sentences[sentences.size() - nj + i]) !=
          just_norm[i]) {
        suffix_match = false;
        break;
      }
    }
    if (suffix_match) sentences.resize(sentences.size() - nj);
  }

  std::unordered_set<std::string> just_set(just_norm.begin(), just_norm.end());
  std::vector<std::string> kept;
  kept.reserve(sentences.size());
  for (auto& s : sentences) {
    if (just_set.count(normalize_for_match(s))) continue;
    if (contains_leak(s, leak_lower)) continue;
    kept.push_back(std::move(s));
  }
  return kept;
}

std::vector<std::string> lowercase_all(const std::vector<std::string>& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(lowercase(s));
  return out;
}

}  // namespace

PreprocessResult preprocess(const RawRecord& record,
                            const std::vector<std::string>& leak_phrases) {
  auto label = parse_label(record.label);
  if (!label) return Rejection{record.line_no, record.id, "bad_label"};

  const auto leak_lower = lowercase_all(leak_phrases);
  auto kept = filter_sentences(split_sentences(record.ruling_comments),
                               split_sentences(record.justification),
                               leak_lower);
  if (kept.size() < 3) return Rejection{record.line_no, record.id, "too_short"};

  Instance inst;
  inst.id = record.id;
  inst.claim = record.claim;
  inst.sentences = std::move(kept);
  inst.justification = record.justification;
  inst.label = *label;
  inst.split = record.split;
  return inst;
}

Instance refilter(const Instance& instance,
                  const std::vector<std::string>& leak_phrases) {
  Instance out = instance;
  out.sentences = filter_sentences(instance.sentences,
                                   split_sentences(instance.justification),
                                   lowercase_all(leak_phrases));
  return out;
}

CorpusStats corpus_stats(const std::vector<Instance>& instances) {
  if (instances.empty()) throw DataError("corpus_stats: empty instance list");
  CorpusStats st;
  double sent_r = 0, word_r = 0, sent_j = 0, word_j = 0;
  for (const auto& inst : instances) {
    switch (inst.split) {
      case Split::train: ++st.count_train; break;
      case Split::val: ++st.count_val; break;
      case Split::test: ++st.count_test; break;
    }
    sent_r += static_cast<double>(inst.sentences.size());
    for (const auto& s : inst.sentences)
      word_r += static_cast<double>(tokenize_for_rouge(s).size());
    sent_j += static_cast<double>(split_sentences(inst.justification).size());
    word_j += static_cast<double>(tokenize_for_rouge(inst.justification).size());
  }
  const double n = static_cast<double>(instances.size());
  st.mean_sentences_per_ruling = sent_r / n;
  st.mean_words_per_ruling = word_r / n;
  st.mean_sentences_per_just = sent_j / n;
  st.mean_words_per_just = word_j / n;
  return st;
}

std::string instance_to_json_line(const Instance& instance) {
  json j;
  j["claim"] = instance.claim;
  j["id"] = instance.id;
  j["justification"] = instance.justification;
  j["label"] = label_name(instance.label);
  j["sentences"] = instance.sentences;
  j["split"] = split_name(instance.split);
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

Instance instance_from_json_line(const std::string& line) {
  Instance inst;
  try {
    json j = json::parse(line);
    inst.claim = j.at("claim").get<std::string>();
    inst.id = j.at("id").get<std::string>();
    inst.justification = j.at("justification").get<std::string>();
    auto label = parse_label(j.at("label").get<std::string>());
    if (!label) throw DataError("instance with unparseable label: " + inst.id);
    inst.label = *label;
    inst.sentences = j.at("sentences").get<std::vector<std::string>>();
    auto split = parse_split(j.at("split").get<std::string>());
    if (!split) throw DataError("instance with unparseable split: " + inst.id);
    inst.split = *split;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed instance line: ") + e.what());
  }
  return inst;
}

void write_instances_jsonl(const std::string& path,
                           const std::vector<Instance>& instances) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write instance file: " + path);
  for (const auto& inst : instances) out << instance_to_json_line(inst) << '\n';
}

std::vector<Instance> read_instances_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open instance file: " + path);
  std::vector<Instance> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    out.push_back(instance_from_json_line(line));
  }
  return out;
}

void write_rejections_tsv(const std::string& path,
                          const std::vector<Rejection>& rejections) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write rejection report: " + path);
  out << "line\treason\tid\n";
  for (const auto& r : rejections)
    out << r.line_no << '\t' << r.reason << '\t' << r.id << '\n';
}

}  // namespace factex

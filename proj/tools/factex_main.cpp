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

// Command-line front end: preprocess / oracle / train / evaluate.
// Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "factex/corpus.hpp"
#include "factex/errors.hpp"
#include "factex/evaluation.hpp"
#include "factex/hash.hpp"
#include "factex/model.hpp"
#include "factex/oracle.hpp"
#include "factex/parallel.hpp"
#include "factex/report.hpp"
#include "factex/training.hpp"

namespace {

using factex::DataError;
using factex::UsageError;
using nlohmann::json;

class ManifestWriter {
 public:
  ManifestWriter(std::string subcommand, json config)
      : subcommand_(std::move(subcommand)),
        config_(std::move(config)),
        started_(std::chrono::steady_clock::now()) {
    config_hash_ = factex::hex64(factex::fnv1a64(config_.dump()));
  }

  void add_input(const std::string& path) {
    inputs_[path] = factex::hex64(factex::hash_file(path));
  }
  void add_output(const std::string& path) { outputs_.push_back(path); }

  // Pure function of config and input hashes, so identical runs carry
  // identical ids in their reports.
  std::string run_id() const {
    std::string blob = config_hash_;
    for (const auto& [path, hash] : inputs_) blob += hash;
    return factex::hex64(factex::fnv1a64(blob));
  }
  std::string config_hash() const { return config_hash_; }
  factex::RunStamp stamp() const { return {run_id(), config_hash_}; }

  void write(const std::string& path) const {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      started_)
            .count();
    json m;
    m["config"] = config_;
    m["config_hash"] = config_hash_;
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    m["run_id"] = run_id();
    m["subcommand"] = subcommand_;
    m["timing_seconds"] = seconds;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write manifest: " + path);
    out << m.dump(2) << '\n';
  }

 private:
  std::string subcommand_;
  json config_;
  std::string config_hash_;
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point started_;
};

std::vector<std::string> read_phrase_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open leak-phrase file: " + path);
  std::vector<std::string> phrases;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) phrases.push_back(line);
  }
  return phrases;
}

// ---- preprocess ---------------------------------------------------------

struct PreprocessArgs {
  std::string train_path, val_path, test_path, out_dir;
  std::string leak_file;
  int col_id = 0, col_label = 1, col_claim = 2, col_ruling = 3;
  int col_justification = -1;
  int jobs = 0;
};

int run_preprocess(const PreprocessArgs& a) {
  factex::set_max_jobs(a.jobs);
  if (a.out_dir.empty()) throw UsageError("preprocess: --out-dir is required");
  if (a.train_path.empty() && a.val_path.empty() && a.test_path.empty())
    throw UsageError("preprocess: provide at least one of --train/--val/--test");

  const auto leak = a.leak_file.empty() ? factex::default_leak_phrases()
                                        : read_phrase_file(a.leak_file);

  json config{{"col_id", a.col_id},
              {"col_label", a.col_label},
              {"col_claim", a.col_claim},
              {"col_ruling", a.col_ruling},
              {"col_justification", a.col_justification},
              {"leak_phrases", leak}};
  ManifestWriter manifest("preprocess", config);

  struct SplitJob {
    std::string path;
    factex::Split split;
  };
  std::vector<SplitJob> jobs;
  if (!a.train_path.empty()) jobs.push_back({a.train_path, factex::Split::train});
  if (!a.val_path.empty()) jobs.push_back({a.val_path, factex::Split::val});
  if (!a.test_path.empty()) jobs.push_back({a.test_path, factex::Split::test});
  for (const auto& job : jobs) manifest.add_input(job.path);  // throws first
  if (!a.leak_file.empty()) manifest.add_input(a.leak_file);

  std::filesystem::create_directories(a.out_dir);
  factex::TsvColumns columns{a.col_id, a.col_label, a.col_claim, a.col_ruling,
                             a.col_justification};

  std::vector<factex::Instance> all_instances;
  for (const auto& job : jobs) {
    auto loaded = factex::load_tsv(job.path, job.split, columns);

    std::vector<factex::PreprocessResult> results(loaded.records.size());
    factex::parallel_for(loaded.records.size(), [&](std::size_t i) {
      results[i] = factex::preprocess(loaded.records[i], leak);
    });

    std::vector<factex::Instance> instances;
    auto rejections = std::move(loaded.rejections);
    for (auto& r : results) {
      if (std::holds_alternative<factex::Instance>(r))
        instances.push_back(std::move(std::get<factex::Instance>(r)));
      else
        rejections.push_back(std::get<factex::Rejection>(r));
    }

    const std::string name = factex::split_name(job.split);
    const std::string inst_path = a.out_dir + "/instances." + name + ".jsonl";
    const std::string rej_path = a.out_dir + "/rejections." + name + ".tsv";
    factex::write_instances_jsonl(inst_path, instances);
    factex::write_rejections_tsv(rej_path, rejections);
    manifest.add_output(inst_path);
    manifest.add_output(rej_path);
    std::cout << name << ": " << instances.size() << " instances, "
              << rejections.size() << " rejections\n";
    all_instances.insert(all_instances.end(),
                         std::make_move_iterator(instances.begin()),
                         std::make_move_iterator(instances.end()));
  }

  if (all_instances.empty()) throw DataError("preprocess: no instances kept");
  const auto stats = factex::corpus_stats(all_instances);
  const std::string stats_text = factex::format_corpus_stats(stats);
  std::cout << stats_text;
  const std::string stats_path = a.out_dir + "/stats.json";
  json stats_json = factex::corpus_stats_json(stats);
  stats_json["run_id"] = manifest.run_id();
  stats_json["config_hash"] = manifest.config_hash();
  std::ofstream stats_out(stats_path, std::ios::binary);
  stats_out << stats_json.dump(2) << '\n';
  manifest.add_output(stats_path);

  manifest.write(a.out_dir + "/manifest.json");
  return 0;
}

// ---- oracle -------------------------------------------------------------

struct OracleArgs {
  std::string instances_path, out_path;
  int k = factex::kDefaultOracleK;
  bool brute_force = false;
  bool independent_topk = false;
  int jobs = 0;
};

int run_oracle(const OracleArgs& a) {
  factex::set_max_jobs(a.jobs);
  json config{{"k", a.k},
              {"brute_force", a.brute_force},
              {"independent_topk", a.independent_topk}};
  ManifestWriter manifest("oracle", config);
  manifest.add_input(a.instances_path);

  const auto instances = factex::read_instances_jsonl(a.instances_path);
  if (instances.empty()) throw DataError("oracle: empty instance file");

  const auto selections = factex::batch_greedy_oracle(instances, a.k);
  factex::write_oracles_jsonl(a.out_path, instances, selections);
  manifest.add_output(a.out_path);
  double mean = 0.0;
  for (const auto& s : selections) mean += s.rouge2_f1;
  std::cout << "greedy oracle over " << instances.size()
            << " instances, mean rouge2 f1 "
            << mean / static_cast<double>(instances.size()) << "\n";

  if (a.brute_force) {
    std::vector<factex::OracleSelection> brute(instances.size());
    factex::parallel_for(instances.size(), [&](std::size_t i) {
      brute[i] = factex::brute_force_best(instances[i].sentences,
                                          instances[i].justification, a.k);
    });
    const std::string path = a.out_path + ".brute";
    factex::write_oracles_jsonl(path, instances, brute);
    manifest.add_output(path);
  }
  if (a.independent_topk) {
    std::vector<factex::OracleSelection> topk(instances.size());
    factex::parallel_for(instances.size(), [&](std::size_t i) {
      topk[i] = factex::independent_top_k(instances[i].sentences,
                                          instances[i].justification, a.k);
    });
    const std::string path = a.out_path + ".topk";
    factex::write_oracles_jsonl(path, instances, topk);
    manifest.add_output(path);
  }

  manifest.write(a.out_path + ".manifest.json");
  return 0;
}

// ---- train --------------------------------------------------------------

std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto trim = [](const std::string& s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t");
      return s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(line_no) +
                       ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError("config line " + std::to_string(line_no) +
                                      ": empty key");
    kv[key] = value;
  }
  return kv;
}

factex::TrainConfig config_from_kv(const std::map<std::string, std::string>& kv) {
  factex::TrainConfig cfg;
  bool dropout_given = false;
  for (const auto& [key, value] : kv) {
    try {
      if (key == "model_kind") {
        auto kind = factex::parse_model_kind(value);
        if (!kind) throw UsageError("train: unknown model_kind: " + value);
        cfg.model.kind = *kind;
      } else if (key == "veracity_input") {
        auto vi = factex::parse_veracity_input(value);
        if (!vi) throw UsageError("train: unknown veracity_input: " + value);
        cfg.model.veracity_input = *vi;
      } else if (key == "lr") cfg.lr = std::stod(value);
      else if (key == "batch_size") cfg.batch_size = std::stoi(value);
      else if (key == "max_epochs") cfg.max_epochs = std::stoi(value);
      else if (key == "eval_every_steps") cfg.eval_every_steps = std::stoi(value);
      else if (key == "warmup_steps") cfg.warmup_steps = std::stoi(value);
      else if (key == "warmup_frac") cfg.warmup_frac = std::stod(value);
      else if (key == "dropout") { cfg.model.encoder.dropout = std::stod(value); dropout_given = true; }
      else if (key == "gamma") cfg.loss_weights.gamma = std::stod(value);
      else if (key == "eta") cfg.loss_weights.eta = std::stod(value);
      else if (key == "weight_decay") cfg.weight_decay = std::stod(value);
      else if (key == "clip_norm") cfg.clip_norm = std::stod(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "layers") cfg.model.encoder.layers = std::stoi(value);
      else if (key == "model_dim") cfg.model.encoder.model_dim = std::stoi(value);
      else if (key == "heads") cfg.model.encoder.heads = std::stoi(value);
      else if (key == "ff_dim") cfg.model.encoder.ff_dim = std::stoi(value);
      else if (key == "window") cfg.model.encoder.window = std::stoi(value);
      else if (key == "overlap") cfg.model.encoder.overlap = std::stoi(value);
      else if (key == "max_len") cfg.model.encoder.max_len = std::stoi(value);
      else if (key == "min_freq") cfg.min_freq = std::stoi(value);
      else if (key == "oracle_k") cfg.oracle_k = std::stoi(value);
      else if (key == "top_n") cfg.top_n = std::stoi(value);
      else if (key == "hidden_explain") cfg.model.hidden_explain = std::stoi(value);
      else if (key == "hidden_veracity") cfg.model.hidden_veracity = std::stoi(value);
      else if (key == "hidden_joint") cfg.model.hidden_joint = std::stoi(value);
      else throw UsageError("train: unknown config key: " + key);
    } catch (const std::invalid_argument&) {
      throw UsageError("train: bad value for " + key + ": " + value);
    } catch (const std::out_of_range&) {
      throw UsageError("train: bad value for " + key + ": " + value);
    }
  }
  // Single-task models use 0.1 dropout, the joint model 0.15.
  if (!dropout_given)
    cfg.model.encoder.dropout =
        cfg.model.kind == factex::ModelKind::joint ? 0.15 : 0.1;
  return cfg;
}

json train_config_to_json(const factex::TrainConfig& cfg) {
  return json{
      {"model_kind", factex::model_kind_name(cfg.model.kind)},
      {"veracity_input", factex::veracity_input_name(cfg.model.veracity_input)},
      {"lr", cfg.lr},
      {"batch_size", cfg.batch_size},
      {"max_epochs", cfg.max_epochs},
      {"eval_every_steps", cfg.eval_every_steps},
      {"warmup_steps", cfg.warmup_steps},
      {"warmup_frac", cfg.warmup_frac},
      {"dropout", cfg.model.encoder.dropout},
      {"gamma", cfg.loss_weights.gamma},
      {"eta", cfg.loss_weights.eta},
      {"weight_decay", cfg.weight_decay},
      {"clip_norm", cfg.clip_norm},
      {"seed", cfg.seed},
      {"layers", cfg.model.encoder.layers},
      {"model_dim", cfg.model.encoder.model_dim},
      {"heads", cfg.model.encoder.heads},
      {"ff_dim", cfg.model.encoder.ff_dim},
      {"window", cfg.model.encoder.window},
      {"overlap", cfg.model.encoder.overlap},
      {"max_len", cfg.model.encoder.max_len},
      {"min_freq", cfg.min_freq},
      {"oracle_k", cfg.oracle_k},
      {"top_n", cfg.top_n},
      {"hidden_explain", cfg.model.hidden_explain},
      {"hidden_veracity", cfg.model.hidden_veracity},
      {"hidden_joint", cfg.model.hidden_joint},
  };
}

struct TrainArgs {
  std::string config_path, train_path, val_path, out_dir;
  std::string model_kind_flag;
  long long seed_flag = -1;
  int jobs = 0;
};

int run_train(const TrainArgs& a) {
  factex::set_max_jobs(a.jobs);
  if (a.out_dir.empty()) throw UsageError("train: --out-dir is required");

  std::map<std::string, std::string> kv;
  if (!a.config_path.empty()) kv = parse_kv_file(a.config_path);
  if (!a.model_kind_flag.empty()) kv["model_kind"] = a.model_kind_flag;
  if (a.seed_flag >= 0) kv["seed"] = std::to_string(a.seed_flag);
  factex::TrainConfig cfg = config_from_kv(kv);
  cfg.out_dir = a.out_dir;
  cfg.validate();

  ManifestWriter manifest("train", train_config_to_json(cfg));
  manifest.add_input(a.train_path);
  manifest.add_input(a.val_path);
  if (!a.config_path.empty()) manifest.add_input(a.config_path);

  const auto train_split = factex::read_instances_jsonl(a.train_path);
  const auto val_split = factex::read_instances_jsonl(a.val_path);

  const auto result = factex::train_model(cfg, train_split, val_split);

  const auto& best = result.history.points[result.history.best_index];
  std::cout << "best checkpoint: " << result.best_checkpoint << " (step "
            << best.step << ", val metric " << best.val_metric << ")\n";
  const std::string best_path = a.out_dir + "/best.json";
  json best_json{{"checkpoint", result.best_checkpoint},
                 {"step", best.step},
                 {"val_metric", best.val_metric}};
  std::ofstream best_out(best_path, std::ios::binary);
  best_out << best_json.dump(2) << '\n';
  manifest.add_output(best_path);
  manifest.add_output(a.out_dir + "/history.jsonl");
  manifest.write(a.out_dir + "/manifest.json");
  return 0;
}

// ---- evaluate -----------------------------------------------------------

struct EvaluateArgs {
  std::string instances_path, checkpoint_path, report_path, oracle_path;
  std::string split_name = "test";
  std::string expect_kind;
  bool baselines_only = false;
  int k = factex::kDefaultOracleK;
  int top_n = 4;
  int jobs = 0;
};

int run_evaluate(const EvaluateArgs& a) {
  factex::set_max_jobs(a.jobs);
  if (a.report_path.empty()) throw UsageError("evaluate: --report is required");
  if (!a.baselines_only && a.checkpoint_path.empty())
    throw UsageError("evaluate: provide --checkpoint or --baselines-only");

  json config{{"baselines_only", a.baselines_only},
              {"k", a.k},
              {"top_n", a.top_n},
              {"split", a.split_name}};
  ManifestWriter manifest("evaluate", config);
  manifest.add_input(a.instances_path);
  if (!a.checkpoint_path.empty()) manifest.add_input(a.checkpoint_path);
  if (!a.oracle_path.empty()) manifest.add_input(a.oracle_path);

  const auto instances = factex::read_instances_jsonl(a.instances_path);
  if (instances.empty()) throw DataError("evaluate: empty instance file");

  std::string text;
  json report;
  report["split"] = a.split_name;
  report["run_id"] = manifest.run_id();
  report["config_hash"] = manifest.config_hash();

  if (a.baselines_only) {
    const auto oracles =
        a.oracle_path.empty()
            ? factex::batch_greedy_oracle(instances, a.k)
            : factex::read_oracles_jsonl(a.oracle_path, instances);

    std::vector<factex::ExplanationResult> lead(instances.size()),
        oracle_res(instances.size());
    factex::parallel_for(instances.size(), [&](std::size_t i) {
      const auto sel = factex::lead_k(instances[i].sentences,
                                      instances[i].justification, a.k);
      lead[i] = factex::score_explanation(instances[i], sel.indices);
      oracle_res[i] =
          factex::score_explanation(instances[i], oracles[i].indices);
    });
    std::vector<factex::RougeRow> rows{
        factex::mean_rouge_row("lead-" + std::to_string(a.k), lead),
        factex::mean_rouge_row("oracle", oracle_res)};
    text += factex::format_rouge_table(rows, manifest.stamp());
    report["explanation"] = factex::rouge_table_json(rows);

    const auto evidence = factex::evidence_source_report(instances, oracles);
    text += "\n" + factex::format_evidence_table(evidence, manifest.stamp());
    report["evidence_sources"] = factex::evidence_table_json(evidence);
  } else {
    const auto ck = factex::load_checkpoint(a.checkpoint_path);
    if (!a.expect_kind.empty() &&
        a.expect_kind != factex::model_kind_name(ck.config.kind))
      throw UsageError("evaluate: checkpoint is a " +
                       factex::model_kind_name(ck.config.kind) +
                       " model, expected " + a.expect_kind);

    if (ck.config.kind != factex::ModelKind::veracity) {
      const auto results = factex::explain_split(instances, ck.config,
                                                 ck.params, ck.vocab, a.top_n);
      const std::string name = ck.config.kind == factex::ModelKind::joint
                                   ? "explain-mt"
                                   : "explain-extractive";
      std::vector<factex::RougeRow> rows{factex::mean_rouge_row(name, results)};
      text += factex::format_rouge_table(rows, manifest.stamp());
      report["explanation"] = factex::rouge_table_json(rows);
    }
    if (ck.config.kind != factex::ModelKind::explain) {
      std::vector<factex::OracleSelection> oracles;
      const factex::VeracityInput vi = ck.config.veracity_input;
      if (ck.config.kind == factex::ModelKind::veracity &&
          vi == factex::VeracityInput::oracles) {
        oracles = a.oracle_path.empty()
                      ? factex::batch_greedy_oracle(instances, a.k)
                      : factex::read_oracles_jsonl(a.oracle_path, instances);
      }
      const auto preds = factex::predict_veracity_split(
          instances, ck.config, ck.params, ck.vocab,
          oracles.empty() ? nullptr : &oracles);
      std::vector<int> golds;
      golds.reserve(instances.size());
      for (const auto& inst : instances)
        golds.push_back(static_cast<int>(inst.label));
      const auto rep = factex::macro_f1_report(preds, golds);
      if (!text.empty()) text += "\n";
      text += factex::format_veracity_report(rep, manifest.stamp());
      report["veracity"] = factex::veracity_report_json(rep);
    }
  }

  factex::write_text_file(a.report_path + ".txt", text);
  std::ofstream json_out(a.report_path + ".json", std::ios::binary);
  if (!json_out) throw DataError("cannot write report: " + a.report_path);
  json_out << report.dump(2) << '\n';
  manifest.add_output(a.report_path + ".txt");
  manifest.add_output(a.report_path + ".json");
  manifest.write(a.report_path + ".manifest.json");
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fact-checking explanation pipeline"};
  app.require_subcommand(1);

  PreprocessArgs pp;
  auto* pre = app.add_subcommand(
      "preprocess", "ingest TSV splits into canonical instance files");
  pre->add_option("--train", pp.train_path, "training split TSV");
  pre->add_option("--val", pp.val_path, "validation split TSV");
  pre->add_option("--test", pp.test_path, "test split TSV");
  pre->add_option("--out-dir", pp.out_dir, "output directory")->required();
  pre->add_option("--leak-phrases", pp.leak_file,
                  "file with one label-indicative phrase per line");
  pre->add_option("--col-id", pp.col_id, "id column index");
  pre->add_option("--col-label", pp.col_label, "label column index");
  pre->add_option("--col-claim", pp.col_claim, "claim column index");
  pre->add_option("--col-ruling", pp.col_ruling, "ruling comments column");
  pre->add_option("--col-justification", pp.col_justification,
                  "justification column (-1 = last)");
  pre->add_option("--jobs", pp.jobs, "worker cap (0 = hardware default)");

  OracleArgs oa;
  auto* orc = app.add_subcommand("oracle",
                                 "greedy extractive oracles per instance");
  orc->add_option("--instances", oa.instances_path, "instance JSONL")
      ->required();
  orc->add_option("--out", oa.out_path, "oracle JSONL output")->required();
  orc->add_option("--k", oa.k, "max sentences per oracle");
  orc->add_flag("--brute-force", oa.brute_force,
                "also emit exhaustive-best selections (N <= 16)");
  orc->add_flag("--independent-topk", oa.independent_topk,
                "also emit non-cumulative top-k selections");
  orc->add_option("--jobs", oa.jobs, "worker cap (0 = hardware default)");

  TrainArgs ta;
  auto* tr = app.add_subcommand("train", "train a model");
  tr->add_option("--config", ta.config_path, "key = value config file");
  tr->add_option("--train", ta.train_path, "training instances JSONL")
      ->required();
  tr->add_option("--val", ta.val_path, "validation instances JSONL")
      ->required();
  tr->add_option("--out-dir", ta.out_dir, "checkpoint directory")->required();
  tr->add_option("--model-kind", ta.model_kind_flag,
                 "explain | veracity | joint (overrides config)");
  tr->add_option("--seed", ta.seed_flag, "seed override");
  tr->add_option("--jobs", ta.jobs, "worker cap (0 = hardware default)");

  EvaluateArgs ea;
  auto* ev = app.add_subcommand("evaluate", "score a split");
  ev->add_option("--instances", ea.instances_path, "instance JSONL")
      ->required();
  ev->add_option("--checkpoint", ea.checkpoint_path, "model checkpoint");
  ev->add_option("--report", ea.report_path,
                 "report base path (.txt/.json added)")
      ->required();
  ev->add_option("--oracle-file", ea.oracle_path,
                 "reuse a precomputed oracle JSONL");
  ev->add_option("--split-name", ea.split_name, "name stamped into reports");
  ev->add_option("--model-kind", ea.expect_kind,
                 "fail unless the checkpoint has this kind");
  ev->add_flag("--baselines-only", ea.baselines_only,
               "lead-k + oracle rows and evidence table, no model");
  ev->add_option("--k", ea.k, "oracle/lead size");
  ev->add_option("--top-n", ea.top_n, "sentences selected at inference");
  ev->add_option("--jobs", ea.jobs, "worker cap (0 = hardware default)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (pre->parsed()) return run_preprocess(pp);
    if (orc->parsed()) return run_oracle(oa);
    if (tr->parsed()) return run_train(ta);
    if (ev->parsed()) return run_evaluate(ea);
    throw UsageError("no subcommand");
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const factex::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

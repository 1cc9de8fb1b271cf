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

// Micro-benchmark comparing the serial reference kernels against the
// OpenMP-parallel paths on synthetic data: matrix products, batch oracle
// construction, and batch ROUGE scoring.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "factex/corpus.hpp"
#include "factex/oracle.hpp"
#include "factex/parallel.hpp"
#include "factex/rng.hpp"
#include "factex/rouge.hpp"
#include "factex/tensor.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename Fn>
double time_best_of(int reps, const Fn& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

std::vector<factex::Instance> synthetic_corpus(int count, factex::Rng& rng) {
  const std::vector<std::string> words = {
      "tax",    "budget", "senate",  "vote",   "house",  "report",
      "claim",  "rate",   "percent", "growth", "state",  "federal",
      "county", "health", "school",  "plan",   "year",   "deficit",
      "jobs",   "energy", "water",   "law",    "bill",   "audit"};
  auto sentence = [&](int len) {
    std::string s;
    for (int i = 0; i < len; ++i) {
      if (i) s += ' ';
      s += words[rng.below(words.size())];
    }
    s += '.';
    return s;
  };
  std::vector<factex::Instance> out;
  for (int i = 0; i < count; ++i) {
    factex::Instance inst;
    inst.id = "bench-" + std::to_string(i);
    inst.claim = sentence(8);
    const int n = 12 + static_cast<int>(rng.below(20));
    for (int s = 0; s < n; ++s)
      inst.sentences.push_back(sentence(8 + static_cast<int>(rng.below(10))));
    inst.justification = inst.sentences[2] + " " + inst.sentences[5];
    inst.label = factex::VeracityLabel::kHalfTrue;
    out.push_back(std::move(inst));
  }
  return out;
}

void print_row(const char* name, double serial, double parallel) {
  std::printf("%-28s %10.4fs %10.4fs %8.2fx\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP kernel benchmark"};
  int dim = 384;
  int instances = 400;
  int reps = 3;
  int jobs = 0;
  app.add_option("--dim", dim, "square matmul dimension");
  app.add_option("--instances", instances, "synthetic corpus size");
  app.add_option("--reps", reps, "repetitions (best-of)");
  app.add_option("--jobs", jobs, "worker cap (0 = hardware default)");
  CLI11_PARSE(app, argc, argv);

  factex::set_max_jobs(jobs);
  std::printf("threads: %d\n", factex::max_jobs());
  std::printf("%-28s %11s %11s %9s\n", "kernel", "serial", "openmp",
              "speedup");

  factex::Rng rng(7);
  {
    const std::size_t n = static_cast<std::size_t>(dim);
    factex::Tensor a(n, n), b(n, n), c(n, n);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = rng.normal(0, 1);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = rng.normal(0, 1);
    const double ts = time_best_of(reps, [&] { factex::matmul_serial(a, b, c); });
    const double tp = time_best_of(reps, [&] { factex::matmul(a, b, c); });
    print_row("matmul", ts, tp);
  }

  const auto corpus = synthetic_corpus(instances, rng);
  {
    const double ts = time_best_of(
        reps, [&] { factex::batch_greedy_oracle_serial(corpus, 4); });
    const double tp =
        time_best_of(reps, [&] { factex::batch_greedy_oracle(corpus, 4); });
    print_row("greedy oracle (batch)", ts, tp);
  }
  {
    std::vector<double> scores(corpus.size());
    auto score_all = [&](auto&& loop) {
      loop(corpus.size(), [&](std::size_t i) {
        const auto& inst = corpus[i];
        std::vector<int> all(inst.sentences.size());
        for (std::size_t k = 0; k < all.size(); ++k)
          all[k] = static_cast<int>(k);
        const auto cand = factex::tokenize_for_rouge(
            factex::render_selection(inst.sentences, all));
        const auto ref = factex::tokenize_for_rouge(inst.justification);
        scores[i] = factex::rouge_n(cand, ref, 2).f1 +
                    factex::rouge_l(cand, ref).f1;
      });
    };
    const double ts = time_best_of(reps, [&] {
      score_all([](std::size_t n, auto&& f) { factex::serial_for(n, f); });
    });
    const double tp = time_best_of(reps, [&] {
      score_all([](std::size_t n, auto&& f) { factex::parallel_for(n, f); });
    });
    print_row("rouge scoring (batch)", ts, tp);
  }
  return 0;
}

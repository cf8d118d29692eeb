/* Copyright 2026 The Lemma Namer Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. Arguments select a subset by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bleu_oracle.h"
#include "fixtures.h"
#include "gradcheck_suite.h"
#include "harness.h"
#include "lemma_namer/beam_search.h"
#include "lemma_namer/cli.h"
#include "lemma_namer/corpus.h"
#include "lemma_namer/metrics.h"
#include "lemma_namer/random.h"
#include "lemma_namer/retrieval.h"
#include "lemma_namer/sexp.h"
#include "lemma_namer/subtok.h"
#include "lemma_namer/synthetic.h"
#include "lemma_namer/trainer.h"
#include "lemma_namer/tree.h"

namespace lemma_namer {
namespace {

namespace fs = std::filesystem;
using testing::encode_all;
using testing::preprocess_all;
using testing::top1_accuracy;

// Tolerances and budgets.
constexpr double kFragAccExpected = 0.667;
constexpr double kFragAccTolerance = 0.0005;
constexpr double kBleuTolerance = 1e-9;
constexpr double kGradTolerance = 1e-4;
constexpr double kOverfitTarget = 0.95;
constexpr std::size_t kOverfitMaxSteps = 2000;
constexpr std::size_t kOverfitEvalEvery = 100;
constexpr double kMultiInputMargin = 0.20;
constexpr std::size_t kRepetitionDecodes = 1000;
constexpr std::size_t kCheckpointEvery = 200;
constexpr std::size_t kPatience = 3;
constexpr std::size_t kDeterminismSteps = 200;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number;
  std::string title;
  double time_limit_s;
  std::function<Outcome()> run;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", x);
  return buf;
}

std::string fmt(double x, int precision = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << x;
  return s.str();
}

bool has_repeat(const std::vector<std::string>& subtokens) {
  std::set<std::string> seen;
  for (const auto& t : subtokens) {
    if (t != "_" && !seen.insert(t).second) return true;
  }
  return false;
}

// ------------------------------------------------------------------- 1

Outcome metric_oracle() {
  const double frag = fragment_accuracy("map_determinant_mx", "det_map_mx");
  const bool frag_ok = std::abs(frag - kFragAccExpected) <= kFragAccTolerance;
  Rng rng(2026);
  const std::string alphabet = "ab_cdA";
  auto random_name = [&](std::size_t max_len) {
    std::string s;
    const std::size_t len = 1 + uniform_index(rng, max_len);
    for (std::size_t i = 0; i < len; ++i) s += alphabet[uniform_index(rng, alphabet.size())];
    return s;
  };
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    const std::string cand = random_name(14), ref = random_name(14);
    worst = std::max(worst, std::abs(bleu4_char(cand, ref) -
                                     testing::oracle_bleu4(cand, ref)));
  }
  return {frag_ok && worst <= kBleuTolerance,
          "frag_acc=" + fmt(frag) + ", max |bleu - oracle| over 50 pairs=" +
              sci(worst)};
}

// ------------------------------------------------------------------- 2

Outcome trimming_oracle() {
  const Sexp upper = parse_sexp(testing::kTrimUpper);
  const std::string got = print_sexp(trim(upper, TrimConfig::standard()));
  const std::string want = print_sexp(parse_sexp(testing::kTrimLower));
  return {got == want, "trimmed=" + got};
}

// ------------------------------------------------------------------- 3

Outcome gradient_checks() {
  bool ok = true;
  std::string detail;
  for (const auto& c : testing::run_grad_checks(1)) {
    ok &= c.report.max_relative_error < kGradTolerance;
    detail += c.layer + "=" + sci(c.report.max_relative_error) + " ";
  }
  return {ok, detail};
}

// ------------------------------------------------------------------- 4

Outcome overfit() {
  GeneratorSpec spec;
  spec.n_docs = 10;
  spec.lemmas_per_doc = 5;
  spec.seed = 4;
  auto records = preprocess_all(generate(spec));
  ModelConfig config = ModelConfig::from_name("ln-s+bsexpl1+attn+copy");
  config.embedding_dim = 200;
  config.hidden_units = 200;
  config.num_layers = 1;
  auto vocabs = build_vocab(records, config.inputs);
  Seq2Seq<float> model(config, vocabs.inputs.size(), vocabs.names.size());
  model.init(4);
  auto examples = encode_all(records, config, vocabs);
  TrainConfig tcfg;
  tcfg.seed = 4;
  Trainer trainer(model, examples, {}, tcfg);
  double acc = 0;
  std::size_t step = 0;
  while (step < kOverfitMaxSteps) {
    trainer.step();
    ++step;
    if (step % kOverfitEvalEvery == 0) {
      acc = top1_accuracy(model, examples, records, vocabs.names);
      if (acc >= kOverfitTarget) break;
    }
  }
  return {acc >= kOverfitTarget, std::to_string(records.size()) +
                                     " lemmas, train top-1=" + fmt(acc) +
                                     " after " + std::to_string(step) + " steps"};
}

// ------------------------------------------------------- 5 and 6 setup

struct HeldOut {
  std::vector<ProcessedRecord> train, test;
};

HeldOut held_out_corpus() {
  GeneratorSpec spec;
  spec.n_docs = 20;
  spec.lemmas_per_doc = 10;
  spec.seed = 6;
  auto raw = generate(spec);
  auto records = preprocess_all(raw);
  auto split = split_by_document(raw, {0.75, 0.0, 0.25}, 6);
  return {select_docs(records, split.train), select_docs(records, split.test)};
}

struct Trained {
  Seq2Seq<float> model;
  Vocabularies vocabs;
  ModelConfig config;
};

constexpr std::size_t kHeldOutDim = 64;
constexpr std::size_t kHeldOutSteps = 2000;
constexpr std::size_t kHeldOutBatch = 16;

Trained train_held_out(const std::string& name, const HeldOut& data) {
  Trained t;
  t.config = ModelConfig::from_name(name);
  t.config.embedding_dim = kHeldOutDim;
  t.config.hidden_units = kHeldOutDim;
  t.vocabs = build_vocab(data.train, t.config.inputs);
  t.model = Seq2Seq<float>(t.config, t.vocabs.inputs.size(), t.vocabs.names.size());
  t.model.init(6);
  TrainConfig tcfg;
  tcfg.seed = 6;
  tcfg.batch_size = kHeldOutBatch;
  tcfg.max_steps = kHeldOutSteps;
  Trainer trainer(t.model, encode_all(data.train, t.config, t.vocabs), {}, tcfg);
  for (std::size_t s = 0; s < kHeldOutSteps; ++s) trainer.step();
  return t;
}

// ------------------------------------------------------------------- 5

Outcome copy_efficacy() {
  HeldOut data = held_out_corpus();
  Trained t = train_held_out("ln-s+bsexpl1+attn+copy", data);
  const Lexicon& lex = Lexicon::default_lexicon();

  // First test record whose name holds a sub-token unseen in training names.
  const ProcessedRecord* record = nullptr;
  std::string oov;
  for (const auto& r : data.test) {
    for (const auto& s : r.name_subtokens) {
      if (!t.vocabs.names.contains(s)) {
        record = &r;
        oov = s;
        break;
      }
    }
    if (record) break;
  }
  if (!record) return {false, "no test record with an out-of-vocabulary sub-token"};

  EncodedExample ex = encode_example(*record, t.config, t.vocabs, false);
  bool copied = false;
  std::string top5;
  for (const auto& s : suggest(t.model, ex, t.vocabs.names, 5)) {
    top5 += s.name + " ";
    for (const auto& sub : subtoken_texts(s.name, lex)) copied |= sub == oov;
  }

  // The same parameters without the copy gate.
  ModelConfig no_copy_config = t.config;
  no_copy_config.use_copy = false;
  Seq2Seq<float> no_copy(no_copy_config, t.vocabs.inputs.size(), t.vocabs.names.size());
  std::map<std::string, nnet::Mat<float>*> source;
  for (auto& p : t.model.parameters()) source[p.name] = p.value;
  for (auto& p : no_copy.parameters()) *p.value = *source.at(p.name);

  const int v = static_cast<int>(t.vocabs.names.size());
  Seq2Seq<float>::DecoderState state;
  auto enc = no_copy.encode(ex, &state);
  double outside = 0;
  int input = Vocab::kBos;
  for (std::size_t step = 0; step < 8; ++step) {
    auto lp = no_copy.step(enc, state, input);
    for (Eigen::Index i = v; i < lp.size(); ++i) outside += std::exp(double(lp[i]));
    lp[Vocab::kPad] = lp[Vocab::kBos] = -std::numeric_limits<float>::infinity();
    Eigen::Index best;
    lp.head(v).maxCoeff(&best);
    input = static_cast<int>(best);
  }
  bool emitted = false;
  for (const auto& h : beam_search(no_copy, ex, t.vocabs.names, 5, 5)) {
    for (const auto& s : h.subtokens) emitted |= s == oov;
  }
  // Share of test records with an unseen name sub-token that copy recovers.
  std::size_t eligible = 0, recovered = 0;
  for (const auto& r : data.test) {
    std::string missing;
    for (const auto& s : r.name_subtokens) {
      if (!t.vocabs.names.contains(s)) missing = s;
    }
    if (missing.empty()) continue;
    ++eligible;
    auto e = encode_example(r, t.config, t.vocabs, false);
    bool hit = false;
    for (const auto& s : suggest(t.model, e, t.vocabs.names, 5)) {
      for (const auto& sub : subtoken_texts(s.name, lex)) hit |= sub == missing;
    }
    recovered += hit;
  }
  return {copied && outside == 0.0 && !emitted,
          record->qualified_name + " oov='" + oov + "' top5=[" + top5 +
              "] no-copy mass outside vocab=" + std::to_string(outside) +
              ", copy recovers " + std::to_string(recovered) + "/" +
              std::to_string(eligible)};
}

// ------------------------------------------------------------------- 6

Outcome multi_input() {
  HeldOut data = held_out_corpus();
  Trained s = train_held_out("ln-s+attn+copy", data);
  Trained sk = train_held_out("ln-s+bsexpl1+attn+copy", data);
  auto acc = [&](const Trained& t) {
    return top1_accuracy(t.model, encode_all(data.test, t.config, t.vocabs, false),
                         data.test, t.vocabs.names);
  };
  const double a_s = acc(s), a_sk = acc(sk);
  return {a_sk - a_s >= kMultiInputMargin,
          "test top-1: s=" + fmt(a_s) + ", s+bsexpl1=" + fmt(a_sk) + " over " +
              std::to_string(data.test.size()) + " lemmas, " +
              std::to_string(kHeldOutSteps) + " steps each"};
}

// ------------------------------------------------------------------- 7

Outcome repetition() {
  // A small name vocabulary makes repeats tempting: decodes outlive it.
  Vocab names;
  for (const char* t : {"_", "add", "mul", "n", "C", "A", "K"}) names.add(t);
  Vocab inputs;
  for (const char* t : {"x", "y", "+", "*", "add", "(", ")"}) inputs.add(t);
  std::size_t decodes = 0, outputs = 0, repeats = 0;
  Rng rng(7);
  for (std::uint64_t m = 0; decodes < kRepetitionDecodes; ++m) {
    ModelConfig config = ModelConfig::from_name(
        m % 3 == 0 ? "ln-s+attn+copy" : (m % 3 == 1 ? "ln-s+attn" : "ln-s"));
    config.embedding_dim = 8;
    config.hidden_units = 8;
    config.max_decode_len = 12;
    Seq2Seq<double> model(config, inputs.size(), names.size());
    model.init(100 + m);
    // Scale the weights so distributions are peaked rather than uniform.
    Rng scale_rng(m);
    for (auto& p : model.parameters()) {
      const double scale = uniform(scale_rng, 5.0, 40.0);
      *p.value *= scale;
    }
    for (int d = 0; d < 10 && decodes < kRepetitionDecodes; ++d, ++decodes) {
      ProcessedRecord r;
      const std::size_t len = 1 + uniform_index(rng, 8);
      for (std::size_t i = 0; i < len; ++i) {
        static const std::vector<std::string> pool = {"x", "y", "+", "add", "mul",
                                                      "oov1", "oov2", "C"};
        r.inputs[0].push_back(pool[uniform_index(rng, pool.size())]);
      }
      Vocabularies vocabs{names, inputs};
      auto ex = encode_example(r, config, vocabs, false);
      for (const auto& h : beam_search(model, ex, names, 5, 5)) {
        ++outputs;
        repeats += has_repeat(h.subtokens);
      }
    }
  }
  return {repeats == 0, std::to_string(decodes) + " decodes, " +
                            std::to_string(outputs) + " hypotheses, " +
                            std::to_string(repeats) + " with repeats"};
}

// ------------------------------------------------------------------- 8

Outcome trimming_statistics() {
  GeneratorSpec spec;
  spec.n_docs = 20;
  spec.lemmas_per_doc = 10;
  spec.seed = 8;
  double depth_raw = 0, depth_trim = 0, nodes_raw = 0, nodes_trim = 0;
  auto records = generate(spec);
  for (const auto& r : records) {
    auto raw = tree_stats(r.ktree);
    auto trimmed = tree_stats(trim(r.ktree, TrimConfig::standard()));
    depth_raw += raw.depth;
    depth_trim += trimmed.depth;
    nodes_raw += raw.node_count;
    nodes_trim += trimmed.node_count;
  }
  const double n = static_cast<double>(records.size());
  return {depth_trim < depth_raw && nodes_trim < nodes_raw,
          "mean depth " + fmt(depth_raw / n, 2) + " -> " + fmt(depth_trim / n, 2) +
              ", mean nodes " + fmt(nodes_raw / n, 2) + " -> " +
              fmt(nodes_trim / n, 2)};
}

// ------------------------------------------------------------------- 9

Outcome retrieval() {
  // Exact statements on the synthetic corpus; only statements that occur
  // once identify a single training name.
  GeneratorSpec spec;
  spec.n_docs = 10;
  spec.lemmas_per_doc = 5;
  spec.seed = 9;
  auto records = preprocess_all(generate(spec));
  std::vector<std::vector<std::string>> docs;
  std::vector<std::string> names;
  std::map<std::vector<std::string>, int> multiplicity;
  for (const auto& r : records) {
    docs.push_back(r.input(InputKind::kStmt));
    names.push_back(r.name);
    ++multiplicity[docs.back()];
  }
  auto index = TfIdfIndex::build(docs, names);
  std::size_t exact = 0, exact_hits = 0;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (multiplicity[docs[i]] != 1) continue;
    ++exact;
    auto hit = index.retrieve(docs[i], 1);
    exact_hits += !hit.empty() && hit[0].name == names[i];
  }

  // Brute-force cosine on five records.
  const std::vector<std::vector<std::string>> five = {
      {"x", "+", "y"}, {"x", "*", "y", "*", "z"}, {"-", "x"}, {"x", "+", "x"}, {"y"}};
  const std::vector<std::string> five_names = {"addC", "mulA", "oppK", "addxx", "yid"};
  auto small = TfIdfIndex::build(five, five_names);
  auto weights = [&](const std::vector<std::string>& toks) {
    std::map<std::string, double> v;
    for (const auto& t : toks) {
      double df = 0;
      for (const auto& d : five) df += std::count(d.begin(), d.end(), t) > 0;
      if (df > 0) v[t] += std::log(6.0 / (1.0 + df)) + 1;
    }
    return v;
  };
  auto cos = [](std::map<std::string, double> a, std::map<std::string, double> b) {
    double ab = 0, aa = 0, bb = 0;
    for (auto& [k, x] : a) {
      aa += x * x;
      if (b.count(k)) ab += x * b[k];
    }
    for (auto& [k, x] : b) bb += x * x;
    return aa == 0 || bb == 0 ? 0.0 : ab / std::sqrt(aa * bb);
  };
  bool oracle_ok = true;
  std::set<std::string> known(five_names.begin(), five_names.end());
  bool names_ok = true;
  const std::vector<std::vector<std::string>> queries = {
      {"x", "+", "y"}, {"*", "z"}, {"x"}, {"-", "-", "y"}, {"q"}, {"y", "+", "x", "+", "x"}};
  for (const auto& q : queries) {
    std::vector<double> sims;
    for (const auto& d : five) sims.push_back(cos(weights(q), weights(d)));
    std::vector<std::size_t> order(five.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sims[a] > sims[b] + 1e-12; });
    auto got = small.retrieve(q, five.size());
    oracle_ok &= got.size() == five.size();
    for (std::size_t r = 0; r < got.size(); ++r) {
      oracle_ok &= got[r].index == order[r];
      oracle_ok &= std::abs(got[r].similarity - sims[order[r]]) < 1e-12;
      names_ok &= known.count(got[r].name) == 1;
    }
  }
  std::set<std::string> train_names(names.begin(), names.end());
  for (const auto& q : docs) {
    for (const auto& h : index.retrieve(q, 5)) names_ok &= train_names.count(h.name) == 1;
  }
  return {exact > 0 && exact_hits == exact && oracle_ok && names_ok,
          "exact rank-1 " + std::to_string(exact_hits) + "/" + std::to_string(exact) +
              ", oracle " + (oracle_ok ? "match" : "MISMATCH") + ", names " +
              (names_ok ? "all from training" : "LEAK")};
}

// ------------------------------------------------------------------ 10

struct StopResult {
  std::size_t stop_step;  // 0 when training runs out first
  std::size_t best_step;
};

StopResult simulate(const std::vector<double>& losses) {
  EarlyStopper stopper(kPatience);
  for (std::size_t i = 0; i < losses.size(); ++i) {
    stopper.observe(losses[i]);
    if (stopper.should_stop()) {
      return {(i + 1) * kCheckpointEvery, (stopper.best_index() + 1) * kCheckpointEvery};
    }
  }
  return {0, (stopper.best_index() + 1) * kCheckpointEvery};
}

Outcome early_stopping() {
  struct Case {
    std::vector<double> losses;
    StopResult want;
  };
  const std::vector<Case> cases = {
      {{5, 4, 4.1, 4.2, 4.3}, {1000, 400}},
      {{5, 4, 4, 4, 3.9, 3.95}, {0, 1000}},
      {{5, 4, 4, 4, 4}, {1000, 400}},
      {{3, 2, 1, 0.5}, {0, 800}},
      {{1, 2, 3, 4, 0.1}, {800, 200}},
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    auto got = simulate(c.losses);
    ok &= got.stop_step == c.want.stop_step && got.best_step == c.want.best_step;
    detail += "(stop " + std::to_string(got.stop_step) + ", best " +
              std::to_string(got.best_step) + ") ";
  }
  return {ok, detail};
}

// ------------------------------------------------------------------ 11

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "ln_acceptance_determinism";
  fs::remove_all(root);
  std::ostringstream sink;
  auto cli = [&](const std::vector<std::string>& args) {
    const int code = cli::run(args, sink, sink);
    if (code != cli::kExitOk) throw std::runtime_error("command failed: " + sink.str());
  };
  cli({"generate", "--out", (root / "raw.jsonl").string(), "--seed", "11"});
  std::vector<std::string> ckpts, suggestions;
  for (const std::string run : {"a", "b"}) {
    const fs::path dir = root / run;
    cli({"preprocess", "--dataset", (root / "raw.jsonl").string(), "--out",
         (dir / "pre").string(), "--seed", "11"});
    cli({"train", "--data", (dir / "pre").string(), "--out", (dir / "model").string(),
         "--max-steps", std::to_string(kDeterminismSteps), "--seed", "11"});
    cli({"suggest", "--checkpoint", (dir / "model/model.ckpt").string(), "--data",
         (dir / "pre").string(), "--tier", "all", "--out",
         (dir / "suggestions.jsonl").string()});
    ckpts.push_back(slurp(dir / "model/model.ckpt"));
    suggestions.push_back(slurp(dir / "suggestions.jsonl"));
  }
  const bool same_ckpt = !ckpts[0].empty() && ckpts[0] == ckpts[1];
  const bool same_sugg = !suggestions[0].empty() && suggestions[0] == suggestions[1];
  fs::remove_all(root);
  return {same_ckpt && same_sugg,
          std::string("checkpoints ") + (same_ckpt ? "identical" : "DIFFER") + " (" +
              std::to_string(ckpts[0].size()) + " bytes), suggestions " +
              (same_sugg ? "identical" : "DIFFER")};
}

}  // namespace
}  // namespace lemma_namer

int main(int argc, char** argv) {
  using namespace lemma_namer;
  const std::vector<Criterion> criteria = {
      {1, "metric oracle", 1, metric_oracle},
      {2, "trimming oracle", 1, trimming_oracle},
      {3, "gradient checks", 60, gradient_checks},
      {4, "overfit", 300, overfit},
      {5, "copy efficacy", 120, copy_efficacy},
      {6, "multi-input advantage", 600, multi_input},
      {7, "repetition invariant", 60, repetition},
      {8, "trimming statistics", 10, trimming_statistics},
      {9, "retrieval baseline", 1, retrieval},
      {10, "early stopping", 1, early_stopping},
      {11, "determinism", 600, determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.number)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = s < c.time_limit_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.number << ": "
              << c.title << " | " << o.detail << " | " << fmt(s, 2) << " s (limit "
              << c.time_limit_s << " s" << (in_time ? "" : ", EXCEEDED") << ")"
              << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}

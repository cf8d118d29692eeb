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

#include "lemma_namer/cli.h"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lemma_namer/beam_search.h"
#include "lemma_namer/checkpoint.h"
#include "lemma_namer/corpus.h"
#include "lemma_namer/metrics.h"
#include "lemma_namer/retrieval.h"
#include "lemma_namer/seq2seq.h"
#include "lemma_namer/synthetic.h"
#include "lemma_namer/trainer.h"

namespace lemma_namer::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingReference : public DataError {
 public:
  explicit MissingReference(const std::string& qname)
      : DataError("no reference for " + qname) {}
};

std::string timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void ensure_parent(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<json> read_json_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  std::vector<json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

// Run manifest: everything needed to repeat a command.
class Manifest {
 public:
  Manifest(std::string command, const std::vector<std::string>& argv)
      : started_(timestamp()) {
    j_["command"] = std::move(command);
    j_["argv"] = argv;
    j_["inputs"] = json::array();
    j_["outputs"] = json::array();
    j_["config"] = json::object();
  }
  json& config() { return j_["config"]; }
  void seed(std::uint64_t s) { j_["seed"] = s; }
  void input(const fs::path& p) { j_["inputs"].push_back(p.string()); }
  void output(const fs::path& p) { j_["outputs"].push_back(p.string()); }
  void write(const fs::path& path) {
    j_["started"] = started_;
    j_["finished"] = timestamp();
    j_["versions"] = {{"lemma_namer", kVersion},
                      {"checkpoint", kCheckpointVersion}};
    write_text(path, j_.dump(2) + "\n");
  }

 private:
  std::string started_;
  json j_;
};

fs::path manifest_beside(const fs::path& file) {
  return fs::path(file.string() + ".manifest.json");
}

// Precedence: flag or config file, then the environment, then 0.
std::uint64_t resolve_seed(const CLI::Option* option, std::uint64_t value) {
  if (option->count() > 0) return value;
  if (const char* env = std::getenv(kSeedEnv)) {
    try {
      std::size_t used = 0;
      std::uint64_t s = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
      return s;
    } catch (const std::exception&) {
      throw UsageError(std::string(kSeedEnv) + " is not an integer: " + env);
    }
  }
  return 0;
}

// ---------------------------------------------------------------- data dir

struct DataDir {
  std::vector<ProcessedRecord> records;
  DatasetSplit split;
};

DataDir load_data_dir(const fs::path& dir) {
  DataDir d;
  d.records = load_processed((dir / "processed.jsonl").string());
  d.split = DatasetSplit::from_json(read_json_file(dir / "split.json"));
  return d;
}

std::vector<ProcessedRecord> tier_records(const DataDir& d, const std::string& tier) {
  if (tier == "all") return d.records;
  return select_docs(d.records, d.split.tier(tier));
}

std::vector<EncodedExample> encode_all(const std::vector<ProcessedRecord>& records,
                                       const ModelConfig& config,
                                       const Vocabularies& vocabs,
                                       std::ostream& err) {
  std::vector<EncodedExample> out;
  for (const auto& r : records) {
    if (r.name_subtokens.size() + 1 > config.max_decode_len) {
      err << "warning: skipping " << r.qualified_name
          << ": name longer than max_decode_len\n";
      continue;
    }
    auto ex = encode_example(r, config, vocabs);
    if (ex.truncated) {
      err << "warning: input of " << r.qualified_name << " truncated to "
          << config.max_input_len << " items\n";
    }
    out.push_back(std::move(ex));
  }
  return out;
}

// ------------------------------------------------------------ model options

struct ModelOptions {
  std::string model = "ln-s+bsexpl1+attn+copy";
  std::size_t embedding_dim = 200;
  std::size_t hidden_units = 200;
  std::size_t num_layers = 1;
  double dropout = 0.5;
  std::size_t beam_size = 5;
  std::size_t max_decode_len = 64;
  std::size_t max_input_len = 1500;
  bool length_normalization = false;
  bool allow_off_grid = false;
};

struct TrainOptions {
  double learning_rate = 0.001;
  std::size_t max_steps = 10000;
  std::size_t batch_size = 32;
  std::size_t checkpoint_interval = 200;
  std::size_t patience = 3;
  double clip_norm = 5.0;
  bool keep_checkpoints = true;
};

void add_model_options(CLI::App* app, ModelOptions& m) {
  app->add_option("--model", m.model, "Model name, e.g. ln-s+bsexpl1+attn+copy")
      ->capture_default_str();
  app->add_option("--embedding-dim", m.embedding_dim)->capture_default_str();
  app->add_option("--hidden-units", m.hidden_units)->capture_default_str();
  app->add_option("--num-layers", m.num_layers)->capture_default_str();
  app->add_option("--dropout", m.dropout)->capture_default_str();
  app->add_option("--beam-size", m.beam_size)->capture_default_str();
  app->add_option("--max-decode-len", m.max_decode_len)->capture_default_str();
  app->add_option("--max-input-len", m.max_input_len)->capture_default_str();
  app->add_flag("--length-normalization", m.length_normalization);
  app->add_flag("--allow-off-grid", m.allow_off_grid,
                "Permit dimensions outside {200, 500, 1000} and layers > 3");
}

void add_train_options(CLI::App* app, TrainOptions& t) {
  app->add_option("--learning-rate", t.learning_rate)->capture_default_str();
  app->add_option("--max-steps", t.max_steps)->capture_default_str();
  app->add_option("--batch-size", t.batch_size)->capture_default_str();
  app->add_option("--checkpoint-interval", t.checkpoint_interval)
      ->capture_default_str();
  app->add_option("--patience", t.patience)->capture_default_str();
  app->add_option("--clip-norm", t.clip_norm)->capture_default_str();
  app->add_flag("--keep-checkpoints,!--no-keep-checkpoints", t.keep_checkpoints,
                "Write every periodic checkpoint");
}

ModelConfig model_config(const ModelOptions& m) {
  ModelConfig c;
  try {
    c = ModelConfig::from_name(m.model);
  } catch (const ConfigError& e) {
    throw UsageError("invalid model '" + m.model + "': " + e.what());
  }
  c.embedding_dim = m.embedding_dim;
  c.hidden_units = m.hidden_units;
  c.num_layers = m.num_layers;
  c.dropout = m.dropout;
  c.beam_size = m.beam_size;
  c.max_decode_len = m.max_decode_len;
  c.max_input_len = m.max_input_len;
  c.length_normalization = m.length_normalization;
  c.validate(!m.allow_off_grid);
  return c;
}

TrainConfig train_config(const TrainOptions& t, std::uint64_t seed) {
  TrainConfig c;
  c.learning_rate = t.learning_rate;
  c.max_steps = t.max_steps;
  c.batch_size = t.batch_size;
  c.checkpoint_interval = t.checkpoint_interval;
  c.patience = t.patience;
  c.clip_norm = t.clip_norm;
  c.seed = seed;
  c.validate();
  return c;
}

// Trains in `out_dir`: model.ckpt, train_log.jsonl, checkpoints/.
void run_training(Checkpoint& ckpt, const std::vector<ProcessedRecord>& train,
                  const std::vector<ProcessedRecord>& val,
                  const TrainConfig& tcfg, const fs::path& out_dir,
                  bool keep_checkpoints, bool fine_tuning,
                  const ModelConfig& expected, std::ostream& err,
                  Manifest& manifest) {
  fs::create_directories(out_dir);
  const ModelConfig& config = ckpt.model.config();
  auto train_ex = encode_all(train, config, ckpt.vocabs, err);
  auto val_ex = encode_all(val, config, ckpt.vocabs, err);
  if (train_ex.empty() && !(fine_tuning && tcfg.max_steps == 0)) {
    throw EmptyTrainSet("no usable training records");
  }
  std::ofstream log(out_dir / "train_log.jsonl", std::ios::binary);
  manifest.output(out_dir / "train_log.jsonl");
  auto hook = [&](const Seq2Seq<float>& model,
                  std::size_t step) -> std::optional<std::string> {
    if (!keep_checkpoints) return std::nullopt;
    std::ostringstream name;
    name << "step_" << std::setw(6) << std::setfill('0') << step << ".ckpt";
    fs::path path = out_dir / "checkpoints" / name.str();
    fs::create_directories(path.parent_path());
    save_checkpoint(path.string(), {model, ckpt.vocabs, ckpt.seed, step});
    return path.string();
  };
  if (fine_tuning) check_architecture(ckpt.model.config(), expected);
  TrainResult result;
  if (!(fine_tuning && tcfg.max_steps == 0)) {
    Trainer trainer(ckpt.model, std::move(train_ex), std::move(val_ex), tcfg);
    trainer.set_checkpoint_hook(hook);
    trainer.set_log_stream(&log);
    result = trainer.run();
  }
  if (result.steps > 0) ckpt.step = result.best_step;
  save_checkpoint((out_dir / "model.ckpt").string(), ckpt);
  manifest.output(out_dir / "model.ckpt");
  err << "trained " << result.steps << " steps; best checkpoint at step "
      << result.best_step << (result.stopped_early ? " (early stop)" : "")
      << "\n";
}

Checkpoint fresh_model(const ModelConfig& config,
                       const std::vector<ProcessedRecord>& train,
                       std::uint64_t seed) {
  Checkpoint c;
  c.vocabs = build_vocab(train, config.inputs);
  c.model = Seq2Seq<float>(config, c.vocabs.inputs.size(), c.vocabs.names.size());
  c.model.init(seed);
  c.seed = seed;
  return c;
}

void write_suggestions(const fs::path& path, const Checkpoint& ckpt,
                       const std::vector<ProcessedRecord>& records,
                       std::size_t k, std::ostream& err) {
  std::ostringstream out;
  const ModelConfig& config = ckpt.model.config();
  for (const auto& r : records) {
    auto ex = encode_example(r, config, ckpt.vocabs, false);
    if (ex.truncated) {
      err << "warning: input of " << r.qualified_name << " truncated\n";
    }
    json list = json::array();
    for (const auto& s : suggest(ckpt.model, ex, ckpt.vocabs.names, k)) {
      list.push_back({{"name", s.name}, {"log_prob", s.log_prob}});
    }
    out << json{{"qname", r.qualified_name}, {"suggestions", list}}.dump() << '\n';
  }
  write_text(path, out.str());
}

// qname -> ranked names, in file order.
std::vector<std::pair<std::string, std::vector<std::string>>> read_suggestions(
    const fs::path& path) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  for (const auto& j : read_json_lines(path)) {
    try {
      std::vector<std::string> names;
      for (const auto& s : j.at("suggestions")) names.push_back(s.at("name"));
      out.emplace_back(j.at("qname").get<std::string>(), std::move(names));
    } catch (const json::exception& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return out;
}

std::map<std::string, std::string> read_references(const fs::path& path) {
  fs::path file = fs::is_directory(path) ? path / "processed.jsonl" : path;
  std::map<std::string, std::string> out;
  for (const auto& j : read_json_lines(file)) {
    try {
      out[j.at("qname").get<std::string>()] = j.at("name").get<std::string>();
    } catch (const json::exception& e) {
      throw DataError(file.string() + ": " + e.what());
    }
  }
  return out;
}

LemmaScores score_file(const fs::path& path,
                       const std::map<std::string, std::string>& refs,
                       bool symmetric, std::vector<std::string>* order) {
  auto sugg = read_suggestions(path);
  std::vector<std::vector<std::string>> names;
  std::vector<std::string> references;
  std::vector<std::string> qnames;
  for (auto& [qname, list] : sugg) {
    auto it = refs.find(qname);
    if (it == refs.end()) throw MissingReference(qname);
    qnames.push_back(qname);
    references.push_back(it->second);
    names.push_back(std::move(list));
  }
  if (order) {
    if (order->empty()) {
      *order = qnames;
    } else if (*order != qnames) {
      throw DataError(path.string() + " covers different lemmas than the first run");
    }
  }
  return score_lemmas(names, references, symmetric);
}

std::string percent(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << 100 * x;
  return s.str();
}

void print_report(std::ostream& out, const std::string& label,
                  const MetricReport& r) {
  out << label << ": BLEU " << percent(r.bleu4) << "  Frag.Acc. "
      << percent(r.frag_acc) << "  Top1 " << percent(r.top1) << "  Top5 "
      << percent(r.top5) << "  (n=" << r.n << ")\n";
}

std::vector<double> mean_over_runs(const std::vector<LemmaScores>& runs,
                                   std::vector<double> LemmaScores::*field) {
  std::vector<double> out((runs.front().*field).size(), 0.0);
  for (const auto& r : runs) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += (r.*field)[i];
  }
  for (double& x : out) x /= static_cast<double>(runs.size());
  return out;
}

TrimConfig trim_from_name(const std::string& name, std::size_t max_depth) {
  TrimConfig c;
  if (name == "standard") {
    c = TrimConfig::standard();
  } else if (name == "keep-category") {
    c = TrimConfig::keep_category();
  } else if (name == "depth-limit") {
    c = TrimConfig::depth_limit(max_depth);
  } else if (name == "random") {
    c = TrimConfig::random(1, 0);
  } else {
    throw UsageError("unknown trimming variant '" + name + "'");
  }
  return c;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Suggest names for Coq lemmas from their statements and trees.",
               "lemma-namer"};
  app.set_config("--config", "", "key = value configuration file");
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::uint64_t seed_value = 0;
  auto add_seed = [&](CLI::App* sub) {
    return sub->add_option("--seed", seed_value, "Random seed (default: $" +
                                                     std::string(kSeedEnv) +
                                                     " or 0)");
  };

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic lemma corpus");
  GeneratorSpec gen_spec;
  std::string gen_out, gen_dialect = "suffix";
  gen->add_option("--out", gen_out)->required();
  gen->add_option("--docs", gen_spec.n_docs)->capture_default_str();
  gen->add_option("--lemmas-per-doc", gen_spec.lemmas_per_doc)->capture_default_str();
  gen->add_option("--dialect", gen_dialect)->check(CLI::IsMember({"suffix", "word"}));
  gen->add_option("--morphism-fraction", gen_spec.morphism_fraction)->capture_default_str();
  gen->add_option("--functions-per-doc", gen_spec.functions_per_doc)->capture_default_str();
  gen->add_option("--domains", gen_spec.domains)->capture_default_str();
  gen->add_option("--doc-prefix", gen_spec.doc_prefix)->capture_default_str();
  auto* gen_seed = add_seed(gen);

  // preprocess
  auto* pre = app.add_subcommand("preprocess",
                                 "Filter, trim, sub-tokenize and split a dataset");
  std::string pre_dataset, pre_out, pre_trim = "standard", pre_lexicon;
  std::size_t pre_max_depth = 10;
  std::vector<std::string> pre_loc_heads = {"loc"};
  double pre_quantile = 0.25;
  SplitFractions pre_fracs;
  pre->add_option("--dataset", pre_dataset)->required();
  pre->add_option("--out", pre_out, "Output directory")->required();
  pre->add_option("--trim", pre_trim, "standard, keep-category, depth-limit or random")
      ->capture_default_str();
  pre->add_option("--max-depth", pre_max_depth)->capture_default_str();
  pre->add_option("--location-head", pre_loc_heads)->capture_default_str();
  pre->add_option("--lexicon", pre_lexicon);
  pre->add_option("--outlier-quantile", pre_quantile)->capture_default_str();
  pre->add_option("--train-frac", pre_fracs.train)->capture_default_str();
  pre->add_option("--val-frac", pre_fracs.val)->capture_default_str();
  pre->add_option("--test-frac", pre_fracs.test)->capture_default_str();
  auto* pre_seed = add_seed(pre);

  // stats
  auto* stats = app.add_subcommand("stats", "Corpus and tree-shape statistics");
  std::string stats_dataset, stats_out, stats_lexicon;
  stats->add_option("--dataset", stats_dataset)->required();
  stats->add_option("--out", stats_out);
  stats->add_option("--lexicon", stats_lexicon);

  // train
  auto* train = app.add_subcommand("train", "Train a model");
  ModelOptions train_model;
  TrainOptions train_opts;
  std::string train_data, train_out, train_tier = "train", val_tier = "val";
  train->add_option("--data", train_data, "Preprocessed directory")->required();
  train->add_option("--out", train_out, "Output directory")->required();
  train->add_option("--train-tier", train_tier)->capture_default_str();
  train->add_option("--val-tier", val_tier)->capture_default_str();
  add_model_options(train, train_model);
  add_train_options(train, train_opts);
  auto* train_seed = add_seed(train);

  // suggest
  auto* sug = app.add_subcommand("suggest", "Suggest names with a trained model");
  std::string sug_ckpt, sug_data, sug_tier = "test", sug_out;
  std::size_t sug_k = 5;
  sug->add_option("--checkpoint", sug_ckpt)->required();
  sug->add_option("--data", sug_data)->required();
  sug->add_option("--tier", sug_tier, "train, val, test or all")->capture_default_str();
  sug->add_option("--k", sug_k)->capture_default_str()->check(CLI::PositiveNumber);
  sug->add_option("--out", sug_out)->required();

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Score suggestion files");
  std::vector<std::string> eval_sugg, eval_compare;
  std::string eval_refs, eval_out, eval_model = "model", eval_split = "test";
  bool eval_symmetric = false;
  std::size_t eval_resamples = 10000;
  eval->add_option("--suggestions", eval_sugg, "One file per run")->required();
  eval->add_option("--references", eval_refs)->required();
  eval->add_option("--compare", eval_compare,
                   "Runs of a second system for a paired bootstrap test");
  eval->add_option("--model", eval_model)->capture_default_str();
  eval->add_option("--split", eval_split)->capture_default_str();
  eval->add_option("--out", eval_out);
  eval->add_option("--resamples", eval_resamples)->capture_default_str();
  eval->add_flag("--symmetric-fragments", eval_symmetric);
  auto* eval_seed = add_seed(eval);

  // baseline
  auto* base = app.add_subcommand("baseline", "Tf-idf nearest-neighbour names");
  std::string base_data, base_out, base_train_tier = "train",
                                   base_test_tier = "test", base_index,
                                   base_dataset;
  std::size_t base_k = 5;
  bool base_raw = false;
  base->add_option("--data", base_data)->required();
  base->add_option("--out", base_out)->required();
  base->add_option("--train-tier", base_train_tier)->capture_default_str();
  base->add_option("--test-tier", base_test_tier)->capture_default_str();
  base->add_option("--k", base_k)->capture_default_str()->check(CLI::PositiveNumber);
  base->add_option("--index", base_index, "Also write the index as JSON");
  base->add_flag("--raw-tokens", base_raw, "Query with unsplit statement tokens");
  base->add_option("--dataset", base_dataset, "Raw dataset, needed with --raw-tokens");

  // finetune
  auto* ft = app.add_subcommand("finetune", "Continue training a checkpoint");
  ModelOptions ft_model;
  TrainOptions ft_opts;
  std::string ft_ckpt, ft_data, ft_out, ft_train_tier = "train", ft_val_tier = "val";
  ft->add_option("--checkpoint", ft_ckpt)->required();
  ft->add_option("--data", ft_data)->required();
  ft->add_option("--out", ft_out)->required();
  ft->add_option("--train-tier", ft_train_tier)->capture_default_str();
  ft->add_option("--val-tier", ft_val_tier)->capture_default_str();
  auto* ft_expect = ft->add_option("--model", ft_model.model,
                                   "Expected architecture of the checkpoint");
  add_train_options(ft, ft_opts);
  auto* ft_seed = add_seed(ft);

  // crossset
  auto* cross = app.add_subcommand("crossset",
                                   "Train on one tier and evaluate on another");
  ModelOptions cross_model;
  TrainOptions cross_opts;
  std::string cross_data, cross_out, cross_train = "train", cross_val = "val",
                                     cross_test = "test", cross_ft;
  std::size_t cross_runs = 1, cross_k = 5, cross_ft_steps = 200;
  cross->add_option("--data", cross_data)->required();
  cross->add_option("--out", cross_out)->required();
  cross->add_option("--train-tier", cross_train)->capture_default_str();
  cross->add_option("--val-tier", cross_val)->capture_default_str();
  cross->add_option("--test-tier", cross_test)->capture_default_str();
  cross->add_option("--finetune-tier", cross_ft,
                    "Fine-tune on this tier before evaluating");
  cross->add_option("--finetune-steps", cross_ft_steps)->capture_default_str();
  cross->add_option("--runs", cross_runs)->capture_default_str()->check(CLI::PositiveNumber);
  cross->add_option("--k", cross_k)->capture_default_str()->check(CLI::PositiveNumber);
  add_model_options(cross, cross_model);
  add_train_options(cross, cross_opts);
  auto* cross_seed = add_seed(cross);

  // replay
  auto* replay = app.add_subcommand("replay", "Re-run the command of a manifest");
  std::string replay_manifest;
  replay->add_option("--manifest", replay_manifest)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      Manifest m("generate", args);
      gen_spec.seed = resolve_seed(gen_seed, seed_value);
      gen_spec.dialect = gen_dialect == "word" ? GeneratorSpec::Dialect::kWord
                                               : GeneratorSpec::Dialect::kSuffix;
      try {
        gen_spec.validate();
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      auto records = generate(gen_spec);
      ensure_parent(gen_out);
      write_dataset(gen_out, records);
      m.config() = gen_spec.to_json();
      m.seed(gen_spec.seed);
      m.output(gen_out);
      m.write(manifest_beside(gen_out));
      err << "wrote " << records.size() << " records to " << gen_out << "\n";
      return kExitOk;
    }

    if (pre->parsed()) {
      Manifest m("preprocess", args);
      const std::uint64_t seed = resolve_seed(pre_seed, seed_value);
      if (pre_fracs.train < 0 || pre_fracs.val < 0 || pre_fracs.test < 0 ||
          pre_fracs.train + pre_fracs.val + pre_fracs.test > 1 + 1e-9) {
        throw UsageError("split fractions must be non-negative and sum to at most 1");
      }
      if (!(pre_quantile >= 0 && pre_quantile < 1)) {
        throw UsageError("--outlier-quantile must lie in [0, 1)");
      }
      PreprocessOptions options;
      options.trim = trim_from_name(pre_trim, pre_max_depth);
      options.trim.seed = seed;
      options.trim.location_heads = {pre_loc_heads.begin(), pre_loc_heads.end()};
      Lexicon lexicon;
      if (!pre_lexicon.empty()) {
        lexicon = Lexicon::load(pre_lexicon);
        options.lexicon = &lexicon;
        m.input(pre_lexicon);
      }
      auto records = load_dataset(pre_dataset);
      const std::size_t before = records.size();
      records = filter_outliers(std::move(records), pre_quantile);
      std::vector<ProcessedRecord> processed;
      for (std::size_t i = 0; i < records.size(); ++i) {
        processed.push_back(preprocess_record(records[i], options, i));
      }
      auto split = split_by_document(records, pre_fracs, seed);
      const fs::path dir(pre_out);
      fs::create_directories(dir);
      write_processed((dir / "processed.jsonl").string(), processed);
      write_text(dir / "split.json", split.to_json().dump(2) + "\n");
      m.input(pre_dataset);
      m.output(dir / "processed.jsonl");
      m.output(dir / "split.json");
      m.seed(seed);
      m.config() = {{"trim", pre_trim},
                    {"max_depth", pre_max_depth},
                    {"location_heads", pre_loc_heads},
                    {"outlier_quantile", pre_quantile},
                    {"fractions",
                     {{"train", pre_fracs.train},
                      {"val", pre_fracs.val},
                      {"test", pre_fracs.test}}},
                    {"lexicon", pre_lexicon}};
      m.write(dir / "manifest.json");
      err << "kept " << records.size() << " of " << before << " records\n";
      return kExitOk;
    }

    if (stats->parsed()) {
      PreprocessOptions options;
      Lexicon lexicon;
      if (!stats_lexicon.empty()) {
        lexicon = Lexicon::load(stats_lexicon);
        options.lexicon = &lexicon;
      }
      auto report = corpus_report(load_dataset(stats_dataset), options).to_json();
      if (stats_out.empty()) {
        out << report.dump(2) << "\n";
      } else {
        Manifest m("stats", args);
        write_text(stats_out, report.dump(2) + "\n");
        m.input(stats_dataset);
        m.output(stats_out);
        m.write(manifest_beside(stats_out));
      }
      return kExitOk;
    }

    if (train->parsed()) {
      Manifest m("train", args);
      const std::uint64_t seed = resolve_seed(train_seed, seed_value);
      ModelConfig config = model_config(train_model);
      TrainConfig tcfg = train_config(train_opts, seed);
      auto data = load_data_dir(train_data);
      auto train_recs = tier_records(data, train_tier);
      auto val_recs = tier_records(data, val_tier);
      if (train_recs.empty()) throw EmptyTrainSet("tier '" + train_tier + "' is empty");
      Checkpoint ckpt = fresh_model(config, train_recs, seed);
      m.config() = {{"model", config.to_json()}, {"train", tcfg.to_json()},
                    {"train_tier", train_tier}, {"val_tier", val_tier}};
      m.seed(seed);
      m.input(fs::path(train_data) / "processed.jsonl");
      m.input(fs::path(train_data) / "split.json");
      run_training(ckpt, train_recs, val_recs, tcfg, train_out,
                   train_opts.keep_checkpoints, false, config, err, m);
      m.write(fs::path(train_out) / "manifest.json");
      return kExitOk;
    }

    if (sug->parsed()) {
      Manifest m("suggest", args);
      Checkpoint ckpt = load_checkpoint(sug_ckpt);
      auto data = load_data_dir(sug_data);
      write_suggestions(sug_out, ckpt, tier_records(data, sug_tier), sug_k, err);
      m.input(sug_ckpt);
      m.input(fs::path(sug_data) / "processed.jsonl");
      m.output(sug_out);
      m.config() = {{"tier", sug_tier}, {"k", sug_k}};
      m.seed(ckpt.seed);
      m.write(manifest_beside(sug_out));
      return kExitOk;
    }

    if (eval->parsed()) {
      const std::uint64_t seed = resolve_seed(eval_seed, seed_value);
      auto refs = read_references(eval_refs);
      std::vector<std::string> order;
      std::vector<LemmaScores> runs_a;
      std::vector<MetricReport> reports;
      for (const auto& f : eval_sugg) {
        runs_a.push_back(score_file(f, refs, eval_symmetric, &order));
        reports.push_back(aggregate(runs_a.back()));
      }
      MetricReport avg = average_reports(reports);
      json report = avg.to_json();
      report["model"] = eval_model;
      report["split"] = eval_split;
      report["runs"] = reports.size();
      report["seed"] = seed;
      json per_run = json::array();
      for (const auto& r : reports) per_run.push_back(r.to_json());
      report["per_run"] = per_run;
      print_report(out, eval_model + " on " + eval_split, avg);
      if (!eval_compare.empty()) {
        std::vector<LemmaScores> runs_b;
        std::vector<MetricReport> reports_b;
        for (const auto& f : eval_compare) {
          runs_b.push_back(score_file(f, refs, eval_symmetric, &order));
          reports_b.push_back(aggregate(runs_b.back()));
        }
        json sig = json::object();
        for (auto [name, field] :
             {std::pair{"bleu4", &LemmaScores::bleu4},
              std::pair{"frag_acc", &LemmaScores::frag_acc},
              std::pair{"top1", &LemmaScores::top1},
              std::pair{"top5", &LemmaScores::top5}}) {
          auto a = mean_over_runs(runs_a, field);
          auto b = mean_over_runs(runs_b, field);
          const double p = a.empty() ? 1.0
                                     : bootstrap_compare(a, b, eval_resamples, seed);
          sig[name] = {{"p_value", p}, {"significant", p < 0.05}};
        }
        report["compare"] = average_reports(reports_b).to_json();
        report["significance"] = sig;
        print_report(out, "compared system", average_reports(reports_b));
        out << "paired bootstrap p-values (top1): "
            << sig["top1"]["p_value"].get<double>() << "\n";
      }
      if (!eval_out.empty()) {
        Manifest m("evaluate", args);
        write_text(eval_out, report.dump(2) + "\n");
        for (const auto& f : eval_sugg) m.input(f);
        for (const auto& f : eval_compare) m.input(f);
        m.input(eval_refs);
        m.output(eval_out);
        m.seed(seed);
        m.write(manifest_beside(eval_out));
      } else {
        out << report.dump(2) << "\n";
      }
      return kExitOk;
    }

    if (base->parsed()) {
      Manifest m("baseline", args);
      auto data = load_data_dir(base_data);
      auto train_recs = tier_records(data, base_train_tier);
      auto test_recs = tier_records(data, base_test_tier);
      std::map<std::string, std::vector<std::string>> raw;
      if (base_raw) {
        if (base_dataset.empty()) throw UsageError("--raw-tokens needs --dataset");
        for (const auto& r : load_dataset(base_dataset)) {
          std::vector<std::string> toks;
          for (const auto& t : extract_statement_tokens(r.stmt_tokens, r.name)) {
            toks.push_back(t.text);
          }
          raw[r.qualified_name] = std::move(toks);
        }
        m.input(base_dataset);
      }
      auto query = [&](const ProcessedRecord& r) {
        if (!base_raw) return r.input(InputKind::kStmt);
        auto it = raw.find(r.qualified_name);
        if (it == raw.end()) throw DataError("no raw statement for " + r.qualified_name);
        return it->second;
      };
      std::vector<std::vector<std::string>> docs;
      std::vector<std::string> names;
      for (const auto& r : train_recs) {
        docs.push_back(query(r));
        names.push_back(r.name);
      }
      auto index = TfIdfIndex::build(docs, names);
      std::ostringstream lines;
      for (const auto& r : test_recs) {
        json list = json::array();
        for (const auto& hit : index.retrieve(query(r), base_k)) {
          list.push_back({{"name", hit.name}, {"score", hit.similarity}});
        }
        lines << json{{"qname", r.qualified_name}, {"suggestions", list}}.dump()
              << '\n';
      }
      write_text(base_out, lines.str());
      m.output(base_out);
      if (!base_index.empty()) {
        write_text(base_index, index.to_json().dump() + "\n");
        m.output(base_index);
      }
      m.input(fs::path(base_data) / "processed.jsonl");
      m.config() = {{"k", base_k}, {"raw_tokens", base_raw},
                    {"train_tier", base_train_tier}, {"test_tier", base_test_tier}};
      m.write(manifest_beside(base_out));
      return kExitOk;
    }

    if (ft->parsed()) {
      Manifest m("finetune", args);
      const std::uint64_t seed = resolve_seed(ft_seed, seed_value);
      Checkpoint ckpt = load_checkpoint(ft_ckpt);
      ModelConfig expected = ckpt.model.config();
      if (ft_expect->count() > 0) {
        try {
          expected = ModelConfig::from_name(ft_model.model);
        } catch (const ConfigError& e) {
          throw UsageError("invalid model '" + ft_model.model + "': " + e.what());
        }
        expected.embedding_dim = ckpt.model.config().embedding_dim;
        expected.hidden_units = ckpt.model.config().hidden_units;
        expected.num_layers = ckpt.model.config().num_layers;
      }
      TrainConfig tcfg = train_config(ft_opts, seed);
      auto data = load_data_dir(ft_data);
      m.config() = {{"model", ckpt.model.config().to_json()},
                    {"train", tcfg.to_json()},
                    {"train_tier", ft_train_tier},
                    {"val_tier", ft_val_tier}};
      m.seed(seed);
      m.input(ft_ckpt);
      m.input(fs::path(ft_data) / "processed.jsonl");
      run_training(ckpt, tier_records(data, ft_train_tier),
                   tier_records(data, ft_val_tier), tcfg, ft_out,
                   ft_opts.keep_checkpoints, true, expected, err, m);
      m.write(fs::path(ft_out) / "manifest.json");
      return kExitOk;
    }

    if (cross->parsed()) {
      Manifest m("crossset", args);
      const std::uint64_t seed = resolve_seed(cross_seed, seed_value);
      ModelConfig config = model_config(cross_model);
      auto data = load_data_dir(cross_data);
      auto docs_of = [&](const std::string& tier) {
        if (tier == "all") {
          std::set<std::string> all;
          for (const auto& r : data.records) all.insert(r.doc_id);
          return all;
        }
        const auto& d = data.split.tier(tier);
        return std::set<std::string>(d.begin(), d.end());
      };
      auto test_docs = docs_of(cross_test);
      for (const std::string& tier : {cross_train, cross_ft}) {
        if (tier.empty()) continue;
        if (tier == cross_test) {
          err << "warning: training and test tier are both '" << tier << "'\n";
          continue;
        }
        for (const auto& d : docs_of(tier)) {
          if (test_docs.count(d)) {
            throw DataError("document " + d + " is in both tier '" + tier +
                            "' and the test tier");
          }
        }
      }
      auto train_recs = tier_records(data, cross_train);
      auto val_recs = tier_records(data, cross_val);
      auto test_recs = tier_records(data, cross_test);
      if (train_recs.empty()) throw EmptyTrainSet("tier '" + cross_train + "' is empty");
      const fs::path dir(cross_out);
      std::vector<MetricReport> reports;
      std::map<std::string, std::string> refs;
      for (const auto& r : test_recs) refs[r.qualified_name] = r.name;
      for (std::size_t run = 0; run < cross_runs; ++run) {
        const std::uint64_t run_seed = seed + run;
        const fs::path run_dir = dir / ("run_" + std::to_string(run));
        Checkpoint ckpt = fresh_model(config, train_recs, run_seed);
        TrainConfig tcfg = train_config(cross_opts, run_seed);
        run_training(ckpt, train_recs, val_recs, tcfg, run_dir,
                     cross_opts.keep_checkpoints, false, config, err, m);
        if (!cross_ft.empty()) {
          TrainConfig ftcfg = tcfg;
          ftcfg.max_steps = cross_ft_steps;
          run_training(ckpt, tier_records(data, cross_ft), val_recs, ftcfg,
                       run_dir / "finetuned", cross_opts.keep_checkpoints, true,
                       config, err, m);
        }
        const fs::path sfile = run_dir / "suggestions.jsonl";
        write_suggestions(sfile, ckpt, test_recs, cross_k, err);
        m.output(sfile);
        reports.push_back(aggregate(score_file(sfile, refs, false, nullptr)));
        print_report(out, "run " + std::to_string(run), reports.back());
      }
      MetricReport avg = average_reports(reports);
      json report = avg.to_json();
      report["model"] = config.name();
      report["split"] = cross_train + "->" + cross_test;
      report["runs"] = reports.size();
      report["seed"] = seed;
      write_text(dir / "report.json", report.dump(2) + "\n");
      print_report(out, config.name() + " " + cross_train + "->" + cross_test, avg);
      m.output(dir / "report.json");
      m.seed(seed);
      m.config() = {{"model", config.to_json()},
                    {"train", train_config(cross_opts, seed).to_json()},
                    {"tiers",
                     {{"train", cross_train},
                      {"val", cross_val},
                      {"test", cross_test},
                      {"finetune", cross_ft}}},
                    {"runs", cross_runs}};
      m.write(dir / "manifest.json");
      return kExitOk;
    }

    if (replay->parsed()) {
      json j = read_json_file(replay_manifest);
      std::vector<std::string> argv;
      try {
        argv = j.at("argv").get<std::vector<std::string>>();
      } catch (const json::exception& e) {
        throw DataError(std::string("manifest has no argv: ") + e.what());
      }
      if (!argv.empty() && argv.front() == "replay") {
        throw UsageError("a replay manifest cannot replay itself");
      }
      return run(argv, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnknownTierError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DatasetError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const SexpError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << "\n";
    return kExitData;
  } catch (const ConfigMismatch& e) {
    err << "checkpoint mismatch: " << e.what() << "\n";
    return kExitData;
  } catch (const EmptyTrainSet& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace lemma_namer::cli

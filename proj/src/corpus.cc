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

#include "lemma_namer/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "lemma_namer/random.h"

namespace lemma_namer {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(std::size_t line, const std::string& field,
                               const std::string& what) {
  throw DatasetError(DatasetError::Kind::kSchema, line, field,
                     "line " + std::to_string(line) + ": " + what);
}

const json& require(const json& obj, const char* key, std::size_t line,
                    json::value_t type) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    schema_error(line, key, std::string("missing field '") + key + "'");
  }
  if (it->type() != type) {
    schema_error(line, key, std::string("field '") + key + "' has wrong type");
  }
  return *it;
}

Sexp parse_field(const json& obj, const char* key, std::size_t line) {
  const auto& text = require(obj, key, line, json::value_t::string);
  try {
    return parse_sexp(text.get<std::string>());
  } catch (const SexpError& e) {
    throw DatasetError(DatasetError::Kind::kSexpParse, line, key,
                       "line " + std::to_string(line) + ", field '" + key +
                           "': " + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DatasetError(DatasetError::Kind::kIo, 0, "",
                       "cannot open " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    f(line, line_no);
  }
}

std::string last_component(std::string_view qualified) {
  auto dot = qualified.rfind('.');
  return std::string(dot == std::string_view::npos ? qualified
                                                    : qualified.substr(dot + 1));
}

const Sexp* find_theorem_decl(const Sexp& tree) {
  std::vector<const Sexp*> todo{&tree};
  while (!todo.empty()) {
    const Sexp* node = todo.back();
    todo.pop_back();
    if (!node->is_list()) continue;
    if (node->head() == "VernacStartTheoremProof") return node;
    const auto& kids = node->children();
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) todo.push_back(&*it);
  }
  return nullptr;
}

Summary summarize(std::vector<double> values) {
  Summary s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) /
           static_cast<double>(values.size());
  std::size_t n = values.size();
  s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return s;
}

double reduction(double raw, double trimmed) {
  return raw > 0 ? 1.0 - trimmed / raw : 0.0;
}

json summary_json(const Summary& s) {
  return {{"mean", s.mean}, {"min", s.min}, {"max", s.max},
          {"median", s.median}};
}

json row_json(const CorpusRow& r) {
  return {{"doc", r.doc_id},
          {"lemmas", r.num_lemmas},
          {"avg_name_chars", r.avg_name_chars},
          {"avg_name_subtokens", r.avg_name_subtokens},
          {"avg_stmt_chars", r.avg_stmt_chars},
          {"avg_stmt_subtokens", r.avg_stmt_subtokens}};
}

json shape_json(const TreeShapeReport& t) {
  return {{"depth", summary_json(t.depth)},
          {"nodes", summary_json(t.nodes)},
          {"flat_subtokens", summary_json(t.flat_subtokens)},
          {"trimmed_depth", summary_json(t.trimmed_depth)},
          {"trimmed_nodes", summary_json(t.trimmed_nodes)},
          {"trimmed_flat_subtokens", summary_json(t.trimmed_flat_subtokens)},
          {"depth_reduction", t.depth_reduction},
          {"node_reduction", t.node_reduction},
          {"subtoken_reduction", t.subtoken_reduction}};
}

TrimConfig config_for(const TrimConfig& base, const Sexp& tree,
                      std::size_t index, std::uint64_t tag) {
  if (base.variant != TrimConfig::Variant::kRandom) return base;
  // Random trimming matches the node count the standard heuristics reach.
  TrimConfig standard = base;
  standard.variant = TrimConfig::Variant::kStandard;
  TrimConfig out = base;
  out.target_node_count = sexp_node_count(trim(tree, standard));
  out.seed = base.seed ^ (0x9E3779B97F4A7C15ULL * (2 * index + tag + 1));
  return out;
}

}  // namespace

DatasetError::DatasetError(Kind kind, std::size_t line, std::string field,
                           const std::string& what)
    : std::runtime_error(what),
      kind_(kind),
      line_(line),
      field_(std::move(field)) {}

LemmaRecord parse_dataset_line(std::string_view line, std::size_t line_no) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    schema_error(line_no, "", std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) schema_error(line_no, "", "expected a JSON object");

  LemmaRecord r;
  r.doc_id = require(obj, "doc", line_no, json::value_t::string);
  r.name = require(obj, "name", line_no, json::value_t::string);
  r.qualified_name = require(obj, "qname", line_no, json::value_t::string);
  if (r.name.empty()) schema_error(line_no, "name", "empty lemma name");
  if (last_component(r.qualified_name) != r.name) {
    schema_error(line_no, "qname",
                 "qualified name '" + r.qualified_name +
                     "' does not end with '" + r.name + "'");
  }
  const auto& stmt = require(obj, "stmt", line_no, json::value_t::array);
  for (const auto& tok : stmt) {
    if (!tok.is_object() || !tok.contains("t") || !tok["t"].is_string() ||
        !tok.contains("k") || !tok["k"].is_string()) {
      schema_error(line_no, "stmt", "statement token must be {t, k}");
    }
    std::string kind = tok["k"];
    if (kind != "ident" && kind != "keyword") {
      schema_error(line_no, "stmt", "unknown token kind '" + kind + "'");
    }
    r.stmt_tokens.push_back({tok["t"].get<std::string>(),
                             kind == "ident" ? SourceToken::Kind::kIdentifier
                                             : SourceToken::Kind::kKeyword});
  }
  r.stree = parse_field(obj, "stree", line_no);
  r.ktree = parse_field(obj, "ktree", line_no);
  return r;
}

std::vector<LemmaRecord> parse_dataset(std::string_view text) {
  std::vector<LemmaRecord> records;
  for_each_line(text, [&](std::string_view line, std::size_t no) {
    records.push_back(parse_dataset_line(line, no));
  });
  return records;
}

std::vector<LemmaRecord> load_dataset(const std::string& path) {
  return parse_dataset(read_file(path));
}

json record_to_json(const LemmaRecord& record) {
  json stmt = json::array();
  for (const auto& t : record.stmt_tokens) {
    stmt.push_back(
        {{"t", t.text},
         {"k", t.kind == SourceToken::Kind::kIdentifier ? "ident" : "keyword"}});
  }
  return {{"doc", record.doc_id},         {"name", record.name},
          {"qname", record.qualified_name}, {"stmt", std::move(stmt)},
          {"stree", print_sexp(record.stree)},
          {"ktree", print_sexp(record.ktree)}};
}

void write_dataset(const std::string& path,
                   std::span<const LemmaRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DatasetError(DatasetError::Kind::kIo, 0, "", "cannot write " + path);
  }
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
}

std::vector<LemmaRecord> filter_outliers(std::vector<LemmaRecord> records,
                                         double quantile) {
  if (quantile < 0 || quantile > 1) {
    throw std::invalid_argument("quantile must lie in [0, 1]");
  }
  const std::size_t n = records.size();
  const auto drop = static_cast<std::size_t>(
      std::ceil(quantile * static_cast<double>(n) - 1e-9));
  if (drop == 0) return records;
  std::vector<std::size_t> depth(n);
  for (std::size_t i = 0; i < n; ++i) depth[i] = sexp_depth(records[i].ktree);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (depth[a] != depth[b]) return depth[a] > depth[b];
    return a > b;
  });
  std::vector<bool> dropped(n, false);
  for (std::size_t i = 0; i < std::min(drop, n); ++i) dropped[order[i]] = true;
  std::vector<LemmaRecord> kept;
  kept.reserve(n - std::min(drop, n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!dropped[i]) kept.push_back(std::move(records[i]));
  }
  return kept;
}

const std::vector<std::string>& DatasetSplit::tier(std::string_view name) const {
  if (name == "train") return train;
  if (name == "val") return val;
  if (name == "test") return test;
  throw UnknownTierError("unknown tier '" + std::string(name) + "'");
}

json DatasetSplit::to_json() const {
  return {{"seed", seed}, {"train", train}, {"val", val}, {"test", test}};
}

DatasetSplit DatasetSplit::from_json(const json& j) {
  DatasetSplit s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.train = j.at("train").get<std::vector<std::string>>();
  s.val = j.at("val").get<std::vector<std::string>>();
  s.test = j.at("test").get<std::vector<std::string>>();
  return s;
}

DatasetSplit split_documents(std::vector<std::string> docs,
                             SplitFractions fractions, std::uint64_t seed) {
  double total = fractions.train + fractions.val + fractions.test;
  if (std::abs(total - 1.0) > 1e-6 || fractions.train < 0 ||
      fractions.val < 0 || fractions.test < 0) {
    throw std::invalid_argument("split fractions must be non-negative and sum to 1");
  }
  std::sort(docs.begin(), docs.end());
  docs.erase(std::unique(docs.begin(), docs.end()), docs.end());
  Rng rng(seed);
  shuffle_in_place(docs, rng);
  const double n = static_cast<double>(docs.size());
  auto n_val = static_cast<std::size_t>(std::floor(fractions.val * n + 1e-9));
  auto n_test = static_cast<std::size_t>(std::floor(fractions.test * n + 1e-9));
  std::size_t n_train = docs.size() - n_val - n_test;

  DatasetSplit split;
  split.seed = seed;
  auto it = docs.begin();
  split.train.assign(it, it + static_cast<std::ptrdiff_t>(n_train));
  it += static_cast<std::ptrdiff_t>(n_train);
  split.val.assign(it, it + static_cast<std::ptrdiff_t>(n_val));
  it += static_cast<std::ptrdiff_t>(n_val);
  split.test.assign(it, docs.end());
  return split;
}

DatasetSplit split_by_document(std::span<const LemmaRecord> records,
                               SplitFractions fractions, std::uint64_t seed) {
  std::vector<std::string> docs;
  for (const auto& r : records) docs.push_back(r.doc_id);
  return split_documents(std::move(docs), fractions, seed);
}

Vocab::Vocab() {
  for (const char* s : {"<pad>", "<s>", "</s>", "<unk>"}) {
    ids_.emplace(s, static_cast<int>(tokens_.size()));
    tokens_.emplace_back(s);
  }
}

Vocab Vocab::from_tokens(const std::vector<std::string>& tokens) {
  Vocab v;
  if (tokens.size() < kNumSpecials ||
      !std::equal(v.tokens_.begin(), v.tokens_.end(), tokens.begin())) {
    throw std::invalid_argument("vocabulary must start with the special tokens");
  }
  for (std::size_t i = kNumSpecials; i < tokens.size(); ++i) {
    if (v.contains(tokens[i])) {
      throw std::invalid_argument("duplicate vocabulary entry '" + tokens[i] + "'");
    }
    v.add(tokens[i]);
  }
  return v;
}

int Vocab::add(const std::string& token) {
  auto [it, inserted] = ids_.emplace(token, static_cast<int>(tokens_.size()));
  if (inserted) tokens_.push_back(token);
  return it->second;
}

bool Vocab::contains(std::string_view token) const {
  return ids_.count(std::string(token)) > 0;
}

int Vocab::id_of(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocab::token_of(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw std::out_of_range("vocabulary id " + std::to_string(id));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

std::string_view input_kind_name(InputKind kind) {
  switch (kind) {
    case InputKind::kStmt:
      return "s";
    case InputKind::kSTree:
      return "fsexp";
    case InputKind::kTrimmedSTree:
      return "fsexpl1";
    case InputKind::kKTree:
      return "bsexp";
    case InputKind::kTrimmedKTree:
      return "bsexpl1";
  }
  return "?";
}

std::optional<InputKind> input_kind_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumInputKinds; ++i) {
    auto kind = static_cast<InputKind>(i);
    if (input_kind_name(kind) == name) return kind;
  }
  return std::nullopt;
}

std::vector<SourceToken> extract_statement_tokens(
    std::span<const SourceToken> sentence, std::string_view name) {
  std::size_t begin = 0;
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    if (sentence[i].kind == SourceToken::Kind::kIdentifier &&
        sentence[i].text == name) {
      begin = i + 1;
      break;
    }
  }
  std::size_t end = sentence.size();
  if (end > begin && sentence[end - 1].kind == SourceToken::Kind::kKeyword &&
      sentence[end - 1].text == ".") {
    --end;
  }
  return {sentence.begin() + static_cast<std::ptrdiff_t>(begin),
          sentence.begin() + static_cast<std::ptrdiff_t>(end)};
}

Sexp extract_statement_stree(const Sexp& stree, std::string_view name) {
  const Sexp* decl = find_theorem_decl(stree);
  if (decl == nullptr) return stree;
  const auto& kids = decl->children();
  const Sexp id = Sexp::list({Sexp::atom("Id"), Sexp::atom(std::string(name))});
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (kids[i] == id) {
      Sexp::List rest(kids.begin() + static_cast<std::ptrdiff_t>(i + 1),
                      kids.end());
      if (rest.size() == 1) return std::move(rest.front());
      return Sexp::list(std::move(rest));
    }
  }
  return stree;
}

ProcessedRecord preprocess_record(const LemmaRecord& record,
                                  const PreprocessOptions& options,
                                  std::size_t index) {
  const Lexicon& lex = *options.lexicon;
  ProcessedRecord p;
  p.doc_id = record.doc_id;
  p.name = record.name;
  p.qualified_name = record.qualified_name;
  p.name_subtokens = subtoken_texts(record.name, lex);

  auto slot = [&](InputKind k) -> std::vector<std::string>& {
    return p.inputs[static_cast<std::size_t>(k)];
  };
  auto stmt = extract_statement_tokens(record.stmt_tokens, record.name);
  slot(InputKind::kStmt) = subtokenize_statement(stmt, lex);

  Sexp stree = extract_statement_stree(record.stree, record.name);
  slot(InputKind::kSTree) = flatten_subtokenized(stree, lex);
  slot(InputKind::kTrimmedSTree) = flatten_subtokenized(
      trim(stree, config_for(options.trim, stree, index, 0)), lex);
  slot(InputKind::kKTree) = flatten_subtokenized(record.ktree, lex);
  slot(InputKind::kTrimmedKTree) = flatten_subtokenized(
      trim(record.ktree, config_for(options.trim, record.ktree, index, 1)),
      lex);
  return p;
}

json processed_to_json(const ProcessedRecord& record) {
  json inputs = json::object();
  for (std::size_t i = 0; i < kNumInputKinds; ++i) {
    inputs[std::string(input_kind_name(static_cast<InputKind>(i)))] =
        record.inputs[i];
  }
  return {{"doc", record.doc_id},
          {"name", record.name},
          {"qname", record.qualified_name},
          {"name_subtokens", record.name_subtokens},
          {"inputs", std::move(inputs)}};
}

ProcessedRecord processed_from_json(const json& j, std::size_t line_no) {
  try {
    ProcessedRecord p;
    p.doc_id = j.at("doc").get<std::string>();
    p.name = j.at("name").get<std::string>();
    p.qualified_name = j.at("qname").get<std::string>();
    p.name_subtokens = j.at("name_subtokens").get<std::vector<std::string>>();
    const auto& inputs = j.at("inputs");
    for (std::size_t i = 0; i < kNumInputKinds; ++i) {
      auto key = std::string(input_kind_name(static_cast<InputKind>(i)));
      if (inputs.contains(key)) {
        p.inputs[i] = inputs.at(key).get<std::vector<std::string>>();
      }
    }
    return p;
  } catch (const json::exception& e) {
    schema_error(line_no, "", std::string("processed record: ") + e.what());
  }
}

std::vector<ProcessedRecord> load_processed(const std::string& path) {
  std::vector<ProcessedRecord> out;
  for_each_line(read_file(path), [&](std::string_view line, std::size_t no) {
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      schema_error(no, "", std::string("invalid JSON: ") + e.what());
    }
    out.push_back(processed_from_json(j, no));
  });
  return out;
}

void write_processed(const std::string& path,
                     std::span<const ProcessedRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DatasetError(DatasetError::Kind::kIo, 0, "", "cannot write " + path);
  }
  for (const auto& r : records) out << processed_to_json(r).dump() << '\n';
}

std::vector<ProcessedRecord> select_docs(std::span<const ProcessedRecord> records,
                                         std::span<const std::string> docs) {
  std::set<std::string_view> wanted(docs.begin(), docs.end());
  std::vector<ProcessedRecord> out;
  for (const auto& r : records) {
    if (wanted.count(r.doc_id)) out.push_back(r);
  }
  return out;
}

Vocabularies build_vocab(std::span<const ProcessedRecord> train_records,
                         std::span<const InputKind> input_kinds) {
  if (train_records.empty()) {
    throw std::invalid_argument("cannot build a vocabulary from no records");
  }
  std::map<std::string, std::size_t> name_counts, input_counts;
  for (const auto& r : train_records) {
    for (const auto& t : r.name_subtokens) ++name_counts[t];
    for (InputKind k : input_kinds) {
      for (const auto& t : r.input(k)) ++input_counts[t];
    }
  }
  auto make = [](const std::map<std::string, std::size_t>& counts) {
    std::vector<std::pair<std::string, std::size_t>> entries(counts.begin(),
                                                             counts.end());
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    Vocab v;
    for (const auto& [token, count] : entries) v.add(token);
    return v;
  };
  return {make(name_counts), make(input_counts)};
}

json CorpusReport::to_json() const {
  json rows = json::array();
  for (const auto& r : per_doc) rows.push_back(row_json(r));
  return {{"num_docs", num_docs},
          {"num_lemmas", aggregate.num_lemmas},
          {"aggregate", row_json(aggregate)},
          {"per_doc", std::move(rows)},
          {"stree", shape_json(stree)},
          {"ktree", shape_json(ktree)}};
}

CorpusReport corpus_report(std::span<const LemmaRecord> records,
                           const PreprocessOptions& options) {
  const Lexicon& lex = *options.lexicon;
  struct Acc {
    std::size_t n = 0;
    double name_chars = 0, name_sub = 0, stmt_chars = 0, stmt_sub = 0;
  };
  std::map<std::string, Acc> docs;
  Acc all;
  struct Shapes {
    std::vector<double> d, n, f, td, tn, tf;
  } st, kt;

  auto add_shapes = [&](Shapes& s, const Sexp& tree, const Sexp& trimmed) {
    TreeStats raw = tree_stats(tree, lex);
    TreeStats cut = tree_stats(trimmed, lex);
    s.d.push_back(static_cast<double>(raw.depth));
    s.n.push_back(static_cast<double>(raw.node_count));
    s.f.push_back(static_cast<double>(raw.flat_subtoken_count));
    s.td.push_back(static_cast<double>(cut.depth));
    s.tn.push_back(static_cast<double>(cut.node_count));
    s.tf.push_back(static_cast<double>(cut.flat_subtoken_count));
  };

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    auto stmt = extract_statement_tokens(r.stmt_tokens, r.name);
    std::string joined;
    for (const auto& t : stmt) {
      if (!joined.empty()) joined += ' ';
      joined += t.text;
    }
    double name_sub = static_cast<double>(subtokenize_name(r.name, lex).size());
    double stmt_sub = static_cast<double>(subtokenize_statement(stmt, lex).size());
    for (Acc* acc : {&docs[r.doc_id], &all}) {
      ++acc->n;
      acc->name_chars += static_cast<double>(r.name.size());
      acc->name_sub += name_sub;
      acc->stmt_chars += static_cast<double>(joined.size());
      acc->stmt_sub += stmt_sub;
    }
    Sexp stree = extract_statement_stree(r.stree, r.name);
    add_shapes(st, stree, trim(stree, config_for(options.trim, stree, i, 0)));
    add_shapes(kt, r.ktree, trim(r.ktree, config_for(options.trim, r.ktree, i, 1)));
  }

  auto row = [](const std::string& id, const Acc& a) {
    CorpusRow r;
    r.doc_id = id;
    r.num_lemmas = a.n;
    if (a.n == 0) return r;
    double n = static_cast<double>(a.n);
    r.avg_name_chars = a.name_chars / n;
    r.avg_name_subtokens = a.name_sub / n;
    r.avg_stmt_chars = a.stmt_chars / n;
    r.avg_stmt_subtokens = a.stmt_sub / n;
    return r;
  };
  auto shape = [](Shapes& s) {
    TreeShapeReport t;
    t.depth = summarize(s.d);
    t.nodes = summarize(s.n);
    t.flat_subtokens = summarize(s.f);
    t.trimmed_depth = summarize(s.td);
    t.trimmed_nodes = summarize(s.tn);
    t.trimmed_flat_subtokens = summarize(s.tf);
    t.depth_reduction = reduction(t.depth.mean, t.trimmed_depth.mean);
    t.node_reduction = reduction(t.nodes.mean, t.trimmed_nodes.mean);
    t.subtoken_reduction =
        reduction(t.flat_subtokens.mean, t.trimmed_flat_subtokens.mean);
    return t;
  };

  CorpusReport report;
  report.num_docs = docs.size();
  for (const auto& [id, acc] : docs) report.per_doc.push_back(row(id, acc));
  report.aggregate = row("*", all);
  report.stree = shape(st);
  report.ktree = shape(kt);
  return report;
}

}  // namespace lemma_namer

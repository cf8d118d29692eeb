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

// Lemma datasets: loading, outlier filtering, document-level splits,
// vocabularies, model-input preparation and corpus statistics.

#ifndef LEMMA_NAMER_CORPUS_H_
#define LEMMA_NAMER_CORPUS_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "lemma_namer/sexp.h"
#include "lemma_namer/subtok.h"
#include "lemma_namer/tree.h"

namespace lemma_namer {

struct LemmaRecord {
  std::string doc_id;
  std::string name;
  std::string qualified_name;
  std::vector<SourceToken> stmt_tokens;
  Sexp stree;
  Sexp ktree;
};

class DatasetError : public std::runtime_error {
 public:
  enum class Kind { kIo, kSchema, kSexpParse };
  DatasetError(Kind kind, std::size_t line, std::string field,
               const std::string& what);
  Kind kind() const { return kind_; }
  // 1-based line number; 0 when not tied to a line.
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::string field_;
};

// JSON-lines: {"doc", "name", "qname", "stmt": [{"t", "k"}], "stree", "ktree"}.
std::vector<LemmaRecord> load_dataset(const std::string& path);
std::vector<LemmaRecord> parse_dataset(std::string_view text);
LemmaRecord parse_dataset_line(std::string_view line, std::size_t line_no = 0);
nlohmann::json record_to_json(const LemmaRecord& record);
void write_dataset(const std::string& path, std::span<const LemmaRecord> records);

// Drops the ceil(quantile * N) records with the deepest k-trees; among equal
// depths later records go first. Survivors keep their order.
std::vector<LemmaRecord> filter_outliers(std::vector<LemmaRecord> records,
                                         double quantile = 0.25);

class UnknownTierError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
  std::uint64_t seed = 0;

  // "train", "val" or "test"; throws UnknownTierError otherwise.
  const std::vector<std::string>& tier(std::string_view name) const;

  nlohmann::json to_json() const;
  static DatasetSplit from_json(const nlohmann::json& j);
};

struct SplitFractions {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

// Shuffles the distinct documents (sorted first) with `seed`; val and test
// take floor(fraction * docs), train takes the remainder.
DatasetSplit split_by_document(std::span<const LemmaRecord> records,
                               SplitFractions fractions, std::uint64_t seed);
DatasetSplit split_documents(std::vector<std::string> docs,
                             SplitFractions fractions, std::uint64_t seed);

class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;
  static constexpr int kNumSpecials = 4;

  Vocab();
  // Rebuilds a vocabulary from its full token list (specials included).
  static Vocab from_tokens(const std::vector<std::string>& tokens);

  // Returns the id of `token`, adding it when new. Special spellings map to
  // their reserved ids.
  int add(const std::string& token);
  bool contains(std::string_view token) const;
  // kUnk for unknown tokens.
  int id_of(std::string_view token) const;
  const std::string& token_of(int id) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

enum class InputKind { kStmt, kSTree, kTrimmedSTree, kKTree, kTrimmedKTree };
inline constexpr std::size_t kNumInputKinds = 5;

// Short names: s, fsexp, fsexpl1, bsexp, bsexpl1.
std::string_view input_kind_name(InputKind kind);
std::optional<InputKind> input_kind_from_name(std::string_view name);

// A lemma after sub-tokenization and tree flattening.
struct ProcessedRecord {
  std::string doc_id;
  std::string name;
  std::string qualified_name;
  std::vector<std::string> name_subtokens;
  std::array<std::vector<std::string>, kNumInputKinds> inputs;

  const std::vector<std::string>& input(InputKind kind) const {
    return inputs[static_cast<std::size_t>(kind)];
  }
};

// Statement tokens between the lemma name and the closing period.
std::vector<SourceToken> extract_statement_tokens(
    std::span<const SourceToken> sentence, std::string_view name);
// The binders and type following the `(Id name)` child of a theorem
// declaration; the whole tree when no declaration is found.
Sexp extract_statement_stree(const Sexp& stree, std::string_view name);

struct PreprocessOptions {
  TrimConfig trim;
  const Lexicon* lexicon = &Lexicon::default_lexicon();
};

// `index` seeds the random trimming variant per record.
ProcessedRecord preprocess_record(const LemmaRecord& record,
                                  const PreprocessOptions& options,
                                  std::size_t index = 0);

nlohmann::json processed_to_json(const ProcessedRecord& record);
ProcessedRecord processed_from_json(const nlohmann::json& j,
                                    std::size_t line_no = 0);
std::vector<ProcessedRecord> load_processed(const std::string& path);
void write_processed(const std::string& path,
                     std::span<const ProcessedRecord> records);

std::vector<ProcessedRecord> select_docs(std::span<const ProcessedRecord> records,
                                         std::span<const std::string> docs);

struct Vocabularies {
  Vocab names;
  Vocab inputs;
};

// Tokens are ordered by descending frequency, then lexicographically.
Vocabularies build_vocab(std::span<const ProcessedRecord> train_records,
                         std::span<const InputKind> input_kinds);

struct Summary {
  double mean = 0;
  double min = 0;
  double max = 0;
  double median = 0;
};

struct CorpusRow {
  std::string doc_id;
  std::size_t num_lemmas = 0;
  double avg_name_chars = 0;
  double avg_name_subtokens = 0;
  double avg_stmt_chars = 0;
  double avg_stmt_subtokens = 0;
};

struct TreeShapeReport {
  Summary depth, nodes, flat_subtokens;
  Summary trimmed_depth, trimmed_nodes, trimmed_flat_subtokens;
  // 1 - mean_trimmed / mean_raw; 0 for an empty corpus.
  double depth_reduction = 0;
  double node_reduction = 0;
  double subtoken_reduction = 0;
};

struct CorpusReport {
  std::size_t num_docs = 0;
  std::vector<CorpusRow> per_doc;
  CorpusRow aggregate;
  TreeShapeReport stree;
  TreeShapeReport ktree;

  nlohmann::json to_json() const;
};

CorpusReport corpus_report(std::span<const LemmaRecord> records,
                           const PreprocessOptions& options = {});

}  // namespace lemma_namer

#endif  // LEMMA_NAMER_CORPUS_H_

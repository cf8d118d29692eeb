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

#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "gradcheck_suite.h"
#include "lemma_namer/beam_search.h"
#include "lemma_namer/seq2seq.h"

namespace lemma_namer {
namespace {

using nnet::Mat;

Mat<float>& param(Seq2Seq<float>& m, const std::string& name) {
  for (auto& p : m.parameters()) {
    if (p.name == name) return *p.value;
  }
  FAIL("no parameter " << name);
  throw std::logic_error("unreachable");
}

// Name vocabulary: specials, then a, _, mem, b, c, d.
Vocab name_vocab() {
  Vocab v;
  for (const char* t : {"a", "_", "mem", "b", "c", "d"}) v.add(t);
  return v;
}

ProcessedRecord record(const std::vector<std::string>& stmt,
                       const std::vector<std::string>& name) {
  ProcessedRecord r;
  r.name_subtokens = name;
  for (const auto& s : name) r.name += s;
  r.inputs[static_cast<std::size_t>(InputKind::kStmt)] = stmt;
  r.inputs[static_cast<std::size_t>(InputKind::kTrimmedKTree)] = stmt;
  return r;
}

Vocabularies vocabs_for(const std::vector<std::string>& inputs) {
  Vocabularies v{name_vocab(), Vocab()};
  for (const auto& t : inputs) v.inputs.add(t);
  return v;
}

ModelConfig small(const std::string& name) {
  ModelConfig c = ModelConfig::from_name(name);
  c.embedding_dim = 8;
  c.hidden_units = 6;
  c.max_decode_len = 12;
  return c;
}

TEST_CASE("model names") {
  auto c = ModelConfig::from_name("ln-s+bsexpl1+attn+copy");
  CHECK(c.inputs == std::vector<InputKind>{InputKind::kStmt, InputKind::kTrimmedKTree});
  CHECK(c.use_attention);
  CHECK(c.use_copy);
  CHECK(c.name() == "ln-s+bsexpl1+attn+copy");
  CHECK(ModelConfig::from_name("s+fsexpl1").name() == "ln-s+fsexpl1");
  CHECK(c.embedding_dim == 200);
  CHECK(c.hidden_units == 200);
  CHECK(c.num_layers == 1);
  CHECK(c.dropout == 0.5);
  CHECK(c.beam_size == 5);
  for (const char* bad : {"", "ln-", "attn", "s+copy", "s+s", "s+attn+attn",
                          "s+tree", "s+attn+bsexp", "s++attn"}) {
    INFO(bad);
    CHECK_THROWS_AS(ModelConfig::from_name(bad), ConfigError);
  }
  CHECK(ModelConfig::from_json(c.to_json()) == c);
  ModelConfig off = c;
  off.hidden_units = 64;
  CHECK_NOTHROW(off.validate());
  CHECK_THROWS_AS(off.validate(true), ConfigError);
  off.hidden_units = 500;
  off.num_layers = 4;
  CHECK_THROWS_AS(off.validate(true), ConfigError);
}

TEST_CASE("encoding") {
  auto v = vocabs_for({"x", "y"});
  auto cfg = small("s+attn+copy");
  auto ex = encode_example(record({"x", "mem", "zz", "y", "zz"}, {"mem", "_", "zz"}),
                           cfg, v);
  const int V = static_cast<int>(v.names.size());
  CHECK(ex.inputs.size() == 1);
  CHECK(ex.inputs[0] == std::vector<int>{4, Vocab::kUnk, Vocab::kUnk, 5, Vocab::kUnk});
  CHECK(ex.source_ids == std::vector<int>{V, v.names.id_of("mem"), V + 1, V + 2, V + 1});
  CHECK(ex.oov_tokens == std::vector<std::string>{"x", "zz", "y"});
  CHECK(ex.decoder_inputs ==
        std::vector<int>{Vocab::kBos, v.names.id_of("mem"), v.names.id_of("_"), V + 1});
  CHECK(ex.targets ==
        std::vector<int>{v.names.id_of("mem"), v.names.id_of("_"), V + 1, Vocab::kEos});

  auto nocopy = encode_example(record({"zz"}, {"zz"}), small("s+attn"), v);
  CHECK(nocopy.targets == std::vector<int>{Vocab::kUnk, Vocab::kEos});

  auto empty = encode_example(record({}, {"a"}), cfg, v);
  CHECK(empty.inputs[0] == std::vector<int>{Vocab::kPad});

  auto trunc_cfg = cfg;
  trunc_cfg.max_input_len = 2;
  auto t = encode_example(record({"x", "y", "x"}, {"a"}), trunc_cfg, v);
  CHECK(t.truncated);
  CHECK(t.inputs[0].size() == 2);
}

TEST_CASE("uniform output gives ln V per step") {
  auto v = vocabs_for({"x"});
  for (const char* name : {"s", "s+attn"}) {
    Seq2Seq<float> m(small(name), v.inputs.size(), v.names.size());
    m.set_zero();
    auto ex = encode_example(record({"x", "x"}, {"a", "_", "b"}), m.config(), v);
    CHECK(m.forward_backward(ex) ==
          doctest::Approx(std::log(static_cast<double>(v.names.size()))).epsilon(1e-6));
  }
}

TEST_CASE("reference length limit") {
  auto v = vocabs_for({"x"});
  auto cfg = small("s");
  cfg.max_decode_len = 3;
  Seq2Seq<float> m(cfg, v.inputs.size(), v.names.size());
  m.init(1);
  auto ok = encode_example(record({"x"}, {"a", "_"}), cfg, v);
  CHECK_NOTHROW(m.forward_backward(ok));
  auto bad = encode_example(record({"x"}, {"a", "_", "b"}), cfg, v);
  CHECK_THROWS_AS(m.forward_backward(bad), ReferenceTooLong);
}

TEST_CASE("teacher forcing feeds the reference") {
  auto v = vocabs_for({"x", "y"});
  for (const char* name : {"s", "s+bsexpl1+attn", "s+attn+copy"}) {
    Seq2Seq<double> m(small(name), v.inputs.size(), v.names.size());
    m.init(3);
    auto ex = encode_example(record({"x", "q", "y"}, {"b", "_", "q", "c"}),
                             m.config(), v);
    Seq2Seq<double>::ForwardTrace trace;
    double loss = m.forward_backward(ex, nullptr, nullptr, &trace);
    CHECK(trace.decoder_inputs == ex.decoder_inputs);
    REQUIRE(trace.target_log_probs.size() == ex.targets.size());
    Seq2Seq<double>::DecoderState state;
    auto enc = m.encode(ex, &state);
    double sum = 0;
    for (std::size_t t = 0; t < ex.targets.size(); ++t) {
      auto lp = m.step(enc, state, ex.decoder_inputs[t]);
      CHECK(lp(ex.targets[t]) ==
            doctest::Approx(trace.target_log_probs[t]).epsilon(1e-12));
      sum -= lp(ex.targets[t]);
    }
    CHECK(loss == doctest::Approx(sum / static_cast<double>(ex.targets.size())));
  }
}

TEST_CASE("copy mass on source-only tokens") {
  auto v = vocabs_for({"x"});
  Seq2Seq<float> copy(small("s+attn+copy"), v.inputs.size(), v.names.size());
  copy.init(4);
  Seq2Seq<float> plain(small("s+attn"), v.inputs.size(), v.names.size());
  plain.init(4);
  auto r = record({"x", "zz"}, {"a"});
  auto ex = encode_example(r, copy.config(), v);
  const int V = static_cast<int>(v.names.size());
  Seq2Seq<float>::DecoderState s1, s2;
  auto e1 = copy.encode(ex, &s1);
  auto lp1 = copy.step(e1, s1, Vocab::kBos);
  CHECK(lp1.size() == V + 2);
  CHECK(std::isfinite(lp1(V + 1)));
  CHECK(lp1.array().exp().sum() == doctest::Approx(1.0).epsilon(1e-5));
  auto e2 = plain.encode(encode_example(r, plain.config(), v), &s2);
  auto lp2 = plain.step(e2, s2, Vocab::kBos);
  for (int id = V; id < lp2.size(); ++id) {
    CHECK(std::exp(lp2(id)) == 0.0f);
  }
}

// Greedy decoding under the same ban as the beam search.
std::vector<int> greedy(const Seq2Seq<double>& m, const EncodedExample& ex,
                        const Vocab& names, double* score) {
  Seq2Seq<double>::DecoderState state;
  auto enc = m.encode(ex, &state);
  std::vector<int> out;
  std::set<std::string> seen;
  int input = Vocab::kBos;
  *score = 0;
  for (std::size_t t = 0; t < m.config().max_decode_len; ++t) {
    auto lp = m.step(enc, state, input);
    int best = -1;
    for (int id = 0; id < lp.size(); ++id) {
      if (id == Vocab::kPad || id == Vocab::kBos || id == Vocab::kUnk) continue;
      std::string text = token_text(id, names, ex);
      if (id != Vocab::kEos && text != "_" && seen.count(text)) continue;
      if (!std::isfinite(lp(id))) continue;
      if (best < 0 || lp(id) > lp(best)) best = id;
    }
    if (best < 0) break;
    *score += lp(best);
    if (best == Vocab::kEos) return out;
    out.push_back(best);
    std::string text = token_text(best, names, ex);
    if (text != "_") seen.insert(text);
    input = best;
  }
  return out;
}

TEST_CASE("beam of one is greedy with the ban") {
  auto v = vocabs_for({"x", "y", "a", "mem"});
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto cfg = small(seed % 2 ? "s+attn+copy" : "s+bsexpl1+attn");
    Seq2Seq<double> m(cfg, v.inputs.size(), v.names.size());
    Rng rng(seed);
    nnet::init_uniform(m.parameters(), rng, -1.5, 1.5);
    auto ex = encode_example(record({"x", "mem", "qq", "y"}, {"a"}), cfg, v, false);
    double score;
    auto g = greedy(m, ex, v.names, &score);
    auto hyps = beam_search(m, ex, v.names, 1, 1);
    REQUIRE(hyps.size() == 1);
    CHECK(hyps[0].token_ids == g);
    CHECK(hyps[0].log_prob == doctest::Approx(score).epsilon(1e-12));
  }
}

TEST_CASE("repeated sub-tokens are banned") {
  auto v = vocabs_for({"x"});
  auto cfg = small("s");
  Seq2Seq<float> m(cfg, v.inputs.size(), v.names.size());
  m.set_zero();
  auto& bias = param(m, "generator.bias");
  bias(v.names.id_of("mem")) = 10;
  bias(Vocab::kEos) = 8;
  bias(v.names.id_of("_")) = 6;
  auto ex = encode_example(record({"x"}, {"a"}), cfg, v, false);
  auto hyps = beam_search(m, ex, v.names, 5, 5);
  REQUIRE(!hyps.empty());
  for (const auto& h : hyps) {
    std::multiset<std::string> counts(h.subtokens.begin(), h.subtokens.end());
    CHECK(counts.count("mem") <= 1);
  }
  bool found = false;
  for (const auto& h : hyps) found |= h.name == "mem" && h.finished;
  CHECK(found);
  for (std::size_t i = 1; i < hyps.size(); ++i) {
    CHECK(hyps[0].log_prob >= hyps[i].log_prob);
  }
}

TEST_CASE("deterministic emission") {
  auto v = vocabs_for({"x"});
  auto cfg = small("s");
  Seq2Seq<float> m(cfg, v.inputs.size(), v.names.size());
  m.set_zero();
  // Only BOS drives the decoder cell; a second `a` is banned, leaving EOS.
  auto& emb = param(m, "name_embedding.table");
  auto& w = param(m, "decoder.layer0.w_input");
  auto& gen_w = param(m, "generator.weight");
  emb(0, Vocab::kBos) = 1;
  w(12, 0) = 20;  // first unit of the cell-candidate block
  param(m, "decoder.layer0.bias").block(18, 0, 6, 1).setConstant(20);
  param(m, "decoder.layer0.bias").block(0, 0, 6, 1).setConstant(20);
  gen_w(v.names.id_of("a"), 0) = 40;
  param(m, "generator.bias")(Vocab::kEos) = 10;
  auto ex = encode_example(record({"x"}, {"a"}), cfg, v, false);
  auto s = suggest(m, ex, v.names, 1);
  REQUIRE(s.size() == 1);
  CHECK(s[0].name == "a");
}

TEST_CASE("suggestions are distinct and bounded") {
  auto v = vocabs_for({"x", "y"});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto cfg = small("s+attn+copy");
    Seq2Seq<float> m(cfg, v.inputs.size(), v.names.size());
    Rng rng(seed);
    nnet::init_uniform(m.parameters(), rng, -1, 1);
    auto ex = encode_example(record({"x", "y", "qq"}, {"a"}), cfg, v, false);
    for (std::size_t k : {1, 3, 5, 8}) {
      auto s = suggest(m, ex, v.names, k);
      CHECK(s.size() <= k);
      CHECK(!s.empty());
      std::set<std::string> names;
      for (const auto& x : s) names.insert(x.name);
      CHECK(names.size() == s.size());
    }
    CHECK_THROWS_AS(beam_search(m, ex, v.names, 2, 3), std::invalid_argument);
  }
}

TEST_CASE("precision cast") {
  Seq2Seq<double> d(testing::gradcheck_internal::tiny_config(), 12, 8);
  d.init(2);
  Seq2Seq<float> f = d.cast<float>();
  auto ex = testing::gradcheck_internal::tiny_example();
  CHECK(f.forward_backward(ex) == doctest::Approx(d.forward_backward(ex)).epsilon(1e-5));
}

}  // namespace
}  // namespace lemma_namer

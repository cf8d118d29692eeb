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

#include "lemma_namer/checkpoint.h"

#include <bit>
#include <fstream>
#include <sstream>

namespace lemma_namer {

using nlohmann::json;

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
  auto& model = const_cast<Seq2Seq<float>&>(checkpoint.model);
  auto params = model.parameters();
  json names = json::array();
  json shapes = json::array();
  for (const auto& p : params) {
    names.push_back(p.name);
    shapes.push_back({p.value->rows(), p.value->cols()});
  }
  json header = {{"format", kCheckpointFormat},
                 {"version", kCheckpointVersion},
                 {"config", model.config().to_json()},
                 {"seed", checkpoint.seed},
                 {"step", checkpoint.step},
                 {"input_vocab", checkpoint.vocabs.inputs.tokens()},
                 {"name_vocab", checkpoint.vocabs.names.tokens()},
                 {"params", names},
                 {"shapes", shapes}};
  std::string out = header.dump();
  out += '\n';
  for (const auto& p : params) {
    // Row-major, matching DenseArray.
    const auto dense = nnet::DenseArray<float>::from_matrix(*p.value);
    for (float f : dense.values) {
      auto bits = std::bit_cast<std::uint32_t>(f);
      for (int b = 0; b < 4; ++b) {
        out += static_cast<char>((bits >> (8 * b)) & 0xFF);
      }
    }
  }
  return out;
}

Checkpoint deserialize_checkpoint(const std::string& bytes) {
  const std::size_t eol = bytes.find('\n');
  if (eol == std::string::npos) throw CheckpointError("missing checkpoint header");
  json header;
  try {
    header = json::parse(bytes.substr(0, eol));
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("unreadable checkpoint header: ") + e.what());
  }
  Checkpoint c;
  std::vector<std::string> names;
  std::vector<std::pair<long, long>> shapes;
  try {
    if (header.at("format").get<std::string>() != kCheckpointFormat) {
      throw CheckpointError("not a lemma-namer checkpoint");
    }
    if (header.at("version").get<int>() != kCheckpointVersion) {
      throw CheckpointError("unsupported checkpoint version " +
                            header.at("version").dump());
    }
    c.seed = header.at("seed").get<std::uint64_t>();
    c.step = header.at("step").get<std::size_t>();
    c.vocabs.inputs = Vocab::from_tokens(header.at("input_vocab"));
    c.vocabs.names = Vocab::from_tokens(header.at("name_vocab"));
    auto config = ModelConfig::from_json(header.at("config"));
    c.model = Seq2Seq<float>(config, c.vocabs.inputs.size(), c.vocabs.names.size());
    names = header.at("params").get<std::vector<std::string>>();
    shapes = header.at("shapes").get<std::vector<std::pair<long, long>>>();
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("bad checkpoint config: ") + e.what());
  }
  auto params = c.model.parameters();
  if (names.size() != params.size() || shapes.size() != params.size()) {
    throw CheckpointError("checkpoint parameter list does not match its config");
  }
  std::size_t at = eol + 1;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& m = *params[i].value;
    if (names[i] != params[i].name || shapes[i].first != m.rows() ||
        shapes[i].second != m.cols()) {
      throw CheckpointError("checkpoint parameter " + names[i] +
                            " does not match the model");
    }
    nnet::DenseArray<float> dense;
    dense.shape = {static_cast<std::size_t>(m.rows()),
                   static_cast<std::size_t>(m.cols())};
    dense.values.resize(static_cast<std::size_t>(m.size()));
    if (bytes.size() < at + 4 * dense.values.size()) {
      throw CheckpointError("checkpoint is truncated");
    }
    for (float& f : dense.values) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at++]))
                << (8 * b);
      }
      f = std::bit_cast<float>(bits);
    }
    m = dense.to_matrix();
  }
  if (at != bytes.size()) throw CheckpointError("trailing bytes in checkpoint");
  return c;
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + path);
  const std::string bytes = serialize_checkpoint(checkpoint);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("failed writing " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_checkpoint(buf.str());
}

}  // namespace lemma_namer

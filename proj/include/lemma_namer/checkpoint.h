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

// Checkpoints: one JSON header line followed by the parameters as
// little-endian 32-bit floats, concatenated in header order.

#ifndef LEMMA_NAMER_CHECKPOINT_H_
#define LEMMA_NAMER_CHECKPOINT_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include "lemma_namer/corpus.h"
#include "lemma_namer/seq2seq.h"

namespace lemma_namer {

inline constexpr std::string_view kCheckpointFormat = "lemma-namer-checkpoint";
inline constexpr int kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  Seq2Seq<float> model;
  Vocabularies vocabs;
  std::uint64_t seed = 0;
  std::size_t step = 0;
};

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lemma_namer

#endif  // LEMMA_NAMER_CHECKPOINT_H_

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

// The lemma-namer command line: preprocess, stats, train, suggest, evaluate,
// baseline, finetune and crossset, plus generate and replay helpers.

#ifndef LEMMA_NAMER_CLI_H_
#define LEMMA_NAMER_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace lemma_namer::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitRuntime = 4;

inline constexpr const char* kSeedEnv = "LEMMA_NAMER_SEED";
inline constexpr const char* kVersion = "1.0.0";

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace lemma_namer::cli

#endif  // LEMMA_NAMER_CLI_H_

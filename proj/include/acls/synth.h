// Copyright 2026 The acls Authors. All rights reserved.
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

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "acls/corpus.h"

namespace acls {

struct SynthOptions {
  size_t classes = 14;
  size_t per_class = 200;
  uint64_t seed = 7;
  size_t signatures_per_class = 3;
  size_t filler_vocab = 40;
};

// Keyword-separable corpus: class c owns tokens sig<c>a, sig<c>b, ...; every
// text holds 2-5 of its class's signature tokens and 3-8 shared fillers in
// random order. Examples come out class-major.
struct SyntheticCorpus {
  Dataset dataset;
  std::vector<std::vector<std::string>> signatures;  // per class
  std::vector<std::string> fillers;
};

SyntheticCorpus make_synthetic_corpus(const SynthOptions& options);

// "class_00", "class_01", ...
LabelMap synthetic_label_map(size_t classes);

}  // namespace acls

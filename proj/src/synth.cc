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

#include "acls/synth.h"

#include <cstdio>

#include "acls/errors.h"
#include "acls/prng.h"

namespace acls {

LabelMap synthetic_label_map(size_t classes) {
  std::vector<std::string> names;
  char buf[32];
  for (size_t c = 0; c < classes; ++c) {
    std::snprintf(buf, sizeof(buf), "class_%02zu", c);
    names.emplace_back(buf);
  }
  return LabelMap(std::move(names));
}

SyntheticCorpus make_synthetic_corpus(const SynthOptions& options) {
  if (options.classes < 2) throw ConfigError("synth: need at least 2 classes");
  if (options.signatures_per_class == 0 || options.filler_vocab == 0) {
    throw ConfigError("synth: signature and filler vocabularies must be non-empty");
  }
  SyntheticCorpus corpus;
  corpus.dataset.label_map = synthetic_label_map(options.classes);
  char buf[32];
  for (size_t c = 0; c < options.classes; ++c) {
    std::vector<std::string> sig;
    for (size_t k = 0; k < options.signatures_per_class; ++k) {
      std::snprintf(buf, sizeof(buf), "sig%02zu%c", c, static_cast<char>('a' + k % 26));
      sig.emplace_back(buf);
      if (k >= 26) sig.back() += std::to_string(k / 26);
    }
    corpus.signatures.push_back(std::move(sig));
  }
  for (size_t f = 0; f < options.filler_vocab; ++f) {
    std::snprintf(buf, sizeof(buf), "w%02zu", f);
    corpus.fillers.emplace_back(buf);
  }

  Prng rng(options.seed);
  for (size_t c = 0; c < options.classes; ++c) {
    const auto& sig = corpus.signatures[c];
    for (size_t n = 0; n < options.per_class; ++n) {
      std::vector<std::string> words;
      const size_t n_sig = 2 + rng.uniform_index(4);
      const size_t n_fill = 3 + rng.uniform_index(6);
      for (size_t i = 0; i < n_sig; ++i) words.push_back(sig[rng.uniform_index(sig.size())]);
      for (size_t i = 0; i < n_fill; ++i) {
        words.push_back(corpus.fillers[rng.uniform_index(corpus.fillers.size())]);
      }
      for (size_t i = words.size() - 1; i > 0; --i) {
        std::swap(words[i], words[rng.uniform_index(i + 1)]);
      }
      std::string text;
      for (const auto& w : words) {
        if (!text.empty()) text += ' ';
        text += w;
      }
      corpus.dataset.examples.push_back({std::move(text), static_cast<ClassId>(c)});
    }
  }
  return corpus;
}

}  // namespace acls

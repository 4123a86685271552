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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace acls {

using TokenId = int32_t;
using ClassId = int32_t;

struct Example {
  std::string text;
  ClassId label = 0;
};

// Ordered class names; position is the class id.
class LabelMap {
 public:
  LabelMap() = default;
  explicit LabelMap(std::vector<std::string> names);

  size_t count() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(ClassId id) const { return names_.at(static_cast<size_t>(id)); }
  std::optional<ClassId> find(std::string_view name) const;

  friend bool operator==(const LabelMap& a, const LabelMap& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, ClassId> index_;
};

// The thirteen fraud categories shipped as the default taxonomy.
LabelMap default_label_map();

// One class name per line; blank lines are ignored.
LabelMap load_label_map(const std::filesystem::path& path);
void save_label_map(const LabelMap& labels, const std::filesystem::path& path);

class Vocab {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocab();
  // `tokens` lists ids 2.. in order; PAD and UNK are implicit.
  explicit Vocab(const std::vector<std::string>& tokens);

  size_t size() const { return tokens_.size(); }
  TokenId lookup(std::string_view token) const;
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<size_t>(id)); }
  // All tokens in id order, including the two reserved entries.
  const std::vector<std::string>& tokens() const { return tokens_; }
  uint64_t hash() const;

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

struct Dataset {
  std::vector<Example> examples;
  LabelMap label_map;

  size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
};

// One JSON object per line with "text" and "label" (class name or integer id).
Dataset load_dataset(const std::filesystem::path& path, const LabelMap& label_map);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

// Each CJK codepoint is its own token; everything else splits on whitespace.
// ASCII letters are lowercased.
std::vector<std::string> tokenize(std::string_view text);

Vocab build_vocab(const Dataset& train_split, size_t min_count = 1);

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

struct DatasetSplit {
  Dataset train;
  Dataset val;
  Dataset test;
};

// Shuffles with shuffled_indices(N, seed), then cuts at floor(N*train) and
// floor(N*(train+val)). The remainder lands in test.
DatasetSplit split(const Dataset& dataset, const SplitRatios& ratios, uint64_t seed);

struct EncodedExample {
  std::vector<TokenId> tokens;
  ClassId label = 0;
};

std::vector<EncodedExample> encode(const Dataset& dataset, const Vocab& vocab);

// Token ids padded with PAD to the longest sequence in the batch.
struct Batch {
  size_t width = 0;
  std::vector<TokenId> ids;  // size() * width, row-major
  std::vector<size_t> lengths;
  std::vector<ClassId> labels;
  std::vector<size_t> indices;  // positions in the source collection

  size_t size() const { return labels.size(); }
  std::span<const TokenId> row(size_t i) const { return {ids.data() + i * width, width}; }
};

std::vector<Batch> batches(const std::vector<EncodedExample>& examples, size_t batch_size,
                           std::optional<uint64_t> shuffle_seed = std::nullopt);

}  // namespace acls

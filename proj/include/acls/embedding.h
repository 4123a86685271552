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
#include <span>

#include "acls/corpus.h"
#include "acls/numerics.h"

namespace acls {

// Token lookup table plus the learned CLS row that opens every sequence.
// Row Vocab::kPad of `table` is kept at zero.
struct EmbeddingTable {
  ParamTensor table;  // |V| x d
  ParamTensor cls;    // 1 x d
  bool trainable = true;

  size_t dim() const { return table.value.cols(); }
  size_t vocab_size() const { return table.value.rows(); }
};

EmbeddingTable make_embedding_table(size_t vocab_size, size_t dim, uint64_t seed);

// Row 0 is CLS, row i+1 is token i. Rows at or past `length` are padding.
struct EmbeddingMatrix {
  Mat values;
  Mat grad;
  size_t length = 0;  // valid rows, CLS included

  size_t tokens() const { return length - 1; }
};

// `true_length` defaults to tokens.size(). PAD ids embed as a zero row.
EmbeddingMatrix embed(std::span<const TokenId> tokens, const EmbeddingTable& table);
EmbeddingMatrix embed(std::span<const TokenId> tokens, size_t true_length,
                      const EmbeddingTable& table);

// Scatter-add of em.grad back into the table (when trainable) and CLS row.
void embed_backward(const EmbeddingMatrix& em, std::span<const TokenId> tokens,
                    EmbeddingTable& table);

// Header "d=<int> v=<int>", then v lines of d floats. The returned table is
// frozen and its PAD row is zeroed. A zero expectation skips that check.
EmbeddingTable load_frozen_embeddings(const std::filesystem::path& path,
                                      size_t expected_rows = 0, size_t expected_dim = 0,
                                      uint64_t cls_seed = 0);
void save_embeddings(const Mat& table, const std::filesystem::path& path);

}  // namespace acls

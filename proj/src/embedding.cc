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

#include "acls/embedding.h"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "acls/errors.h"

namespace acls {

EmbeddingTable make_embedding_table(size_t vocab_size, size_t dim, uint64_t seed) {
  EmbeddingTable t;
  Mat table = init_params(vocab_size, dim, seed, InitScheme::kUniformScaled);
  for (double& x : table.row(Vocab::kPad)) x = 0.0;
  t.table = ParamTensor("embedding.table", std::move(table));
  t.cls = ParamTensor("embedding.cls", init_params(1, dim, seed ^ 0x5bd1e995ULL,
                                                   InitScheme::kUniformScaled));
  return t;
}

EmbeddingMatrix embed(std::span<const TokenId> tokens, const EmbeddingTable& table) {
  return embed(tokens, tokens.size(), table);
}

EmbeddingMatrix embed(std::span<const TokenId> tokens, size_t true_length,
                      const EmbeddingTable& table) {
  if (true_length > tokens.size()) {
    throw ShapeError("embed: true length exceeds token count");
  }
  const size_t d = table.dim();
  const auto vocab = static_cast<TokenId>(table.vocab_size());
  EmbeddingMatrix em;
  em.values = Mat(tokens.size() + 1, d);
  em.grad = Mat(tokens.size() + 1, d);
  em.length = true_length + 1;
  std::copy(table.cls.value.data().begin(), table.cls.value.data().end(), em.values.row(0).begin());
  for (size_t i = 0; i < tokens.size(); ++i) {
    const TokenId id = tokens[i];
    if (id < 0 || id >= vocab) {
      throw DataError("embed: token id " + std::to_string(id) + " out of range for vocab of " +
                      std::to_string(vocab));
    }
    if (i >= true_length || id == Vocab::kPad) continue;
    const auto src = table.table.value.row(static_cast<size_t>(id));
    std::copy(src.begin(), src.end(), em.values.row(i + 1).begin());
  }
  return em;
}

void embed_backward(const EmbeddingMatrix& em, std::span<const TokenId> tokens,
                    EmbeddingTable& table) {
  const size_t d = table.dim();
  auto cls_grad = table.cls.grad.row(0);
  const auto g0 = em.grad.row(0);
  for (size_t j = 0; j < d; ++j) cls_grad[j] += g0[j];
  if (!table.trainable) return;
  for (size_t i = 0; i + 1 < em.length; ++i) {
    const TokenId id = tokens[i];
    if (id == Vocab::kPad) continue;
    auto dst = table.table.grad.row(static_cast<size_t>(id));
    const auto src = em.grad.row(i + 1);
    for (size_t j = 0; j < d; ++j) dst[j] += src[j];
  }
}

namespace {

bool parse_double(std::string_view s, double& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

EmbeddingTable load_frozen_embeddings(const std::filesystem::path& path, size_t expected_rows,
                                      size_t expected_dim, uint64_t cls_seed) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw DataError(path.string() + ": missing header");
  size_t d = 0;
  size_t v = 0;
  {
    std::istringstream hs(header);
    std::string dpart, vpart, extra;
    if (!(hs >> dpart >> vpart) || (hs >> extra) || dpart.rfind("d=", 0) != 0 ||
        vpart.rfind("v=", 0) != 0) {
      throw DataError(path.string() + ": header must be \"d=<int> v=<int>\"");
    }
    try {
      d = std::stoul(dpart.substr(2));
      v = std::stoul(vpart.substr(2));
    } catch (const std::exception&) {
      throw DataError(path.string() + ": header must be \"d=<int> v=<int>\"");
    }
  }
  if (d == 0 || v == 0) throw DataError(path.string() + ": header dimensions must be positive");
  if (expected_dim != 0 && d != expected_dim) {
    throw ShapeError(path.string() + ": dimension mismatch, width " + std::to_string(d) +
                     " but model expects " + std::to_string(expected_dim));
  }
  if (expected_rows != 0 && v != expected_rows) {
    throw ShapeError(path.string() + ": dimension mismatch, " + std::to_string(v) +
                     " rows but vocab has " + std::to_string(expected_rows));
  }
  Mat table(v, d);
  std::string line;
  for (size_t r = 0; r < v; ++r) {
    if (!std::getline(in, line)) {
      throw DataError(path.string() + ": expected " + std::to_string(v) + " rows, found " +
                      std::to_string(r));
    }
    std::istringstream ls(line);
    std::string field;
    size_t c = 0;
    while (ls >> field) {
      if (c >= d) {
        throw ShapeError(path.string() + ":" + std::to_string(r + 2) +
                         ": dimension mismatch, more than " + std::to_string(d) + " values");
      }
      if (!parse_double(field, table(r, c))) {
        throw DataError(path.string() + ":" + std::to_string(r + 2) + ": malformed number '" +
                        field + "'");
      }
      ++c;
    }
    if (c != d) {
      throw ShapeError(path.string() + ":" + std::to_string(r + 2) + ": dimension mismatch, " +
                       std::to_string(c) + " values, expected " + std::to_string(d));
    }
  }
  if (!table.all_finite()) throw DataError(path.string() + ": non-finite embedding value");
  for (double& x : table.row(Vocab::kPad)) x = 0.0;

  EmbeddingTable t;
  t.table = ParamTensor("embedding.table", std::move(table));
  t.cls = ParamTensor("embedding.cls", init_params(1, d, cls_seed ^ 0x5bd1e995ULL,
                                                   InitScheme::kUniformScaled));
  t.trainable = false;
  return t;
}

void save_embeddings(const Mat& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write embeddings " + path.string());
  out << "d=" << table.cols() << " v=" << table.rows() << '\n';
  char buf[64];
  for (size_t r = 0; r < table.rows(); ++r) {
    for (size_t c = 0; c < table.cols(); ++c) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), table(r, c));
      if (c) out << ' ';
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

}  // namespace acls

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

#include "acls/checkpoint.h"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "acls/errors.h"

namespace acls {

namespace {

constexpr char kMagic[4] = {'A', 'C', 'L', 'S'};

class Writer {
 public:
  void u32(uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void u64(uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
  void str(const std::string& s) {
    if (s.size() > std::numeric_limits<uint32_t>::max()) throw DataError("checkpoint: string too long");
    u32(static_cast<uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void raw(const void* p, size_t n) {
    const auto* b = static_cast<const uint8_t*>(p);
    bytes_.insert(bytes_.end(), b, b + n);
  }
  std::vector<uint8_t>& bytes() { return bytes_; }

 private:
  std::vector<uint8_t> bytes_;
};

class Reader {
 public:
  Reader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const uint32_t n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == size_; }

 private:
  void need(size_t n) const {
    if (size_ - pos_ < n) throw DataError("checkpoint: corrupt file (unexpected end of data)");
  }
  const uint8_t* data_;
  size_t size_;
  size_t pos_ = 0;
};

uint32_t crc32_of(const uint8_t* data, size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, data, static_cast<uInt>(n));
  return static_cast<uint32_t>(crc);
}

}  // namespace

std::vector<uint8_t> serialize_checkpoint(const Model& model, const TrainConfig& config,
                                          const Vocab& vocab, const LabelMap& labels) {
  Writer w;
  w.raw(kMagic, 4);
  w.u32(kCheckpointVersion);
  w.str(format_config(config));
  w.u32(static_cast<uint32_t>(labels.count()));
  for (const auto& n : labels.names()) w.str(n);
  w.u32(static_cast<uint32_t>(vocab.size()));
  for (const auto& t : vocab.tokens()) w.str(t);
  w.u64(vocab.hash());
  const auto params = model.parameters();
  w.u32(static_cast<uint32_t>(params.size()));
  for (const auto* p : params) {
    w.str(p->name);
    w.u32(static_cast<uint32_t>(p->value.rows()));
    w.u32(static_cast<uint32_t>(p->value.cols()));
    for (double x : p->value.data()) w.f64(x);
  }
  auto& bytes = w.bytes();
  const uint32_t crc = crc32_of(bytes.data(), bytes.size());
  w.u32(crc);
  return std::move(bytes);
}

void save_checkpoint(const Model& model, const TrainConfig& config, const Vocab& vocab,
                     const LabelMap& labels, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(model, config, vocab, labels);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("failed writing checkpoint " + path.string());
}

Checkpoint parse_checkpoint(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw DataError("checkpoint: bad magic, not an ACLS checkpoint");
  }
  Reader header(bytes.data() + 4, 4);
  const uint32_t version = header.u32();
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint: format version " + std::to_string(version) + " unsupported (expected " +
                    std::to_string(kCheckpointVersion) + ")");
  }
  const size_t body = bytes.size() - 4;
  Reader trailer(bytes.data() + body, 4);
  if (trailer.u32() != crc32_of(bytes.data(), body)) {
    throw DataError("checkpoint: checksum mismatch (file is corrupt or truncated)");
  }

  Reader r(bytes.data() + 8, body - 8);
  Checkpoint ck;
  ck.version = version;
  ck.config = parse_config(r.str());
  std::vector<std::string> names(r.u32());
  for (auto& n : names) n = r.str();
  ck.labels = LabelMap(std::move(names));
  const uint32_t vocab_size = r.u32();
  if (vocab_size < 2) throw DataError("checkpoint: vocab lacks reserved tokens");
  std::vector<std::string> tokens(vocab_size);
  for (auto& t : tokens) t = r.str();
  if (tokens[0] != Vocab::kPadToken || tokens[1] != Vocab::kUnkToken) {
    throw DataError("checkpoint: vocab reserved ids are not PAD/UNK");
  }
  ck.vocab = Vocab(std::vector<std::string>(tokens.begin() + 2, tokens.end()));
  if (r.u64() != ck.vocab.hash()) throw DataError("checkpoint: vocab hash mismatch");
  const uint32_t count = r.u32();
  for (uint32_t i = 0; i < count; ++i) {
    NamedTensor t;
    t.name = r.str();
    const uint32_t rows = r.u32();
    const uint32_t cols = r.u32();
    std::vector<double> data(static_cast<size_t>(rows) * cols);
    for (double& x : data) x = r.f64();
    t.value = Mat(rows, cols, std::move(data));
    ck.tensors.push_back(std::move(t));
  }
  if (!r.at_end()) throw DataError("checkpoint: trailing bytes before checksum");
  return ck;
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

void restore_parameters(const Checkpoint& checkpoint, Model& model) {
  const auto params = model.parameters();
  for (auto* p : params) {
    const NamedTensor* found = nullptr;
    for (const auto& t : checkpoint.tensors) {
      if (t.name == p->name) {
        found = &t;
        break;
      }
    }
    if (!found) throw ShapeError("checkpoint: missing tensor " + p->name);
    if (!found->value.same_shape(p->value)) {
      throw ShapeError("checkpoint: shape mismatch for tensor " + p->name + ": file has " +
                       found->value.shape_string() + ", model expects " + p->value.shape_string());
    }
  }
  if (checkpoint.tensors.size() != params.size()) {
    throw ShapeError("checkpoint: holds " + std::to_string(checkpoint.tensors.size()) +
                     " tensors, model has " + std::to_string(params.size()));
  }
  for (auto* p : params) {
    for (const auto& t : checkpoint.tensors) {
      if (t.name == p->name) {
        p->value = t.value;
        p->grad = Mat(t.value.rows(), t.value.cols());
        break;
      }
    }
  }
}

Model model_from_checkpoint(const Checkpoint& checkpoint) {
  const ModelDims dims =
      model_dims(checkpoint.config, checkpoint.vocab.size(), checkpoint.labels.count());
  Model model(dims, checkpoint.config.seed);
  model.embedding.trainable = checkpoint.config.embeddings.empty();
  restore_parameters(checkpoint, model);
  return model;
}

}  // namespace acls

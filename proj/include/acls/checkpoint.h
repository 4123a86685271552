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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "acls/corpus.h"
#include "acls/model.h"
#include "acls/training.h"

namespace acls {

inline constexpr uint32_t kCheckpointVersion = 1;

struct NamedTensor {
  std::string name;
  Mat value;
};

struct Checkpoint {
  uint32_t version = kCheckpointVersion;
  TrainConfig config;
  Vocab vocab;
  LabelMap labels;
  std::vector<NamedTensor> tensors;
};

// Layout (little-endian):
//   "ACLS" | u32 version | str config | u32 n, n x str labels
//   | u32 n, n x str vocab tokens | u64 vocab hash
//   | u32 n, n x (str name, u32 rows, u32 cols, rows*cols f64)
//   | u32 CRC-32 of every preceding byte
// where str is a u32 byte length followed by UTF-8 bytes.
void save_checkpoint(const Model& model, const TrainConfig& config, const Vocab& vocab,
                     const LabelMap& labels, const std::filesystem::path& path);

std::vector<uint8_t> serialize_checkpoint(const Model& model, const TrainConfig& config,
                                          const Vocab& vocab, const LabelMap& labels);

// Throws DataError on bad magic, version mismatch, checksum failure,
// truncation or a vocab hash mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);
Checkpoint parse_checkpoint(const std::vector<uint8_t>& bytes);

// Copies tensors into `model` by name. ShapeError names the first tensor
// whose shape differs or which is missing.
void restore_parameters(const Checkpoint& checkpoint, Model& model);

// Rebuilds the model described by the checkpoint's config, vocab and labels.
Model model_from_checkpoint(const Checkpoint& checkpoint);

}  // namespace acls

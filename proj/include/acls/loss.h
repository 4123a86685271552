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

#include <span>
#include <vector>

#include "acls/corpus.h"

namespace acls {

inline constexpr double kProbFloor = 1e-12;

// -log(max(probs[label], kProbFloor)). Throws DataError on an invalid label.
double cross_entropy(std::span<const double> probs, ClassId label);

// Arithmetic mean of cross_entropy over the rows.
double batch_loss(const std::vector<std::vector<double>>& probs, std::span<const ClassId> labels);

// d(-log softmax(z)[label]) / dz = softmax(z) - onehot(label), scaled.
std::vector<double> cross_entropy_grad(std::span<const double> probs, ClassId label, double scale);

}  // namespace acls

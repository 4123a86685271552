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

#include "acls/loss.h"

#include <algorithm>
#include <cmath>

#include "acls/errors.h"

namespace acls {

namespace {

void check_label(std::span<const double> probs, ClassId label) {
  if (label < 0 || static_cast<size_t>(label) >= probs.size()) {
    throw DataError("cross_entropy: label " + std::to_string(label) + " invalid for " +
                    std::to_string(probs.size()) + " classes");
  }
}

}  // namespace

double cross_entropy(std::span<const double> probs, ClassId label) {
  check_label(probs, label);
  return -std::log(std::max(probs[static_cast<size_t>(label)], kProbFloor));
}

double batch_loss(const std::vector<std::vector<double>>& probs, std::span<const ClassId> labels) {
  if (probs.size() != labels.size() || probs.empty()) {
    throw DataError("batch_loss: need one label per row and at least one row");
  }
  double sum = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) sum += cross_entropy(probs[i], labels[i]);
  return sum / static_cast<double>(probs.size());
}

std::vector<double> cross_entropy_grad(std::span<const double> probs, ClassId label, double scale) {
  check_label(probs, label);
  std::vector<double> g(probs.begin(), probs.end());
  g[static_cast<size_t>(label)] -= 1.0;
  for (double& x : g) x *= scale;
  return g;
}

}  // namespace acls

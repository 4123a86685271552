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

#include <json.hpp>

#include "acls/corpus.h"
#include "acls/model.h"

namespace acls {

// C x C counts indexed (true class, predicted class).
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(size_t classes = 0);

  size_t classes() const { return classes_; }
  void accumulate(ClassId truth, ClassId predicted);
  void merge(const ConfusionMatrix& other);

  uint64_t count(size_t truth, size_t predicted) const { return counts_[truth * classes_ + predicted]; }
  uint64_t total() const { return total_; }
  uint64_t trace() const;

  uint64_t tp(size_t c) const { return count(c, c); }
  uint64_t fp(size_t c) const;
  uint64_t fn(size_t c) const;
  uint64_t tn(size_t c) const { return total_ - tp(c) - fp(c) - fn(c); }
  uint64_t support(size_t c) const { return tp(c) + fn(c); }

  const std::vector<uint64_t>& counts() const { return counts_; }

 private:
  size_t classes_;
  std::vector<uint64_t> counts_;
  uint64_t total_ = 0;
};

// trace / total. Throws DataError on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  uint64_t support = 0;
};

// Zero denominators give 0, never NaN.
std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm);

enum class Averaging { kWeighted, kMacro };

struct PrfSummary {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Weighted: support/total weights. Macro: plain mean over classes. F1 is the
// average of per-class F1 in both cases.
PrfSummary precision_recall_f1(const ConfusionMatrix& cm, Averaging averaging);

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;  // weighted
  double recall = 0.0;     // weighted
  double f1 = 0.0;         // weighted
  double average_loss = 0.0;
  PrfSummary macro;
  std::vector<ClassMetrics> per_class;
  ConfusionMatrix confusion;
};

MetricsReport make_report(const ConfusionMatrix& cm, double average_loss);

// Forward pass + argmax over every example.
MetricsReport evaluate(const Model& model, const std::vector<EncodedExample>& examples,
                       size_t batch_size = 32);

nlohmann::json report_to_json(const MetricsReport& report, const LabelMap* labels = nullptr);

// Fixed-width "Acc P R F1 Loss" summary plus per-class rows.
std::string format_report(const MetricsReport& report, const LabelMap* labels = nullptr);

}  // namespace acls

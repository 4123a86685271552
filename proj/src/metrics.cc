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

#include "acls/metrics.h"

#include <cstdio>
#include <sstream>

#include "acls/errors.h"
#include "acls/loss.h"

namespace acls {

ConfusionMatrix::ConfusionMatrix(size_t classes)
    : classes_(classes), counts_(classes * classes, 0) {}

void ConfusionMatrix::accumulate(ClassId truth, ClassId predicted) {
  const auto c = static_cast<ClassId>(classes_);
  if (truth < 0 || truth >= c || predicted < 0 || predicted >= c) {
    throw DataError("confusion matrix: label out of range (" + std::to_string(truth) + ", " +
                    std::to_string(predicted) + ") for " + std::to_string(classes_) + " classes");
  }
  ++counts_[static_cast<size_t>(truth) * classes_ + static_cast<size_t>(predicted)];
  ++total_;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) throw ShapeError("confusion matrix: class count mismatch on merge");
  for (size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
}

uint64_t ConfusionMatrix::trace() const {
  uint64_t t = 0;
  for (size_t c = 0; c < classes_; ++c) t += tp(c);
  return t;
}

uint64_t ConfusionMatrix::fp(size_t c) const {
  uint64_t col = 0;
  for (size_t r = 0; r < classes_; ++r) col += count(r, c);
  return col - tp(c);
}

uint64_t ConfusionMatrix::fn(size_t c) const {
  uint64_t row = 0;
  for (size_t p = 0; p < classes_; ++p) row += count(c, p);
  return row - tp(c);
}

double accuracy(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw DataError("accuracy: empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
}

namespace {

double ratio(uint64_t num, uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& cm) {
  std::vector<ClassMetrics> out(cm.classes());
  for (size_t c = 0; c < cm.classes(); ++c) {
    auto& m = out[c];
    m.precision = ratio(cm.tp(c), cm.tp(c) + cm.fp(c));
    m.recall = ratio(cm.tp(c), cm.tp(c) + cm.fn(c));
    m.f1 = m.precision + m.recall == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    m.support = cm.support(c);
  }
  return out;
}

PrfSummary precision_recall_f1(const ConfusionMatrix& cm, Averaging averaging) {
  if (cm.total() == 0) throw DataError("precision_recall_f1: empty confusion matrix");
  const auto per_class = per_class_metrics(cm);
  PrfSummary s;
  const double n = averaging == Averaging::kWeighted ? static_cast<double>(cm.total())
                                                     : static_cast<double>(cm.classes());
  for (const auto& m : per_class) {
    const double w = averaging == Averaging::kWeighted ? static_cast<double>(m.support) : 1.0;
    s.precision += w * m.precision;
    s.recall += w * m.recall;
    s.f1 += w * m.f1;
  }
  s.precision /= n;
  s.recall /= n;
  s.f1 /= n;
  return s;
}

MetricsReport make_report(const ConfusionMatrix& cm, double average_loss) {
  MetricsReport r;
  r.confusion = cm;
  r.accuracy = accuracy(cm);
  const auto weighted = precision_recall_f1(cm, Averaging::kWeighted);
  r.precision = weighted.precision;
  r.recall = weighted.recall;
  r.f1 = weighted.f1;
  r.macro = precision_recall_f1(cm, Averaging::kMacro);
  r.per_class = per_class_metrics(cm);
  r.average_loss = average_loss;
  return r;
}

MetricsReport evaluate(const Model& model, const std::vector<EncodedExample>& examples,
                       size_t batch_size) {
  const size_t classes = model.dims().classes;
  for (const auto& ex : examples) {
    if (ex.label < 0 || static_cast<size_t>(ex.label) >= classes) {
      throw DataError("evaluate: label " + std::to_string(ex.label) + " but the model has " +
                      std::to_string(classes) + " classes");
    }
  }
  ConfusionMatrix cm(classes);
  double loss_sum = 0.0;
  for (const auto& batch : batches(examples, batch_size)) {
    const auto xs = embed_batch(model, batch);
    for (size_t i = 0; i < batch.size(); ++i) {
      const auto t = forward(model, xs[i]);
      loss_sum += cross_entropy(t.probs, batch.labels[i]);
      cm.accumulate(batch.labels[i], static_cast<ClassId>(argmax(t.logits)));
    }
  }
  return make_report(cm, loss_sum / static_cast<double>(examples.size()));
}

nlohmann::json report_to_json(const MetricsReport& report, const LabelMap* labels) {
  nlohmann::json j;
  j["accuracy"] = report.accuracy;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["average_loss"] = report.average_loss;
  j["examples"] = report.confusion.total();
  j["macro"] = {{"precision", report.macro.precision},
                {"recall", report.macro.recall},
                {"f1", report.macro.f1}};
  auto per_class = nlohmann::json::array();
  for (size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    nlohmann::json row = {{"class", c},
                          {"precision", m.precision},
                          {"recall", m.recall},
                          {"f1", m.f1},
                          {"support", m.support}};
    if (labels && c < labels->count()) row["name"] = labels->name(static_cast<ClassId>(c));
    per_class.push_back(std::move(row));
  }
  j["per_class"] = std::move(per_class);
  const auto& cm = report.confusion;
  auto counts = nlohmann::json::array();
  for (size_t r = 0; r < cm.classes(); ++r) {
    auto row = nlohmann::json::array();
    for (size_t c = 0; c < cm.classes(); ++c) row.push_back(cm.count(r, c));
    counts.push_back(std::move(row));
  }
  j["confusion"] = std::move(counts);
  return j;
}

std::string format_report(const MetricsReport& report, const LabelMap* labels) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-8s %-8s %-8s %-8s %-8s\n", "Acc", "P", "R", "F1", "Loss");
  os << buf;
  std::snprintf(buf, sizeof(buf), "%-8.4f %-8.4f %-8.4f %-8.4f %-8.4f\n", report.accuracy,
                report.precision, report.recall, report.f1, report.average_loss);
  os << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%-5s %-9s %-9s %-9s %-8s %s\n", "class", "precision", "recall",
                "f1", "support", "name");
  os << buf;
  for (size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    const std::string name =
        labels && c < labels->count() ? labels->name(static_cast<ClassId>(c)) : "";
    std::snprintf(buf, sizeof(buf), "%-5zu %-9.4f %-9.4f %-9.4f %-8llu %s\n", c, m.precision,
                  m.recall, m.f1, static_cast<unsigned long long>(m.support), name.c_str());
    os << buf;
  }
  return os.str();
}

}  // namespace acls

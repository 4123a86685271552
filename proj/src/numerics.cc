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

#include "acls/numerics.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "acls/errors.h"
#include "acls/prng.h"

namespace acls {

Mat::Mat(size_t rows, size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Mat::Mat(size_t rows, size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("Mat: data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_string());
  }
}

Mat Mat::identity(size_t n) {
  Mat m(n, n);
  for (size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::column(std::span<const double> v) {
  return Mat(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

void Mat::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Mat::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double x) { return std::isfinite(x); });
}

std::string Mat::shape_string() const {
  std::ostringstream os;
  os << rows_ << "x" << cols_;
  return os.str();
}

Mat matmul(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + a.shape_string() + " * " + b.shape_string());
  }
  Mat out(a.rows(), b.cols());
  for (size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (size_t j = 0; j < b.cols(); ++j) {
      double acc = 0.0;
      for (size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out_row[j] = acc;
    }
  }
  return out;
}

std::vector<double> softmax(std::span<const double> z) {
  std::vector<double> p(z.size());
  if (z.empty()) return p;
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - m);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return p;
}

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Mat init_params(size_t rows, size_t cols, uint64_t seed, InitScheme scheme) {
  Mat m(rows, cols);
  if (scheme == InitScheme::kZeros) return m;
  const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Prng rng(seed);
  for (double& x : m.data()) x = rng.uniform(-s, s);
  return m;
}

ParamTensor::ParamTensor(std::string name_in, Mat value_in)
    : name(std::move(name_in)),
      value(std::move(value_in)),
      grad(value.rows(), value.cols()) {}

GradCheckReport grad_check(const std::function<double()>& f,
                           std::span<ParamTensor* const> params,
                           const GradCheckOptions& options) {
  if (!(options.step > 0.0)) throw ConfigError("grad_check: step must be > 0");
  const double h = options.step;
  auto eval = [&]() {
    const double v = f();
    if (!std::isfinite(v)) throw NumericError("grad_check: non-finite objective");
    return v;
  };
  eval();

  GradCheckReport report;
  for (ParamTensor* p : params) {
    GradCheckEntry entry;
    entry.name = p->name;
    auto& values = p->value.data();
    for (size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      const double up = eval();
      values[i] = saved - h;
      const double down = eval();
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = p->grad.data()[i];
      const double abs_err = std::abs(analytic - numeric);
      const double denom =
          std::max({std::abs(analytic), std::abs(numeric), options.rel_floor});
      entry.max_abs_error = std::max(entry.max_abs_error, abs_err);
      entry.max_rel_error = std::max(entry.max_rel_error, abs_err / denom);
      ++entry.checked;
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.entries.push_back(std::move(entry));
  }
  report.passed = report.max_rel_error <= options.tol;
  return report;
}

}  // namespace acls

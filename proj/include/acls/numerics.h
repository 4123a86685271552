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
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace acls {

// Dense row-major matrix of doubles. Vectors are stored as n x 1.
class Mat {
 public:
  Mat() = default;
  Mat(size_t rows, size_t cols, double fill = 0.0);
  Mat(size_t rows, size_t cols, std::vector<double> data);

  static Mat identity(size_t n);
  static Mat column(std::span<const double> v);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  void fill(double v);
  bool same_shape(const Mat& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const;
  std::string shape_string() const;

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

Mat matmul(const Mat& a, const Mat& b);

// Max-subtracted softmax.
std::vector<double> softmax(std::span<const double> z);

// Frobenius / Euclidean norm of all entries.
double l2_norm(std::span<const double> v);

enum class InitScheme { kUniformScaled, kZeros };

// kUniformScaled draws U(-s, s) with s = sqrt(6 / (rows + cols)).
Mat init_params(size_t rows, size_t cols, uint64_t seed, InitScheme scheme);

// A learnable tensor together with its gradient accumulator.
struct ParamTensor {
  ParamTensor() = default;
  ParamTensor(std::string name, Mat value);

  std::string name;
  Mat value;
  Mat grad;

  void zero_grad() { grad.fill(0.0); }
};

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  size_t checked = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_error = 0.0;
  bool passed = false;
};

struct GradCheckOptions {
  double step = 1e-3;
  double tol = 1e-4;
  // Denominator floor of the relative error, so entries whose true gradient
  // is zero are compared absolutely rather than divided by round-off.
  double rel_floor = 1e-7;
};

// Compares each param's `grad` (filled by the caller beforehand) against the
// central difference (f(x+h) - f(x-h)) / 2h. Relative error of an entry is
// |analytic - numeric| / max(|analytic|, |numeric|, rel_floor). Every value
// is restored before returning. Throws NumericError if f is non-finite.
GradCheckReport grad_check(const std::function<double()>& f,
                           std::span<ParamTensor* const> params,
                           const GradCheckOptions& options = {});

}  // namespace acls

// Copyright 2026 The Topoxform Authors.
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
#include <initializer_list>
#include <span>
#include <vector>

namespace topoxform {

// Row-major real matrix. Used for features, representations and parameters.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  void fill(double value);
  bool same_shape(const DenseMatrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// a * b
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// transpose(a) * b
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
// a * transpose(b)
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

DenseMatrix transpose(const DenseMatrix& a);

// Adds a 1 x cols bias row to every row of m.
void add_row_bias(DenseMatrix& m, const DenseMatrix& bias);
// 1 x cols matrix of column sums.
DenseMatrix column_sums(const DenseMatrix& m);

// out += scale * m (same shape).
void axpy(double scale, const DenseMatrix& m, DenseMatrix& out);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);

double frobenius_norm(const DenseMatrix& m);
double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b);
bool all_finite(const DenseMatrix& m);

}  // namespace topoxform

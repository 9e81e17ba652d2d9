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

#include "topoxform/dense.hpp"

#include <algorithm>
#include <cmath>

#include "topoxform/error.hpp"

namespace topoxform {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw_invalid("DenseMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void DenseMatrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw_invalid("matmul: inner dimensions differ");
  DenseMatrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* o = out.row(i).data();
    const auto ai = a.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double s = ai[k];
      if (s == 0.0) continue;
      const double* bk = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) o[j] += s * bk[j];
    }
  }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw_invalid("matmul_tn: row counts differ");
  DenseMatrix out(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto ar = a.row(r);
    const double* br = b.row(r).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double s = ar[i];
      if (s == 0.0) continue;
      double* o = out.row(i).data();
      for (std::size_t j = 0; j < n; ++j) o[j] += s * br[j];
    }
  }
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) throw_invalid("matmul_nt: column counts differ");
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i).data();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* bj = b.row(j).data();
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += ai[k] * bj[k];
      out(i, j) = acc;
    }
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

void add_row_bias(DenseMatrix& m, const DenseMatrix& bias) {
  if (bias.rows() != 1 || bias.cols() != m.cols())
    throw_invalid("add_row_bias: bias must be 1 x cols");
  const auto b = bias.row(0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += b[j];
  }
}

DenseMatrix column_sums(const DenseMatrix& m) {
  DenseMatrix out(1, m.cols());
  auto o = out.row(0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) o[j] += r[j];
  }
  return out;
}

void axpy(double scale, const DenseMatrix& m, DenseMatrix& out) {
  if (!m.same_shape(out)) throw_invalid("axpy: shape mismatch");
  auto o = out.values();
  const auto v = m.values();
  for (std::size_t i = 0; i < v.size(); ++i) o[i] += scale * v[i];
}

DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw_invalid("subtract: shape mismatch");
  DenseMatrix out = a;
  axpy(-1.0, b, out);
  return out;
}

double frobenius_norm(const DenseMatrix& m) {
  double acc = 0.0;
  for (double v : m.values()) acc += v * v;
  return std::sqrt(acc);
}

double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b) {
  if (!a.same_shape(b)) throw_invalid("max_abs_difference: shape mismatch");
  double worst = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) worst = std::max(worst, std::abs(av[i] - bv[i]));
  return worst;
}

bool all_finite(const DenseMatrix& m) {
  return std::all_of(m.values().begin(), m.values().end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace topoxform

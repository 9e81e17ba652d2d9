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

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "topoxform/error.hpp"

namespace topoxform {
namespace {

TEST(DenseTest, MatmulVariantsAgree) {
  const DenseMatrix a{{1, 2, 3}, {4, 5, 6}};
  const DenseMatrix b{{1, 0}, {0, 1}, {2, -1}};
  const DenseMatrix expected{{7, -1}, {16, -1}};
  EXPECT_EQ(matmul(a, b), expected);
  EXPECT_EQ(matmul_tn(transpose(a), b), expected);
  EXPECT_EQ(matmul_nt(a, transpose(b)), expected);
}

TEST(DenseTest, ShapeErrorsThrow) {
  const DenseMatrix a(2, 3);
  EXPECT_THROW(matmul(a, a), Error);
  EXPECT_THROW(subtract(a, DenseMatrix(3, 2)), Error);
  DenseMatrix out(2, 2);
  EXPECT_THROW(axpy(1.0, a, out), Error);
  EXPECT_THROW((DenseMatrix{{1, 2}, {3}}), Error);
}

TEST(DenseTest, BiasAndColumnSums) {
  DenseMatrix m{{1, 2}, {3, 4}};
  add_row_bias(m, DenseMatrix{{10, 20}});
  EXPECT_EQ(m, (DenseMatrix{{11, 22}, {13, 24}}));
  EXPECT_EQ(column_sums(m), (DenseMatrix{{24, 46}}));
  EXPECT_THROW(add_row_bias(m, DenseMatrix(2, 2)), Error);
}

TEST(DenseTest, NormsAndFiniteness) {
  DenseMatrix m{{3, 4}};
  EXPECT_DOUBLE_EQ(frobenius_norm(m), 5.0);
  EXPECT_DOUBLE_EQ(max_abs_difference(m, DenseMatrix{{3, 1}}), 3.0);
  EXPECT_TRUE(all_finite(m));
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(all_finite(m));
}

TEST(DenseTest, AxpyAccumulates) {
  DenseMatrix out{{1, 1}};
  axpy(2.0, DenseMatrix{{1, -1}}, out);
  EXPECT_EQ(out, (DenseMatrix{{3, -1}}));
}

}  // namespace
}  // namespace topoxform

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

#include "topoxform/decoder.hpp"

#include <algorithm>
#include <cmath>

#include "topoxform/error.hpp"
#include "topoxform/transform.hpp"

namespace topoxform {

DecoderParams init_decoder(std::size_t channels, Rng& rng) {
  return DecoderParams{glorot_linear(channels, kNumPairTypes, rng)};
}

DecoderParams zero_decoder(std::size_t channels) {
  return DecoderParams{zero_linear(channels, kNumPairTypes)};
}

DenseMatrix feature_diff(const DenseMatrix& h_transformed, const DenseMatrix& h) {
  if (!h_transformed.same_shape(h)) throw_invalid("feature_diff: shape mismatch");
  return subtract(h_transformed, h);
}

DenseMatrix edge_repr(const DenseMatrix& delta_h, std::span<const NodePair> pairs) {
  const std::size_t f = delta_h.cols();
  DenseMatrix out(pairs.size(), f);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto hi = delta_h.row(pairs[p].first);
    const auto hj = delta_h.row(pairs[p].second);
    auto e = out.row(p);
    double total = 0.0;
    for (std::size_t c = 0; c < f; ++c) {
      const double d = hi[c] - hj[c];
      e[c] = std::exp(-d * d);
      total += e[c];
    }
    if (total < kEdgeReprUnderflow) {
      std::fill(e.begin(), e.end(), 1.0 / static_cast<double>(f));
    } else {
      for (double& v : e) v /= total;
    }
  }
  return out;
}

DenseMatrix softmax_rows(const DenseMatrix& logits) {
  DenseMatrix out = logits;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double peak = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (double& v : row) {
      v = std::exp(v - peak);
      total += v;
    }
    for (double& v : row) v /= total;
  }
  return out;
}

DenseMatrix predict_types(const DecoderParams& params, const DenseMatrix& edge_reprs) {
  return softmax_rows(linear_forward(params.linear, edge_reprs));
}

double ce_loss(const DenseMatrix& probabilities, std::span<const int> labels) {
  if (labels.empty()) throw_invalid("ce_loss: empty pair list");
  if (labels.size() != probabilities.rows()) throw_invalid("ce_loss: label count mismatch");
  double total = 0.0;
  for (std::size_t p = 0; p < labels.size(); ++p) {
    const int y = labels[p];
    if (y < 0 || static_cast<std::size_t>(y) >= probabilities.cols())
      throw_invalid("ce_loss: label out of range");
    total -= std::log(std::max(probabilities(p, static_cast<std::size_t>(y)), kLogClamp));
  }
  return total / static_cast<double>(labels.size());
}

std::vector<int> argmax_rows(const DenseMatrix& m) {
  std::vector<int> out(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    out[r] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> labels) {
  if (predicted.size() != labels.size() || labels.empty())
    throw_invalid("accuracy: size mismatch or empty");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += predicted[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

}  // namespace topoxform

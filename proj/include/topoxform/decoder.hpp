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

#include <span>
#include <vector>

#include "topoxform/dense.hpp"
#include "topoxform/encoder.hpp"
#include "topoxform/graph.hpp"

namespace topoxform {

// One linear layer mapping an edge representation (F) to the four type logits.
struct DecoderParams {
  LinearLayer linear;
};

DecoderParams init_decoder(std::size_t channels, Rng& rng);
DecoderParams zero_decoder(std::size_t channels);

// Below this L1 mass, edge_repr falls back to the uniform vector.
inline constexpr double kEdgeReprUnderflow = 1e-30;
// Lower clamp of the probability inside the log of ce_loss.
inline constexpr double kLogClamp = 1e-12;

// transformed - original.
DenseMatrix feature_diff(const DenseMatrix& h_transformed, const DenseMatrix& h);

// Row p is exp(-d * d) / ||exp(-d * d)||_1 with d = delta_h[i] - delta_h[j] for
// pairs[p] = (i, j).
DenseMatrix edge_repr(const DenseMatrix& delta_h, std::span<const NodePair> pairs);

DenseMatrix softmax_rows(const DenseMatrix& logits);
DenseMatrix predict_types(const DecoderParams& params, const DenseMatrix& edge_reprs);

// Mean of -log(max(pred[label], kLogClamp)).
double ce_loss(const DenseMatrix& probabilities, std::span<const int> labels);

// Row argmax, ties to the lowest index.
std::vector<int> argmax_rows(const DenseMatrix& m);
double accuracy(std::span<const int> predicted, std::span<const int> labels);

}  // namespace topoxform

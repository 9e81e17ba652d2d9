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
#include <iosfwd>
#include <span>
#include <variant>
#include <vector>

#include "topoxform/dense.hpp"
#include "topoxform/graph.hpp"
#include "topoxform/transform.hpp"

namespace topoxform {

// Affine map x * weight + bias; weight is in x out, bias is 1 x out.
struct LinearLayer {
  DenseMatrix weight;
  DenseMatrix bias;

  std::size_t in_dim() const noexcept { return weight.rows(); }
  std::size_t out_dim() const noexcept { return weight.cols(); }
};

// Glorot-uniform weight, zero bias.
LinearLayer glorot_linear(std::size_t in, std::size_t out, Rng& rng);
LinearLayer zero_linear(std::size_t in, std::size_t out);
DenseMatrix linear_forward(const LinearLayer& layer, const DenseMatrix& x);

// H = S^k X W + b.
struct SgcParams {
  LinearLayer linear;
  unsigned order = 1;
};

// Stack of S H W + b layers with an activation between layers (none after the
// last). slope == 0 means ReLU, otherwise LeakyReLU with that slope.
struct GcnStack {
  std::vector<LinearLayer> layers;
  double slope = 0.0;
};

// h_i <- MLP((1 + eps) h_i + sum_{j in N(i)} h_j), MLP = linear, ReLU, linear.
struct GinLayer {
  double eps = 0.0;
  LinearLayer first;
  LinearLayer second;
};

// GIN layers with ReLU between layers (none after the last).
struct GinStack {
  std::vector<GinLayer> layers;
};

using EncoderParams = std::variant<SgcParams, GcnStack, GinStack>;

enum class EncoderKind { kSgc, kGcn, kGin };

struct EncoderSpec {
  EncoderKind kind = EncoderKind::kSgc;
  std::size_t in_channels = 0;
  std::size_t hidden_channels = 64;
  std::size_t out_channels = 512;
  unsigned order = 2;    // SGC propagation order
  unsigned layers = 2;   // GCN / GIN depth
  double slope = 0.0;    // GCN activation, 0 = ReLU
  double eps = 0.0;      // GIN epsilon
};

EncoderParams init_encoder(const EncoderSpec& spec, Rng& rng);
EncoderKind encoder_kind(const EncoderParams& params);
std::size_t encoder_in_channels(const EncoderParams& params);
std::size_t encoder_out_channels(const EncoderParams& params);

// Per-graph operators consumed by the encoders.
struct GraphOperators {
  SparseMatrix normalized;  // D^{-1/2}(A+I)D^{-1/2}
  SparseMatrix adjacency;   // A

  static GraphOperators build(const Graph& graph);
};

DenseMatrix leaky_relu(const DenseMatrix& x, double slope);

DenseMatrix sgc_forward(const SgcParams& params, const SparseMatrix& s_hat, const DenseMatrix& x);
DenseMatrix gcn_forward(const GcnStack& stack, const SparseMatrix& s_hat, const DenseMatrix& x);
DenseMatrix gin_forward(const GinStack& stack, const Graph& graph, const DenseMatrix& x);

// Intermediate values of one forward pass, consumed by encode_backward.
struct EncoderTape {
  struct Layer {
    DenseMatrix aggregated;   // propagated / aggregated layer input
    DenseMatrix hidden_pre;   // GIN: first MLP linear output
    DenseMatrix output_pre;   // layer output before the between-layer activation
  };
  std::vector<Layer> layers;
};

DenseMatrix encode(const EncoderParams& params, const GraphOperators& ops, const DenseMatrix& x,
                   EncoderTape* tape = nullptr);

// Accumulates d(loss)/d(params) into grads given d(loss)/d(output).
void encode_backward(const EncoderParams& params, const GraphOperators& ops,
                     const EncoderTape& tape, const DenseMatrix& grad_output,
                     EncoderParams& grads);

EncoderParams zeros_like(const EncoderParams& params);
std::vector<DenseMatrix*> parameter_tensors(EncoderParams& params);
std::vector<const DenseMatrix*> parameter_tensors(const EncoderParams& params);

// Versioned binary checkpoint: magic "TOPOXFM1", uint32 tensor count, then per
// tensor uint64 rows, uint64 cols and rows*cols little-endian float64 values.
void write_checkpoint(std::ostream& out, std::span<const DenseMatrix* const> tensors);
std::vector<DenseMatrix> read_checkpoint(std::istream& in);

}  // namespace topoxform

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

#include "topoxform/encoder.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "topoxform/error.hpp"

namespace topoxform {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

DenseMatrix activate(const DenseMatrix& z, double slope) {
  DenseMatrix out = z;
  for (double& v : out.values())
    if (v <= 0.0) v *= slope;
  return out;
}

// grad <- grad * act'(z)
void activation_backward(const DenseMatrix& z, double slope, DenseMatrix& grad) {
  const auto zv = z.values();
  auto gv = grad.values();
  for (std::size_t i = 0; i < zv.size(); ++i)
    if (zv[i] <= 0.0) gv[i] *= slope;
}

// (1 + eps) h + A h
DenseMatrix gin_aggregate(const SparseMatrix& adjacency, const DenseMatrix& h, double eps) {
  DenseMatrix out = spmm(adjacency, h);
  axpy(1.0 + eps, h, out);
  return out;
}

void check_finite(const DenseMatrix& m, const char* where) {
  if (!all_finite(m)) throw_numerical(std::string(where) + ": non-finite output");
}

void accumulate_linear_grads(const DenseMatrix& input, const DenseMatrix& grad_out,
                             LinearLayer& grads) {
  axpy(1.0, matmul_tn(input, grad_out), grads.weight);
  axpy(1.0, column_sums(grad_out), grads.bias);
}

}  // namespace

LinearLayer glorot_linear(std::size_t in, std::size_t out, Rng& rng) {
  LinearLayer layer = zero_linear(in, out);
  const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& v : layer.weight.values()) v = dist(rng);
  return layer;
}

LinearLayer zero_linear(std::size_t in, std::size_t out) {
  return LinearLayer{DenseMatrix(in, out), DenseMatrix(1, out)};
}

DenseMatrix linear_forward(const LinearLayer& layer, const DenseMatrix& x) {
  if (x.cols() != layer.in_dim()) {
    throw_invalid("linear: input has " + std::to_string(x.cols()) + " channels, layer expects " +
                  std::to_string(layer.in_dim()));
  }
  DenseMatrix out = matmul(x, layer.weight);
  add_row_bias(out, layer.bias);
  return out;
}

EncoderParams init_encoder(const EncoderSpec& spec, Rng& rng) {
  if (spec.in_channels == 0 || spec.out_channels == 0)
    throw_invalid("init_encoder: channel counts must be positive");
  switch (spec.kind) {
    case EncoderKind::kSgc: {
      if (spec.order == 0) throw_invalid("init_encoder: SGC order must be at least 1");
      return SgcParams{glorot_linear(spec.in_channels, spec.out_channels, rng), spec.order};
    }
    case EncoderKind::kGcn: {
      if (spec.layers == 0) throw_invalid("init_encoder: GCN needs at least one layer");
      GcnStack stack;
      stack.slope = spec.slope;
      std::size_t in = spec.in_channels;
      for (unsigned l = 0; l < spec.layers; ++l) {
        const std::size_t out = l + 1 == spec.layers ? spec.out_channels : spec.hidden_channels;
        stack.layers.push_back(glorot_linear(in, out, rng));
        in = out;
      }
      return stack;
    }
    case EncoderKind::kGin: {
      if (spec.layers == 0) throw_invalid("init_encoder: GIN needs at least one layer");
      GinStack stack;
      std::size_t in = spec.in_channels;
      for (unsigned l = 0; l < spec.layers; ++l) {
        const std::size_t out = l + 1 == spec.layers ? spec.out_channels : spec.hidden_channels;
        GinLayer layer;
        layer.eps = spec.eps;
        layer.first = glorot_linear(in, spec.hidden_channels, rng);
        layer.second = glorot_linear(spec.hidden_channels, out, rng);
        stack.layers.push_back(std::move(layer));
        in = out;
      }
      return stack;
    }
  }
  throw_invalid("init_encoder: unknown encoder kind");
}

EncoderKind encoder_kind(const EncoderParams& params) {
  return std::visit(Overloaded{[](const SgcParams&) { return EncoderKind::kSgc; },
                               [](const GcnStack&) { return EncoderKind::kGcn; },
                               [](const GinStack&) { return EncoderKind::kGin; }},
                    params);
}

std::size_t encoder_in_channels(const EncoderParams& params) {
  return std::visit(
      Overloaded{[](const SgcParams& p) { return p.linear.in_dim(); },
                 [](const GcnStack& s) { return s.layers.front().in_dim(); },
                 [](const GinStack& s) { return s.layers.front().first.in_dim(); }},
      params);
}

std::size_t encoder_out_channels(const EncoderParams& params) {
  return std::visit(
      Overloaded{[](const SgcParams& p) { return p.linear.out_dim(); },
                 [](const GcnStack& s) { return s.layers.back().out_dim(); },
                 [](const GinStack& s) { return s.layers.back().second.out_dim(); }},
      params);
}

GraphOperators GraphOperators::build(const Graph& graph) {
  return GraphOperators{normalized_adjacency(graph), graph.adjacency()};
}

DenseMatrix leaky_relu(const DenseMatrix& x, double slope) {
  if (slope < 0.0) throw_invalid("leaky_relu: slope must be non-negative");
  return activate(x, slope);
}

DenseMatrix sgc_forward(const SgcParams& params, const SparseMatrix& s_hat, const DenseMatrix& x) {
  DenseMatrix out = linear_forward(params.linear, propagate_k(s_hat, x, params.order));
  check_finite(out, "sgc_forward");
  return out;
}

DenseMatrix gcn_forward(const GcnStack& stack, const SparseMatrix& s_hat, const DenseMatrix& x) {
  GraphOperators ops;
  ops.normalized = s_hat;
  return encode(stack, ops, x);
}

DenseMatrix gin_forward(const GinStack& stack, const Graph& graph, const DenseMatrix& x) {
  GraphOperators ops;
  ops.adjacency = graph.adjacency();
  return encode(stack, ops, x);
}

DenseMatrix encode(const EncoderParams& params, const GraphOperators& ops, const DenseMatrix& x,
                   EncoderTape* tape) {
  if (tape != nullptr) tape->layers.clear();
  auto record = [&](DenseMatrix aggregated, DenseMatrix hidden_pre, const DenseMatrix& out_pre) {
    if (tape == nullptr) return;
    tape->layers.push_back({std::move(aggregated), std::move(hidden_pre), out_pre});
  };

  return std::visit(
      Overloaded{
          [&](const SgcParams& p) {
            DenseMatrix propagated = propagate_k(ops.normalized, x, p.order);
            DenseMatrix out = linear_forward(p.linear, propagated);
            check_finite(out, "sgc encoder");
            record(std::move(propagated), {}, {});
            return out;
          },
          [&](const GcnStack& s) {
            if (s.layers.empty()) throw_invalid("gcn encoder: empty stack");
            DenseMatrix h = x;
            for (std::size_t l = 0; l < s.layers.size(); ++l) {
              DenseMatrix aggregated = spmm(ops.normalized, h);
              DenseMatrix z = linear_forward(s.layers[l], aggregated);
              const bool last = l + 1 == s.layers.size();
              h = last ? z : activate(z, s.slope);
              record(std::move(aggregated), {}, z);
            }
            check_finite(h, "gcn encoder");
            return h;
          },
          [&](const GinStack& s) {
            if (s.layers.empty()) throw_invalid("gin encoder: empty stack");
            DenseMatrix h = x;
            for (std::size_t l = 0; l < s.layers.size(); ++l) {
              const GinLayer& layer = s.layers[l];
              DenseMatrix aggregated = gin_aggregate(ops.adjacency, h, layer.eps);
              DenseMatrix hidden_pre = linear_forward(layer.first, aggregated);
              DenseMatrix z = linear_forward(layer.second, activate(hidden_pre, 0.0));
              const bool last = l + 1 == s.layers.size();
              h = last ? z : activate(z, 0.0);
              record(std::move(aggregated), std::move(hidden_pre), z);
            }
            check_finite(h, "gin encoder");
            return h;
          }},
      params);
}

void encode_backward(const EncoderParams& params, const GraphOperators& ops,
                     const EncoderTape& tape, const DenseMatrix& grad_output,
                     EncoderParams& grads) {
  std::visit(
      Overloaded{
          [&](const SgcParams&) {
            accumulate_linear_grads(tape.layers.at(0).aggregated, grad_output,
                                    std::get<SgcParams>(grads).linear);
          },
          [&](const GcnStack& s) {
            auto& g = std::get<GcnStack>(grads);
            DenseMatrix grad = grad_output;
            for (std::size_t l = s.layers.size(); l-- > 0;) {
              const auto& cache = tape.layers.at(l);
              if (l + 1 != s.layers.size()) activation_backward(cache.output_pre, s.slope, grad);
              accumulate_linear_grads(cache.aggregated, grad, g.layers[l]);
              // S is symmetric, so S^T (grad W^T) = S (grad W^T).
              if (l > 0) grad = spmm(ops.normalized, matmul_nt(grad, s.layers[l].weight));
            }
          },
          [&](const GinStack& s) {
            auto& g = std::get<GinStack>(grads);
            DenseMatrix grad = grad_output;
            for (std::size_t l = s.layers.size(); l-- > 0;) {
              const auto& cache = tape.layers.at(l);
              const GinLayer& layer = s.layers[l];
              if (l + 1 != s.layers.size()) activation_backward(cache.output_pre, 0.0, grad);
              accumulate_linear_grads(activate(cache.hidden_pre, 0.0), grad, g.layers[l].second);
              DenseMatrix grad_hidden = matmul_nt(grad, layer.second.weight);
              activation_backward(cache.hidden_pre, 0.0, grad_hidden);
              accumulate_linear_grads(cache.aggregated, grad_hidden, g.layers[l].first);
              if (l > 0) {
                grad = gin_aggregate(ops.adjacency, matmul_nt(grad_hidden, layer.first.weight),
                                     layer.eps);
              }
            }
          }},
      params);
}

EncoderParams zeros_like(const EncoderParams& params) {
  EncoderParams out = params;
  for (DenseMatrix* t : parameter_tensors(out)) t->fill(0.0);
  return out;
}

std::vector<DenseMatrix*> parameter_tensors(EncoderParams& params) {
  std::vector<DenseMatrix*> out;
  std::visit(Overloaded{[&](SgcParams& p) {
                          out.push_back(&p.linear.weight);
                          out.push_back(&p.linear.bias);
                        },
                        [&](GcnStack& s) {
                          for (auto& l : s.layers) {
                            out.push_back(&l.weight);
                            out.push_back(&l.bias);
                          }
                        },
                        [&](GinStack& s) {
                          for (auto& l : s.layers) {
                            out.push_back(&l.first.weight);
                            out.push_back(&l.first.bias);
                            out.push_back(&l.second.weight);
                            out.push_back(&l.second.bias);
                          }
                        }},
             params);
  return out;
}

std::vector<const DenseMatrix*> parameter_tensors(const EncoderParams& params) {
  auto mutable_ptrs = parameter_tensors(const_cast<EncoderParams&>(params));
  return {mutable_ptrs.begin(), mutable_ptrs.end()};
}

namespace {

constexpr char kCheckpointMagic[8] = {'T', 'O', 'P', 'O', 'X', 'F', 'M', '1'};

template <class T>
void write_le(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T read_le(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
    throw_data("checkpoint: unexpected end of file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_checkpoint(std::ostream& out, std::span<const DenseMatrix* const> tensors) {
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const DenseMatrix* t : tensors) {
    write_le<std::uint64_t>(out, t->rows());
    write_le<std::uint64_t>(out, t->cols());
    for (double v : t->values()) write_le<double>(out, v);
  }
  if (!out) throw_data("checkpoint: write failed");
}

std::vector<DenseMatrix> read_checkpoint(std::istream& in) {
  char magic[sizeof(kCheckpointMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0)
    throw_data("checkpoint: bad magic");
  const auto count = read_le<std::uint32_t>(in);
  std::vector<DenseMatrix> tensors;
  tensors.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto rows = read_le<std::uint64_t>(in);
    const auto cols = read_le<std::uint64_t>(in);
    if (rows > (1ULL << 32) || cols > (1ULL << 32) || rows * cols > (1ULL << 34))
      throw_data("checkpoint: implausible tensor extents");
    DenseMatrix t(rows, cols);
    for (double& v : t.values()) v = read_le<double>(in);
    tensors.push_back(std::move(t));
  }
  return tensors;
}

}  // namespace topoxform

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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "topoxform/dense.hpp"

namespace topoxform {

using NodeId = std::uint32_t;

// Node pair. Graph edge lists and sampled pairs are canonical (first < second);
// raw input edge lists may use either orientation.
struct NodePair {
  NodeId first = 0;
  NodeId second = 0;

  auto operator<=>(const NodePair&) const = default;
};

// Returns the canonical (min, max) ordering of (u, v).
inline NodePair make_pair_canonical(NodeId u, NodeId v) {
  return u < v ? NodePair{u, v} : NodePair{v, u};
}

// Compressed sparse row matrix. Column indices are sorted within each row.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr;  // length rows + 1
  std::vector<NodeId> col_idx;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return col_idx.size(); }
  // Value at (r, c), 0 when not stored.
  double at(std::size_t r, std::size_t c) const;
  DenseMatrix to_dense() const;
};

// Undirected simple graph. Self-loops are never stored; normalized_adjacency
// adds them implicitly.
class Graph {
 public:
  Graph() = default;

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  // Canonical, sorted, duplicate-free edge list.
  const std::vector<NodePair>& edges() const noexcept { return edges_; }
  // Adjacency over the symmetric closure, all stored values 1.
  const SparseMatrix& adjacency() const noexcept { return csr_; }

  std::span<const NodeId> neighbors(NodeId node) const;
  std::size_t degree(NodeId node) const;
  bool has_edge(NodeId u, NodeId v) const;

 private:
  friend Graph build_graph(std::span<const NodePair> edge_list, std::size_t num_nodes);

  std::size_t num_nodes_ = 0;
  std::vector<NodePair> edges_;
  SparseMatrix csr_;
};

// Canonicalizes, deduplicates and validates an undirected edge list. Pairs may be
// given in either orientation. Throws on out-of-range indices and self-loops.
Graph build_graph(std::span<const NodePair> edge_list, std::size_t num_nodes);

// D^{-1/2} (A + I) D^{-1/2}, D the degree matrix of A + I.
SparseMatrix normalized_adjacency(const Graph& graph);

// 1 / sqrt(deg_i + 1) for every node.
std::vector<double> inverse_sqrt_degrees(const Graph& graph);

// diag(left) * m * diag(right).
SparseMatrix scale_sparse(const SparseMatrix& m, std::span<const double> left,
                          std::span<const double> right);

SparseMatrix sparse_identity(std::size_t n);
SparseMatrix sparse_add(const SparseMatrix& a, const SparseMatrix& b);

// Builds a square sparse matrix from symmetric (i, j, value) triples; each triple is
// stored at both (i, j) and (j, i).
struct SignedPair {
  NodeId first = 0;
  NodeId second = 0;
  int sign = 0;

  auto operator<=>(const SignedPair&) const = default;
};
SparseMatrix symmetric_from_pairs(std::span<const SignedPair> entries, std::size_t n);

// Sparse times dense. Row order of accumulation is fixed, so results are bitwise
// reproducible.
DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& x);

// s^k x by k repeated products; s^k is never formed.
DenseMatrix propagate_k(const SparseMatrix& s, const DenseMatrix& x, unsigned k);

// Reads "u v" lines (0-indexed, whitespace separated, '#' comments allowed).
std::vector<NodePair> read_edge_list(std::istream& in, const std::string& source_name);
void write_edge_list(std::ostream& out, const Graph& graph);

}  // namespace topoxform

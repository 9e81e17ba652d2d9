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

#include "topoxform/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "topoxform/error.hpp"

namespace topoxform {

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  const auto begin = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
  const auto end = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
  const auto it = std::lower_bound(begin, end, static_cast<NodeId>(c));
  if (it == end || *it != c) return 0.0;
  return values[static_cast<std::size_t>(it - col_idx.begin())];
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) out(r, col_idx[p]) += values[p];
  return out;
}

std::span<const NodeId> Graph::neighbors(NodeId node) const {
  const std::size_t begin = csr_.row_ptr[node];
  const std::size_t end = csr_.row_ptr[node + 1];
  return {csr_.col_idx.data() + begin, end - begin};
}

std::size_t Graph::degree(NodeId node) const {
  return csr_.row_ptr[node + 1] - csr_.row_ptr[node];
}

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u >= num_nodes_ || v >= num_nodes_) return false;
  // Search the shorter adjacency list.
  if (degree(u) > degree(v)) std::swap(u, v);
  const auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

Graph build_graph(std::span<const NodePair> edge_list, std::size_t num_nodes) {
  Graph g;
  g.num_nodes_ = num_nodes;
  g.edges_.reserve(edge_list.size());
  for (const auto& e : edge_list) {
    if (e.first >= num_nodes || e.second >= num_nodes) {
      throw_invalid("build_graph: edge (" + std::to_string(e.first) + ", " +
                    std::to_string(e.second) + ") out of range for " +
                    std::to_string(num_nodes) + " nodes");
    }
    if (e.first == e.second)
      throw_invalid("build_graph: self-loop at node " + std::to_string(e.first));
    g.edges_.push_back(make_pair_canonical(e.first, e.second));
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());

  SparseMatrix& csr = g.csr_;
  csr.rows = csr.cols = num_nodes;
  csr.row_ptr.assign(num_nodes + 1, 0);
  for (const auto& e : g.edges_) {
    ++csr.row_ptr[e.first + 1];
    ++csr.row_ptr[e.second + 1];
  }
  for (std::size_t i = 0; i < num_nodes; ++i) csr.row_ptr[i + 1] += csr.row_ptr[i];
  csr.col_idx.resize(2 * g.edges_.size());
  csr.values.assign(2 * g.edges_.size(), 1.0);
  std::vector<std::size_t> cursor(csr.row_ptr.begin(), csr.row_ptr.end() - 1);
  // Edges are sorted by (first, second); filling rows in this order leaves every
  // row sorted except for the lower-triangle entries, so sort per row afterwards.
  for (const auto& e : g.edges_) {
    csr.col_idx[cursor[e.first]++] = e.second;
    csr.col_idx[cursor[e.second]++] = e.first;
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    std::sort(csr.col_idx.begin() + static_cast<std::ptrdiff_t>(csr.row_ptr[i]),
              csr.col_idx.begin() + static_cast<std::ptrdiff_t>(csr.row_ptr[i + 1]));
  }
  return g;
}

std::vector<double> inverse_sqrt_degrees(const Graph& graph) {
  std::vector<double> out(graph.num_nodes());
  for (NodeId i = 0; i < graph.num_nodes(); ++i)
    out[i] = 1.0 / std::sqrt(static_cast<double>(graph.degree(i) + 1));
  return out;
}

SparseMatrix normalized_adjacency(const Graph& graph) {
  const std::size_t n = graph.num_nodes();
  const auto inv_sqrt = inverse_sqrt_degrees(graph);
  SparseMatrix s;
  s.rows = s.cols = n;
  s.row_ptr.resize(n + 1, 0);
  s.col_idx.reserve(graph.adjacency().nnz() + n);
  s.values.reserve(graph.adjacency().nnz() + n);
  for (NodeId i = 0; i < n; ++i) {
    bool diag_done = false;
    for (NodeId j : graph.neighbors(i)) {
      if (!diag_done && j > i) {
        s.col_idx.push_back(i);
        s.values.push_back(inv_sqrt[i] * inv_sqrt[i]);
        diag_done = true;
      }
      s.col_idx.push_back(j);
      // Product order (min, max) keeps (i, j) and (j, i) bitwise equal.
      const NodeId lo = std::min(i, j);
      const NodeId hi = std::max(i, j);
      s.values.push_back(inv_sqrt[lo] * inv_sqrt[hi]);
    }
    if (!diag_done) {
      s.col_idx.push_back(i);
      s.values.push_back(inv_sqrt[i] * inv_sqrt[i]);
    }
    s.row_ptr[i + 1] = s.col_idx.size();
  }
  return s;
}

SparseMatrix scale_sparse(const SparseMatrix& m, std::span<const double> left,
                          std::span<const double> right) {
  if (left.size() != m.rows || right.size() != m.cols)
    throw_invalid("scale_sparse: scaling vector length mismatch");
  SparseMatrix out = m;
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t p = m.row_ptr[r]; p < m.row_ptr[r + 1]; ++p)
      out.values[p] = left[r] * m.values[p] * right[m.col_idx[p]];
  return out;
}

SparseMatrix sparse_identity(std::size_t n) {
  SparseMatrix s;
  s.rows = s.cols = n;
  s.row_ptr.resize(n + 1);
  s.col_idx.resize(n);
  s.values.assign(n, 1.0);
  for (std::size_t i = 0; i <= n; ++i) s.row_ptr[i] = i;
  for (std::size_t i = 0; i < n; ++i) s.col_idx[i] = static_cast<NodeId>(i);
  return s;
}

SparseMatrix sparse_add(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw_invalid("sparse_add: shape mismatch");
  SparseMatrix out;
  out.rows = a.rows;
  out.cols = a.cols;
  out.row_ptr.resize(a.rows + 1, 0);
  for (std::size_t r = 0; r < a.rows; ++r) {
    std::size_t p = a.row_ptr[r];
    std::size_t q = b.row_ptr[r];
    const std::size_t pe = a.row_ptr[r + 1];
    const std::size_t qe = b.row_ptr[r + 1];
    while (p < pe || q < qe) {
      if (q == qe || (p < pe && a.col_idx[p] < b.col_idx[q])) {
        out.col_idx.push_back(a.col_idx[p]);
        out.values.push_back(a.values[p++]);
      } else if (p == pe || b.col_idx[q] < a.col_idx[p]) {
        out.col_idx.push_back(b.col_idx[q]);
        out.values.push_back(b.values[q++]);
      } else {
        out.col_idx.push_back(a.col_idx[p]);
        out.values.push_back(a.values[p++] + b.values[q++]);
      }
    }
    out.row_ptr[r + 1] = out.col_idx.size();
  }
  return out;
}

SparseMatrix symmetric_from_pairs(std::span<const SignedPair> entries, std::size_t n) {
  std::vector<std::vector<std::pair<NodeId, double>>> rows(n);
  for (const auto& e : entries) {
    if (e.first >= n || e.second >= n) throw_invalid("symmetric_from_pairs: index out of range");
    rows[e.first].emplace_back(e.second, e.sign);
    if (e.first != e.second) rows[e.second].emplace_back(e.first, e.sign);
  }
  SparseMatrix s;
  s.rows = s.cols = n;
  s.row_ptr.resize(n + 1, 0);
  for (std::size_t r = 0; r < n; ++r) {
    auto& row = rows[r];
    std::sort(row.begin(), row.end());
    for (std::size_t p = 0; p < row.size(); ++p) {
      if (p > 0 && row[p].first == row[p - 1].first) {
        s.values.back() += row[p].second;
        continue;
      }
      s.col_idx.push_back(row[p].first);
      s.values.push_back(row[p].second);
    }
    s.row_ptr[r + 1] = s.col_idx.size();
  }
  return s;
}

DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& x) {
  if (s.cols != x.rows()) {
    throw_invalid("spmm: sparse has " + std::to_string(s.cols) + " columns but dense has " +
                  std::to_string(x.rows()) + " rows");
  }
  const std::size_t c = x.cols();
  DenseMatrix out(s.rows, c);
  for (std::size_t r = 0; r < s.rows; ++r) {
    double* o = out.row(r).data();
    for (std::size_t p = s.row_ptr[r]; p < s.row_ptr[r + 1]; ++p) {
      const double v = s.values[p];
      const double* xr = x.row(s.col_idx[p]).data();
      for (std::size_t j = 0; j < c; ++j) o[j] += v * xr[j];
    }
  }
  return out;
}

DenseMatrix propagate_k(const SparseMatrix& s, const DenseMatrix& x, unsigned k) {
  if (k == 0) throw_invalid("propagate_k: order must be at least 1");
  DenseMatrix out = spmm(s, x);
  for (unsigned i = 1; i < k; ++i) out = spmm(s, out);
  return out;
}

std::vector<NodePair> read_edge_list(std::istream& in, const std::string& source_name) {
  std::vector<NodePair> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    long long u = -1;
    long long v = -1;
    std::string rest;
    if (!(ls >> u >> v) || (ls >> rest) || u < 0 || v < 0 ||
        u > static_cast<long long>(UINT32_MAX) || v > static_cast<long long>(UINT32_MAX)) {
      throw_data(source_name + ":" + std::to_string(line_no) + ": expected \"u v\" node indices");
    }
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  return edges;
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  for (const auto& e : graph.edges()) out << e.first << ' ' << e.second << '\n';
}

}  // namespace topoxform

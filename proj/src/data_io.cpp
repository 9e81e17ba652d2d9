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

#include "topoxform/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "topoxform/error.hpp"

namespace topoxform {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw_data(path.string() + ": cannot open");
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_data(path.string() + ": cannot write");
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::uint64_t key(NodePair p) { return (static_cast<std::uint64_t>(p.first) << 32) | p.second; }

std::vector<NodeId> read_index_list(const json& j, const char* name, std::size_t num_nodes,
                                    const std::string& source) {
  std::vector<NodeId> out;
  if (!j.contains(name)) return out;
  if (!j[name].is_array()) throw_data(source + ": \"" + name + "\" must be an array");
  for (const auto& v : j[name]) {
    if (!v.is_number_integer() || v.get<long long>() < 0 ||
        v.get<unsigned long long>() >= num_nodes) {
      throw_data(source + ": \"" + name + "\" contains an invalid node index");
    }
    out.push_back(v.get<NodeId>());
  }
  return out;
}

Graph read_graph_file(const fs::path& path, std::size_t num_nodes) {
  auto in = open_input(path);
  const auto edges = read_edge_list(in, path.string());
  for (const auto& e : edges) {
    if (e.first >= num_nodes || e.second >= num_nodes) {
      throw_data(path.string() + ": node index " + std::to_string(std::max(e.first, e.second)) +
                 " inconsistent with " + std::to_string(num_nodes) + " feature rows");
    }
    if (e.first == e.second) throw_data(path.string() + ": self-loop at node " + std::to_string(e.first));
  }
  return build_graph(edges, num_nodes);
}

void write_graph_file(const fs::path& path, const Graph& graph) {
  auto out = open_output(path);
  write_edge_list(out, graph);
}

void write_features(const fs::path& path, const DenseMatrix& x) {
  auto out = open_output(path);
  out << x.rows() << ' ' << x.cols() << '\n';
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? " " : "") << format_double(r[j]);
    out << '\n';
  }
}

bool draw(Rng& rng, double p) {
  std::bernoulli_distribution coin(p);
  return coin(rng);
}

}  // namespace

void write_matrix_csv(const fs::path& path, const DenseMatrix& m) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << format_double(r[j]);
    out << '\n';
  }
  if (!out) throw_data(path.string() + ": write failed");
}

std::size_t Dataset::num_classes() const {
  int top = -1;
  for (int l : labels) top = std::max(top, l);
  return static_cast<std::size_t>(top + 1);
}

std::size_t GraphCollection::num_classes() const {
  int top = -1;
  for (const auto& g : graphs) top = std::max(top, g.label);
  return static_cast<std::size_t>(top + 1);
}

DenseMatrix read_features(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  std::size_t line_no = 0;
  std::size_t n = 0;
  std::size_t c = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos) break;
  }
  {
    std::istringstream header(line);
    long long nn = -1;
    long long cc = -1;
    std::string rest;
    if (!(header >> nn >> cc) || (header >> rest) || nn <= 0 || cc <= 0)
      throw_data(path.string() + ":" + std::to_string(line_no) + ": expected header \"N C\"");
    n = static_cast<std::size_t>(nn);
    c = static_cast<std::size_t>(cc);
  }
  DenseMatrix x(n, c);
  std::size_t row = 0;
  while (row < n && std::getline(in, line)) {
    ++line_no;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    auto values = x.row(row);
    for (std::size_t j = 0; j < c; ++j) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc()) {
        throw_data(path.string() + ":" + std::to_string(line_no) + ": expected " +
                   std::to_string(c) + " real values");
      }
      if (!std::isfinite(v))
        throw_data(path.string() + ":" + std::to_string(line_no) + ": non-finite feature value");
      values[j] = v;
      p = res.ptr;
    }
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p != end)
      throw_data(path.string() + ":" + std::to_string(line_no) + ": trailing data after " +
                 std::to_string(c) + " values");
    ++row;
  }
  if (row != n)
    throw_data(path.string() + ": expected " + std::to_string(n) + " feature rows, found " +
               std::to_string(row));
  return x;
}

std::vector<int> read_labels(const fs::path& path, std::size_t num_nodes) {
  auto in = open_input(path);
  std::vector<int> labels(num_nodes, -1);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    long long node = -1;
    long long label = -1;
    std::string rest;
    if (!(ls >> node >> label) || (ls >> rest) || node < 0 || label < 0)
      throw_data(path.string() + ":" + std::to_string(line_no) + ": expected \"node_id label_id\"");
    if (static_cast<std::size_t>(node) >= num_nodes)
      throw_data(path.string() + ":" + std::to_string(line_no) + ": node id out of range");
    labels[static_cast<std::size_t>(node)] = static_cast<int>(label);
  }
  return labels;
}

SplitMasks read_splits(const fs::path& path, std::size_t num_nodes) {
  auto in = open_input(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw_data(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw_data(path.string() + ": expected a JSON object");
  SplitMasks masks;
  masks.train = read_index_list(j, "train", num_nodes, path.string());
  masks.val = read_index_list(j, "val", num_nodes, path.string());
  masks.test = read_index_list(j, "test", num_nodes, path.string());
  std::vector<char> seen(num_nodes, 0);
  for (const auto* list : {&masks.train, &masks.val, &masks.test})
    for (NodeId v : *list) {
      if (seen[v]++) throw_data(path.string() + ": node " + std::to_string(v) + " in two splits");
    }
  return masks;
}

Dataset load_citation_dataset(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw_data(dir.string() + ": not a directory");
  Dataset ds;
  ds.features = read_features(dir / "features.txt");
  const std::size_t n = ds.features.rows();
  ds.graph = read_graph_file(dir / "edges.txt", n);
  if (fs::exists(dir / "labels.txt")) ds.labels = read_labels(dir / "labels.txt", n);
  if (fs::exists(dir / "splits.json")) ds.splits = read_splits(dir / "splits.json", n);
  if (fs::exists(dir / "edges_next.txt")) ds.temporal.push_back(read_graph_file(dir / "edges_next.txt", n));
  return ds;
}

void write_dataset(const fs::path& dir, const Dataset& dataset) {
  fs::create_directories(dir);
  write_graph_file(dir / "edges.txt", dataset.graph);
  write_features(dir / "features.txt", dataset.features);
  if (!dataset.labels.empty()) {
    auto out = open_output(dir / "labels.txt");
    for (std::size_t i = 0; i < dataset.labels.size(); ++i)
      if (dataset.labels[i] >= 0) out << i << ' ' << dataset.labels[i] << '\n';
  }
  if (dataset.splits) {
    json j = {{"train", dataset.splits->train},
              {"val", dataset.splits->val},
              {"test", dataset.splits->test}};
    auto out = open_output(dir / "splits.json");
    out << j.dump() << '\n';
  }
  if (!dataset.temporal.empty()) write_graph_file(dir / "edges_next.txt", dataset.temporal.front());
}

GraphCollection load_graph_collection(const fs::path& dir) {
  auto in = open_input(dir / "index.json");
  json index;
  try {
    in >> index;
  } catch (const json::exception& e) {
    throw_data((dir / "index.json").string() + ": " + e.what());
  }
  if (!index.contains("graphs") || !index["graphs"].is_array())
    throw_data((dir / "index.json").string() + ": expected {\"graphs\": [...]}");
  GraphCollection collection;
  for (const auto& entry : index["graphs"]) {
    if (!entry.is_string()) throw_data((dir / "index.json").string() + ": graph entries must be strings");
    const fs::path sub = dir / entry.get<std::string>();
    LabeledGraph g;
    g.features = read_features(sub / "features.txt");
    g.graph = read_graph_file(sub / "edges.txt", g.features.rows());
    auto lin = open_input(sub / "graph_labels.txt");
    long long label = -1;
    if (!(lin >> label) || label < 0) throw_data((sub / "graph_labels.txt").string() + ": expected a label");
    g.label = static_cast<int>(label);
    collection.graphs.push_back(std::move(g));
  }
  if (collection.graphs.empty()) throw_data(dir.string() + ": empty graph collection");
  return collection;
}

void write_graph_collection(const fs::path& dir, const GraphCollection& collection) {
  fs::create_directories(dir);
  json names = json::array();
  for (std::size_t i = 0; i < collection.graphs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "g%05zu", i);
    names.push_back(name);
    const fs::path sub = dir / name;
    fs::create_directories(sub);
    write_graph_file(sub / "edges.txt", collection.graphs[i].graph);
    write_features(sub / "features.txt", collection.graphs[i].features);
    auto out = open_output(sub / "graph_labels.txt");
    out << collection.graphs[i].label << '\n';
  }
  auto out = open_output(dir / "index.json");
  out << json{{"graphs", names}}.dump() << '\n';
}

Dataset generate_sbm(const SbmSpec& spec, Rng& rng) {
  if (spec.blocks == 0 || spec.block_size == 0) throw_invalid("generate_sbm: empty block structure");
  if (!(0.0 <= spec.p_out && spec.p_out <= spec.p_in && spec.p_in <= 1.0))
    throw_invalid("generate_sbm: require 0 <= p_out <= p_in <= 1");
  if (spec.feature_dim == 0) throw_invalid("generate_sbm: feature_dim must be positive");
  const std::size_t n = spec.blocks * spec.block_size;
  Dataset ds;
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) ds.labels[i] = static_cast<int>(i / spec.block_size);

  std::vector<NodePair> edges;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) {
      const double p = ds.labels[i] == ds.labels[j] ? spec.p_in : spec.p_out;
      if (draw(rng, p)) edges.push_back({i, j});
    }
  ds.graph = build_graph(edges, n);

  std::normal_distribution<double> noise(0.0, 1.0);
  ds.features = DenseMatrix(n, spec.feature_dim);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = ds.features.row(i);
    for (double& v : row) v = noise(rng);
    row[static_cast<std::size_t>(ds.labels[i]) % spec.feature_dim] += spec.feature_shift;
  }

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_val = n / 5;
  const std::size_t n_test = n / 5;
  SplitMasks masks;
  masks.val.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  masks.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val),
                    order.begin() + static_cast<std::ptrdiff_t>(n_val + n_test));
  masks.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val + n_test), order.end());
  for (auto* m : {&masks.train, &masks.val, &masks.test}) std::sort(m->begin(), m->end());
  ds.splits = std::move(masks);
  return ds;
}

Graph drift_sbm(const Graph& graph, std::span<const int> blocks, const SbmSpec& spec,
                double fraction, Rng& rng) {
  if (blocks.size() != graph.num_nodes()) throw_invalid("drift_sbm: block count mismatch");
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw_invalid("drift_sbm: fraction must lie in [0, 1]");
  const std::size_t n = graph.num_nodes();
  const std::size_t k = flip_count(fraction, graph.num_edges());
  const std::size_t non_edges = n * (n - 1) / 2 - graph.num_edges();
  if (k > non_edges) throw_invalid("drift_sbm: graph too dense for the requested drift");
  const double p_max = std::max(spec.p_in, spec.p_out);
  if (k > 0 && !(p_max > 0.0)) throw_invalid("drift_sbm: zero edge probabilities");

  std::vector<NodePair> edges = graph.edges();
  std::shuffle(edges.begin(), edges.end(), rng);
  std::vector<NodePair> flips(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(k));

  std::unordered_set<std::uint64_t> added;
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));
  while (added.size() < k) {
    const NodeId u = node(rng);
    const NodeId v = node(rng);
    if (u == v) continue;
    const NodePair p = make_pair_canonical(u, v);
    if (graph.has_edge(p.first, p.second) || added.contains(key(p))) continue;
    const double prob = blocks[u] == blocks[v] ? spec.p_in : spec.p_out;
    if (!draw(rng, prob / p_max)) continue;
    added.insert(key(p));
    flips.push_back(p);
  }
  return flip_pairs(graph, flips);
}

LinkSplit link_split(const Graph& graph, Rng& rng) {
  const std::size_t m = graph.num_edges();
  if (m < 20) throw_invalid("link_split: need at least 20 edges, graph has " + std::to_string(m));
  const std::size_t n = graph.num_nodes();
  const std::size_t n_test = m / 10;
  const std::size_t n_val = m / 20;
  const std::size_t non_edges = n * (n - 1) / 2 - m;
  if (non_edges < n_test + n_val)
    throw_invalid("link_split: not enough disconnected pairs for negative sampling");

  std::vector<NodePair> edges = graph.edges();
  std::shuffle(edges.begin(), edges.end(), rng);
  LinkSplit split;
  auto it = edges.begin();
  split.test_edges.assign(it, it + static_cast<std::ptrdiff_t>(n_test));
  it += static_cast<std::ptrdiff_t>(n_test);
  split.val_edges.assign(it, it + static_cast<std::ptrdiff_t>(n_val));
  it += static_cast<std::ptrdiff_t>(n_val);
  split.train_edges.assign(it, edges.end());

  std::unordered_set<std::uint64_t> used;
  std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));
  auto sample_negatives = [&](std::size_t count, std::vector<NodePair>& out) {
    while (out.size() < count) {
      const NodeId u = node(rng);
      const NodeId v = node(rng);
      if (u == v) continue;
      const NodePair p = make_pair_canonical(u, v);
      if (graph.has_edge(p.first, p.second) || !used.insert(key(p)).second) continue;
      out.push_back(p);
    }
  };
  sample_negatives(n_test, split.test_neg);
  sample_negatives(n_val, split.val_neg);
  return split;
}

DenseMatrix degree_one_hot(const Graph& graph, std::size_t feature_dim) {
  if (feature_dim == 0) throw_invalid("degree_one_hot: feature_dim must be positive");
  DenseMatrix x(graph.num_nodes(), feature_dim);
  for (NodeId i = 0; i < graph.num_nodes(); ++i) x(i, std::min(graph.degree(i), feature_dim - 1)) = 1.0;
  return x;
}

GraphCollection generate_graph_collection(std::size_t num_graphs, std::size_t min_nodes,
                                          std::size_t max_nodes, std::size_t feature_dim, Rng& rng) {
  if (min_nodes < 4 || max_nodes < min_nodes) throw_invalid("generate_graph_collection: bad node range");
  GraphCollection collection;
  std::uniform_int_distribution<std::size_t> size(min_nodes, max_nodes);
  for (std::size_t g = 0; g < num_graphs; ++g) {
    const std::size_t n = size(rng);
    const int label = static_cast<int>(g % 2);
    std::vector<NodePair> edges;
    for (NodeId i = 0; i < n; ++i)
      for (NodeId j = i + 1; j < n; ++j) {
        double p = 0.2;
        if (label == 1) p = ((i < n / 2) == (j < n / 2)) ? 0.34 : 0.06;
        if (draw(rng, p)) edges.push_back({i, j});
      }
    LabeledGraph lg;
    lg.graph = build_graph(edges, n);
    lg.features = degree_one_hot(lg.graph, feature_dim);
    lg.label = label;
    collection.graphs.push_back(std::move(lg));
  }
  return collection;
}

}  // namespace topoxform

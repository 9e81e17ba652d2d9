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

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "test_helpers.hpp"
#include "topoxform/error.hpp"

namespace topoxform {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() /
            (std::string("topoxform_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

  void write(const std::string& name, const std::string& content) const {
    std::ofstream(path_ / name) << content;
  }

 private:
  fs::path path_;
};

// Runs f, expecting a data error whose message contains `fragment`.
template <typename F>
void expect_data_error(F&& f, const std::string& fragment) {
  try {
    f();
    FAIL() << "expected a data error containing " << fragment;
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kData);
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(SbmTest, ForcedEdges) {
  SbmSpec spec;
  spec.block_size = 3;
  spec.blocks = 2;
  spec.p_in = 1.0;
  spec.p_out = 0.0;
  Rng rng(1);
  const Dataset ds = generate_sbm(spec, rng);
  EXPECT_EQ(ds.graph.num_edges(), 6u);
  EXPECT_TRUE(ds.graph.has_edge(0, 2));
  EXPECT_FALSE(ds.graph.has_edge(2, 3));
  EXPECT_EQ(ds.labels, (std::vector<int>{0, 0, 0, 1, 1, 1}));
}

TEST(SbmTest, EdgeCountWithinBinomialBounds) {
  SbmSpec spec;  // 3 x 100, p_in 0.1, p_out 0.01
  const double intra = 3.0 * 100 * 99 / 2;
  const double inter = 3.0 * 100 * 100;
  const double mean = intra * 0.1 + inter * 0.01;
  const double sd = std::sqrt(intra * 0.1 * 0.9 + inter * 0.01 * 0.99);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const Dataset ds = generate_sbm(spec, rng);
    EXPECT_NEAR(static_cast<double>(ds.graph.num_edges()), mean, 3 * sd);
    EXPECT_EQ(ds.features.rows(), 300u);
    EXPECT_EQ(ds.features.cols(), 16u);
    EXPECT_EQ(ds.num_classes(), 3u);
    ASSERT_TRUE(ds.splits.has_value());
    EXPECT_EQ(ds.splits->train.size(), 180u);
    EXPECT_EQ(ds.splits->val.size(), 60u);
    EXPECT_EQ(ds.splits->test.size(), 60u);
  }
}

TEST(SbmTest, SameSeedSameDataset) {
  SbmSpec spec;
  Rng a(7), b(7);
  const Dataset x = generate_sbm(spec, a);
  const Dataset y = generate_sbm(spec, b);
  EXPECT_EQ(x.graph.edges(), y.graph.edges());
  EXPECT_EQ(x.features, y.features);
  EXPECT_EQ(x.splits->train, y.splits->train);
}

TEST(SbmTest, RejectsBadSpec) {
  SbmSpec spec;
  spec.p_out = 0.5;
  spec.p_in = 0.1;
  Rng rng(1);
  EXPECT_THROW(generate_sbm(spec, rng), Error);
}

TEST(DriftTest, FlipsPlantedCount) {
  SbmSpec spec;
  Rng rng(2);
  const Dataset ds = generate_sbm(spec, rng);
  const Graph next = drift_sbm(ds.graph, ds.labels, spec, 0.1, rng);
  const std::size_t k = flip_count(0.1, ds.graph.num_edges());
  std::size_t removed = 0, added = 0;
  for (const auto& e : ds.graph.edges()) removed += !next.has_edge(e.first, e.second);
  for (const auto& e : next.edges()) added += !ds.graph.has_edge(e.first, e.second);
  EXPECT_EQ(removed, k);
  EXPECT_EQ(added, k);
  EXPECT_EQ(next.num_edges(), ds.graph.num_edges());
}

TEST(LinkSplitTest, RatiosAndDisjointness) {
  Rng rng(3);
  std::vector<NodePair> edges;
  for (NodeId i = 0; i < 100; ++i) edges.push_back({i, static_cast<NodeId>((i + 1) % 100)});
  const Graph g = build_graph(edges, 100);
  ASSERT_EQ(g.num_edges(), 100u);
  const LinkSplit s = link_split(g, rng);
  EXPECT_EQ(s.train_edges.size(), 85u);
  EXPECT_EQ(s.test_edges.size(), 10u);
  EXPECT_EQ(s.val_edges.size(), 5u);
  EXPECT_EQ(s.test_neg.size(), 10u);
  EXPECT_EQ(s.val_neg.size(), 5u);
  std::set<NodePair> all(s.train_edges.begin(), s.train_edges.end());
  all.insert(s.test_edges.begin(), s.test_edges.end());
  all.insert(s.val_edges.begin(), s.val_edges.end());
  EXPECT_EQ(all.size(), 100u);
  std::set<NodePair> neg(s.test_neg.begin(), s.test_neg.end());
  neg.insert(s.val_neg.begin(), s.val_neg.end());
  EXPECT_EQ(neg.size(), 15u);
  for (const auto& p : neg) EXPECT_FALSE(g.has_edge(p.first, p.second));
}

TEST(LinkSplitTest, RejectsTinyGraphs) {
  Rng rng(4);
  EXPECT_THROW(link_split(testing::path3(), rng), Error);
}

TEST(DatasetFilesTest, RoundTrip) {
  TempDir dir;
  SbmSpec spec;
  spec.block_size = 20;
  Rng rng(5);
  Dataset ds = generate_sbm(spec, rng);
  ds.temporal.push_back(drift_sbm(ds.graph, ds.labels, spec, 0.1, rng));
  write_dataset(dir.path(), ds);
  const Dataset back = load_citation_dataset(dir.path());
  EXPECT_EQ(back.graph.edges(), ds.graph.edges());
  EXPECT_LE(max_abs_difference(back.features, ds.features), 1e-15);
  EXPECT_EQ(back.labels, ds.labels);
  ASSERT_TRUE(back.splits.has_value());
  EXPECT_EQ(back.splits->train, ds.splits->train);
  EXPECT_EQ(back.splits->val, ds.splits->val);
  EXPECT_EQ(back.splits->test, ds.splits->test);
  ASSERT_EQ(back.temporal.size(), 1u);
  EXPECT_EQ(back.temporal[0].edges(), ds.temporal[0].edges());
}

TEST(DatasetFilesTest, LabelsAndSplitsAreOptional) {
  TempDir dir;
  dir.write("features.txt", "3 2\n1 0\n0 1\n1 1\n");
  dir.write("edges.txt", "0 1\n");
  const Dataset ds = load_citation_dataset(dir.path());
  EXPECT_EQ(ds.graph.num_nodes(), 3u);  // node 2 is isolated
  EXPECT_TRUE(ds.labels.empty());
  EXPECT_FALSE(ds.splits.has_value());
}

TEST(DatasetFilesTest, EdgeIndexBeyondFeatureRows) {
  TempDir dir;
  dir.write("features.txt", "2 1\n0.5\n0.25\n");
  dir.write("edges.txt", "0 1\n1 2\n");
  expect_data_error([&] { load_citation_dataset(dir.path()); }, "inconsistent with 2 feature rows");
}

TEST(DatasetFilesTest, MissingDirectory) {
  expect_data_error([] { load_citation_dataset("/nonexistent/topoxform"); }, "not a directory");
}

TEST(FeatureFileTest, RejectsNonFiniteWithLineNumber) {
  TempDir dir;
  for (const char* bad : {"nan", "inf", "-Inf"}) {
    dir.write("f.txt", std::string("2 2\n1 2\n3 ") + bad + "\n");
    expect_data_error([&] { read_features(dir.path() / "f.txt"); }, "f.txt:3");
  }
}

TEST(FeatureFileTest, ReportsMalformedLines) {
  TempDir dir;
  dir.write("header.txt", "two 2\n");
  expect_data_error([&] { read_features(dir.path() / "header.txt"); }, "header.txt:1");
  dir.write("short.txt", "2 2\n1 2\n3\n");
  expect_data_error([&] { read_features(dir.path() / "short.txt"); }, "short.txt:3");
  dir.write("rows.txt", "3 1\n1\n2\n");
  expect_data_error([&] { read_features(dir.path() / "rows.txt"); }, "expected 3 feature rows");
}

TEST(LabelFileTest, ParsesAndValidates) {
  TempDir dir;
  dir.write("labels.txt", "0 1\n2 0\n");
  EXPECT_EQ(read_labels(dir.path() / "labels.txt", 3), (std::vector<int>{1, -1, 0}));
  dir.write("bad.txt", "0 1\n7 0\n");
  expect_data_error([&] { read_labels(dir.path() / "bad.txt", 3); }, "bad.txt:2");
}

TEST(SplitFileTest, RejectsOverlapAndBadIndices) {
  TempDir dir;
  dir.write("s.json", R"({"train": [0, 1], "val": [2], "test": [3]})");
  const SplitMasks m = read_splits(dir.path() / "s.json", 4);
  EXPECT_EQ(m.train, (std::vector<NodeId>{0, 1}));
  dir.write("overlap.json", R"({"train": [0, 1], "test": [1]})");
  expect_data_error([&] { read_splits(dir.path() / "overlap.json", 4); }, "two splits");
  dir.write("range.json", R"({"train": [9]})");
  expect_data_error([&] { read_splits(dir.path() / "range.json", 4); }, "invalid node index");
  dir.write("junk.json", "{not json");
  expect_data_error([&] { read_splits(dir.path() / "junk.json", 4); }, "junk.json");
}

TEST(GraphCollectionTest, RoundTrip) {
  TempDir dir;
  Rng rng(6);
  const GraphCollection c = generate_graph_collection(6, 5, 9, 4, rng);
  EXPECT_EQ(c.num_classes(), 2u);
  write_graph_collection(dir.path(), c);
  const GraphCollection back = load_graph_collection(dir.path());
  ASSERT_EQ(back.graphs.size(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(back.graphs[i].graph.edges(), c.graphs[i].graph.edges());
    EXPECT_EQ(back.graphs[i].features, c.graphs[i].features);
    EXPECT_EQ(back.graphs[i].label, c.graphs[i].label);
  }
}

TEST(GraphCollectionTest, DegreeOneHotCaps) {
  const Graph star = build_graph(std::vector<NodePair>{{0, 1}, {0, 2}, {0, 3}}, 4);
  const DenseMatrix x = degree_one_hot(star, 3);
  EXPECT_EQ(x, (DenseMatrix{{0, 0, 1}, {0, 1, 0}, {0, 1, 0}, {0, 1, 0}}));
}

TEST(MatrixCsvTest, ShortestRoundTrip) {
  TempDir dir;
  write_matrix_csv(dir.path() / "m.csv", DenseMatrix{{0.1, -2}, {1e-20, 3.5}});
  std::ifstream in(dir.path() / "m.csv");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text, "0.1,-2\n1e-20,3.5\n");
}

}  // namespace
}  // namespace topoxform

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <queue>
#include <sstream>
#include <thread>

#include "perclab/percolation.hpp"

using namespace perclab;

namespace {

// Labels by breadth-first search over open edges, numbering clusters in
// order of their smallest vertex.
std::vector<int> bfs_labels(const EdgeConfiguration& c) {
  const Graph& g = c.graph();
  std::vector<int> label(g.num_vertices(), -1);
  int next = 0;
  for (std::size_t s = 0; s < g.num_vertices(); ++s) {
    if (label[s] >= 0) continue;
    std::queue<VertexId> q;
    q.push(static_cast<VertexId>(s));
    label[s] = next;
    while (!q.empty()) {
      const VertexId v = q.front();
      q.pop();
      for (const auto& inc : g.incident(v)) {
        if (c.open(inc.edge) && label[inc.to] < 0) {
          label[inc.to] = next;
          q.push(inc.to);
        }
      }
    }
    ++next;
  }
  return label;
}

}  // namespace

TEST(Percolation, ExtremeProbabilities) {
  const Graph g = build_box(2, 5, Adjacency::l1);
  EXPECT_EQ(sample(g, 1.0, 1, 2).num_open(), g.num_edges());
  EXPECT_EQ(sample(g, 0.0, 1, 2).num_open(), 0u);
  EXPECT_THROW(sample(g, 1.5, 1, 2), std::invalid_argument);

  const auto all = label(sample(g, 1.0, 1, 2));
  EXPECT_EQ(all.num_clusters(), 1u);
  EXPECT_EQ(all.size(0), 121);
  const auto none = label(sample(g, 0.0, 1, 2));
  EXPECT_EQ(none.num_clusters(), 121u);
}

TEST(Percolation, OpenFractionWithinBinomialBand) {
  const Graph g = build_box(2, 64, Adjacency::l1);
  const double trials = 10000;
  double open = 0;
  for (int t = 0; t < trials; ++t) open += static_cast<double>(sample(g, 0.5, 99, t).num_open());
  const double total = trials * static_cast<double>(g.num_edges());
  const double sigma = std::sqrt(total * 0.25);
  EXPECT_LE(std::abs(open - 0.5 * total), 3 * sigma);
}

TEST(Percolation, ReproducibleAndThreadIndependent) {
  const Graph g = build_box(2, 20, Adjacency::l1);
  std::vector<EdgeConfiguration> serial;
  for (int t = 0; t < 8; ++t) serial.push_back(sample(g, 0.6, 7, t));
  std::vector<std::vector<std::uint64_t>> words(8);
  std::vector<std::thread> pool;
  for (int w = 0; w < 4; ++w) {
    pool.emplace_back([&, w] {
      for (int t = w; t < 8; t += 4) words[t] = sample(g, 0.6, 7, t).words();
    });
  }
  for (auto& th : pool) th.join();
  for (int t = 0; t < 8; ++t) {
    EXPECT_EQ(serial[t].words(), words[t]);
    EXPECT_EQ(label(serial[t]).ids(), label(sample(g, 0.6, 7, t)).ids());
  }
  EXPECT_NE(serial[0].words(), serial[1].words());
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    EXPECT_EQ(serial[3].open(e), edge_uniform(7, 3, e) < 0.6);
  }
}

TEST(Percolation, MonotoneCoupling) {
  const Graph g = build_box(2, 16, Adjacency::l1);
  for (int t = 0; t < 20; ++t) {
    const auto lo = sample(g, 0.4, 3, t);
    const auto hi = sample(g, 0.6, 3, t);
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
      if (lo.open(e)) EXPECT_TRUE(hi.open(e));
    }
    const auto a = label(lo), b = label(hi);
    for (std::size_t c = 0; c < a.num_clusters(); ++c) {
      const auto members = a.members(c);
      const int target = b.cluster_of(members[0]);
      for (VertexId v : members) EXPECT_EQ(b.cluster_of(v), target);
    }
  }
}

TEST(Percolation, HandBuiltTwoComponents) {
  const Graph g = build_rect(2, Point{0, 0}, Point{4, 4}, Adjacency::l1);
  auto c = uniform_configuration(g, false);
  auto open_between = [&](Point a, Point b) { c.set_open(*g.find_edge(*g.find(a), *g.find(b)), true); };
  open_between({1, 1}, {2, 1});
  open_between({2, 1}, {3, 1});
  open_between({1, 3}, {2, 3});
  open_between({2, 3}, {3, 3});
  open_between({3, 3}, {3, 2});
  const auto lab = label(c);
  EXPECT_EQ(lab.num_clusters(), 25u - 2u - 3u);
  EXPECT_EQ(lab.size(lab.cluster_of(*g.find({1, 1}))), 3);
  EXPECT_EQ(lab.size(lab.cluster_of(*g.find({1, 3}))), 4);
  const auto oracle = bfs_labels(c);
  EXPECT_EQ(lab.ids(), std::vector<std::int32_t>(oracle.begin(), oracle.end()));
}

TEST(Percolation, LabelingMatchesBfsOracle) {
  const Graph g = build_rect(2, Point{0, 0}, Point{7, 7}, Adjacency::l1);
  for (int t = 0; t < 1000; ++t) {
    const auto c = sample(g, 0.5, 11, t);
    const auto lab = label(c);
    const auto oracle = bfs_labels(c);
    for (std::size_t v = 0; v < g.num_vertices(); ++v) ASSERT_EQ(lab.cluster_of(v), oracle[v]);
    std::size_t total = 0;
    for (std::size_t id = 0; id < lab.num_clusters(); ++id) {
      total += lab.members(id).size();
      for (VertexId v : lab.members(id)) ASSERT_EQ(lab.cluster_of(v), static_cast<int>(id));
    }
    ASSERT_EQ(total, g.num_vertices());
  }
}

TEST(Percolation, GiantProxyModes) {
  const Graph g = build_box(2, 6, Adjacency::l1);
  const auto full = label(sample(g, 1.0, 0, 0));
  EXPECT_EQ(*giant_proxy(full, GiantMode::largest).id, 0);
  EXPECT_EQ(*giant_proxy(full, GiantMode::spanning).id, 0);
  const VertexId o = *g.find(Point{});
  EXPECT_FALSE(is_finite_proxy(full, full.cluster_of(o), giant_proxy(full, GiantMode::spanning)));

  const auto empty = label(sample(g, 0.0, 0, 0));
  EXPECT_EQ(*giant_proxy(empty, GiantMode::largest).id, 0);
  const auto span = giant_proxy(empty, GiantMode::spanning);
  EXPECT_FALSE(span.id.has_value());
  EXPECT_EQ(span.spanning_count, 0);
  EXPECT_TRUE(is_finite_proxy(empty, empty.cluster_of(o), span));
  EXPECT_EQ(empty.size(cluster_of(empty, o)), 1);
}

TEST(Percolation, SmallBoundaryClusterIsNotFinite) {
  const Graph g = build_box(2, 3, Adjacency::l1);
  auto c = uniform_configuration(g, false);
  const VertexId a = *g.find({2, 0}), b = *g.find({3, 0});
  c.set_open(*g.find_edge(a, b), true);
  const auto lab = label(c);
  const auto giant = giant_proxy(lab, GiantMode::spanning);
  EXPECT_EQ(lab.size(lab.cluster_of(a)), 2);
  EXPECT_FALSE(is_finite_proxy(lab, lab.cluster_of(a), giant));
}

TEST(Percolation, SupercriticalSpanningClusterExists) {
  const Graph g = build_box(2, 128, Adjacency::l1);
  int found = 0;
  for (int t = 0; t < 100; ++t) {
    if (giant_proxy(label(sample(g, 0.7, 5, t)), GiantMode::spanning).id) ++found;
  }
  EXPECT_GE(found, 95);
}

TEST(Percolation, LazyExplorationAgreesWithLabeling) {
  const Graph g = build_box(2, 12, Adjacency::l1);
  const VertexId o = *g.find(Point{});
  for (int t = 0; t < 300; ++t) {
    const auto c = sample(g, 0.45, 21, t);
    const auto lab = label(c);
    const auto lazy = explore_cluster(g, 0.45, 21, t, o, 1u << 20);
    const auto& info = lab.info(lab.cluster_of(o));
    EXPECT_EQ(lazy.touches_boundary, info.touches_boundary);
    if (!lazy.truncated) {
      EXPECT_EQ(static_cast<int>(lazy.vertices.size()), info.size);
      for (VertexId v : lazy.vertices) EXPECT_EQ(lab.cluster_of(v), lab.cluster_of(o));
    }
  }
}

TEST(Percolation, BinaryAndTextExport) {
  const Graph g = build_box(2, 4, Adjacency::linf);
  const auto c = sample(g, 0.3, 42, 9);
  std::stringstream buf;
  write_binary(buf, c);
  const auto back = read_binary(buf, g);
  EXPECT_EQ(back.words(), c.words());
  EXPECT_EQ(back.seed(), 42u);
  EXPECT_EQ(back.trial(), 9u);
  EXPECT_DOUBLE_EQ(back.p(), 0.3);

  const Graph other = build_box(2, 5, Adjacency::linf);
  std::stringstream buf2;
  write_binary(buf2, c);
  EXPECT_THROW(read_binary(buf2, other), std::runtime_error);

  std::ostringstream text;
  write_edge_list(text, c);
  std::size_t lines = 0, open = 0;
  std::istringstream in(text.str());
  std::string line;
  while (std::getline(in, line)) {
    if (line[0] == '#') continue;
    ++lines;
    if (line.ends_with("open")) ++open;
  }
  EXPECT_EQ(lines, g.num_edges());
  EXPECT_EQ(open, c.num_open());
}

#include <gtest/gtest.h>

#include <cmath>
#include <queue>
#include <set>

#include "perclab/lattice.hpp"

using namespace perclab;

namespace {

// Count adjacent pairs by scanning all vertex pairs.
std::size_t brute_edge_count(const Graph& g, Adjacency adj) {
  std::size_t count = 0;
  for (std::size_t a = 0; a < g.num_vertices(); ++a) {
    for (std::size_t b = a + 1; b < g.num_vertices(); ++b) {
      const Point pa = g.point(a), pb = g.point(b);
      const int dist = adj == Adjacency::l1 ? l1_distance(pa, pb, g.dim()) : linf_distance(pa, pb, g.dim());
      if (dist == 1) ++count;
    }
  }
  return count;
}

bool bfs_connected(const Graph& g) {
  if (g.num_vertices() == 0) return true;
  std::vector<char> seen(g.num_vertices(), 0);
  std::queue<VertexId> q;
  q.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    const VertexId v = q.front();
    q.pop();
    for (const auto& inc : g.incident(v)) {
      if (!seen[inc.to]) {
        seen[inc.to] = 1;
        ++reached;
        q.push(inc.to);
      }
    }
  }
  return reached == g.num_vertices();
}

std::set<std::pair<Point, Point>> edge_coords(const Graph& g) {
  std::set<std::pair<Point, Point>> out;
  for (const auto& e : g.edges()) {
    Point a = g.point(e.u), b = g.point(e.v);
    if (b < a) std::swap(a, b);
    out.insert({a, b});
  }
  return out;
}

}  // namespace

TEST(Lattice, BoxCounts) {
  const Graph g = build_box(2, 4, Adjacency::l1);
  EXPECT_EQ(g.num_vertices(), 81u);
  EXPECT_EQ(g.num_edges(), 144u);

  const Graph star = build_box(2, 1, Adjacency::linf);
  EXPECT_EQ(star.num_vertices(), 9u);
  EXPECT_EQ(star.num_edges(), brute_edge_count(star, Adjacency::linf));
  EXPECT_EQ(star.num_edges(), 20u);

  const Graph cube = build_box(3, 1, Adjacency::l1);
  EXPECT_EQ(cube.num_vertices(), 27u);
  EXPECT_EQ(cube.num_edges(), brute_edge_count(cube, Adjacency::l1));
  EXPECT_EQ(cube.num_edges(), 54u);
}

TEST(Lattice, BoxRejectsBadArguments) {
  EXPECT_THROW(build_box(1, 3, Adjacency::l1), std::invalid_argument);
  EXPECT_THROW(build_box(2, 0, Adjacency::l1), std::invalid_argument);
  EXPECT_THROW(build_box(5, 1, Adjacency::l1), std::invalid_argument);
}

TEST(Lattice, BruteEdgeCountsAcrossShapes) {
  for (int d = 2; d <= 3; ++d) {
    for (int n = 1; n <= 2; ++n) {
      for (auto adj : {Adjacency::l1, Adjacency::linf}) {
        const Graph g = build_box(d, n, adj);
        EXPECT_EQ(g.num_vertices(), static_cast<std::size_t>(std::pow(2 * n + 1, d)));
        EXPECT_EQ(g.num_edges(), brute_edge_count(g, adj)) << d << " " << n;
      }
    }
  }
}

TEST(Lattice, SymmetricIrreflexiveAndL1InsideLinf) {
  for (int d = 2; d <= 4; ++d) {
    const Graph l1 = build_box(d, 2, Adjacency::l1);
    const Graph li = build_box(d, 2, Adjacency::linf);
    for (const Graph* g : {&l1, &li}) {
      for (std::size_t v = 0; v < g->num_vertices(); ++v) {
        for (const auto& inc : g->incident(v)) {
          EXPECT_NE(inc.to, static_cast<VertexId>(v));
          EXPECT_TRUE(g->find_edge(inc.to, v).has_value());
        }
      }
    }
    const auto a = edge_coords(l1);
    const auto b = edge_coords(li);
    for (const auto& e : a) EXPECT_TRUE(b.count(e));
  }
}

TEST(Lattice, FindRoundTrips) {
  const Graph g = build_box(3, 2, Adjacency::l1);
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    EXPECT_EQ(*g.find(g.point(v)), static_cast<VertexId>(v));
  }
  EXPECT_FALSE(g.find(Point{3, 0, 0, 0}).has_value());
  const VertexId o = *g.find(Point{});
  EXPECT_EQ(g.degree(o), 6);
  EXPECT_FALSE(g.on_window_boundary(o));
  EXPECT_TRUE(g.on_window_boundary(*g.find(Point{2, 0, 0, 0})));
}

TEST(Lattice, WedgeExamples) {
  const auto flat = build_wedge(HeightFunction::constant(0), 3, 3);
  EXPECT_EQ(flat.graph.num_vertices(), 28u);

  const auto lin = build_wedge(HeightFunction::power(1.0), 2, 0);
  EXPECT_EQ(lin.graph.num_vertices(), 9u);
  EXPECT_TRUE(lin.graph.find(Point{2, 0, -2, 0}).has_value());
  EXPECT_FALSE(lin.graph.find(Point{1, 0, 2, 0}).has_value());

  const auto logw = build_wedge(HeightFunction::log(2.0, 2.0, HeightFunction::Rounding::floor), 100, 10);
  EXPECT_TRUE(bfs_connected(logw.graph));
  const int expected = static_cast<int>(std::floor(std::pow(std::log(102.0), 2)));
  int max_z = 0;
  for (std::size_t v = 0; v < logw.graph.num_vertices(); ++v) {
    const Point p = logw.graph.point(v);
    EXPECT_LE(std::abs(p[2]), logw.height.height(p[0]));
    if (p[0] == 100) max_z = std::max(max_z, std::abs(p[2]));
    EXPECT_LE(logw.graph.degree(v), 6);
  }
  EXPECT_EQ(max_z, expected);
}

TEST(Lattice, WedgeRejectsNonMonotoneTable) {
  EXPECT_THROW(HeightFunction::table({0, 2, 1}), std::invalid_argument);
}

TEST(Lattice, WedgeBoundaryIsTruncationOnly) {
  const auto w = build_wedge(HeightFunction::power(1.0), 4, 2);
  EXPECT_FALSE(w.graph.on_window_boundary(w.origin()));
  EXPECT_FALSE(w.graph.on_window_boundary(*w.graph.find(Point{2, 0, 2, 0})));
  EXPECT_TRUE(w.graph.on_window_boundary(*w.graph.find(Point{4, 0, 0, 0})));
  EXPECT_TRUE(w.graph.on_window_boundary(*w.graph.find(Point{1, 2, 0, 0})));
  EXPECT_TRUE(w.in_wedge(7, 100, 7));
  EXPECT_FALSE(w.in_wedge(-1, 0, 0));
}

TEST(Lattice, ConcavityOfShippedFamilies) {
  const std::vector<HeightFunction> families = {
      HeightFunction::constant(3), HeightFunction::power(0.5), HeightFunction::power(1.0),
      HeightFunction::log(1.0), HeightFunction::log(2.0)};
  for (const auto& h : families) {
    const double gamma = h.concavity_gamma(2000);
    // h(delta x) >= gamma delta h(x) on the whole tabulated range
    EXPECT_GT(gamma, 0.0) << h.describe();
    for (int x = 1; x <= 2000; x += 37) {
      for (double delta : {0.1, 0.25, 0.5, 0.9}) {
        EXPECT_GE(h.value(delta * x) + 1e-12, gamma * delta * h.value(x));
      }
    }
  }
}

TEST(Lattice, HeightDescribeRoundTrips) {
  for (const auto& h : {HeightFunction::constant(2), HeightFunction::power(0.5, 1.5),
                        HeightFunction::log(2.0, 2.0, HeightFunction::Rounding::floor),
                        HeightFunction::table({0, 1, 1, 4})}) {
    const auto back = HeightFunction::parse(h.describe());
    for (int x = 0; x < 50; ++x) EXPECT_EQ(back.height(x), h.height(x));
  }
}

TEST(Lattice, DescriptorTextRoundTrip) {
  const auto w = build_wedge(HeightFunction::log(2.0), 10, 4);
  const auto text = w.graph.descriptor().to_text();
  const auto back = LatticeDescriptor::from_text(text);
  EXPECT_EQ(back.kind, LatticeDescriptor::Kind::wedge);
  EXPECT_EQ(back.x_max, 10);
  EXPECT_EQ(back.y_max, 4);
  ASSERT_TRUE(back.height.has_value());
  EXPECT_EQ(back.height->describe(), w.height.describe());
  EXPECT_THROW(LatticeDescriptor::from_text("dim = 2\nbogus = 1\n"), std::runtime_error);
}

TEST(Lattice, BlocksOfExamples) {
  const BlockGrid grid(2, 4);
  EXPECT_EQ(grid.extent(), 3);
  const auto one = blocks_of(grid, build_box(2, 6, Adjacency::l1));
  ASSERT_EQ(one.blocks.size(), 1u);
  EXPECT_EQ(one.blocks[0].center, Point{});
  EXPECT_EQ(blocks_of(grid, build_box(2, 11, Adjacency::l1)).blocks.size(), 25u);
  EXPECT_EQ(blocks_of(grid, build_box(2, 3, Adjacency::l1)).blocks.size(), 1u);
  EXPECT_TRUE(blocks_of(grid, build_box(2, 2, Adjacency::l1)).empty());
  EXPECT_THROW(BlockGrid(2, 3), std::invalid_argument);
}

TEST(Lattice, BlocksMatchContainmentScan) {
  for (int N : {4, 5, 8, 20}) {
    for (int n : {3, 7, 12, 25, 40}) {
      const BlockGrid grid(2, N);
      const Graph box = build_box(2, n, Adjacency::l1);
      std::size_t expected = 0;
      for (int x = -n; x <= n; ++x) {
        for (int y = -n; y <= n; ++y) {
          // block fits iff |N c| + floor(3N/4) <= n on each axis
          if (4 * (std::abs(N * x) + (3 * N) / 4) <= 4 * n && 4 * (std::abs(N * y) + (3 * N) / 4) <= 4 * n) ++expected;
        }
      }
      EXPECT_EQ(blocks_of(grid, box).blocks.size(), expected) << N << " " << n;
    }
  }
}

TEST(Lattice, CoarseGraphIsomorphicToBox) {
  const BlockGrid grid(2, 4);
  const auto set = blocks_of(grid, build_box(2, 15, Adjacency::l1));
  const Graph ref = build_box(2, 3, Adjacency::l1);
  const Graph ref_star = build_box(2, 3, Adjacency::linf);
  EXPECT_EQ(edge_coords(set.coarse), edge_coords(ref));
  EXPECT_EQ(edge_coords(set.coarse_star), edge_coords(ref_star));

  // non-box region: a wedge slab path
  const auto w = build_wedge(HeightFunction::constant(30), 40, 30);
  const BlockGrid grid3(3, 8);
  const auto wset = blocks_of(grid3, w.graph);
  for (const auto& b : wset.blocks) {
    for (int i = 0; i < 3; ++i) {
      EXPECT_GE(b.lo[i], w.graph.lo()[i]);
      EXPECT_LE(b.hi[i], w.graph.hi()[i]);
    }
  }
  EXPECT_FALSE(wset.empty());
}

TEST(Lattice, BlockOverlapAndMultiplicity) {
  for (int N : {4, 8, 20}) {
    const BlockGrid grid(2, N);
    // adjacent blocks overlap in a slab at least N/2 thick
    const Block a = grid.block_at(Point{0, 0});
    const Block b = grid.block_at(Point{1, 0});
    EXPECT_GE(2 * (a.hi[0] - b.lo[0] + 1), N);
    for (int x = -2 * N; x <= 2 * N; ++x) {
      int count = 0;
      for (int c = -4; c <= 4; ++c) {
        const Block blk = grid.block_at(Point{c, 0});
        if (blk.lo[0] <= x && x <= blk.hi[0]) ++count;
      }
      EXPECT_GE(count, 1);
      EXPECT_LE(count, 2);
    }
  }
}

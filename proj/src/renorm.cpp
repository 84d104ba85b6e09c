#include "perclab/renorm.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace perclab {

namespace {

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int ceil_div(int a, int b) { return -floor_div(-a, b); }

struct LocalSets {
  std::vector<std::int32_t> parent;
  explicit LocalSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

BlockAnalysis analyze_block(const EdgeConfiguration& config, const ClusterLabeling& labeling,
                            const BlockGrid& grid, const Block& block) {
  const Graph& g = config.graph();
  const int d = g.dim();
  const int side = block.hi[0] - block.lo[0] + 1;
  std::size_t count = 1;
  for (int i = 0; i < d; ++i) count *= static_cast<std::size_t>(side);

  auto local_of = [&](const Point& p) -> std::int64_t {
    std::int64_t id = 0, stride = 1;
    for (int i = 0; i < d; ++i) {
      if (p[i] < block.lo[i] || p[i] > block.hi[i]) return -1;
      id += (p[i] - block.lo[i]) * stride;
      stride *= side;
    }
    return id;
  };

  std::vector<VertexId> fine(count);
  Point p = block.lo;
  for (std::size_t k = 0; k < count; ++k) {
    const auto v = g.find(p);
    if (!v) throw std::invalid_argument("block leaves the configuration window");
    fine[k] = *v;
    for (int i = 0; i < d; ++i) {
      if (++p[i] <= block.hi[i]) break;
      p[i] = block.lo[i];
    }
  }

  LocalSets sets(count);
  for (std::size_t k = 0; k < count; ++k) {
    for (const auto& inc : g.incident(fine[k])) {
      if (!config.open(inc.edge) || inc.to < fine[k]) continue;
      const auto other = local_of(g.point(inc.to));
      if (other >= 0) sets.unite(static_cast<std::int32_t>(k), static_cast<std::int32_t>(other));
    }
  }

  struct Acc {
    Point lo, hi;
  };
  std::vector<std::int32_t> slot(count, -1);
  std::vector<Acc> acc;
  BlockAnalysis out;
  for (std::size_t k = 0; k < count; ++k) {
    const auto r = sets.find(static_cast<std::int32_t>(k));
    const Point q = g.point(fine[k]);
    if (slot[r] < 0) {
      slot[r] = static_cast<std::int32_t>(acc.size());
      acc.push_back({q, q});
      LocalComponent c;
      c.cluster = labeling.cluster_of(fine[k]);
      out.components.push_back(c);
    }
    auto& a = acc[slot[r]];
    for (int i = 0; i < d; ++i) {
      a.lo[i] = std::min(a.lo[i], q[i]);
      a.hi[i] = std::max(a.hi[i], q[i]);
    }
  }
  int crossing = 0;
  for (std::size_t c = 0; c < acc.size(); ++c) {
    auto& comp = out.components[c];
    bool cross = true;
    for (int i = 0; i < d; ++i) {
      comp.diameter = std::max(comp.diameter, acc[c].hi[i] - acc[c].lo[i]);
      if (acc[c].lo[i] != block.lo[i] || acc[c].hi[i] != block.hi[i]) cross = false;
    }
    comp.crossing = cross;
    if (cross) ++crossing;
  }
  if (crossing >= 1) {
    int large = 0;
    for (const auto& comp : out.components)
      if (!small_diameter(comp.diameter, grid.scale())) ++large;
    // the crossing component itself is large; everything else must be small
    out.good = large == 1;
  }
  return out;
}

bool classify_block(const EdgeConfiguration& config, const ClusterLabeling& labeling,
                    const BlockGrid& grid, const Block& block) {
  return analyze_block(config, labeling, grid, block).good;
}

BlockField::BlockField(const EdgeConfiguration& config, const ClusterLabeling& labeling, const BlockGrid& grid)
    : config_(&config), labeling_(&labeling), grid_(grid), blocks_(blocks_of(grid, config.graph())) {
  analyses_.reserve(blocks_.blocks.size());
  for (const auto& b : blocks_.blocks) analyses_.push_back(analyze_block(config, labeling, grid, b));
}

bool BlockField::substantial(VertexId b, std::int32_t cluster) const {
  for (const auto& c : analyses_[b].components)
    if (c.cluster == cluster && !small_diameter(c.diameter, grid_.scale())) return true;
  return false;
}

VertexSet substantial_blocks(const BlockField& field, std::int32_t cluster) {
  std::vector<VertexId> ids;
  for (std::size_t b = 0; b < field.size(); ++b)
    if (field.substantial(static_cast<VertexId>(b), cluster)) ids.push_back(static_cast<VertexId>(b));
  return VertexSet(field.coarse(), std::move(ids));
}

std::size_t BlockColoring::num_red() const { return static_cast<std::size_t>(std::count(red.begin(), red.end(), 1)); }
std::size_t BlockColoring::num_blue() const { return static_cast<std::size_t>(std::count(blue.begin(), blue.end(), 1)); }

BlockColoring color(const BlockField& field, std::int32_t c1, std::int32_t c2) {
  const std::size_t n = field.size();
  BlockColoring out;
  out.good.assign(n, 0);
  out.substantial1.assign(n, 0);
  out.substantial2.assign(n, 0);
  out.red.assign(n, 0);
  out.blue.assign(n, 0);
  for (std::size_t b = 0; b < n; ++b) {
    const auto v = static_cast<VertexId>(b);
    out.good[b] = field.good(v);
    out.substantial1[b] = field.substantial(v, c1);
    out.substantial2[b] = field.substantial(v, c2);
    out.blue[b] = out.substantial1[b] && out.substantial2[b];
  }
  if (n == 0) return out;
  const auto s1 = substantial_blocks(field, c1);
  const auto red = inner_vertex_boundary(s1, Subgraph::full(field.coarse()));
  for (VertexId b : red.ids()) out.red[b] = 1;
  return out;
}

std::string coloring_raster(const BlockField& field, const BlockColoring& coloring) {
  const Graph& c = field.coarse();
  if (c.dim() != 2) throw std::invalid_argument("raster export needs d = 2");
  std::ostringstream out;
  for (int y = c.hi()[1]; y >= c.lo()[1]; --y) {
    for (int x = c.lo()[0]; x <= c.hi()[0]; ++x) {
      const auto b = c.find(Point{x, y});
      if (!b) {
        out << ' ';
        continue;
      }
      const bool r = coloring.red[*b], bl = coloring.blue[*b];
      out << (r && bl ? 'X' : r ? 'R' : bl ? 'B' : coloring.good[*b] ? 'G' : 'b');
    }
    out << '\n';
  }
  return out.str();
}

std::string coloring_rows(const BlockField& field, const BlockColoring& coloring) {
  const Graph& c = field.coarse();
  std::ostringstream out;
  for (int i = 0; i < c.dim(); ++i) out << "x" << i << ",";
  out << "good,sub1,sub2,red,blue\n";
  for (std::size_t b = 0; b < coloring.size(); ++b) {
    for (int i = 0; i < c.dim(); ++i) out << c.coord(static_cast<VertexId>(b), i) << ",";
    out << int(coloring.good[b]) << "," << int(coloring.substantial1[b]) << "," << int(coloring.substantial2[b])
        << "," << int(coloring.red[b]) << "," << int(coloring.blue[b]) << "\n";
  }
  return out.str();
}

PStar build_p_star(const BlockField& field, const BlockColoring& coloring, std::int32_t c1, std::int32_t c2) {
  PStar out;
  const Graph& coarse = field.coarse();
  out.frontier = VertexSet(coarse, {});
  out.p = out.frontier;
  out.p_star = out.frontier;
  if (field.size() == 0) {
    out.diagnostic = "no block fits in the window";
    return out;
  }
  const auto full = Subgraph::full(coarse);
  const auto s1 = substantial_blocks(field, c1);
  if (s1.empty()) {
    out.diagnostic = "C1 has no substantial block";
    return out;
  }
  const auto s2 = substantial_blocks(field, c2);
  const auto closed = closure(s1, full);
  out.frontier = inner_vertex_boundary(closed, full);

  std::vector<std::uint8_t> in_p = out.frontier.mask();
  for (VertexId b : closed.ids())
    if (s2.contains(b)) in_p[b] = 1;
  std::vector<VertexId> p_ids;
  for (std::size_t b = 0; b < in_p.size(); ++b)
    if (in_p[b]) p_ids.push_back(static_cast<VertexId>(b));
  out.p = VertexSet(coarse, p_ids);

  std::vector<std::uint8_t> in_star(coarse.num_vertices(), 0);
  std::vector<std::uint8_t> uncolored_in_p(coarse.num_vertices(), 0);
  for (VertexId b : p_ids) {
    if (coloring.colored(b)) in_star[b] = 1;
    else {
      uncolored_in_p[b] = 1;
      ++out.uncolored_in_p;
    }
  }
  if (out.uncolored_in_p > 0) {
    std::vector<VertexId> colored_ids;
    for (std::size_t b = 0; b < coloring.size(); ++b)
      if (coloring.colored(static_cast<VertexId>(b))) colored_ids.push_back(static_cast<VertexId>(b));
    const VertexSet colored(coarse, colored_ids);
    for (const auto& comp : complement_components(colored, full)) {
      bool finite = true, hits = false;
      for (VertexId b : comp.ids()) {
        if (coarse.on_window_boundary(b)) finite = false;
        if (uncolored_in_p[b]) hits = true;
      }
      if (!finite || !hits) continue;
      ++out.uncolored_components;
      const auto rim = outer_vertex_frontier(comp, full);
      for (VertexId b : rim.ids()) in_star[b] = 1;
    }
  }
  std::vector<VertexId> star_ids;
  for (std::size_t b = 0; b < in_star.size(); ++b)
    if (in_star[b]) star_ids.push_back(static_cast<VertexId>(b));
  out.p_star = VertexSet(coarse, std::move(star_ids));
  return out;
}

PStarChecks check_p_star(const BlockField& field, const BlockColoring& coloring, const PStar& result,
                         std::int32_t c1) {
  PStarChecks out;
  const int d = field.coarse().dim();
  const auto& info = field.labeling().info(c1);
  for (VertexId b : result.p_star.ids()) {
    if (!coloring.colored(b)) out.subset_of_colored = false;
    const Block& blk = field.blocks().blocks[b];
    for (int i = 0; i < d; ++i)
      if (blk.hi[i] < info.lo[i] || blk.lo[i] > info.hi[i]) out.inside_bounding_box = false;
  }
  out.star_connected = is_star_connected(result.p_star);
  for (VertexId b : result.p.ids())
    if (coloring.colored(b) && !result.p_star.contains(b)) out.contains_colored_part_of_p = false;
  return out;
}

TouchCover touching_cover(const BlockField& field, const BlockColoring& coloring, std::int32_t c1, std::int32_t c2) {
  TouchCover out;
  const Graph& g = field.config().graph();
  const auto& lab = field.labeling();
  const int d = g.dim();
  const int N = field.grid().scale(), e = field.grid().extent();
  const std::size_t cap = std::size_t{1} << d;
  out.min_blue = SIZE_MAX;
  for (VertexId u : lab.members(c1)) {
    for (const auto& inc : g.incident(u)) {
      if (lab.cluster_of(inc.to) != c2) continue;
      ++out.touching;
      const Point a = g.point(u), b = g.point(inc.to);
      Point lo{}, hi{};
      for (int i = 0; i < d; ++i) {
        lo[i] = ceil_div(std::max(a[i], b[i]) - e, N);
        hi[i] = floor_div(std::min(a[i], b[i]) + e, N);
      }
      std::size_t blue = 0;
      Point x = lo;
      bool done = false;
      for (int i = 0; i < d; ++i)
        if (lo[i] > hi[i]) done = true;
      while (!done) {
        const auto blk = field.coarse().find(x);
        if (blk && coloring.blue[*blk]) ++blue;
        int i = 0;
        for (; i < d; ++i) {
          if (++x[i] <= hi[i]) break;
          x[i] = lo[i];
        }
        if (i == d) done = true;
      }
      out.min_blue = std::min(out.min_blue, blue);
      out.max_blue = std::max(out.max_blue, blue);
      if (blue < 1 || blue > cap) out.ok = false;
    }
  }
  if (out.touching == 0) out.min_blue = 0;
  return out;
}

Point coarse_image(const Point& p, int dim, int scale) {
  Point out{};
  for (int i = 0; i < dim; ++i) out[i] = floor_div(2 * p[i] + scale, 2 * scale);
  return out;
}

DeltaReport delta_report(const BlockField& field, const BlockColoring& coloring, std::int32_t c1, std::int32_t c2) {
  DeltaReport out;
  const Graph& g = field.config().graph();
  const Graph& coarse = field.coarse();
  const auto& lab = field.labeling();
  // component of (box minus C1) containing C2
  std::vector<std::uint8_t> reach(g.num_vertices(), 0);
  std::vector<VertexId> queue{lab.members(c2)[0]};
  reach[queue[0]] = 1;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    for (const auto& inc : g.incident(queue[h])) {
      if (reach[inc.to] || lab.cluster_of(inc.to) == c1) continue;
      reach[inc.to] = 1;
      queue.push_back(inc.to);
    }
  }
  std::vector<std::uint8_t> in_delta(coarse.num_vertices(), 0);
  bool outside = false;
  for (VertexId u : lab.members(c1)) {
    bool adjacent = false;
    for (const auto& inc : g.incident(u))
      if (reach[inc.to]) adjacent = true;
    if (!adjacent) continue;
    const auto b = coarse.find(coarse_image(g.point(u), g.dim(), field.grid().scale()));
    if (b) in_delta[*b] = 1;
    else outside = true;
  }
  std::vector<VertexId> ids;
  for (std::size_t b = 0; b < in_delta.size(); ++b)
    if (in_delta[b]) ids.push_back(static_cast<VertexId>(b));
  out.delta = VertexSet(coarse, std::move(ids));
  out.star_connected = !outside && is_star_connected(out.delta);
  out.inside_red = !outside;
  for (VertexId b : out.delta.ids())
    if (!coloring.red[b]) out.inside_red = false;

  const auto full = Subgraph::full(coarse);
  const auto s1 = substantial_blocks(field, c1);
  const auto s2 = substantial_blocks(field, c2);
  const auto closed = closure(s1, full);
  std::vector<VertexId> inter;
  for (VertexId b : closed.ids())
    if (s2.contains(b)) inter.push_back(b);
  const VertexSet both(coarse, inter);
  // components of the intersection: complement components of its complement
  std::vector<VertexId> rest;
  const auto mask = both.mask();
  for (std::size_t b = 0; b < mask.size(); ++b)
    if (!mask[b]) rest.push_back(static_cast<VertexId>(b));
  out.components_meet_delta = true;
  for (const auto& comp : complement_components(VertexSet(coarse, rest), full)) {
    ++out.components;
    bool meets = false;
    for (VertexId b : comp.ids())
      if (in_delta[b]) meets = true;
    if (!meets) out.components_meet_delta = false;
  }
  return out;
}

std::string to_string(ConditionMode mode) { return mode == ConditionMode::rejection ? "rejection" : "grown"; }

ConditionMode condition_mode_from_string(const std::string& text) {
  if (text == "rejection") return ConditionMode::rejection;
  if (text == "grown") return ConditionMode::grown;
  throw std::invalid_argument("unknown condition mode '" + text + "'");
}

void seal_origin(EdgeConfiguration& config, int radius) {
  const Graph& g = config.graph();
  const int d = g.dim();
  auto norm = [&](VertexId v) {
    int m = 0;
    for (int i = 0; i < d; ++i) m = std::max(m, std::abs(g.coord(v, i)));
    return m;
  };
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const int a = norm(g.edge(e).u), b = norm(g.edge(e).v);
    if (std::min(a, b) == radius && std::max(a, b) == radius + 1) config.set_open(static_cast<EdgeId>(e), false);
  }
}

namespace {

bool origin_cluster_ok(const Graph& g, const std::vector<VertexId>& members, const BlockGrid& grid,
                       const ConditionSpec& spec) {
  if (members.size() < spec.min_size) return false;
  const int d = g.dim();
  Point lo = g.point(members[0]), hi = lo;
  Point clo{}, chi{};
  for (int i = 0; i < d; ++i) {
    clo[i] = ceil_div(g.lo()[i] + grid.extent(), grid.scale());
    chi[i] = floor_div(g.hi()[i] - grid.extent(), grid.scale());
  }
  for (VertexId v : members) {
    const Point q = g.point(v);
    const Point c = coarse_image(q, d, grid.scale());
    for (int i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], q[i]);
      hi[i] = std::max(hi[i], q[i]);
      if (c[i] <= clo[i] || c[i] >= chi[i]) return false;
    }
  }
  int diam = 0;
  for (int i = 0; i < d; ++i) diam = std::max(diam, hi[i] - lo[i]);
  return diam >= spec.scale;
}

// Fine vertices whose coarse image lies strictly inside the window's block range.
Region interior_region(const Graph& g, const BlockGrid& grid) {
  Region r;
  const int n = grid.scale();
  for (int i = 0; i < g.dim(); ++i) {
    const int clo = ceil_div(g.lo()[i] + grid.extent(), n);
    const int chi = floor_div(g.hi()[i] - grid.extent(), n);
    r.lo[i] = ceil_div(2 * n * (clo + 1) - n, 2);
    r.hi[i] = floor_div(2 * n * chi - n - 1, 2);
  }
  return r;
}

}  // namespace

std::optional<ConditionedSample> sample_conditioned(const Graph& graph, double p, std::uint64_t seed,
                                                    std::uint64_t trial, const ConditionSpec& spec) {
  const BlockGrid grid(graph.dim(), spec.scale);
  const auto o = graph.find(Point{});
  if (!o) throw std::invalid_argument("window does not contain the origin");
  if (spec.mode == ConditionMode::rejection) {
    const auto lazy = explore_cluster(graph, p, seed, trial, *o, spec.max_size, interior_region(graph, grid));
    if (lazy.truncated || !origin_cluster_ok(graph, lazy.vertices, grid, spec)) return std::nullopt;
  }
  ConditionedSample out{sample(graph, p, seed, trial), {}, {}, -1};
  if (spec.mode == ConditionMode::grown) seal_origin(out.config, spec.seal_radius);
  out.labeling = label(out.config);
  out.giant = giant_proxy(out.labeling, spec.giant_mode);
  out.origin_cluster = out.labeling.cluster_of(*o);
  if (!out.giant.id || *out.giant.id == out.origin_cluster) return std::nullopt;
  if (!is_finite_proxy(out.labeling, out.origin_cluster, out.giant)) return std::nullopt;
  const auto m = out.labeling.members(out.origin_cluster);
  if (!origin_cluster_ok(graph, std::vector<VertexId>(m.begin(), m.end()), grid, spec)) return std::nullopt;
  return out;
}

}  // namespace perclab

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace perclab {

using VertexId = std::int32_t;
using EdgeId = std::int32_t;

inline constexpr int kMaxDim = 4;

using Point = std::array<int, kMaxDim>;

enum class Adjacency { l1, linf };

std::string to_string(Adjacency adjacency);
Adjacency adjacency_from_string(const std::string& text);

struct Edge {
  VertexId u;
  VertexId v;
};

struct Incidence {
  VertexId to;
  EdgeId edge;
};

/// Height profile of a wedge. `value` is the real-valued function used in
/// the series and profile bounds; `height` is the integer half-width of the
/// column {|z| <= height(x)} actually present in the lattice.
class HeightFunction {
 public:
  enum class Family { constant, power, log, table };
  enum class Rounding { none, floor, ceil };

  static HeightFunction constant(double c);
  /// coef * x^alpha
  static HeightFunction power(double alpha, double coef = 1.0);
  /// log(x + shift)^r, optionally rounded.
  static HeightFunction log(double r, double shift = 2.0,
                            Rounding rounding = Rounding::ceil);
  /// Step function; x beyond the table repeats the last entry.
  static HeightFunction table(std::vector<int> values);

  double value(double x) const;
  int height(int x) const;

  Family family() const { return family_; }
  double param_c() const { return c_; }
  double param_alpha() const { return alpha_; }
  double param_r() const { return r_; }
  double param_shift() const { return shift_; }
  Rounding rounding() const { return rounding_; }
  const std::vector<int>& table_values() const { return table_; }

  /// "key=value;key=value" form used inside lattice descriptors.
  std::string describe() const;
  static HeightFunction parse(const std::string& text);

  /// min over x in [1, x_max] and delta in a grid of (0,1] of
  /// value(delta*x) / (delta*value(x)).
  double concavity_gamma(int x_max, int delta_steps = 64) const;

 private:
  Family family_ = Family::constant;
  double c_ = 0.0;
  double alpha_ = 1.0;
  double r_ = 1.0;
  double shift_ = 2.0;
  Rounding rounding_ = Rounding::none;
  std::vector<int> table_;
};

struct LatticeDescriptor {
  enum class Kind { box, wedge, coarse };
  Kind kind = Kind::box;
  int dim = 2;
  Point lo{};
  Point hi{};
  Adjacency adjacency = Adjacency::l1;
  // wedge only
  std::optional<HeightFunction> height;
  int x_max = 0;
  int y_max = 0;

  /// Structured text, one `key = value` per line.
  std::string to_text() const;
  static LatticeDescriptor from_text(const std::string& text);
};

/// Finite graph whose vertices carry integer coordinates. Edges are stored
/// once with u < v and numbered densely; neighbor lists are CSR.
class Graph {
 public:
  Graph() = default;
  Graph(LatticeDescriptor descriptor, std::vector<int> coords,
        std::vector<Edge> edges, std::vector<std::uint8_t> window_boundary);

  int dim() const { return descriptor_.dim; }
  std::size_t num_vertices() const { return window_boundary_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  std::span<const int> coords(VertexId v) const {
    return {coords_.data() + static_cast<std::size_t>(v) * dim(),
            static_cast<std::size_t>(dim())};
  }
  Point point(VertexId v) const;
  int coord(VertexId v, int axis) const {
    return coords_[static_cast<std::size_t>(v) * dim() + axis];
  }

  std::span<const Incidence> incident(VertexId v) const {
    return {adj_.data() + offsets_[v],
            static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  int degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }
  const Edge& edge(EdgeId e) const { return edges_[e]; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool on_window_boundary(VertexId v) const { return window_boundary_[v] != 0; }

  /// Vertex at the given coordinates, if it is part of the graph.
  std::optional<VertexId> find(const Point& p) const;
  std::optional<EdgeId> find_edge(VertexId a, VertexId b) const;

  const LatticeDescriptor& descriptor() const { return descriptor_; }
  /// Coordinate bounds of the window along each axis.
  const Point& lo() const { return descriptor_.lo; }
  const Point& hi() const { return descriptor_.hi; }

 private:
  LatticeDescriptor descriptor_;
  std::vector<int> coords_;
  std::vector<Edge> edges_;
  std::vector<std::uint8_t> window_boundary_;
  std::vector<std::int32_t> offsets_;
  std::vector<Incidence> adj_;
  // Boxes are located arithmetically, everything else through a hash map.
  bool dense_box_ = false;
  Point strides_{};
  std::unordered_map<std::uint64_t, VertexId> index_;
};

/// [-n, n]^d with nearest-neighbor (l1) or star (linf) adjacency.
Graph build_box(int d, int n, Adjacency adjacency);
/// Axis-aligned window prod [lo_i, hi_i]; empty extents are allowed (n = 0).
Graph build_rect(int d, const Point& lo, const Point& hi, Adjacency adjacency);

struct WedgeLattice {
  HeightFunction height;
  int x_max = 0;
  int y_max = 0;
  Graph graph;

  /// Membership in the untruncated wedge {x >= 0, |z| <= h(x)}.
  bool in_wedge(int x, int y, int z) const;
  VertexId origin() const;
};

WedgeLattice build_wedge(const HeightFunction& height, int x_max, int y_max);

/// Coarse block grid: blocks B(Nx) = {y : |y - Nx|_inf <= 3N/4}.
struct Block {
  Point center{};  // coarse coordinates x
  Point lo{};      // fine extent
  Point hi{};
};

class BlockGrid {
 public:
  BlockGrid(int dim, int scale);

  int dim() const { return dim_; }
  int scale() const { return scale_; }
  /// floor(3N/4): the largest integer offset r with 4r <= 3N.
  int extent() const { return (3 * scale_) / 4; }
  Block block_at(const Point& coarse) const;

 private:
  int dim_;
  int scale_;
};

struct BlockSet {
  std::vector<Block> blocks;  // indexed by coarse vertex id
  Graph coarse;               // l1 coarse lattice; empty when no block fits
  Graph coarse_star;          // linf coarse lattice
  bool empty() const { return blocks.empty(); }
};

/// Blocks fully contained in the region. For box regions the coarse
/// coordinates form a box again; other regions give an induced coarse graph
/// whose window boundary is the set of blocks with a missing coarse neighbor.
BlockSet blocks_of(const BlockGrid& grid, const Graph& region);

/// Induced subgraph of Z^d on an arbitrary point set (no duplicates).
Graph build_from_points(LatticeDescriptor descriptor,
                        const std::vector<Point>& points,
                        std::vector<std::uint8_t> window_boundary);

/// Generic helpers on coordinates.
int linf_distance(const Point& a, const Point& b, int dim);
int l1_distance(const Point& a, const Point& b, int dim);

}  // namespace perclab

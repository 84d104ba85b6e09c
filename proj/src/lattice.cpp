#include "perclab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "perclab/keyvalue.hpp"

namespace perclab {

namespace {

std::uint64_t pack(const Point& p, int dim) {
  std::uint64_t key = 0;
  for (int i = 0; i < dim; ++i) {
    key = (key << 16) | static_cast<std::uint16_t>(p[i] + 32768);
  }
  return key;
}

int floor_div(int a, int b) {
  int q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int ceil_div(int a, int b) { return -floor_div(-a, b); }

std::string join_point(const Point& p, int dim) {
  std::ostringstream out;
  for (int i = 0; i < dim; ++i) out << (i ? "," : "") << p[i];
  return out.str();
}

Point parse_point(const std::string& text, int dim, int line) {
  const auto parts = split(text, ',');
  if (static_cast<int>(parts.size()) != dim) {
    throw ParseError(line, "expected " + std::to_string(dim) + " coordinates");
  }
  Point p{};
  for (int i = 0; i < dim; ++i) p[i] = std::stoi(parts[i]);
  return p;
}

// Offsets of the "positive half" of the neighborhood: those whose last
// nonzero component is +1, so every undirected edge is produced once.
std::vector<Point> half_offsets(int dim, Adjacency adjacency) {
  std::vector<Point> out;
  if (adjacency == Adjacency::l1) {
    for (int i = 0; i < dim; ++i) {
      Point p{};
      p[i] = 1;
      out.push_back(p);
    }
    return out;
  }
  int total = 1;
  for (int i = 0; i < dim; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    Point p{};
    int c = code;
    for (int i = 0; i < dim; ++i) {
      p[i] = c % 3 - 1;
      c /= 3;
    }
    int last = 0;
    for (int i = 0; i < dim; ++i)
      if (p[i] != 0) last = p[i];
    if (last == 1) out.push_back(p);
  }
  return out;
}

void check_dim(int d) {
  if (d < 1 || d > kMaxDim) {
    throw std::invalid_argument("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
}

}  // namespace

std::string to_string(Adjacency adjacency) {
  return adjacency == Adjacency::l1 ? "l1" : "linf";
}

Adjacency adjacency_from_string(const std::string& text) {
  if (text == "l1" || text == "L1") return Adjacency::l1;
  if (text == "linf" || text == "Linf") return Adjacency::linf;
  throw std::invalid_argument("unknown adjacency '" + text + "'");
}

// ---------------------------------------------------------------------------
// HeightFunction

HeightFunction HeightFunction::constant(double c) {
  if (c < 0) throw std::invalid_argument("constant height must be >= 0");
  HeightFunction h;
  h.family_ = Family::constant;
  h.c_ = c;
  return h;
}

HeightFunction HeightFunction::power(double alpha, double coef) {
  if (!(alpha > 0) || !(coef > 0)) {
    throw std::invalid_argument("power height needs alpha > 0 and coef > 0");
  }
  HeightFunction h;
  h.family_ = Family::power;
  h.alpha_ = alpha;
  h.c_ = coef;
  return h;
}

HeightFunction HeightFunction::log(double r, double shift, Rounding rounding) {
  if (!(r > 0) || !(shift >= 1)) {
    throw std::invalid_argument("log height needs r > 0 and shift >= 1");
  }
  HeightFunction h;
  h.family_ = Family::log;
  h.r_ = r;
  h.shift_ = shift;
  h.rounding_ = rounding;
  return h;
}

HeightFunction HeightFunction::table(std::vector<int> values) {
  if (values.empty()) throw std::invalid_argument("empty height table");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) throw std::invalid_argument("negative height in table");
    if (i > 0 && values[i] < values[i - 1]) {
      throw std::invalid_argument("height table is not monotone at x=" + std::to_string(i));
    }
  }
  HeightFunction h;
  h.family_ = Family::table;
  h.table_ = std::move(values);
  return h;
}

double HeightFunction::value(double x) const {
  switch (family_) {
    case Family::constant:
      return c_;
    case Family::power:
      return c_ * std::pow(std::max(x, 0.0), alpha_);
    case Family::log: {
      const double l = std::log(std::max(x, 0.0) + shift_);
      double v = l <= 0 ? 0.0 : std::pow(l, r_);
      if (rounding_ == Rounding::ceil) v = std::ceil(v - 1e-12);
      if (rounding_ == Rounding::floor) v = std::floor(v + 1e-12);
      return v;
    }
    case Family::table: {
      const auto last = static_cast<double>(table_.size() - 1);
      const auto idx = static_cast<std::size_t>(std::clamp(std::floor(x), 0.0, last));
      return table_[idx];
    }
  }
  return 0.0;
}

int HeightFunction::height(int x) const {
  return static_cast<int>(std::floor(value(x) + 1e-9));
}

std::string HeightFunction::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (family_) {
    case Family::constant:
      out << "family=constant;c=" << c_;
      break;
    case Family::power:
      out << "family=power;alpha=" << alpha_ << ";coef=" << c_;
      break;
    case Family::log:
      out << "family=log;r=" << r_ << ";shift=" << shift_ << ";rounding="
          << (rounding_ == Rounding::ceil ? "ceil" : rounding_ == Rounding::floor ? "floor" : "none");
      break;
    case Family::table: {
      out << "family=table;values=";
      for (std::size_t i = 0; i < table_.size(); ++i) out << (i ? "," : "") << table_[i];
      break;
    }
  }
  return out.str();
}

HeightFunction HeightFunction::parse(const std::string& text) {
  std::string family;
  double c = 0, alpha = 1, coef = 1, r = 1, shift = 2;
  Rounding rounding = Rounding::ceil;
  std::vector<int> values;
  for (const auto& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad height item '" + item + "'");
    const std::string key = trim(item.substr(0, eq));
    const std::string val = trim(item.substr(eq + 1));
    if (key == "family") family = val;
    else if (key == "c") c = std::stod(val);
    else if (key == "alpha") alpha = std::stod(val);
    else if (key == "coef") coef = std::stod(val);
    else if (key == "r") r = std::stod(val);
    else if (key == "shift") shift = std::stod(val);
    else if (key == "rounding") {
      if (val == "ceil") rounding = Rounding::ceil;
      else if (val == "floor") rounding = Rounding::floor;
      else if (val == "none") rounding = Rounding::none;
      else throw std::invalid_argument("unknown rounding '" + val + "'");
    } else if (key == "values") {
      for (const auto& v : split(val, ',')) values.push_back(std::stoi(v));
    } else {
      throw std::invalid_argument("unknown height key '" + key + "'");
    }
  }
  if (family == "constant") return constant(c);
  if (family == "power") return power(alpha, coef);
  if (family == "log") return log(r, shift, rounding);
  if (family == "table") return table(std::move(values));
  throw std::invalid_argument("unknown height family '" + family + "'");
}

double HeightFunction::concavity_gamma(int x_max, int delta_steps) const {
  double gamma = INFINITY;
  for (int x = 1; x <= x_max; ++x) {
    const double hx = value(x);
    if (hx <= 0) continue;
    for (int j = 1; j <= delta_steps; ++j) {
      const double delta = static_cast<double>(j) / delta_steps;
      gamma = std::min(gamma, value(delta * x) / (delta * hx));
    }
  }
  return gamma;
}

// ---------------------------------------------------------------------------
// LatticeDescriptor

std::string LatticeDescriptor::to_text() const {
  std::ostringstream out;
  out << "kind = " << (kind == Kind::box ? "box" : kind == Kind::wedge ? "wedge" : "coarse") << "\n";
  out << "dim = " << dim << "\n";
  out << "lo = " << join_point(lo, dim) << "\n";
  out << "hi = " << join_point(hi, dim) << "\n";
  out << "adjacency = " << to_string(adjacency) << "\n";
  if (kind == Kind::wedge && height) {
    out << "height = " << height->describe() << "\n";
    out << "x_max = " << x_max << "\n";
    out << "y_max = " << y_max << "\n";
  }
  return out.str();
}

LatticeDescriptor LatticeDescriptor::from_text(const std::string& text) {
  LatticeDescriptor d;
  const auto entries = parse_key_values(text);
  // dim first so point fields can be validated
  for (const auto& kv : entries)
    if (kv.key == "dim") d.dim = std::stoi(kv.value);
  for (const auto& kv : entries) {
    if (kv.key == "kind") {
      if (kv.value == "box") d.kind = Kind::box;
      else if (kv.value == "wedge") d.kind = Kind::wedge;
      else if (kv.value == "coarse") d.kind = Kind::coarse;
      else throw ParseError(kv.line, "unknown lattice kind '" + kv.value + "'");
    } else if (kv.key == "dim") {
    } else if (kv.key == "lo") {
      d.lo = parse_point(kv.value, d.dim, kv.line);
    } else if (kv.key == "hi") {
      d.hi = parse_point(kv.value, d.dim, kv.line);
    } else if (kv.key == "adjacency") {
      d.adjacency = adjacency_from_string(kv.value);
    } else if (kv.key == "height") {
      d.height = HeightFunction::parse(kv.value);
    } else if (kv.key == "x_max") {
      d.x_max = std::stoi(kv.value);
    } else if (kv.key == "y_max") {
      d.y_max = std::stoi(kv.value);
    } else {
      throw ParseError(kv.line, "unknown lattice key '" + kv.key + "'");
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Graph

Graph::Graph(LatticeDescriptor descriptor, std::vector<int> coords,
             std::vector<Edge> edges, std::vector<std::uint8_t> window_boundary)
    : descriptor_(std::move(descriptor)),
      coords_(std::move(coords)),
      edges_(std::move(edges)),
      window_boundary_(std::move(window_boundary)) {
  const std::size_t n = window_boundary_.size();
  offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++offsets_[e.u + 1];
    ++offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  adj_.resize(offsets_[n]);
  std::vector<std::int32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& ed = edges_[e];
    adj_[fill[ed.u]++] = {ed.v, static_cast<EdgeId>(e)};
    adj_[fill[ed.v]++] = {ed.u, static_cast<EdgeId>(e)};
  }

  // A box stores its vertices in mixed-radix order starting at lo.
  std::size_t expected = 1;
  for (int i = 0; i < dim(); ++i) expected *= static_cast<std::size_t>(hi()[i] - lo()[i] + 1);
  dense_box_ = descriptor_.kind != LatticeDescriptor::Kind::wedge && expected == n;
  if (dense_box_) {
    int stride = 1;
    for (int i = 0; i < dim(); ++i) {
      strides_[i] = stride;
      stride *= hi()[i] - lo()[i] + 1;
    }
  } else {
    index_.reserve(n);
    for (std::size_t v = 0; v < n; ++v) index_.emplace(pack(point(static_cast<VertexId>(v)), dim()), static_cast<VertexId>(v));
  }
}

Point Graph::point(VertexId v) const {
  Point p{};
  for (int i = 0; i < dim(); ++i) p[i] = coord(v, i);
  return p;
}

std::optional<VertexId> Graph::find(const Point& p) const {
  if (dense_box_) {
    VertexId id = 0;
    for (int i = 0; i < dim(); ++i) {
      if (p[i] < lo()[i] || p[i] > hi()[i]) return std::nullopt;
      id += (p[i] - lo()[i]) * strides_[i];
    }
    return id;
  }
  const auto it = index_.find(pack(p, dim()));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<EdgeId> Graph::find_edge(VertexId a, VertexId b) const {
  for (const auto& inc : incident(a))
    if (inc.to == b) return inc.edge;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Builders

Graph build_rect(int d, const Point& lo, const Point& hi, Adjacency adjacency) {
  check_dim(d);
  for (int i = 0; i < d; ++i)
    if (hi[i] < lo[i]) throw std::invalid_argument("empty rectangle");
  LatticeDescriptor desc;
  desc.kind = LatticeDescriptor::Kind::box;
  desc.dim = d;
  desc.lo = lo;
  desc.hi = hi;
  desc.adjacency = adjacency;

  Point extent{}, stride{};
  std::size_t n = 1;
  for (int i = 0; i < d; ++i) {
    extent[i] = hi[i] - lo[i] + 1;
    stride[i] = static_cast<int>(n);
    n *= static_cast<std::size_t>(extent[i]);
  }
  std::vector<int> coords(n * d);
  std::vector<std::uint8_t> boundary(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    std::size_t rest = v;
    for (int i = 0; i < d; ++i) {
      const int c = lo[i] + static_cast<int>(rest % extent[i]);
      rest /= extent[i];
      coords[v * d + i] = c;
      if (c == lo[i] || c == hi[i]) boundary[v] = 1;
    }
  }
  std::vector<Edge> edges;
  const auto offsets = half_offsets(d, adjacency);
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& off : offsets) {
      int id_delta = 0;
      bool inside = true;
      for (int i = 0; i < d; ++i) {
        const int c = coords[v * d + i] + off[i];
        if (c < lo[i] || c > hi[i]) {
          inside = false;
          break;
        }
        id_delta += off[i] * stride[i];
      }
      if (inside) edges.push_back({static_cast<VertexId>(v), static_cast<VertexId>(v + id_delta)});
    }
  }
  return Graph(desc, std::move(coords), std::move(edges), std::move(boundary));
}

Graph build_box(int d, int n, Adjacency adjacency) {
  if (d < 2) throw std::invalid_argument("build_box: dimension must be >= 2");
  if (n < 1) throw std::invalid_argument("build_box: half-side must be >= 1");
  Point lo{}, hi{};
  for (int i = 0; i < d; ++i) {
    lo[i] = -n;
    hi[i] = n;
  }
  return build_rect(d, lo, hi, adjacency);
}

Graph build_from_points(LatticeDescriptor descriptor, const std::vector<Point>& points,
                        std::vector<std::uint8_t> window_boundary) {
  const int d = descriptor.dim;
  check_dim(d);
  std::unordered_map<std::uint64_t, VertexId> index;
  index.reserve(points.size());
  std::vector<int> coords;
  coords.reserve(points.size() * d);
  for (std::size_t v = 0; v < points.size(); ++v) {
    if (!index.emplace(pack(points[v], d), static_cast<VertexId>(v)).second) {
      throw std::invalid_argument("duplicate point");
    }
    for (int i = 0; i < d; ++i) coords.push_back(points[v][i]);
  }
  std::vector<Edge> edges;
  const auto offsets = half_offsets(d, descriptor.adjacency);
  for (std::size_t v = 0; v < points.size(); ++v) {
    for (const auto& off : offsets) {
      Point q = points[v];
      for (int i = 0; i < d; ++i) q[i] += off[i];
      const auto it = index.find(pack(q, d));
      if (it != index.end()) {
        const auto a = static_cast<VertexId>(v);
        edges.push_back({std::min(a, it->second), std::max(a, it->second)});
      }
    }
  }
  return Graph(std::move(descriptor), std::move(coords), std::move(edges), std::move(window_boundary));
}

bool WedgeLattice::in_wedge(int x, int y, int z) const {
  (void)y;
  return x >= 0 && std::abs(z) <= height.height(x);
}

VertexId WedgeLattice::origin() const { return *graph.find(Point{0, 0, 0, 0}); }

WedgeLattice build_wedge(const HeightFunction& height, int x_max, int y_max) {
  if (x_max < 0 || y_max < 0) throw std::invalid_argument("wedge extents must be >= 0");
  std::vector<int> h(x_max + 1);
  for (int x = 0; x <= x_max; ++x) {
    h[x] = height.height(x);
    if (h[x] < 0) throw std::invalid_argument("negative wedge height");
    if (x > 0 && h[x] < h[x - 1]) {
      throw std::invalid_argument("height function is not monotone at x=" + std::to_string(x));
    }
  }
  LatticeDescriptor desc;
  desc.kind = LatticeDescriptor::Kind::wedge;
  desc.dim = 3;
  desc.lo = {0, -y_max, -h[x_max], 0};
  desc.hi = {x_max, y_max, h[x_max], 0};
  desc.adjacency = Adjacency::l1;
  desc.height = height;
  desc.x_max = x_max;
  desc.y_max = y_max;

  std::vector<Point> points;
  std::vector<std::uint8_t> boundary;
  for (int x = 0; x <= x_max; ++x) {
    for (int y = -y_max; y <= y_max; ++y) {
      for (int z = -h[x]; z <= h[x]; ++z) {
        points.push_back({x, y, z, 0});
        // only the truncation is a window boundary; x = 0 and |z| = h(x)
        // are genuine boundaries of the wedge
        boundary.push_back((x == x_max || std::abs(y) == y_max) ? 1 : 0);
      }
    }
  }
  WedgeLattice w{height, x_max, y_max, build_from_points(desc, points, std::move(boundary))};
  return w;
}

// ---------------------------------------------------------------------------
// Blocks

BlockGrid::BlockGrid(int dim, int scale) : dim_(dim), scale_(scale) {
  check_dim(dim);
  if (scale < 4) throw std::invalid_argument("block scale N must be >= 4");
}

Block BlockGrid::block_at(const Point& coarse) const {
  Block b;
  b.center = coarse;
  for (int i = 0; i < dim_; ++i) {
    b.lo[i] = scale_ * coarse[i] - extent();
    b.hi[i] = scale_ * coarse[i] + extent();
  }
  return b;
}

BlockSet blocks_of(const BlockGrid& grid, const Graph& region) {
  const int d = grid.dim();
  if (region.dim() != d) throw std::invalid_argument("block grid / region dimension mismatch");
  const int N = grid.scale();
  const int e = grid.extent();
  Point clo{}, chi{};
  for (int i = 0; i < d; ++i) {
    clo[i] = ceil_div(region.lo()[i] + e, N);
    chi[i] = floor_div(region.hi()[i] - e, N);
    if (chi[i] < clo[i]) return {};
  }
  BlockSet out;
  if (region.descriptor().kind == LatticeDescriptor::Kind::box) {
    out.coarse = build_rect(d, clo, chi, Adjacency::l1);
    out.coarse_star = build_rect(d, clo, chi, Adjacency::linf);
  } else {
    // keep candidate blocks whose every fine vertex is present
    const Graph candidates = build_rect(d, clo, chi, Adjacency::l1);
    std::vector<Point> kept;
    for (std::size_t v = 0; v < candidates.num_vertices(); ++v) {
      const Block b = grid.block_at(candidates.point(static_cast<VertexId>(v)));
      bool inside = true;
      Point q = b.lo;
      while (inside) {
        if (!region.find(q)) inside = false;
        int axis = 0;
        while (axis < d && ++q[axis] > b.hi[axis]) {
          q[axis] = b.lo[axis];
          ++axis;
        }
        if (axis == d) break;
      }
      if (inside) kept.push_back(b.center);
    }
    if (kept.empty()) return {};
    LatticeDescriptor desc;
    desc.kind = LatticeDescriptor::Kind::coarse;
    desc.dim = d;
    desc.lo = clo;
    desc.hi = chi;
    desc.adjacency = Adjacency::l1;
    std::vector<std::uint8_t> flags(kept.size(), 0);
    Graph l1 = build_from_points(desc, kept, flags);
    for (std::size_t v = 0; v < kept.size(); ++v) {
      if (l1.degree(static_cast<VertexId>(v)) < 2 * d) flags[v] = 1;
    }
    out.coarse = build_from_points(desc, kept, flags);
    desc.adjacency = Adjacency::linf;
    out.coarse_star = build_from_points(desc, kept, flags);
  }
  out.blocks.reserve(out.coarse.num_vertices());
  for (std::size_t v = 0; v < out.coarse.num_vertices(); ++v) {
    out.blocks.push_back(grid.block_at(out.coarse.point(static_cast<VertexId>(v))));
  }
  return out;
}

int linf_distance(const Point& a, const Point& b, int dim) {
  int m = 0;
  for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

int l1_distance(const Point& a, const Point& b, int dim) {
  int s = 0;
  for (int i = 0; i < dim; ++i) s += std::abs(a[i] - b[i]);
  return s;
}

}  // namespace perclab

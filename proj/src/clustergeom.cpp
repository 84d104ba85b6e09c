#include "perclab/clustergeom.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "perclab/keyvalue.hpp"

namespace perclab {

namespace {

// Component search restricted to vertices with allowed[v] != 0.
template <class EdgeOk>
std::vector<VertexId> flood(const Graph& g, VertexId start, std::vector<std::uint8_t>& seen,
                            const std::vector<std::uint8_t>& allowed, EdgeOk edge_ok) {
  std::vector<VertexId> out{start};
  seen[start] = 1;
  for (std::size_t head = 0; head < out.size(); ++head) {
    for (const auto& inc : g.incident(out[head])) {
      if (seen[inc.to] || !allowed[inc.to] || !edge_ok(inc.edge)) continue;
      seen[inc.to] = 1;
      out.push_back(inc.to);
    }
  }
  return out;
}

VertexSet from_mask(const Graph& host, const std::vector<std::uint8_t>& mask) {
  std::vector<VertexId> ids;
  for (std::size_t v = 0; v < mask.size(); ++v)
    if (mask[v]) ids.push_back(static_cast<VertexId>(v));
  return VertexSet(host, std::move(ids));
}

}  // namespace

VertexSet::VertexSet(const Graph& host, std::vector<VertexId> ids) : host_(&host), ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
    throw std::invalid_argument("duplicate vertex in set");
  }
  if (!ids_.empty() && (ids_.front() < 0 || static_cast<std::size_t>(ids_.back()) >= host.num_vertices())) {
    throw std::invalid_argument("vertex id outside host");
  }
  if (ids_.size() > 1) {
    const auto m = mask();
    std::vector<std::uint8_t> seen(host.num_vertices(), 0);
    connected_ = flood(host, ids_[0], seen, m, [](EdgeId) { return true; }).size() == ids_.size();
  }
}

bool VertexSet::contains(VertexId v) const { return std::binary_search(ids_.begin(), ids_.end(), v); }

std::vector<std::uint8_t> VertexSet::mask() const {
  std::vector<std::uint8_t> m(host_->num_vertices(), 0);
  for (VertexId v : ids_) m[v] = 1;
  return m;
}

std::vector<Point> VertexSet::points() const {
  std::vector<Point> out;
  out.reserve(ids_.size());
  for (VertexId v : ids_) out.push_back(host_->point(v));
  return out;
}

Subgraph Subgraph::full(const Graph& host) {
  Subgraph s;
  s.host_ = &host;
  return s;
}

Subgraph Subgraph::open(const EdgeConfiguration& config) {
  Subgraph s;
  s.host_ = &config.graph();
  s.config_ = &config;
  return s;
}

Subgraph Subgraph::cluster(const EdgeConfiguration& config, const ClusterLabeling& labeling, std::int32_t id) {
  Subgraph s = open(config);
  s.members_.assign(s.host_->num_vertices(), 0);
  for (VertexId v : labeling.members(id)) s.members_[v] = 1;
  return s;
}

bool Subgraph::usable(EdgeId e) const {
  if (config_ && !config_->open(e)) return false;
  if (!members_.empty()) {
    const auto& ed = host_->edge(e);
    return members_[ed.u] && members_[ed.v];
  }
  return true;
}

std::vector<EdgeId> edge_boundary(const VertexSet& s, const Subgraph& g) {
  const auto m = s.mask();
  std::vector<EdgeId> out;
  for (VertexId v : s.ids()) {
    for (const auto& inc : g.host().incident(v)) {
      if (!m[inc.to] && g.usable(inc.edge)) out.push_back(inc.edge);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

VertexSet inner_vertex_boundary(const VertexSet& s, const Subgraph& g) {
  const auto m = s.mask();
  std::vector<VertexId> out;
  for (VertexId v : s.ids()) {
    for (const auto& inc : g.host().incident(v)) {
      if (!m[inc.to] && g.usable(inc.edge)) {
        out.push_back(v);
        break;
      }
    }
  }
  return VertexSet(g.host(), std::move(out));
}

VertexSet outer_vertex_boundary(const VertexSet& s, const Subgraph& g) {
  const auto m = s.mask();
  std::vector<std::uint8_t> hit(g.host().num_vertices(), 0);
  for (VertexId v : s.ids()) {
    for (const auto& inc : g.host().incident(v)) {
      if (!m[inc.to] && g.usable(inc.edge)) hit[inc.to] = 1;
    }
  }
  return from_mask(g.host(), hit);
}

std::vector<VertexSet> complement_components(const VertexSet& s, const Subgraph& g) {
  const Graph& h = g.host();
  const auto m = s.mask();
  std::vector<std::uint8_t> allowed(h.num_vertices(), 0);
  for (std::size_t v = 0; v < h.num_vertices(); ++v)
    allowed[v] = (!m[v] && g.has_vertex(static_cast<VertexId>(v))) ? 1 : 0;
  std::vector<std::uint8_t> seen(h.num_vertices(), 0);
  std::vector<VertexSet> out;
  for (std::size_t v = 0; v < h.num_vertices(); ++v) {
    if (!allowed[v] || seen[v]) continue;
    auto comp = flood(h, static_cast<VertexId>(v), seen, allowed, [&](EdgeId e) { return g.usable(e); });
    out.emplace_back(h, std::move(comp));
  }
  return out;
}

VertexSet closure(const VertexSet& s, const Subgraph& g) {
  const Graph& h = g.host();
  auto m = s.mask();
  std::vector<std::uint8_t> allowed(h.num_vertices(), 0);
  for (std::size_t v = 0; v < h.num_vertices(); ++v)
    allowed[v] = (!m[v] && g.has_vertex(static_cast<VertexId>(v))) ? 1 : 0;
  // everything reachable from the window boundary outside S is infinite
  std::vector<std::uint8_t> infinite(h.num_vertices(), 0);
  std::vector<VertexId> queue;
  for (std::size_t v = 0; v < h.num_vertices(); ++v) {
    if (allowed[v] && h.on_window_boundary(static_cast<VertexId>(v))) {
      infinite[v] = 1;
      queue.push_back(static_cast<VertexId>(v));
    }
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (const auto& inc : h.incident(queue[head])) {
      if (infinite[inc.to] || !allowed[inc.to] || !g.usable(inc.edge)) continue;
      infinite[inc.to] = 1;
      queue.push_back(inc.to);
    }
  }
  for (std::size_t v = 0; v < h.num_vertices(); ++v)
    if (allowed[v] && !infinite[v]) m[v] = 1;
  // closing inside a cluster only adds cluster vertices
  return from_mask(h, m);
}

std::vector<EdgeId> edge_frontier(const VertexSet& s, const Subgraph& g) {
  return edge_boundary(closure(s, g), g);
}

VertexSet inner_vertex_frontier(const VertexSet& s, const Subgraph& g) {
  return inner_vertex_boundary(closure(s, g), g);
}

VertexSet outer_vertex_frontier(const VertexSet& s, const Subgraph& g) {
  return outer_vertex_boundary(closure(s, g), g);
}

bool is_connected(const VertexSet& s, const Subgraph& g) {
  if (s.size() <= 1) return true;
  const auto m = s.mask();
  std::vector<std::uint8_t> seen(g.host().num_vertices(), 0);
  return flood(g.host(), s.ids()[0], seen, m, [&](EdgeId e) { return g.usable(e); }).size() == s.size();
}

bool is_star_connected(const VertexSet& s) {
  if (s.size() <= 1) return true;
  const Graph& h = s.host();
  const int d = h.dim();
  const auto m = s.mask();
  std::vector<Point> offsets;
  int total = 1;
  for (int i = 0; i < d; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    Point p{};
    int c = code;
    bool zero = true;
    for (int i = 0; i < d; ++i) {
      p[i] = c % 3 - 1;
      c /= 3;
      if (p[i] != 0) zero = false;
    }
    if (!zero) offsets.push_back(p);
  }
  std::vector<std::uint8_t> seen(h.num_vertices(), 0);
  std::vector<VertexId> queue{s.ids()[0]};
  seen[s.ids()[0]] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Point p = h.point(queue[head]);
    for (const auto& off : offsets) {
      Point q = p;
      for (int i = 0; i < d; ++i) q[i] += off[i];
      const auto w = h.find(q);
      if (!w || !m[*w] || seen[*w]) continue;
      seen[*w] = 1;
      queue.push_back(*w);
    }
  }
  return queue.size() == s.size();
}

TouchingEdges touching_edges(const VertexSet& c1, const VertexSet& c2, const EdgeConfiguration& config) {
  const Graph& h = config.graph();
  const auto m1 = c1.mask();
  for (VertexId v : c2.ids()) {
    if (m1[v]) throw std::invalid_argument("touching_edges: clusters overlap");
  }
  const auto m2 = c2.mask();
  TouchingEdges out;
  for (VertexId v : c1.ids()) {
    for (const auto& inc : h.incident(v)) {
      if (m2[inc.to]) out.edges.push_back(inc.edge);
    }
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

std::vector<EdgeId> cluster_ambient_frontier(const VertexSet& s, const EdgeConfiguration& config,
                                             const ClusterLabeling& labeling, std::int32_t id) {
  const Graph& h = config.graph();
  const auto closed = closure(s, Subgraph::cluster(config, labeling, id)).mask();
  std::vector<EdgeId> out;
  for (std::size_t v = 0; v < closed.size(); ++v) {
    if (!closed[v]) continue;
    for (const auto& inc : h.incident(static_cast<VertexId>(v))) {
      if (!closed[inc.to] && labeling.cluster_of(inc.to) == id) out.push_back(inc.edge);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

VertexSet cluster_set(const Graph& host, const ClusterLabeling& labeling, std::int32_t id) {
  const auto members = labeling.members(id);
  return VertexSet(host, std::vector<VertexId>(members.begin(), members.end()));
}

VertexSet grow_random_set(const Graph& host, VertexId start, std::size_t size, std::uint64_t seed,
                          bool avoid_window_boundary) {
  std::vector<std::uint8_t> state(host.num_vertices(), 0);  // 1 = member, 2 = candidate
  std::vector<VertexId> members{start}, candidates;
  state[start] = 1;
  auto offer = [&](VertexId v) {
    for (const auto& inc : host.incident(v)) {
      if (state[inc.to]) continue;
      if (avoid_window_boundary && host.on_window_boundary(inc.to)) continue;
      state[inc.to] = 2;
      candidates.push_back(inc.to);
    }
  };
  offer(start);
  std::uint64_t counter = 0;
  while (members.size() < size && !candidates.empty()) {
    const std::uint64_t r = mix64(seed ^ mix64(++counter));
    const std::size_t pick = static_cast<std::size_t>(r % candidates.size());
    const VertexId v = candidates[pick];
    candidates[pick] = candidates.back();
    candidates.pop_back();
    state[v] = 1;
    members.push_back(v);
    offer(v);
  }
  return VertexSet(host, std::move(members));
}

void write_set_text(std::ostream& out, const VertexSet& s) {
  const Graph& h = s.host();
  for (VertexId v : s.ids()) {
    for (int i = 0; i < h.dim(); ++i) out << (i ? "," : "") << h.coord(v, i);
    out << "\n";
  }
}

VertexSet read_set_text(std::istream& in, const Graph& host) {
  std::vector<VertexId> ids;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    line = trim(line);
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    if (static_cast<int>(parts.size()) != host.dim()) throw ParseError(number, "wrong coordinate count");
    Point p{};
    for (int i = 0; i < host.dim(); ++i) p[i] = std::stoi(parts[i]);
    const auto v = host.find(p);
    if (!v) throw ParseError(number, "point outside host");
    ids.push_back(*v);
  }
  return VertexSet(host, std::move(ids));
}

namespace {
constexpr char kSetMagic[8] = {'P', 'L', 'S', 'E', 'T', '0', '0', '1'};
}

void write_set_binary(std::ostream& out, const VertexSet& s) {
  const std::string desc = s.host().descriptor().to_text();
  const std::uint64_t len = desc.size(), count = s.size();
  out.write(kSetMagic, sizeof(kSetMagic));
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(desc.data(), static_cast<std::streamsize>(len));
  out.write(reinterpret_cast<const char*>(&count), sizeof(count));
  out.write(reinterpret_cast<const char*>(s.ids().data()), static_cast<std::streamsize>(count * sizeof(VertexId)));
}

VertexSet read_set_binary(std::istream& in, const Graph& host) {
  char magic[sizeof(kSetMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kSetMagic, sizeof(magic)) != 0) throw std::runtime_error("not a set block");
  std::uint64_t len = 0, count = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  std::string desc(len, '\0');
  in.read(desc.data(), static_cast<std::streamsize>(len));
  if (desc != host.descriptor().to_text()) throw std::runtime_error("lattice descriptor mismatch");
  in.read(reinterpret_cast<char*>(&count), sizeof(count));
  std::vector<VertexId> ids(count);
  in.read(reinterpret_cast<char*>(ids.data()), static_cast<std::streamsize>(count * sizeof(VertexId)));
  if (!in) throw std::runtime_error("truncated set block");
  return VertexSet(host, std::move(ids));
}

}  // namespace perclab

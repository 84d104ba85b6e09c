#include "perclab/percolation.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace perclab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double edge_uniform(std::uint64_t seed, std::uint64_t trial, EdgeId e) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ trial);
  h = mix64(h ^ static_cast<std::uint64_t>(e));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

EdgeConfiguration::EdgeConfiguration(const Graph& graph, double p, std::uint64_t seed,
                                     std::uint64_t trial)
    : graph_(&graph), p_(p), seed_(seed), trial_(trial), bits_((graph.num_edges() + 63) / 64, 0) {}

void EdgeConfiguration::set_open(EdgeId e, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (e & 63);
  if (value) bits_[e >> 6] |= mask;
  else bits_[e >> 6] &= ~mask;
}

std::size_t EdgeConfiguration::num_open() const {
  std::size_t n = 0;
  for (auto w : bits_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

EdgeConfiguration sample(const Graph& graph, double p, std::uint64_t seed, std::uint64_t trial) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  EdgeConfiguration config(graph, p, seed, trial);
  const std::uint64_t base = mix64(mix64(seed) ^ trial);
  auto& words = config.words();
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const double u = static_cast<double>(mix64(base ^ e) >> 11) * 0x1.0p-53;
    if (u < p) words[e >> 6] |= std::uint64_t{1} << (e & 63);
  }
  return config;
}

EdgeConfiguration uniform_configuration(const Graph& graph, bool value) {
  EdgeConfiguration config(graph, value ? 1.0 : 0.0, 0, 0);
  for (std::size_t e = 0; e < graph.num_edges(); ++e) config.set_open(static_cast<EdgeId>(e), value);
  return config;
}

ClusterLabeling::ClusterLabeling(std::vector<std::int32_t> ids, std::vector<ClusterInfo> clusters,
                                 std::vector<VertexId> members)
    : ids_(std::move(ids)), clusters_(std::move(clusters)), members_(std::move(members)) {}

namespace {

struct DisjointSets {
  std::vector<std::int32_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::int32_t find(std::int32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // the smaller index becomes the root
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

}  // namespace

ClusterLabeling label(const EdgeConfiguration& config) {
  const Graph& g = config.graph();
  const std::size_t n = g.num_vertices();
  const int d = g.dim();
  DisjointSets sets(n);
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (config.open(static_cast<EdgeId>(e))) sets.unite(g.edge(e).u, g.edge(e).v);
  }
  std::vector<std::int32_t> ids(n);
  std::vector<std::int32_t> root_id(n, -1);
  std::vector<ClusterInfo> clusters;
  for (std::size_t v = 0; v < n; ++v) {
    const auto r = sets.find(static_cast<std::int32_t>(v));
    if (root_id[r] < 0) {
      root_id[r] = static_cast<std::int32_t>(clusters.size());
      ClusterInfo info;
      info.lo = g.point(static_cast<VertexId>(v));
      info.hi = info.lo;
      clusters.push_back(info);
    }
    const auto id = root_id[r];
    ids[v] = id;
    auto& info = clusters[id];
    ++info.size;
    for (int i = 0; i < d; ++i) {
      const int c = g.coord(static_cast<VertexId>(v), i);
      info.lo[i] = std::min(info.lo[i], c);
      info.hi[i] = std::max(info.hi[i], c);
    }
    if (g.on_window_boundary(static_cast<VertexId>(v))) info.touches_boundary = true;
  }
  std::int32_t offset = 0;
  for (auto& info : clusters) {
    info.offset = offset;
    offset += info.size;
    for (int i = 0; i < d; ++i) {
      if (info.lo[i] == g.lo()[i] && info.hi[i] == g.hi()[i]) info.spans = true;
    }
  }
  std::vector<VertexId> members(n);
  std::vector<std::int32_t> fill(clusters.size());
  for (std::size_t c = 0; c < clusters.size(); ++c) fill[c] = clusters[c].offset;
  for (std::size_t v = 0; v < n; ++v) members[fill[ids[v]]++] = static_cast<VertexId>(v);
  return ClusterLabeling(std::move(ids), std::move(clusters), std::move(members));
}

std::string to_string(GiantMode mode) { return mode == GiantMode::spanning ? "spanning" : "largest"; }

GiantMode giant_mode_from_string(const std::string& text) {
  if (text == "spanning") return GiantMode::spanning;
  if (text == "largest") return GiantMode::largest;
  throw std::invalid_argument("unknown giant mode '" + text + "'");
}

GiantProxy giant_proxy(const ClusterLabeling& labeling, GiantMode mode) {
  GiantProxy out;
  if (mode == GiantMode::largest) {
    std::int32_t best = -1;
    for (std::size_t c = 0; c < labeling.num_clusters(); ++c) {
      if (best < 0 || labeling.size(static_cast<std::int32_t>(c)) > labeling.size(best)) {
        best = static_cast<std::int32_t>(c);
      }
    }
    if (best >= 0) out.id = best;
    for (std::size_t c = 0; c < labeling.num_clusters(); ++c)
      if (labeling.info(static_cast<std::int32_t>(c)).spans) ++out.spanning_count;
    return out;
  }
  std::int32_t found = -1;
  for (std::size_t c = 0; c < labeling.num_clusters(); ++c) {
    if (labeling.info(static_cast<std::int32_t>(c)).spans) {
      ++out.spanning_count;
      found = static_cast<std::int32_t>(c);
    }
  }
  if (out.spanning_count == 1) out.id = found;
  return out;
}

std::int32_t cluster_of(const ClusterLabeling& labeling, VertexId v) { return labeling.cluster_of(v); }

bool is_finite_proxy(const ClusterLabeling& labeling, std::int32_t id, const GiantProxy& giant) {
  if (giant.id && *giant.id == id) return false;
  return !labeling.info(id).touches_boundary;
}

bool Region::contains(const Point& q, int dim) const {
  for (int i = 0; i < dim; ++i)
    if (q[i] < lo[i] || q[i] > hi[i]) return false;
  return true;
}

LazyCluster explore_cluster(const Graph& graph, double p, std::uint64_t seed, std::uint64_t trial,
                            VertexId source, std::size_t max_size, const std::optional<Region>& region) {
  LazyCluster out;
  const std::uint64_t base = mix64(mix64(seed) ^ trial);
  // Visit marks are reused across calls on the same thread; a stamp per call
  // avoids clearing.
  thread_local std::vector<std::uint32_t> mark;
  thread_local std::uint32_t stamp = 0;
  if (mark.size() < graph.num_vertices()) mark.assign(graph.num_vertices(), 0);
  if (++stamp == 0) {
    std::fill(mark.begin(), mark.end(), 0);
    stamp = 1;
  }
  std::vector<VertexId>& seen = out.vertices;
  auto visit = [&](VertexId v) {
    mark[v] = stamp;
    seen.push_back(v);
    if (graph.on_window_boundary(v)) out.touches_boundary = true;
    if (region && !region->contains(graph.point(v), graph.dim())) out.left_region = true;
    return out.touches_boundary || out.left_region;
  };
  if (visit(source)) {
    out.truncated = true;
    return out;
  }
  for (std::size_t head = 0; head < seen.size(); ++head) {
    const VertexId v = seen[head];
    for (const auto& inc : graph.incident(v)) {
      if (mark[inc.to] == stamp) continue;
      const double u = static_cast<double>(mix64(base ^ static_cast<std::uint64_t>(inc.edge)) >> 11) * 0x1.0p-53;
      if (!(u < p)) continue;
      if (visit(inc.to) || seen.size() > max_size) {
        out.truncated = true;
        return out;
      }
    }
  }
  return out;
}

namespace {

constexpr char kMagic[8] = {'P', 'L', 'C', 'F', 'G', '0', '0', '1'};

template <class T>
void put(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("truncated configuration block");
  return value;
}

}  // namespace

void write_binary(std::ostream& out, const EdgeConfiguration& config) {
  const std::string desc = config.graph().descriptor().to_text();
  out.write(kMagic, sizeof(kMagic));
  put<std::uint64_t>(out, desc.size());
  out.write(desc.data(), static_cast<std::streamsize>(desc.size()));
  put<double>(out, config.p());
  put<std::uint64_t>(out, config.seed());
  put<std::uint64_t>(out, config.trial());
  put<std::uint64_t>(out, config.num_edges());
  for (auto w : config.words()) put<std::uint64_t>(out, w);
}

EdgeConfiguration read_binary(std::istream& in, const Graph& graph) {
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("not a configuration block");
  }
  const auto len = get<std::uint64_t>(in);
  std::string desc(len, '\0');
  in.read(desc.data(), static_cast<std::streamsize>(len));
  if (desc != graph.descriptor().to_text()) throw std::runtime_error("lattice descriptor mismatch");
  const double p = get<double>(in);
  const auto seed = get<std::uint64_t>(in);
  const auto trial = get<std::uint64_t>(in);
  const auto edges = get<std::uint64_t>(in);
  if (edges != graph.num_edges()) throw std::runtime_error("edge count mismatch");
  EdgeConfiguration config(graph, p, seed, trial);
  for (auto& w : config.words()) w = get<std::uint64_t>(in);
  return config;
}

void write_edge_list(std::ostream& out, const EdgeConfiguration& config) {
  const Graph& g = config.graph();
  out << "# p=" << config.p() << " seed=" << config.seed() << " trial=" << config.trial() << "\n";
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    for (VertexId v : {g.edge(e).u, g.edge(e).v}) {
      for (int i = 0; i < g.dim(); ++i) out << (i ? "," : "") << g.coord(v, i);
      out << ' ';
    }
    out << (config.open(static_cast<EdgeId>(e)) ? "open" : "closed") << "\n";
  }
}

}  // namespace perclab

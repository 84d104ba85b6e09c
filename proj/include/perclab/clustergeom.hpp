#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "perclab/lattice.hpp"
#include "perclab/percolation.hpp"

namespace perclab {

/// Sorted, duplicate-free vertex ids of a host graph.
class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(const Graph& host, std::vector<VertexId> ids);

  const Graph& host() const { return *host_; }
  const std::vector<VertexId>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(VertexId v) const;
  /// Connectivity under host adjacency, computed once at construction.
  bool connected() const { return connected_; }

  std::vector<std::uint8_t> mask() const;
  std::vector<Point> points() const;

  bool operator==(const VertexSet& other) const { return ids_ == other.ids_; }

 private:
  const Graph* host_ = nullptr;
  std::vector<VertexId> ids_;
  bool connected_ = true;
};

/// The graph a boundary is taken in: all host edges, only open edges, or
/// open edges between members of one cluster.
class Subgraph {
 public:
  static Subgraph full(const Graph& host);
  static Subgraph open(const EdgeConfiguration& config);
  static Subgraph cluster(const EdgeConfiguration& config, const ClusterLabeling& labeling,
                          std::int32_t id);

  const Graph& host() const { return *host_; }
  bool has_vertex(VertexId v) const { return members_.empty() || members_[v] != 0; }
  bool usable(EdgeId e) const;

 private:
  const Graph* host_ = nullptr;
  const EdgeConfiguration* config_ = nullptr;
  std::vector<std::uint8_t> members_;
};

enum class BoundaryKind { edge, inner_vertex, outer_vertex };

/// Edges of the subgraph with exactly one endpoint in S, sorted by id.
std::vector<EdgeId> edge_boundary(const VertexSet& s, const Subgraph& g);
/// Vertices of S with a subgraph neighbor outside S.
VertexSet inner_vertex_boundary(const VertexSet& s, const Subgraph& g);
/// Vertices outside S with a subgraph neighbor in S.
VertexSet outer_vertex_boundary(const VertexSet& s, const Subgraph& g);

/// S together with every component of (subgraph minus S) that avoids the
/// window boundary; window-touching components play the infinite part.
VertexSet closure(const VertexSet& s, const Subgraph& g);

/// Frontier: the boundary of the closure.
std::vector<EdgeId> edge_frontier(const VertexSet& s, const Subgraph& g);
VertexSet inner_vertex_frontier(const VertexSet& s, const Subgraph& g);
VertexSet outer_vertex_frontier(const VertexSet& s, const Subgraph& g);

/// Connectivity of S within the subgraph.
bool is_connected(const VertexSet& s, const Subgraph& g);
/// Connectivity of S under linf adjacency of coordinates.
bool is_star_connected(const VertexSet& s);

/// Components of (subgraph vertices minus S), each as a VertexSet.
std::vector<VertexSet> complement_components(const VertexSet& s, const Subgraph& g);

struct TouchingEdges {
  std::vector<EdgeId> edges;
  std::size_t count() const { return edges.size(); }
};

/// Host edges with one endpoint in each of the two disjoint clusters.
TouchingEdges touching_edges(const VertexSet& c1, const VertexSet& c2, const EdgeConfiguration& config);

/// Host edges from the cluster-closure of S to the rest of the cluster:
/// the ambient counterpart of the open frontier inside a cluster.
std::vector<EdgeId> cluster_ambient_frontier(const VertexSet& s, const EdgeConfiguration& config,
                                             const ClusterLabeling& labeling, std::int32_t id);

/// Members of one cluster as a VertexSet.
VertexSet cluster_set(const Graph& host, const ClusterLabeling& labeling, std::int32_t id);

/// Eden growth: starting from `start`, repeatedly adds a uniformly chosen
/// outer-boundary vertex (host adjacency) until `size` vertices or no room.
VertexSet grow_random_set(const Graph& host, VertexId start, std::size_t size, std::uint64_t seed,
                          bool avoid_window_boundary = true);

/// One "x,y[,z]" line per vertex.
void write_set_text(std::ostream& out, const VertexSet& s);
VertexSet read_set_text(std::istream& in, const Graph& host);
void write_set_binary(std::ostream& out, const VertexSet& s);
VertexSet read_set_binary(std::istream& in, const Graph& host);

}  // namespace perclab

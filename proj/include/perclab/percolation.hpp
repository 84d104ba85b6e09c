#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perclab/lattice.hpp"

namespace perclab {

/// Counter-based uniform in [0,1) keyed by (seed, trial, edge).
double edge_uniform(std::uint64_t seed, std::uint64_t trial, EdgeId e);
std::uint64_t mix64(std::uint64_t x);

/// Open/closed state of every edge of a graph, bit-packed by edge id.
class EdgeConfiguration {
 public:
  EdgeConfiguration(const Graph& graph, double p, std::uint64_t seed, std::uint64_t trial);

  const Graph& graph() const { return *graph_; }
  double p() const { return p_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t trial() const { return trial_; }

  bool open(EdgeId e) const { return (bits_[e >> 6] >> (e & 63)) & 1u; }
  void set_open(EdgeId e, bool value);
  std::size_t num_edges() const { return graph_->num_edges(); }
  std::size_t num_open() const;
  const std::vector<std::uint64_t>& words() const { return bits_; }
  std::vector<std::uint64_t>& words() { return bits_; }

  bool operator==(const EdgeConfiguration& other) const {
    return graph_ == other.graph_ && bits_ == other.bits_;
  }

 private:
  const Graph* graph_;
  double p_;
  std::uint64_t seed_;
  std::uint64_t trial_;
  std::vector<std::uint64_t> bits_;
};

/// Bernoulli(p): edge e is open iff edge_uniform(seed, trial, e) < p, so
/// configurations at different p with the same key are monotonically coupled.
EdgeConfiguration sample(const Graph& graph, double p, std::uint64_t seed, std::uint64_t trial);
/// Every edge open (value = true) or closed.
EdgeConfiguration uniform_configuration(const Graph& graph, bool value);

struct ClusterInfo {
  std::int32_t size = 0;
  std::int32_t offset = 0;  // into ClusterLabeling::all_members()
  Point lo{};
  Point hi{};
  bool spans = false;  // touches two opposite window faces
  bool touches_boundary = false;
};

/// Connected components of the open subgraph. Ids are assigned in order of
/// each cluster's smallest vertex; members are listed in increasing order.
class ClusterLabeling {
 public:
  ClusterLabeling() = default;
  ClusterLabeling(std::vector<std::int32_t> ids, std::vector<ClusterInfo> clusters,
                  std::vector<VertexId> members);

  std::int32_t cluster_of(VertexId v) const { return ids_[v]; }
  std::size_t num_clusters() const { return clusters_.size(); }
  const ClusterInfo& info(std::int32_t id) const { return clusters_[id]; }
  std::int32_t size(std::int32_t id) const { return clusters_[id].size; }
  std::span<const VertexId> members(std::int32_t id) const {
    return {members_.data() + clusters_[id].offset, static_cast<std::size_t>(clusters_[id].size)};
  }
  const std::vector<std::int32_t>& ids() const { return ids_; }
  const std::vector<VertexId>& all_members() const { return members_; }

 private:
  std::vector<std::int32_t> ids_;
  std::vector<ClusterInfo> clusters_;
  std::vector<VertexId> members_;
};

ClusterLabeling label(const EdgeConfiguration& config);

enum class GiantMode { spanning, largest };
std::string to_string(GiantMode mode);
GiantMode giant_mode_from_string(const std::string& text);

struct GiantProxy {
  std::optional<std::int32_t> id;
  int spanning_count = 0;  // diagnostic for spanning mode
};

GiantProxy giant_proxy(const ClusterLabeling& labeling, GiantMode mode);

std::int32_t cluster_of(const ClusterLabeling& labeling, VertexId v);
/// Not the giant proxy and not touching the window boundary.
bool is_finite_proxy(const ClusterLabeling& labeling, std::int32_t id, const GiantProxy& giant);

/// Breadth-first exploration of the open cluster of `source` that draws edge
/// states on demand. Stops as soon as the cluster touches the window
/// boundary, exceeds `max_size` vertices, or (when a region is given) reaches
/// a vertex outside the coordinate box [region_lo, region_hi].
struct LazyCluster {
  std::vector<VertexId> vertices;  // in discovery order
  bool touches_boundary = false;
  bool left_region = false;
  bool truncated = false;  // stopped early
};

struct Region {
  Point lo{}, hi{};
  bool contains(const Point& q, int dim) const;
};

LazyCluster explore_cluster(const Graph& graph, double p, std::uint64_t seed, std::uint64_t trial,
                            VertexId source, std::size_t max_size,
                            const std::optional<Region>& region = std::nullopt);

/// Binary block: magic, lattice descriptor text, p, seed, trial, edge bits.
void write_binary(std::ostream& out, const EdgeConfiguration& config);
/// Reads a block written by write_binary; the graph must match the stored descriptor.
EdgeConfiguration read_binary(std::istream& in, const Graph& graph);
/// One line per edge: "x0,y0 x1,y1 open|closed".
void write_edge_list(std::ostream& out, const EdgeConfiguration& config);

}  // namespace perclab

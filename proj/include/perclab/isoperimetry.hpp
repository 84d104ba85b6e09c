#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "perclab/clustergeom.hpp"
#include "perclab/lattice.hpp"
#include "perclab/percolation.hpp"

namespace perclab {

inline constexpr std::size_t kExactEnumerationCap = 16;

/// Calls `visit` once for every connected vertex set of the subgraph that
/// contains `o` and has at most `max_size` vertices (Redelmeier's method).
/// The vector passed to `visit` holds the set in insertion order, `o` first.
/// Returns the number of sets. Throws std::invalid_argument when max_size
/// exceeds kExactEnumerationCap.
std::uint64_t enumerate_anchored_sets(const Subgraph& sub, VertexId o, std::size_t max_size,
                                      const std::function<void(const std::vector<VertexId>&)>& visit);

/// Open frontier of S inside the subgraph: the number of subgraph edges
/// between S and the components of (subgraph minus S) that reach the window
/// boundary, plus the size of the closure. Exact; complement components are
/// explored with a growing cap so the infinite part is rarely flooded.
class FrontierCounter {
 public:
  explicit FrontierCounter(const Subgraph& sub);

  struct Result {
    std::size_t frontier = 0;
    std::size_t closure_size = 0;
  };
  Result operator()(const std::vector<VertexId>& s);
  /// Open boundary edges of S itself, no closure.
  std::size_t raw_boundary(const std::vector<VertexId>& s);

 private:
  const Subgraph* sub_;
  std::vector<std::uint32_t> in_s_, seen_;
  std::vector<std::int32_t> group_of_;
  std::vector<std::int32_t> component_;  // component of the subgraph
  std::vector<std::uint8_t> reaches_;    // per component: touches the window boundary
  std::uint32_t stamp_ = 0;
  void next_stamp();
};

/// |frontier| / |S|^{1 - 1/d}.
double isoperimetric_ratio(std::size_t frontier, std::size_t size, int dim);

enum class Sampler { uniform_growth, boundary_greedy };
std::string to_string(Sampler s);
Sampler sampler_from_string(const std::string& text);

struct SampledSets {
  std::vector<VertexSet> sets;
  std::string diagnostic;  // non-empty when no set could be produced
};

/// Connected anchored sets of exactly `size` vertices of the subgraph.
/// uniform_growth adds a uniformly chosen outer neighbor each step; trial k
/// uses its own stream derived from (seed, k). boundary_greedy is
/// deterministic and returns one set: each step absorbs the neighbor with the
/// smallest change of the open boundary, then smallest graph distance to o,
/// then smallest id. With fill_holes the closure of each set is returned
/// instead (its complement in the subgraph has only window-reaching parts).
SampledSets sample_anchored_sets(const Subgraph& sub, VertexId o, std::size_t size, std::size_t trials,
                                 Sampler sampler, std::uint64_t seed = 0, bool fill_holes = false);

/// Greedy growth recorded at several sizes (ascending) in a single run.
std::vector<VertexSet> greedy_checkpoints(const Subgraph& sub, VertexId o, const std::vector<std::size_t>& sizes);

struct ProfilePoint {
  std::size_t size_class = 0;
  double min_ratio = 0.0;
  std::size_t frontier = 0;     // frontier of the arg-min set
  std::string witness;          // how the arg-min set was found
  std::uint64_t witness_hash = 0;
  std::size_t samples = 0;
  bool exact = false;
};

struct ProfileBudget {
  std::size_t exact_max = 6;     // size classes up to this are enumerated
  std::size_t uniform_runs = 8;  // uniform-growth samples per heuristic class
  bool greedy = true;
  std::uint64_t seed = 0;
};

/// Minimum ratio per size class. Classes <= exact_max are exact; larger ones
/// are running minima over the greedy set and the uniform samples.
std::vector<ProfilePoint> profile(const Subgraph& sub, VertexId o, const std::vector<std::size_t>& sizes,
                                  const ProfileBudget& budget);

/// Order-independent hash of a vertex set's coordinates.
std::uint64_t set_hash(const VertexSet& s);

/// Profile CSV: n,p,seed,size_class,min_ratio,exact_flag,witness_hash
std::string profile_csv_header();
std::string profile_csv_row(int n, double p, std::uint64_t seed, const ProfilePoint& point);

struct SharpnessWitness {
  std::optional<EdgeConfiguration> config;  // after surgery
  std::vector<VertexId> s;                  // giant cluster of the new configuration inside the box
  EdgeId kept = -1;                         // the boundary edge left open
  std::size_t redeclared = 0;               // edges switched to closed
  std::size_t frontier = 0;                 // open frontier of s in the new giant cluster
  std::string diagnostic;
};

/// Closes every open edge of the giant cluster that crosses the boundary of
/// [-r, r]^d except one, chosen to keep the largest part of the giant inside
/// the box attached (ties: smallest edge id).
SharpnessWitness sharpness_witness(const EdgeConfiguration& config, int r, GiantMode mode = GiantMode::spanning);

}  // namespace perclab

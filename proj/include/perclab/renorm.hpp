#pragma once

#include <optional>
#include <string>
#include <vector>

#include "perclab/clustergeom.hpp"
#include "perclab/lattice.hpp"
#include "perclab/percolation.hpp"

namespace perclab {

/// A connected component of (open cluster restricted to one block).
struct LocalComponent {
  std::int32_t cluster = -1;  // global cluster id
  int diameter = 0;           // linf diameter of the component's coordinates
  bool crossing = false;      // meets all 2d faces of the block
};

struct BlockAnalysis {
  std::vector<LocalComponent> components;
  bool good = false;
};

/// diam < N/5 and diam >= N/5 evaluated in integers.
inline bool small_diameter(int diameter, int scale) { return 5 * diameter < scale; }

BlockAnalysis analyze_block(const EdgeConfiguration& config, const ClusterLabeling& labeling,
                            const BlockGrid& grid, const Block& block);

/// Good: some restricted cluster crosses all faces and every other one has
/// diameter < N/5.
bool classify_block(const EdgeConfiguration& config, const ClusterLabeling& labeling,
                    const BlockGrid& grid, const Block& block);

/// Every block of a window analysed once.
class BlockField {
 public:
  BlockField(const EdgeConfiguration& config, const ClusterLabeling& labeling, const BlockGrid& grid);

  const BlockGrid& grid() const { return grid_; }
  const BlockSet& blocks() const { return blocks_; }
  const Graph& coarse() const { return blocks_.coarse; }
  const Graph& coarse_star() const { return blocks_.coarse_star; }
  std::size_t size() const { return analyses_.size(); }
  const BlockAnalysis& analysis(VertexId b) const { return analyses_[b]; }
  bool good(VertexId b) const { return analyses_[b].good; }
  bool substantial(VertexId b, std::int32_t cluster) const;
  const EdgeConfiguration& config() const { return *config_; }
  const ClusterLabeling& labeling() const { return *labeling_; }

 private:
  const EdgeConfiguration* config_;
  const ClusterLabeling* labeling_;
  BlockGrid grid_;
  BlockSet blocks_;
  std::vector<BlockAnalysis> analyses_;
};

/// C^N: the C-substantial blocks, as a set of the coarse l1 lattice.
VertexSet substantial_blocks(const BlockField& field, std::int32_t cluster);

struct BlockColoring {
  std::vector<std::uint8_t> good, substantial1, substantial2, red, blue;
  std::size_t size() const { return good.size(); }
  bool colored(VertexId b) const { return red[b] || blue[b]; }
  std::size_t num_red() const;
  std::size_t num_blue() const;
};

/// Red = inner vertex boundary of C1^N in the coarse lattice; blue = substantial
/// for both clusters.
BlockColoring color(const BlockField& field, std::int32_t c1, std::int32_t c2);

/// One character per block, rows of increasing second coordinate (d = 2 only):
/// G good, b bad, R red, B blue, X red and blue.
std::string coloring_raster(const BlockField& field, const BlockColoring& coloring);
/// "x,y,good,sub1,sub2,red,blue" rows with a header.
std::string coloring_rows(const BlockField& field, const BlockColoring& coloring);

struct PStar {
  VertexSet frontier;  // inner vertex frontier of C1^N
  VertexSet p;
  VertexSet p_star;
  std::size_t uncolored_in_p = 0;
  std::size_t uncolored_components = 0;  // the finite components that were repaired
  std::string diagnostic;                // non-empty for degenerate inputs
};

PStar build_p_star(const BlockField& field, const BlockColoring& coloring, std::int32_t c1, std::int32_t c2);

struct PStarChecks {
  bool subset_of_colored = true;
  bool star_connected = true;
  bool contains_colored_part_of_p = true;
  bool inside_bounding_box = true;
  bool all() const {
    return subset_of_colored && star_connected && contains_colored_part_of_p && inside_bounding_box;
  }
};

PStarChecks check_p_star(const BlockField& field, const BlockColoring& coloring, const PStar& result,
                         std::int32_t c1);

/// Every touching edge of (c1, c2) lies in between 1 and 2^d blue blocks.
struct TouchCover {
  std::size_t touching = 0;
  std::size_t min_blue = 0;
  std::size_t max_blue = 0;
  bool ok = true;
};
TouchCover touching_cover(const BlockField& field, const BlockColoring& coloring, std::int32_t c1, std::int32_t c2);

/// Coarse block of a fine vertex: round(v / N) per axis.
Point coarse_image(const Point& p, int dim, int scale);

/// Finite-box variant: Delta = vertices of C1 adjacent to the component of
/// (box minus C1) containing C2, mapped to coarse blocks.
struct DeltaReport {
  VertexSet delta;  // coarse
  bool star_connected = false;
  bool inside_red = false;
  bool components_meet_delta = false;  // each l1 component of closure(C1^N) cap C2^N
  std::size_t components = 0;
};
DeltaReport delta_report(const BlockField& field, const BlockColoring& coloring, std::int32_t c1, std::int32_t c2);

/// How a conditioned configuration was produced.
enum class ConditionMode { rejection, grown };
std::string to_string(ConditionMode mode);
ConditionMode condition_mode_from_string(const std::string& text);

/// Closes every edge between the linf spheres of radius r and r + 1 around
/// the origin, which seals the origin's cluster inside [-r, r]^d.
void seal_origin(EdgeConfiguration& config, int radius);

struct ConditionSpec {
  int scale = 20;
  ConditionMode mode = ConditionMode::rejection;
  int seal_radius = 0;  // grown mode only
  std::size_t min_size = 1;
  std::size_t max_size = 1u << 22;
  GiantMode giant_mode = GiantMode::spanning;
};

struct ConditionedSample {
  EdgeConfiguration config;
  ClusterLabeling labeling;
  GiantProxy giant;
  std::int32_t origin_cluster = -1;
};

/// Accepts (seed, trial) iff the origin cluster is a finite proxy with
/// |C_o| >= min_size and linf diameter >= N, every vertex of C_o maps to an
/// interior coarse block, and a giant proxy distinct from C_o exists. In
/// rejection mode the origin cluster is explored lazily first, so rejected
/// trials cost little.
std::optional<ConditionedSample> sample_conditioned(const Graph& graph, double p, std::uint64_t seed,
                                                    std::uint64_t trial, const ConditionSpec& spec);

}  // namespace perclab

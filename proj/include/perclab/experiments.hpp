#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "perclab/clustergeom.hpp"
#include "perclab/lattice.hpp"
#include "perclab/manifest.hpp"
#include "perclab/percolation.hpp"
#include "perclab/walk.hpp"

namespace perclab {

inline constexpr const char* kCodeVersion = "0.3.0";
inline constexpr int kCsvSchemaVersion = 1;

/// Seed for the j-th independent stream of a run (one per p value etc.).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t j);

VertexId origin_of(const Graph& g);

/// Vertex of `members` closest to the origin in l1, ties by smallest id.
VertexId nearest_to_origin(const Graph& g, std::span<const VertexId> members);

struct GiantSample {
  EdgeConfiguration config;
  ClusterLabeling labeling;
  std::int32_t giant = -1;
  VertexId anchor = -1;  // giant vertex nearest the origin
};

/// Empty when the configuration has no giant proxy.
std::optional<GiantSample> giant_sample(const Graph& g, double p, std::uint64_t seed, std::uint64_t trial,
                                        GiantMode mode);

// ---------------------------------------------------------------------------
// Repulsion tail: {m0 <= |C_o|, C_o not the giant, tau(C_o, giant) >= t}

struct RepulsionSetup {
  const Graph* graph = nullptr;
  double p = 0.5;
  std::size_t m0 = 1;
  std::vector<int> t;  // thresholds
  GiantMode mode = GiantMode::spanning;
  std::uint64_t seed = 0;
};

/// Touching-edge count of C_o with the giant, or empty when the event
/// m0 <= |C_o| finite fails.
std::optional<std::size_t> repulsion_tau(const RepulsionSetup& s, std::uint64_t trial);

/// hits[i] = number of trials in [lo, hi) with tau >= t[i].
std::vector<std::uint64_t> repulsion_hits(const RepulsionSetup& s, std::uint64_t lo, std::uint64_t hi);

// ---------------------------------------------------------------------------
// Walks on the giant cluster

struct HeatKernelRun {
  VertexId anchor = -1;
  std::size_t cluster_size = 0;
  HeatKernel kernel;
};

std::optional<HeatKernelRun> heat_kernel_run(const Graph& g, double p, std::uint64_t seed, std::uint64_t trial,
                                             int n_max, double laziness, GiantMode mode);

struct MixingRun {
  std::size_t cluster_size = 0;
  SpectralGap gap;
  std::optional<MixingResult> mixing;
};

/// Largest cluster of the box [-n, n]^dim.
MixingRun mixing_run(const Graph& box, double p, std::uint64_t seed, std::uint64_t trial, double laziness,
                     std::optional<double> eps, std::size_t random_starts);

// ---------------------------------------------------------------------------
// Other drivers

/// k-th random connected set of a wedge experiment; sizes are cycled.
VertexSet wedge_set(const WedgeLattice& wedge, std::uint64_t k, const std::vector<std::int64_t>& sizes,
                    std::uint64_t seed);

struct BlockCount {
  std::size_t blocks = 0, good = 0;
};
BlockCount block_count(const Graph& g, double p, int scale, std::uint64_t seed, std::uint64_t trial);

// ---------------------------------------------------------------------------
// Manifest-driven experiments, split into independently resumable units

struct UnitInfo {
  std::uint64_t trial_lo = 0, trial_hi = 0;  // half open
};

struct CsvRow {
  std::uint64_t seed = 0;
  std::uint64_t trial_lo = 0, trial_hi = 0;
  std::string fields;  // kind-specific columns, comma separated
};

class Experiment {
 public:
  virtual ~Experiment() = default;
  /// Kind-specific columns; the provenance prefix is added by the runner.
  virtual std::string csv_columns() const = 0;
  virtual std::size_t num_units() const = 0;
  virtual UnitInfo unit(std::size_t i) const = 0;
  /// Thread safe; a pure function of the manifest and i.
  virtual nlohmann::json run_unit(std::size_t i) const = 0;
  /// units[i] is the output of run_unit(i).
  virtual void finish(const std::vector<nlohmann::json>& units, std::vector<CsvRow>& rows,
                      nlohmann::json& summary) const = 0;
};

std::unique_ptr<Experiment> make_experiment(const Manifest& manifest);

/// "manifest_hash,code_version,seed,trial_lo,trial_hi," + columns
std::string csv_header(const Experiment& e);
std::string csv_schema_line(ExperimentKind kind);

}  // namespace perclab

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "perclab/clustergeom.hpp"
#include "perclab/stats.hpp"

namespace perclab {

/// Random walk on one connected component: stay put with probability
/// `laziness`, otherwise move to a uniform neighbor. Stationary weights are
/// proportional to degree. Vertices are indexed locally 0..size()-1.
class WalkOperator {
 public:
  /// Walk on the component of `root` inside the subgraph.
  WalkOperator(const Subgraph& sub, VertexId root, double laziness = 0.5);
  /// Walk on an explicit simple graph (vertices 0..n-1); used for small
  /// reference graphs such as cycles and complete graphs.
  static WalkOperator from_edges(std::size_t n, const std::vector<std::pair<int, int>>& edges,
                                 double laziness = 0.5);

  std::size_t size() const { return offsets_.size() - 1; }
  double laziness() const { return laziness_; }
  int degree(std::size_t i) const { return offsets_[i + 1] - offsets_[i]; }
  std::optional<std::size_t> local(VertexId v) const;
  VertexId global(std::size_t i) const { return global_.empty() ? static_cast<VertexId>(i) : global_[i]; }
  std::size_t num_edges() const { return neighbors_.size() / 2; }
  std::span<const std::int32_t> neighbors(std::size_t i) const {
    return {neighbors_.data() + offsets_[i], static_cast<std::size_t>(degree(i))};
  }

  /// One step of a distribution: out(y) = sum_x mu(x) P(x, y).
  void step(const std::vector<double>& mu, std::vector<double>& out) const;
  /// Transition probability P(i, j).
  double transition(std::size_t i, std::size_t j) const;
  std::vector<double> stationary() const;
  /// Symmetrised kernel D^{1/2} P D^{-1/2} applied to a vector.
  void apply_symmetric(const std::vector<double>& x, std::vector<double>& out) const;

 private:
  WalkOperator() = default;
  double laziness_ = 0.5;
  std::vector<int> offsets_{0};
  std::vector<std::int32_t> neighbors_;
  std::vector<VertexId> global_;
  std::vector<std::int64_t> local_index_;  // host id -> local, -1 outside
};

struct HeatKernel {
  std::vector<double> p;          // p[n] = p_n(o, o), n = 0..n_max
  double max_mass_error = 0.0;    // largest |sum(mu) - 1| over all steps
  bool non_increasing = true;     // checked for lazy walks only
  std::string diagnostic;
};

/// Exact p_n(o,o) by repeated distribution steps from the indicator of o.
HeatKernel heat_kernel_at_origin(const WalkOperator& op, std::size_t o, int n_max);

/// Slope of log p_n against log n over n in [n_lo, n_hi]. Throws on a
/// nonpositive entry inside the window.
LinearFit decay_exponent(const std::vector<double>& p, int n_lo, int n_hi);

inline constexpr std::size_t kSpectralSizeCap = 20000;
inline constexpr double kSpectralTolerance = 1e-10;

enum class SpectralMethod { automatic, power, shift_invert };

struct SpectralGap {
  double lambda2 = 0.0;      // second largest eigenvalue of the kernel
  double gap = 0.0;          // 1 - lambda2
  double relaxation_time = 0.0;
  double residual = 0.0;     // |S v - lambda2 v| for the returned unit vector
  std::vector<double> f2;    // eigenfunction of P for lambda2 (v / sqrt(pi) up to scale)
  int iterations = 0;
  SpectralMethod method = SpectralMethod::automatic;
  bool certified = false;    // residual <= kSpectralTolerance
};

/// Second eigenvalue of the kernel. Power iteration with deflation on
/// (S + I) / 2 for small graphs, shift-invert block subspace iteration
/// otherwise. Throws std::invalid_argument above kSpectralSizeCap vertices
/// or for a single vertex.
SpectralGap spectral_gap(const WalkOperator& op, SpectralMethod method = SpectralMethod::automatic);

inline double relaxation_time(const WalkOperator& op) { return spectral_gap(op).relaxation_time; }

struct MixingResult {
  int time = 0;                  // smallest n with distance <= eps
  double distance = 0.0;         // the distance at that n
  std::size_t worst_start = 0;   // start attaining the largest distance at time - 1
  std::size_t starts = 0;
};

/// max over starts x and all y of |p_n(x,y)/pi(y) - 1|.
double linfty_distance(const WalkOperator& op, std::size_t start, int n);

/// L-infinity mixing time: starts are the extreme points of the second
/// eigenfunction plus `random_starts` uniformly drawn vertices; doubling
/// then bisection on n.
MixingResult linfty_mixing(const WalkOperator& op, double eps = 0.25, std::size_t random_starts = 32,
                           std::uint64_t seed = 0);

/// Trajectory of `steps` moves from `start` (smoke testing only).
std::vector<std::size_t> simulate_walk(const WalkOperator& op, std::size_t start, int steps, std::uint64_t seed);

std::string heat_kernel_csv_header();
std::string heat_kernel_csv(const HeatKernel& hk);

}  // namespace perclab

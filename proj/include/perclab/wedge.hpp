#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "perclab/clustergeom.hpp"
#include "perclab/lattice.hpp"
#include "perclab/stats.hpp"

namespace perclab {

// ---------------------------------------------------------------------------
// Entropy of a uniform point of a finite set in a wedge

/// Sets up to this size have their inequalities decided in exact integer
/// arithmetic; larger ones in double precision with kEntropySlack.
inline constexpr std::size_t kExactEntropyCap = 10000;
inline constexpr double kEntropySlack = 1e-9;

struct EntropyChecks {
  bool exact = true;
  bool xyz_is_log_v = true;            // H(X,Y,Z) = log v
  bool boundary_decomposition = true;  // w >= w_x + 2 w_y + w_z
  bool yz_support = true;              // H(Y,Z) <= log w_x
  bool xz_support = true;              // H(X,Z) <= log w_y
  bool product_bound = true;           // w_x w_y >= v exp(H(Z))
  bool shearer = true;                 // H(Y,Z) + H(X,Z) >= H(X,Y,Z) + H(Z)
  bool conditioning = true;            // H(Z) >= H(Z | X,Y)
  bool all() const {
    return xyz_is_log_v && boundary_decomposition && yz_support && xz_support && product_bound && shearer &&
           conditioning;
  }
};

struct EntropyReport {
  std::size_t v = 0;
  std::size_t w = 0;    // edge boundary inside the untruncated wedge
  std::size_t w_x = 0;  // |P_x(S)|: distinct (y, z)
  std::size_t w_y = 0;  // |P_y(S)|: distinct (x, z)
  std::size_t w_z = 0;  // columns (x, y) of S that are not full
  std::size_t columns = 0;
  double H_xyz = 0, H_xz = 0, H_yz = 0, H_xy = 0, H_z = 0;  // natural log
  double k = 0;         // v / (w_x + w_z)
  std::size_t v_full = 0, v_miss = 0;
  double nu = 0, rho = 0;
  double h_miss = std::numeric_limits<double>::quiet_NaN();  // v_miss / w_z
  double k_full = std::numeric_limits<double>::quiet_NaN();  // v_full / |P_x(S_full)|
  /// (column size, number of points of S lying in columns of that size),
  /// ascending. zeta = |S(X,Y,.)| of a uniform point has P(zeta = s) = count / v.
  std::vector<std::pair<int, std::size_t>> zeta;
  EntropyChecks checks;

  /// Number of points of S whose column has at most t points.
  std::size_t zeta_at_most(double t) const;
};

/// Points are (x, y, z) in the first three coordinates. Throws on an empty
/// set, a repeated point, or a point outside {x >= 0, |z| <= h(x)}.
EntropyReport entropy_report(const HeightFunction& h, const std::vector<Point>& s);
EntropyReport entropy_report(const WedgeLattice& wedge, const VertexSet& s);

// ---------------------------------------------------------------------------
// Isoperimetric profile bounds

/// f(v) = h(sqrt(v / h(sqrt v))).
double psi_f(const HeightFunction& h, double v);

struct PsiRecord {
  std::size_t v = 0, w = 0;
  double k = 0;
  bool ketto = true;      // w >= v / k, decided in integers as w >= w_x + w_z
  double egy_ratio = 0;   // w / sqrt(h(k) v)
  double psi_ratio = 0;   // w / sqrt(v f(v))
  double hhk_gap = 0;     // log h(k) - H(Z)
};

PsiRecord psi_record(const HeightFunction& h, const EntropyReport& r);

struct PsiSummary {
  std::size_t sets = 0;
  std::size_t ketto_failures = 0;
  double min_egy_ratio = std::numeric_limits<double>::infinity();
  double min_psi_ratio = std::numeric_limits<double>::infinity();
  double max_hhk_gap = -std::numeric_limits<double>::infinity();
};

PsiSummary psi_profile_check(const HeightFunction& h, const std::vector<EntropyReport>& reports,
                             std::vector<PsiRecord>* records = nullptr);

struct ZetaCheck {
  double delta = 0;
  double threshold = 0;   // h(delta k)
  std::size_t count = 0;  // points with zeta <= threshold
  std::size_t v = 0;
  double p = 0;           // count / v
  Interval ci;
  bool within = true;     // ci.lo <= delta
};

/// Fraction of S with column size at most h(delta k), against delta.
ZetaCheck zeta_concentration(const HeightFunction& h, const EntropyReport& r, double delta);

// ---------------------------------------------------------------------------
// Lyons series sum_j 1 / (j h(j))

enum class SeriesVerdict { converges, diverges, undecided };
std::string to_string(SeriesVerdict v);

struct LyonsSum {
  std::uint64_t terms = 0;
  double sum = 0;
  std::vector<std::pair<std::uint64_t, double>> partial;  // at j = 2^i and j = terms
  double tail_lo = 0, tail_hi = 0;  // bracket for sum_{j > terms}; infinity when divergent
  SeriesVerdict verdict = SeriesVerdict::undecided;
};

/// Uses HeightFunction::value. The tail bracket comes from the integral test
/// on the family's closed form. Divergence is declared once the bracket is
/// unbounded and the partial sum passes `witness`. Throws when h(j) <= 0.
LyonsSum lyons_sum(const HeightFunction& h, std::uint64_t terms, double witness = 3.0);

// ---------------------------------------------------------------------------
// Effective resistance

struct ResistanceNetwork {
  std::size_t n = 0;
  std::vector<std::tuple<int, int, double>> edges;  // (u, v, conductance)

  /// Unit conductance on every usable edge; vertex ids are host ids.
  static ResistanceNetwork from_subgraph(const Subgraph& sub);
};

struct Resistance {
  bool connected = true;
  double r_eff = std::numeric_limits<double>::infinity();
  double current = 0;    // total current leaving A at unit potential
  double current_b = 0;  // total current entering B
  double residual = 0;   // relative residual of the interior linear system
  int iterations = 0;
  std::size_t interior = 0;
  bool converged = true;
};

/// Potential 1 on A, 0 on B, harmonic elsewhere; conjugate gradients to a
/// relative residual of `tolerance`. Only the part reachable from A without
/// entering B is solved. A and B must be nonempty and disjoint.
Resistance effective_resistance(const ResistanceNetwork& net, const std::vector<int>& a, const std::vector<int>& b,
                                double tolerance = 1e-10);
Resistance effective_resistance(const Subgraph& sub, const VertexSet& a, const VertexSet& b,
                                double tolerance = 1e-10);

/// Truncated wedge {0 <= x <= x_shell, |y| <= y_max, |z| <= h(x)} as a
/// network. With `fold` the two reflections y -> -y and z -> -z are
/// quotiented out (vertices with y, z >= 0, conductance = orbit size), which
/// preserves the resistance between o and the shell x = x_shell.
struct WedgeNetwork {
  ResistanceNetwork net;
  int origin = 0;
  std::vector<int> shell;  // vertices with x = x_shell
};

WedgeNetwork wedge_network(const HeightFunction& h, int x_shell, int y_max, bool fold = true);

struct WedgeResistance {
  int radius = 0;
  Resistance r;
  std::size_t vertices = 0;
};

/// R_eff(o -> {x = R}) for every R in `radii`.
std::vector<WedgeResistance> wedge_resistance_profile(const HeightFunction& h, const std::vector<int>& radii,
                                                      int y_max, double tolerance = 1e-12, bool fold = true);

// ---------------------------------------------------------------------------
// Minimal cutsets between o and the window boundary

inline constexpr int kCutsetSizeCap = 14;

struct CutsetCensus {
  int n_max = 0;
  std::vector<std::uint64_t> q;  // q[n], n = 0..n_max
  double kappa_estimate = 0;     // max_n q_n^{1/n}
  double peierls_bound = 0;      // 1 - 1/kappa_estimate
  std::size_t max_set_size = 0;
  std::uint64_t sets_enumerated = 0;
  std::uint64_t non_minimal = 0;  // frontiers rejected by the minimality check
};

/// Exhaustive: every connected set containing o of at most `max_set_size`
/// vertices, closed, with its frontier taken as a cutset; deduplicated and
/// checked for minimality by restoring each edge in turn. max_set_size = 0
/// derives the size from the edge isoperimetric inequality of Z^d, which is
/// only valid for l1 boxes. Throws above kCutsetSizeCap.
CutsetCensus cutset_census(const Graph& g, VertexId o, int n_max, std::size_t max_set_size = 0);

struct PeierlsCheck {
  int n = 0;
  std::uint64_t trials = 0, hits = 0;
  double p_hat = 0;
  double bound = 0;  // q_n (1 - p)^n
  double sigma = 0;  // binomial standard deviation at the bound
  bool within = true;  // p_hat <= bound + 3 sigma
};

/// Monte Carlo frequency of {C_o finite, |frontier of C_o| = n} for
/// n <= census.n_max against the union bound from the census.
std::vector<PeierlsCheck> peierls_check(const Graph& g, VertexId o, const CutsetCensus& census, double p,
                                        std::uint64_t trials, std::uint64_t seed, unsigned workers = 1);

// ---------------------------------------------------------------------------
// CSV

std::string entropy_csv_header();
std::string entropy_csv_row(std::uint64_t set_index, const EntropyReport& r);
std::string resistance_csv_header();
std::string resistance_csv_row(const WedgeResistance& r);
std::string census_csv_header();
std::string census_csv(const CutsetCensus& c);

}  // namespace perclab

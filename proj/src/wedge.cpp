#include "perclab/wedge.hpp"

#include <gmpxx.h>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "perclab/isoperimetry.hpp"
#include "perclab/percolation.hpp"

namespace perclab {

namespace {

constexpr int kCoordBias = 1 << 20;

std::uint64_t pack(int a, int b, int c) {
  return (static_cast<std::uint64_t>(a + kCoordBias) << 42) | (static_cast<std::uint64_t>(b + kCoordBias) << 21) |
         static_cast<std::uint64_t>(c + kCoordBias);
}

using Counts = std::unordered_map<std::uint64_t, std::size_t>;

// log v - (1/v) sum n log n
double entropy_of(const Counts& counts, std::size_t v) {
  double acc = 0.0;
  for (const auto& [key, n] : counts)
    if (n > 1) acc += static_cast<double>(n) * std::log(static_cast<double>(n));
  return std::log(static_cast<double>(v)) - acc / static_cast<double>(v);
}

// prod n^n; exp(-v H) = prod (n/v)^n = this / v^v
mpz_class power_product(const Counts& counts) {
  mpz_class out = 1, t;
  for (const auto& [key, n] : counts) {
    if (n < 2) continue;
    mpz_ui_pow_ui(t.get_mpz_t(), n, n);
    out *= t;
  }
  return out;
}

mpz_class pow_ui(std::size_t base, std::size_t e) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, e);
  return out;
}

}  // namespace

std::size_t EntropyReport::zeta_at_most(double t) const {
  std::size_t total = 0;
  for (const auto& [size, count] : zeta)
    if (size <= t) total += count;
  return total;
}

EntropyReport entropy_report(const HeightFunction& h, const std::vector<Point>& s) {
  if (s.empty()) throw std::invalid_argument("entropy_report: empty set");
  int x_hi = 0;
  for (const auto& p : s) {
    if (p[0] < 0) throw std::invalid_argument("entropy_report: point with x < 0");
    if (std::abs(p[0]) >= kCoordBias || std::abs(p[1]) >= kCoordBias || std::abs(p[2]) >= kCoordBias)
      throw std::invalid_argument("entropy_report: coordinate out of range");
    x_hi = std::max(x_hi, p[0]);
  }
  std::vector<int> height(static_cast<std::size_t>(x_hi) + 2);
  for (int x = 0; x <= x_hi + 1; ++x) height[x] = h.height(x);
  auto in_wedge = [&](int x, int z) { return x >= 0 && x <= x_hi + 1 && std::abs(z) <= height[x]; };

  std::unordered_set<std::uint64_t> members;
  members.reserve(s.size() * 2);
  Counts yz, xz, xy, z_only, xyz;
  for (const auto& p : s) {
    if (std::abs(p[2]) > height[p[0]]) throw std::invalid_argument("entropy_report: point outside the wedge");
    if (!members.insert(pack(p[0], p[1], p[2])).second)
      throw std::invalid_argument("entropy_report: repeated point");
    ++yz[pack(0, p[1], p[2])];
    ++xz[pack(p[0], 0, p[2])];
    ++xy[pack(p[0], p[1], 0)];
    ++z_only[pack(0, 0, p[2])];
    ++xyz[pack(p[0], p[1], p[2])];
  }

  EntropyReport r;
  r.v = s.size();
  static constexpr int kSteps[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (const auto& p : s)
    for (const auto& d : kSteps) {
      const int x = p[0] + d[0], y = p[1] + d[1], z = p[2] + d[2];
      if (in_wedge(x, z) && !members.count(pack(x, y, z))) ++r.w;
    }

  r.w_x = yz.size();
  r.w_y = xz.size();
  r.columns = xy.size();
  std::map<int, std::size_t> zeta;
  std::unordered_set<std::uint64_t> full_yz;
  for (const auto& p : s) {
    const std::size_t col = xy[pack(p[0], p[1], 0)];
    if (col == static_cast<std::size_t>(2 * height[p[0]] + 1)) {
      ++r.v_full;
      full_yz.insert(pack(0, p[1], p[2]));
    }
  }
  for (const auto& [key, n] : xy) {
    const int x = static_cast<int>(key >> 42) - kCoordBias;
    if (n != static_cast<std::size_t>(2 * height[x] + 1)) ++r.w_z;
    zeta[static_cast<int>(n)] += n;
  }
  r.zeta.assign(zeta.begin(), zeta.end());
  r.v_miss = r.v - r.v_full;

  const double v = static_cast<double>(r.v);
  r.H_xyz = entropy_of(xyz, r.v);
  r.H_yz = entropy_of(yz, r.v);
  r.H_xz = entropy_of(xz, r.v);
  r.H_xy = entropy_of(xy, r.v);
  r.H_z = entropy_of(z_only, r.v);
  r.k = v / static_cast<double>(r.w_x + r.w_z);
  r.nu = static_cast<double>(r.v_full) / v;
  r.rho = static_cast<double>(r.w_x) / static_cast<double>(r.w_x + r.w_z);
  if (r.w_z > 0) r.h_miss = static_cast<double>(r.v_miss) / static_cast<double>(r.w_z);
  if (!full_yz.empty()) r.k_full = static_cast<double>(r.v_full) / static_cast<double>(full_yz.size());

  auto& c = r.checks;
  c.boundary_decomposition = r.w >= r.w_x + 2 * r.w_y + r.w_z;
  c.xyz_is_log_v = xyz.size() == r.v && r.H_xyz == std::log(v);
  if (r.v <= kExactEntropyCap) {
    c.exact = true;
    const mpz_class p_yz = power_product(yz), p_xz = power_product(xz), p_xy = power_product(xy),
                    p_z = power_product(z_only);
    const mpz_class v_v = pow_ui(r.v, r.v);
    c.yz_support = v_v <= pow_ui(r.w_x, r.v) * p_yz;
    c.xz_support = v_v <= pow_ui(r.w_y, r.v) * p_xz;
    c.product_bound = pow_ui(r.w_x * r.w_y, r.v) * p_z >= v_v * v_v;
    c.shearer = p_yz * p_xz <= p_z;
    c.conditioning = p_z * p_xy <= v_v;
  } else {
    c.exact = false;
    const double eps = kEntropySlack;
    c.yz_support = r.H_yz <= std::log(static_cast<double>(r.w_x)) + eps;
    c.xz_support = r.H_xz <= std::log(static_cast<double>(r.w_y)) + eps;
    c.product_bound =
        std::log(static_cast<double>(r.w_x)) + std::log(static_cast<double>(r.w_y)) >= std::log(v) + r.H_z - eps;
    c.shearer = r.H_yz + r.H_xz >= r.H_xyz + r.H_z - eps;
    c.conditioning = r.H_z >= r.H_xyz - r.H_xy - eps;
  }
  return r;
}

EntropyReport entropy_report(const WedgeLattice& wedge, const VertexSet& s) {
  return entropy_report(wedge.height, s.points());
}

// ---------------------------------------------------------------------------

double psi_f(const HeightFunction& h, double v) {
  const double inner = h.value(std::sqrt(v));
  if (inner <= 0) return 0.0;
  return h.value(std::sqrt(v / inner));
}

PsiRecord psi_record(const HeightFunction& h, const EntropyReport& r) {
  PsiRecord out;
  out.v = r.v;
  out.w = r.w;
  out.k = r.k;
  out.ketto = r.w >= r.w_x + r.w_z;
  const double v = static_cast<double>(r.v), w = static_cast<double>(r.w);
  const double hk = h.value(r.k), fv = psi_f(h, v);
  out.egy_ratio = hk > 0 ? w / std::sqrt(hk * v) : std::numeric_limits<double>::infinity();
  out.psi_ratio = fv > 0 ? w / std::sqrt(v * fv) : std::numeric_limits<double>::infinity();
  out.hhk_gap = hk > 0 ? std::log(hk) - r.H_z : -std::numeric_limits<double>::infinity();
  return out;
}

PsiSummary psi_profile_check(const HeightFunction& h, const std::vector<EntropyReport>& reports,
                             std::vector<PsiRecord>* records) {
  PsiSummary sum;
  for (const auto& r : reports) {
    const auto rec = psi_record(h, r);
    ++sum.sets;
    if (!rec.ketto) ++sum.ketto_failures;
    sum.min_egy_ratio = std::min(sum.min_egy_ratio, rec.egy_ratio);
    sum.min_psi_ratio = std::min(sum.min_psi_ratio, rec.psi_ratio);
    sum.max_hhk_gap = std::max(sum.max_hhk_gap, rec.hhk_gap);
    if (records) records->push_back(rec);
  }
  return sum;
}

ZetaCheck zeta_concentration(const HeightFunction& h, const EntropyReport& r, double delta) {
  ZetaCheck z;
  z.delta = delta;
  z.threshold = h.value(delta * r.k);
  z.count = r.zeta_at_most(z.threshold);
  z.v = r.v;
  z.p = static_cast<double>(z.count) / static_cast<double>(z.v);
  z.ci = wilson_interval(z.count, z.v);
  z.within = z.ci.lo <= delta;
  return z;
}

// ---------------------------------------------------------------------------

std::string to_string(SeriesVerdict v) {
  switch (v) {
    case SeriesVerdict::converges:
      return "converges";
    case SeriesVerdict::diverges:
      return "diverges";
    case SeriesVerdict::undecided:
      return "undecided";
  }
  return "undecided";
}

LyonsSum lyons_sum(const HeightFunction& h, std::uint64_t terms, double witness) {
  if (terms == 0) throw std::invalid_argument("lyons_sum: need at least one term");
  LyonsSum out;
  out.terms = terms;
  double sum = 0.0, comp = 0.0;  // Kahan
  std::uint64_t next_mark = 1;
  for (std::uint64_t j = 1; j <= terms; ++j) {
    const double hj = h.value(static_cast<double>(j));
    if (!(hj > 0)) throw std::invalid_argument("lyons_sum: h(" + std::to_string(j) + ") <= 0");
    const double term = 1.0 / (static_cast<double>(j) * hj) - comp;
    const double t = sum + term;
    comp = (t - sum) - term;
    sum = t;
    if (j == next_mark || j == terms) {
      out.partial.emplace_back(j, sum);
      if (j == next_mark) next_mark *= 2;
    }
  }
  out.sum = sum;

  const double inf = std::numeric_limits<double>::infinity();
  const double J = static_cast<double>(terms);
  switch (h.family()) {
    case HeightFunction::Family::constant:
    case HeightFunction::Family::table:
      out.tail_lo = out.tail_hi = inf;
      break;
    case HeightFunction::Family::power: {
      const double a = h.param_alpha(), c = h.param_c();
      if (a <= 0) {
        out.tail_lo = out.tail_hi = inf;
      } else {
        out.tail_lo = std::pow(J + 1, -a) / (c * a);
        out.tail_hi = std::pow(J, -a) / (c * a);
      }
      break;
    }
    case HeightFunction::Family::log: {
      const double r = h.param_r(), s = h.param_shift();
      if (s < 0) throw std::invalid_argument("lyons_sum: negative log shift");
      if (r <= 1) {
        out.tail_lo = out.tail_hi = inf;
        break;
      }
      // 1/(x log^r(x+s)) lies between 1/(u log^r u) and (J+s)/J times it,
      // u = x + s; rounding moves h by at most a factor 2 once log^r >= 1
      double lo = std::pow(std::log(J + 1 + s), 1 - r) / (r - 1);
      double hi = (J + s) / J * std::pow(std::log(J + s), 1 - r) / (r - 1);
      if (h.rounding() == HeightFunction::Rounding::ceil) lo /= 2;
      if (h.rounding() == HeightFunction::Rounding::floor) hi *= 2;
      out.tail_lo = lo;
      out.tail_hi = hi;
      break;
    }
  }
  if (std::isfinite(out.tail_hi))
    out.verdict = SeriesVerdict::converges;
  else if (!std::isfinite(out.tail_lo) && out.sum >= witness)
    out.verdict = SeriesVerdict::diverges;
  return out;
}

// ---------------------------------------------------------------------------

ResistanceNetwork ResistanceNetwork::from_subgraph(const Subgraph& sub) {
  const Graph& g = sub.host();
  ResistanceNetwork net;
  net.n = g.num_vertices();
  for (EdgeId e = 0; e < static_cast<EdgeId>(g.num_edges()); ++e)
    if (sub.usable(e)) net.edges.emplace_back(g.edge(e).u, g.edge(e).v, 1.0);
  return net;
}

Resistance effective_resistance(const ResistanceNetwork& net, const std::vector<int>& a, const std::vector<int>& b,
                                double tolerance) {
  if (a.empty() || b.empty()) throw std::invalid_argument("effective_resistance: empty terminal set");
  const std::size_t n = net.n;
  // 0 unknown, 1 in A, 2 in B
  std::vector<std::uint8_t> role(n, 0);
  for (int v : a) {
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw std::invalid_argument("effective_resistance: bad vertex");
    role[v] = 1;
  }
  for (int v : b) {
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw std::invalid_argument("effective_resistance: bad vertex");
    if (role[v] == 1) throw std::invalid_argument("effective_resistance: A and B intersect");
    role[v] = 2;
  }

  std::vector<int> offsets(n + 1, 0);
  for (const auto& [u, v, c] : net.edges)
    if (u != v && c > 0) ++offsets[u + 1], ++offsets[v + 1];
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  std::vector<std::pair<int, double>> adj(offsets[n]);
  {
    std::vector<int> fill(offsets.begin(), offsets.end() - 1);
    for (const auto& [u, v, c] : net.edges)
      if (u != v && c > 0) adj[fill[u]++] = {v, c}, adj[fill[v]++] = {u, c};
  }

  // interior reachable from A without entering B
  std::vector<int> index(n, -1);
  std::vector<int> interior;
  bool reaches_b = false;
  std::deque<int> queue(a.begin(), a.end());
  std::vector<std::uint8_t> seen(n, 0);
  for (int v : a) seen[v] = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int k = offsets[v]; k < offsets[v + 1]; ++k) {
      const int u = adj[k].first;
      if (seen[u]) continue;
      seen[u] = 1;
      if (role[u] == 2) {
        reaches_b = true;
        continue;
      }
      index[u] = static_cast<int>(interior.size());
      interior.push_back(u);
      queue.push_back(u);
    }
  }
  Resistance res;
  res.interior = interior.size();
  if (!reaches_b) {
    res.connected = false;
    return res;
  }

  const auto m = static_cast<Eigen::Index>(interior.size());
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(m);
  if (m > 0) {
    Eigen::SparseMatrix<double> mat(m, m);
    Eigen::VectorXi per_col(m);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const int v = interior[i];
      int count = 1;
      for (int k = offsets[v]; k < offsets[v + 1]; ++k) count += index[adj[k].first] >= 0;
      per_col[i] = count;
    }
    mat.reserve(per_col);
    for (Eigen::Index i = 0; i < m; ++i) {
      const int v = interior[i];
      double diag = 0.0;
      for (int k = offsets[v]; k < offsets[v + 1]; ++k) {
        const auto [u, c] = adj[k];
        diag += c;
        if (index[u] >= 0)
          mat.insert(index[u], i) = -c;
        else if (role[u] == 1)
          rhs[i] += c;
      }
      mat.insert(i, i) = diag;
    }
    mat.makeCompressed();
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(tolerance);
    cg.setMaxIterations(std::max<Eigen::Index>(1000, 4 * m));
    cg.compute(mat);
    phi = cg.solve(rhs);
    res.iterations = static_cast<int>(cg.iterations());
    const double norm = rhs.norm();
    res.residual = norm > 0 ? (rhs - mat * phi).norm() / norm : 0.0;
    res.converged = cg.info() == Eigen::Success || res.residual <= tolerance;
  }
  auto potential = [&](int u) { return role[u] == 1 ? 1.0 : index[u] >= 0 ? phi[index[u]] : 0.0; };
  for (int v : a)
    for (int k = offsets[v]; k < offsets[v + 1]; ++k)
      if (role[adj[k].first] != 1) res.current += adj[k].second * (1.0 - potential(adj[k].first));
  for (int v : b)
    for (int k = offsets[v]; k < offsets[v + 1]; ++k)
      if (role[adj[k].first] != 2) res.current_b += adj[k].second * potential(adj[k].first);
  res.r_eff = 1.0 / res.current;
  return res;
}

Resistance effective_resistance(const Subgraph& sub, const VertexSet& a, const VertexSet& b, double tolerance) {
  const auto net = ResistanceNetwork::from_subgraph(sub);
  const std::vector<int> av(a.ids().begin(), a.ids().end()), bv(b.ids().begin(), b.ids().end());
  return effective_resistance(net, av, bv, tolerance);
}

WedgeNetwork wedge_network(const HeightFunction& h, int x_shell, int y_max, bool fold) {
  if (x_shell < 1 || y_max < 0) throw std::invalid_argument("wedge_network: need x_shell >= 1, y_max >= 0");
  std::vector<int> height(x_shell + 1);
  for (int x = 0; x <= x_shell; ++x) {
    height[x] = h.height(x);
    if (height[x] < 0 || (x > 0 && height[x] < height[x - 1]))
      throw std::invalid_argument("wedge_network: height must be nonnegative and nondecreasing");
  }
  const int y_lo = fold ? 0 : -y_max;
  const int ny = y_max - y_lo + 1;
  auto z_lo = [&](int x) { return fold ? 0 : -height[x]; };
  auto nz = [&](int x) { return height[x] - z_lo(x) + 1; };
  std::vector<std::int64_t> offset(x_shell + 2, 0);
  for (int x = 0; x <= x_shell; ++x) offset[x + 1] = offset[x] + static_cast<std::int64_t>(ny) * nz(x);
  if (offset[x_shell + 1] > std::numeric_limits<int>::max())
    throw std::invalid_argument("wedge_network: too many vertices");
  auto id = [&](int x, int y, int z) {
    return static_cast<int>(offset[x] + static_cast<std::int64_t>(y - y_lo) * nz(x) + (z - z_lo(x)));
  };
  // multiplicity of a folded edge: 2 for the coordinate that moves, else 2
  // off the mirror plane and 1 on it
  auto mult = [&](int c) { return fold && c != 0 ? 2.0 : 1.0; };
  const double moved = fold ? 2.0 : 1.0;

  WedgeNetwork out;
  out.net.n = static_cast<std::size_t>(offset[x_shell + 1]);
  out.net.edges.reserve(out.net.n * 3);
  for (int x = 0; x <= x_shell; ++x)
    for (int y = y_lo; y <= y_max; ++y)
      for (int z = z_lo(x); z <= height[x]; ++z) {
        const int v = id(x, y, z);
        if (x < x_shell) out.net.edges.emplace_back(v, id(x + 1, y, z), mult(y) * mult(z));
        if (y < y_max) out.net.edges.emplace_back(v, id(x, y + 1, z), moved * mult(z));
        if (z < height[x]) out.net.edges.emplace_back(v, id(x, y, z + 1), mult(y) * moved);
        if (x == x_shell) out.shell.push_back(v);
      }
  out.origin = id(0, 0, 0);
  return out;
}

std::vector<WedgeResistance> wedge_resistance_profile(const HeightFunction& h, const std::vector<int>& radii,
                                                      int y_max, double tolerance, bool fold) {
  std::vector<WedgeResistance> out;
  for (int radius : radii) {
    const auto w = wedge_network(h, radius, y_max, fold);
    WedgeResistance r;
    r.radius = radius;
    r.vertices = w.net.n;
    r.r = effective_resistance(w.net, {w.origin}, w.shell, tolerance);
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// Is o joined to the window boundary when the edges marked in `cut` are removed?
bool reaches_window(const Graph& g, VertexId o, const std::vector<std::uint8_t>& cut) {
  std::vector<std::uint8_t> seen(g.num_vertices(), 0);
  std::vector<VertexId> stack{o};
  seen[o] = 1;
  while (!stack.empty()) {
    const VertexId v = stack.back();
    stack.pop_back();
    if (g.on_window_boundary(v)) return true;
    for (const auto& inc : g.incident(v)) {
      if (cut[inc.edge] || seen[inc.to]) continue;
      seen[inc.to] = 1;
      stack.push_back(inc.to);
    }
  }
  return false;
}

}  // namespace

CutsetCensus cutset_census(const Graph& g, VertexId o, int n_max, std::size_t max_set_size) {
  if (n_max < 1 || n_max > kCutsetSizeCap)
    throw std::invalid_argument("cutset_census: n_max must be in [1, " + std::to_string(kCutsetSizeCap) + "]");
  if (g.on_window_boundary(o)) throw std::invalid_argument("cutset_census: o lies on the window boundary");
  if (max_set_size == 0) {
    const auto& d = g.descriptor();
    if (d.kind != LatticeDescriptor::Kind::box || d.adjacency != Adjacency::l1)
      throw std::invalid_argument("cutset_census: max_set_size is required outside l1 boxes");
    // |boundary| >= 2d |S|^{(d-1)/d} on Z^d
    const double dim = g.dim();
    max_set_size = static_cast<std::size_t>(std::floor(std::pow(n_max / (2.0 * dim), dim / (dim - 1)) + 1e-9));
    max_set_size = std::max<std::size_t>(max_set_size, 1);
  }
  if (max_set_size > kExactEnumerationCap)
    throw std::invalid_argument("cutset_census: set size cap exceeded");

  CutsetCensus out;
  out.n_max = n_max;
  out.max_set_size = max_set_size;
  out.q.assign(n_max + 1, 0);
  const Subgraph sub = Subgraph::full(g);
  FrontierCounter counter(sub);
  std::set<std::vector<EdgeId>> cutsets;
  out.sets_enumerated = enumerate_anchored_sets(sub, o, max_set_size, [&](const std::vector<VertexId>& s) {
    for (VertexId v : s)
      if (g.on_window_boundary(v)) return;
    if (counter(s).frontier > static_cast<std::size_t>(n_max)) return;
    cutsets.insert(edge_frontier(VertexSet(g, s), sub));
  });

  std::vector<std::uint8_t> cut(g.num_edges(), 0);
  for (const auto& c : cutsets) {
    for (EdgeId e : c) cut[e] = 1;
    bool minimal = !reaches_window(g, o, cut);
    for (std::size_t i = 0; minimal && i < c.size(); ++i) {
      cut[c[i]] = 0;
      minimal = reaches_window(g, o, cut);
      cut[c[i]] = 1;
    }
    for (EdgeId e : c) cut[e] = 0;
    if (minimal)
      ++out.q[c.size()];
    else
      ++out.non_minimal;
  }
  for (int n = 1; n <= n_max; ++n)
    if (out.q[n] > 0) out.kappa_estimate = std::max(out.kappa_estimate, std::pow(static_cast<double>(out.q[n]), 1.0 / n));
  out.peierls_bound = out.kappa_estimate > 0 ? 1.0 - 1.0 / out.kappa_estimate : 0.0;
  return out;
}

std::vector<PeierlsCheck> peierls_check(const Graph& g, VertexId o, const CutsetCensus& census, double p,
                                        std::uint64_t trials, std::uint64_t seed, unsigned workers) {
  const int n_max = census.n_max;
  std::vector<double> index(n_max + 1);
  for (int n = 0; n <= n_max; ++n) index[n] = n;
  const Subgraph sub = Subgraph::full(g);
  std::mutex pool_mutex;
  std::vector<std::unique_ptr<FrontierCounter>> pool;
  const auto rows = estimate_event(
      index,
      [&](std::uint64_t trial, std::vector<std::uint8_t>& hits) {
        const auto c = explore_cluster(g, p, seed, trial, o, g.num_vertices());
        if (c.touches_boundary) return;
        std::unique_ptr<FrontierCounter> counter;
        {
          std::lock_guard lock(pool_mutex);
          if (!pool.empty()) counter = std::move(pool.back()), pool.pop_back();
        }
        if (!counter) counter = std::make_unique<FrontierCounter>(sub);
        const auto f = (*counter)(c.vertices).frontier;
        {
          std::lock_guard lock(pool_mutex);
          pool.push_back(std::move(counter));
        }
        if (f <= static_cast<std::size_t>(n_max)) hits[f] = 1;
      },
      0, trials, workers);
  std::vector<PeierlsCheck> out;
  for (int n = 0; n <= n_max; ++n) {
    PeierlsCheck pc;
    pc.n = n;
    pc.trials = rows[n].trials;
    pc.hits = rows[n].successes;
    pc.p_hat = rows[n].p_hat;
    pc.bound = static_cast<double>(census.q[n]) * std::pow(1.0 - p, n);
    pc.sigma = pc.bound < 1 ? std::sqrt(pc.bound * (1 - pc.bound) / static_cast<double>(trials)) : 0.0;
    pc.within = pc.p_hat <= pc.bound + 3 * pc.sigma;
    out.push_back(pc);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string entropy_csv_header() { return "set,v,w,w_x,w_y,w_z,H_xyz,H_xz,H_yz,H_z,k,nu,rho,exact,checks_ok"; }

std::string entropy_csv_row(std::uint64_t set_index, const EntropyReport& r) {
  std::ostringstream out;
  out << std::setprecision(17) << set_index << ',' << r.v << ',' << r.w << ',' << r.w_x << ',' << r.w_y << ','
      << r.w_z << ',' << r.H_xyz << ',' << r.H_xz << ',' << r.H_yz << ',' << r.H_z << ',' << r.k << ',' << r.nu
      << ',' << r.rho << ',' << (r.checks.exact ? 1 : 0) << ',' << (r.checks.all() ? 1 : 0);
  return out.str();
}

std::string resistance_csv_header() { return "R,R_eff,residual"; }

std::string resistance_csv_row(const WedgeResistance& r) {
  std::ostringstream out;
  out << std::setprecision(17) << r.radius << ',' << r.r.r_eff << ',' << r.r.residual;
  return out.str();
}

std::string census_csv_header() { return "n,q_n"; }

std::string census_csv(const CutsetCensus& c) {
  std::ostringstream out;
  out << census_csv_header() << '\n';
  for (int n = 0; n <= c.n_max; ++n) out << n << ',' << c.q[n] << '\n';
  return out.str();
}

}  // namespace perclab

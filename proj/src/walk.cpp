#include "perclab/walk.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace perclab {

WalkOperator::WalkOperator(const Subgraph& sub, VertexId root, double laziness) : laziness_(laziness) {
  if (laziness < 0.0 || laziness >= 1.0) throw std::invalid_argument("laziness must lie in [0, 1)");
  const Graph& g = sub.host();
  if (!sub.has_vertex(root)) throw std::invalid_argument("root is not a vertex of the subgraph");
  local_index_.assign(g.num_vertices(), -1);
  global_.push_back(root);
  local_index_[root] = 0;
  for (std::size_t h = 0; h < global_.size(); ++h)
    for (const auto& inc : g.incident(global_[h]))
      if (sub.usable(inc.edge) && local_index_[inc.to] < 0) {
        local_index_[inc.to] = static_cast<std::int64_t>(global_.size());
        global_.push_back(inc.to);
      }
  offsets_.assign(global_.size() + 1, 0);
  for (std::size_t i = 0; i < global_.size(); ++i) {
    for (const auto& inc : g.incident(global_[i]))
      if (sub.usable(inc.edge)) neighbors_.push_back(static_cast<std::int32_t>(local_index_[inc.to]));
    offsets_[i + 1] = static_cast<int>(neighbors_.size());
  }
}

WalkOperator WalkOperator::from_edges(std::size_t n, const std::vector<std::pair<int, int>>& edges, double laziness) {
  if (laziness < 0.0 || laziness >= 1.0) throw std::invalid_argument("laziness must lie in [0, 1)");
  WalkOperator op;
  op.laziness_ = laziness;
  std::vector<std::vector<std::int32_t>> adj(n);
  for (const auto& [a, b] : edges) {
    if (a == b || a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n)
      throw std::invalid_argument("bad edge");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  op.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    if (std::adjacent_find(adj[i].begin(), adj[i].end()) != adj[i].end())
      throw std::invalid_argument("repeated edge");
    op.neighbors_.insert(op.neighbors_.end(), adj[i].begin(), adj[i].end());
    op.offsets_[i + 1] = static_cast<int>(op.neighbors_.size());
  }
  return op;
}

std::optional<std::size_t> WalkOperator::local(VertexId v) const {
  if (global_.empty()) {
    if (v < 0 || static_cast<std::size_t>(v) >= size()) return std::nullopt;
    return static_cast<std::size_t>(v);
  }
  if (v < 0 || static_cast<std::size_t>(v) >= local_index_.size() || local_index_[v] < 0) return std::nullopt;
  return static_cast<std::size_t>(local_index_[v]);
}

void WalkOperator::step(const std::vector<double>& mu, std::vector<double>& out) const {
  const std::size_t n = size();
  out.assign(n, 0.0);
  const double move = 1.0 - laziness_;
  for (std::size_t y = 0; y < n; ++y) {
    const int dy = degree(y);
    if (dy == 0) {
      out[y] = mu[y];
      continue;
    }
    double acc = 0.0;
    for (int k = offsets_[y]; k < offsets_[y + 1]; ++k) {
      const auto x = static_cast<std::size_t>(neighbors_[k]);
      acc += mu[x] / degree(x);
    }
    out[y] = laziness_ * mu[y] + move * acc;
  }
}

double WalkOperator::transition(std::size_t i, std::size_t j) const {
  const int di = degree(i);
  if (di == 0) return i == j ? 1.0 : 0.0;
  double p = i == j ? laziness_ : 0.0;
  for (int k = offsets_[i]; k < offsets_[i + 1]; ++k)
    if (static_cast<std::size_t>(neighbors_[k]) == j) p += (1.0 - laziness_) / di;
  return p;
}

std::vector<double> WalkOperator::stationary() const {
  std::vector<double> pi(size());
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) total += pi[i] = std::max(1, degree(i));
  for (double& x : pi) x /= total;
  return pi;
}

void WalkOperator::apply_symmetric(const std::vector<double>& x, std::vector<double>& out) const {
  const std::size_t n = size();
  out.assign(n, 0.0);
  const double move = 1.0 - laziness_;
  for (std::size_t y = 0; y < n; ++y) {
    const int dy = degree(y);
    if (dy == 0) {
      out[y] = x[y];
      continue;
    }
    double acc = 0.0;
    for (int k = offsets_[y]; k < offsets_[y + 1]; ++k) {
      const auto z = static_cast<std::size_t>(neighbors_[k]);
      acc += x[z] / std::sqrt(static_cast<double>(degree(z)));
    }
    out[y] = laziness_ * x[y] + move * acc / std::sqrt(static_cast<double>(dy));
  }
}

HeatKernel heat_kernel_at_origin(const WalkOperator& op, std::size_t o, int n_max) {
  HeatKernel hk;
  if (o >= op.size()) {
    hk.diagnostic = "origin is not in the walk's component";
    return hk;
  }
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  std::vector<double> mu(op.size(), 0.0), next;
  mu[o] = 1.0;
  hk.p.push_back(1.0);
  for (int n = 1; n <= n_max; ++n) {
    op.step(mu, next);
    mu.swap(next);
    const double mass = std::accumulate(mu.begin(), mu.end(), 0.0);
    hk.max_mass_error = std::max(hk.max_mass_error, std::abs(mass - 1.0));
    hk.p.push_back(mu[o]);
  }
  if (op.laziness() >= 0.5)
    for (std::size_t n = 1; n < hk.p.size(); ++n)
      if (hk.p[n] > hk.p[n - 1] * (1.0 + 1e-12)) hk.non_increasing = false;
  return hk;
}

LinearFit decay_exponent(const std::vector<double>& p, int n_lo, int n_hi) {
  if (n_lo < 1 || n_hi < n_lo || static_cast<std::size_t>(n_hi) >= p.size())
    throw std::invalid_argument("fit window outside the sequence");
  std::vector<std::pair<double, double>> pts;
  for (int n = n_lo; n <= n_hi; ++n) {
    if (!(p[n] > 0.0)) throw std::invalid_argument("nonpositive return probability at n=" + std::to_string(n));
    pts.emplace_back(std::log(static_cast<double>(n)), std::log(p[n]));
  }
  auto fit = rate_fit(pts);
  fit.x_lo = n_lo;
  fit.x_hi = n_hi;
  return fit;
}

namespace {

using Vec = Eigen::VectorXd;

Vec top_vector(const WalkOperator& op) {
  Vec phi(op.size());
  for (std::size_t i = 0; i < op.size(); ++i) phi[i] = std::sqrt(static_cast<double>(std::max(1, op.degree(i))));
  return phi.normalized();
}

Vec apply_s(const WalkOperator& op, const Vec& x) {
  std::vector<double> in(x.data(), x.data() + x.size()), out;
  op.apply_symmetric(in, out);
  return Eigen::Map<Vec>(out.data(), static_cast<Eigen::Index>(out.size()));
}

void finish(const WalkOperator& op, const Vec& v, double lambda, SpectralGap& out) {
  out.lambda2 = lambda;
  out.gap = 1.0 - lambda;
  out.relaxation_time = 1.0 / out.gap;
  out.residual = (apply_s(op, v) - lambda * v).norm();
  out.certified = out.residual <= kSpectralTolerance;
  out.f2.resize(op.size());
  for (std::size_t i = 0; i < op.size(); ++i)
    out.f2[i] = v[static_cast<Eigen::Index>(i)] / std::sqrt(static_cast<double>(std::max(1, op.degree(i))));
}

SpectralGap power_gap(const WalkOperator& op) {
  const Vec phi = top_vector(op);
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal;
  Vec v(op.size());
  for (auto& x : v) x = normal(rng);
  v -= phi.dot(v) * phi;
  v.normalize();
  SpectralGap out;
  out.method = SpectralMethod::power;
  const int max_iter = 2000000;
  double lambda = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Vec sv = apply_s(op, v);
    lambda = v.dot(sv);
    out.iterations = it;
    if ((sv - lambda * v).norm() <= kSpectralTolerance * 0.5) break;
    Vec w = 0.5 * (sv + v);
    w -= phi.dot(w) * phi;
    v = w.normalized();
  }
  finish(op, v, lambda, out);
  return out;
}

SpectralGap shift_invert_gap(const WalkOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.size());
  const Vec phi = top_vector(op);
  // L = I - S with a small shift; on the complement of phi its smallest
  // eigenvalue is the gap, i.e. the largest eigenvalue of the inverse.
  const double shift = 1e-8;
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t y = 0; y < op.size(); ++y) {
    const int dy = op.degree(y);
    const auto iy = static_cast<int>(y);
    trip.emplace_back(iy, iy, (dy == 0 ? 0.0 : 1.0 - op.laziness()) + shift);
    for (std::int32_t z : op.neighbors(y))
      trip.emplace_back(iy, z, -(1.0 - op.laziness()) / std::sqrt(static_cast<double>(dy) * op.degree(z)));
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(m);
  if (solver.info() != Eigen::Success) throw std::runtime_error("sparse factorisation failed");

  const Eigen::Index k = std::min<Eigen::Index>(8, n - 1);
  std::mt19937_64 rng(54321);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd v(n, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < n; ++i) v(i, j) = normal(rng);
  auto orthonormalise = [&](Eigen::MatrixXd& w) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) w.col(j) -= phi.dot(w.col(j)) * phi;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(w);
    w = qr.householderQ() * Eigen::MatrixXd::Identity(n, w.cols());
    for (Eigen::Index j = 0; j < w.cols(); ++j) w.col(j) -= phi.dot(w.col(j)) * phi;
  };
  orthonormalise(v);
  SpectralGap out;
  out.method = SpectralMethod::shift_invert;
  Vec best;
  double lambda = 0.0;
  for (int it = 1; it <= 500; ++it) {
    Eigen::MatrixXd w(n, k);
    for (Eigen::Index j = 0; j < k; ++j) w.col(j) = solver.solve(Vec(v.col(j)));
    orthonormalise(w);
    Eigen::MatrixXd sw(n, k);
    for (Eigen::Index j = 0; j < k; ++j) sw.col(j) = apply_s(op, Vec(w.col(j)));
    Eigen::MatrixXd h = w.transpose() * sw;
    h = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    // eigenvalues ascend; Ritz vectors sorted by decreasing eigenvalue
    v = w * eig.eigenvectors().rowwise().reverse();
    lambda = eig.eigenvalues()[k - 1];
    best = v.col(0).normalized();
    out.iterations = it;
    if ((apply_s(op, best) - lambda * best).norm() <= 0.1 * kSpectralTolerance) break;
  }
  finish(op, best, lambda, out);
  return out;
}

}  // namespace

SpectralGap spectral_gap(const WalkOperator& op, SpectralMethod method) {
  if (op.size() > kSpectralSizeCap)
    throw std::invalid_argument("spectral computation is capped at " + std::to_string(kSpectralSizeCap) +
                                " vertices");
  if (op.size() < 2) throw std::invalid_argument("spectral gap needs at least two vertices");
  if (method == SpectralMethod::automatic)
    method = op.size() <= 400 ? SpectralMethod::power : SpectralMethod::shift_invert;
  return method == SpectralMethod::power ? power_gap(op) : shift_invert_gap(op);
}

double linfty_distance(const WalkOperator& op, std::size_t start, int n) {
  const auto pi = op.stationary();
  std::vector<double> mu(op.size(), 0.0), next;
  mu[start] = 1.0;
  for (int k = 0; k < n; ++k) {
    op.step(mu, next);
    mu.swap(next);
  }
  double d = 0.0;
  for (std::size_t y = 0; y < op.size(); ++y) d = std::max(d, std::abs(mu[y] / pi[y] - 1.0));
  return d;
}

namespace {

struct StartStates {
  std::vector<std::vector<double>> mu;
  int time = 0;
};

void advance(const WalkOperator& op, StartStates& s, int steps) {
  std::vector<double> next;
  for (auto& m : s.mu)
    for (int k = 0; k < steps; ++k) {
      op.step(m, next);
      m.swap(next);
    }
  s.time += steps;
}

std::pair<double, std::size_t> worst(const StartStates& s, const std::vector<double>& pi) {
  double d = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < s.mu.size(); ++i)
    for (std::size_t y = 0; y < pi.size(); ++y) {
      const double e = std::abs(s.mu[i][y] / pi[y] - 1.0);
      if (e > d) {
        d = e;
        arg = i;
      }
    }
  return {d, arg};
}

}  // namespace

MixingResult linfty_mixing(const WalkOperator& op, double eps, std::size_t random_starts, std::uint64_t seed) {
  if (op.size() > kSpectralSizeCap)
    throw std::invalid_argument("mixing computation is capped at " + std::to_string(kSpectralSizeCap) + " vertices");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  std::vector<std::size_t> starts;
  if (op.size() >= 2) {
    const auto gap = spectral_gap(op);
    const auto [lo, hi] = std::minmax_element(gap.f2.begin(), gap.f2.end());
    starts.push_back(static_cast<std::size_t>(hi - gap.f2.begin()));
    starts.push_back(static_cast<std::size_t>(lo - gap.f2.begin()));
  } else {
    starts.push_back(0);
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, op.size() - 1);
  for (std::size_t k = 0; k < random_starts; ++k) starts.push_back(pick(rng));
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());

  const auto pi = op.stationary();
  StartStates lo;
  for (std::size_t x : starts) {
    lo.mu.emplace_back(op.size(), 0.0);
    lo.mu.back()[x] = 1.0;
  }
  MixingResult out;
  out.starts = starts.size();
  if (worst(lo, pi).first <= eps) return out;
  // doubling: lo is not mixed, hi is
  StartStates hi = lo;
  for (;;) {
    advance(op, hi, hi.time == 0 ? 1 : hi.time);
    if (worst(hi, pi).first <= eps) break;
    lo = hi;
    if (hi.time > (1 << 26)) throw std::runtime_error("walk does not mix within 2^26 steps");
  }
  while (hi.time - lo.time > 1) {
    StartStates mid = lo;
    advance(op, mid, (hi.time - lo.time) / 2);
    if (worst(mid, pi).first <= eps)
      hi = std::move(mid);
    else
      lo = std::move(mid);
  }
  out.time = hi.time;
  out.distance = worst(hi, pi).first;
  out.worst_start = starts[worst(lo, pi).second];
  return out;
}

std::vector<std::size_t> simulate_walk(const WalkOperator& op, std::size_t start, int steps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> path{start};
  std::size_t x = start;
  for (int k = 0; k < steps; ++k) {
    const int d = op.degree(x);
    if (d > 0 && unit(rng) >= op.laziness()) {
      std::uniform_int_distribution<int> pick(0, d - 1);
      x = static_cast<std::size_t>(op.neighbors(x)[static_cast<std::size_t>(pick(rng))]);
    }
    path.push_back(x);
  }
  return path;
}

std::string heat_kernel_csv_header() { return "n,p_n"; }

std::string heat_kernel_csv(const HeatKernel& hk) {
  std::ostringstream out;
  out << heat_kernel_csv_header() << '\n' << std::setprecision(17);
  for (std::size_t n = 0; n < hk.p.size(); ++n) out << n << ',' << hk.p[n] << '\n';
  return out.str();
}

}  // namespace perclab

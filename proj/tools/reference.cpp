#include "reference.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace reference {

namespace {

using Cell = std::pair<int, int>;
using Animal = std::set<Cell>;

constexpr int kDx[4] = {1, -1, 0, 0};
constexpr int kDy[4] = {0, 0, 1, -1};

// All connected sets containing (0,0), grouped by size, with every cell
// accepted by `allowed`.
std::vector<std::set<Animal>> grow(int k_max, const std::function<bool(Cell)>& allowed) {
  std::vector<std::set<Animal>> by_size(k_max + 1);
  if (k_max >= 1 && allowed({0, 0})) by_size[1].insert(Animal{{0, 0}});
  for (int k = 1; k < k_max; ++k)
    for (const auto& a : by_size[k])
      for (const auto& [x, y] : a)
        for (int i = 0; i < 4; ++i) {
          const Cell c{x + kDx[i], y + kDy[i]};
          if (a.count(c) || !allowed(c)) continue;
          Animal b = a;
          b.insert(c);
          by_size[k + 1].insert(std::move(b));
        }
  return by_size;
}

// Cells enclosed by the animal, flood filled from outside its bounding box.
Animal fill_holes(const Animal& a) {
  int x0 = 0, x1 = 0, y0 = 0, y1 = 0;
  for (const auto& [x, y] : a) {
    x0 = std::min(x0, x), x1 = std::max(x1, x);
    y0 = std::min(y0, y), y1 = std::max(y1, y);
  }
  --x0, --y0, ++x1, ++y1;
  std::set<Cell> outside{{x0, y0}};
  std::vector<Cell> stack{{x0, y0}};
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    for (int i = 0; i < 4; ++i) {
      const Cell c{x + kDx[i], y + kDy[i]};
      if (c.first < x0 || c.first > x1 || c.second < y0 || c.second > y1) continue;
      if (a.count(c) || outside.count(c)) continue;
      outside.insert(c);
      stack.push_back(c);
    }
  }
  Animal filled;
  for (int x = x0; x <= x1; ++x)
    for (int y = y0; y <= y1; ++y)
      if (!outside.count({x, y})) filled.insert({x, y});
  return filled;
}

int boundary(const Animal& a) {
  int b = 0;
  for (const auto& [x, y] : a)
    for (int i = 0; i < 4; ++i) b += a.count({x + kDx[i], y + kDy[i]}) ? 0 : 1;
  return b;
}

}  // namespace

std::vector<AnimalRow> anchored_animals(int k_max) {
  if (k_max < 1 || k_max > 10) throw std::invalid_argument("k_max must lie in [1, 10]");
  const auto by_size = grow(k_max, [](Cell) { return true; });
  std::vector<AnimalRow> out;
  for (int k = 1; k <= k_max; ++k) {
    AnimalRow row{k, by_size[k].size(), 1 << 30, 0};
    for (const auto& a : by_size[k]) row.min_frontier = std::min(row.min_frontier, boundary(fill_holes(a)));
    row.min_ratio = row.min_frontier / std::sqrt(static_cast<double>(k));
    out.push_back(row);
  }
  return out;
}

std::vector<std::uint64_t> cutset_counts(int half, int n_max) {
  if (half < 1 || n_max < 0 || n_max > 16) throw std::invalid_argument("bad census size");
  // A k-cell set of Z^2 has edge boundary at least 4 sqrt(k).
  const int k_max = static_cast<int>(std::floor((n_max / 4.0) * (n_max / 4.0)));
  std::vector<std::uint64_t> q(n_max + 1, 0);
  if (k_max < 1) return q;
  const auto by_size = grow(k_max, [half](Cell c) { return std::abs(c.first) < half && std::abs(c.second) < half; });
  for (int k = 1; k <= k_max; ++k)
    for (const auto& a : by_size[k]) {
      if (fill_holes(a) != a) continue;
      const int b = boundary(a);
      if (b <= n_max) ++q[b];
    }
  return q;
}

std::vector<double> lazy_return_z2(int n_max) {
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  // Non-lazy: p_{2m} = (C(2m, m) / 4^m)^2. Lazy: binomial mixture over the
  // number of moves.
  auto log_choose = [](int n, int k) {
    return std::lgamma(n + 1.0L) - std::lgamma(k + 1.0L) - std::lgamma(n - k + 1.0L);
  };
  std::vector<double> out(n_max + 1, 0.0);
  for (int n = 0; n <= n_max; ++n) {
    long double sum = 0;
    for (int k = 0; k <= n; k += 2) {
      const int m = k / 2;
      const long double q = 2 * (log_choose(k, m) - k * std::log(2.0L));
      sum += std::exp(log_choose(n, k) - n * std::log(2.0L) + q);
    }
    out[n] = static_cast<double>(sum);
  }
  return out;
}

BoxCounts box_counts(int d, int n, bool star) {
  if (d < 1 || d > 4 || n < 0) throw std::invalid_argument("bad box");
  BoxCounts c{d, n, star, 1, 0, 0};
  const std::uint64_t side = 2 * static_cast<std::uint64_t>(n) + 1;
  std::uint64_t inner = 1;
  for (int i = 0; i < d; ++i) {
    c.vertices *= side;
    inner *= n >= 1 ? side - 2 : 0;
  }
  c.boundary = c.vertices - inner;
  // Offsets v in {-1,0,1}^d up to sign; each contributes prod (side - |v_i|) pairs.
  int total = 1;
  for (int i = 0; i < d; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    int rest = code, nonzero = 0, first = 0;
    std::uint64_t pairs = 1;
    for (int i = 0; i < d; ++i) {
      const int v = rest % 3 - 1;
      rest /= 3;
      if (v != 0 && first == 0) first = v;
      nonzero += v != 0;
      pairs *= side - (v != 0);
    }
    if (nonzero == 0 || first < 0) continue;
    if (!star && nonzero > 1) continue;
    c.edges += pairs;
  }
  return c;
}

std::vector<std::string> table_names() { return {"polyomino", "cutset", "heat-kernel", "lattice"}; }

std::string table_csv(const std::string& name) {
  std::ostringstream out;
  out << std::setprecision(17);
  if (name == "polyomino") {
    out << "k,anchored_sets,min_frontier,min_ratio\n";
    for (const auto& r : anchored_animals(8)) out << r.k << ',' << r.count << ',' << r.min_frontier << ',' << r.min_ratio << '\n';
  } else if (name == "cutset") {
    out << "n,q_n\n";
    const auto q = cutset_counts(5, 10);
    for (std::size_t n = 0; n < q.size(); ++n) out << n << ',' << q[n] << '\n';
  } else if (name == "heat-kernel") {
    out << "n,p_n\n";
    const auto p = lazy_return_z2(1000);
    for (std::size_t n = 0; n < p.size(); ++n) out << n << ',' << p[n] << '\n';
  } else if (name == "lattice") {
    out << "d,n,adjacency,vertices,edges,boundary\n";
    for (int d : {2, 3})
      for (int n = 1; n <= 4; ++n)
        for (bool star : {false, true}) {
          const auto c = box_counts(d, n, star);
          out << d << ',' << n << ',' << (star ? "linf" : "l1") << ',' << c.vertices << ',' << c.edges << ','
              << c.boundary << '\n';
        }
  } else {
    throw std::invalid_argument("unknown oracle '" + name + "'");
  }
  return out.str();
}

}  // namespace reference

#include "perclab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace perclab {

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  if (successes > trials) throw std::invalid_argument("more successes than trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  Interval out{std::max(0.0, center - half), std::min(1.0, center + half)};
  // keep the point estimate inside despite rounding
  out.lo = std::min(out.lo, p);
  out.hi = std::max(out.hi, p);
  return out;
}

LinearFit rate_fit(const std::vector<std::pair<double, double>>& points,
                   std::optional<std::pair<double, double>> window) {
  std::vector<std::pair<double, double>> use;
  for (const auto& [x, y] : points) {
    if (window && (x < window->first || x > window->second)) continue;
    if (!std::isfinite(x) || !std::isfinite(y)) throw std::invalid_argument("non-finite point in rate fit");
    use.emplace_back(x, y);
  }
  if (use.size() < 2) throw std::invalid_argument("rate fit needs at least two points");
  const double n = static_cast<double>(use.size());
  double mx = 0, my = 0;
  for (const auto& [x, y] : use) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : use) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("rate fit needs two distinct index values");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = use.size();
  if (use.size() > 2) {
    double sse = 0;
    for (const auto& [x, y] : use) {
      const double r = y - (fit.intercept + fit.slope * x);
      sse += r * r;
    }
    fit.stderr_slope = std::sqrt(sse / (n - 2.0) / sxx);
  }
  fit.x_lo = use.front().first;
  fit.x_hi = use.front().first;
  for (const auto& pt : use) {
    fit.x_lo = std::min(fit.x_lo, pt.first);
    fit.x_hi = std::max(fit.x_hi, pt.first);
  }
  return fit;
}

TailEstimate make_estimate(double index, std::uint64_t successes, std::uint64_t trials) {
  TailEstimate e;
  e.index = index;
  e.trials = trials;
  e.successes = successes;
  e.p_hat = trials ? static_cast<double>(successes) / static_cast<double>(trials) : 0.0;
  e.ci = wilson_interval(successes, trials);
  return e;
}

std::optional<LinearFit> tail_slope(const std::vector<TailEstimate>& rows,
                                    std::optional<std::pair<double, double>> window) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (r.successes == 0) continue;
    if (window && (r.index < window->first || r.index > window->second)) continue;
    pts.emplace_back(r.index, std::log(r.p_hat));
  }
  if (pts.size() < 4) return std::nullopt;
  return rate_fit(pts);
}

std::vector<TailEstimate> estimate_event(const std::vector<double>& index, const IndexedEvent& event,
                                         std::uint64_t first_trial, std::uint64_t trials, unsigned workers) {
  workers = std::max(1u, workers);
  const std::size_t k = index.size();
  std::vector<std::vector<std::uint64_t>> counts(workers, std::vector<std::uint64_t>(k, 0));
  auto body = [&](unsigned w) {
    std::vector<std::uint8_t> hits(k);
    for (std::uint64_t t = w; t < trials; t += workers) {
      std::fill(hits.begin(), hits.end(), 0);
      event(first_trial + t, hits);
      for (std::size_t i = 0; i < k; ++i) counts[w][i] += hits[i] != 0;
    }
  };
  if (workers == 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& th : pool) th.join();
  }
  std::vector<TailEstimate> out;
  for (std::size_t i = 0; i < k; ++i) {
    std::uint64_t s = 0;
    for (unsigned w = 0; w < workers; ++w) s += counts[w][i];
    out.push_back(make_estimate(index[i], s, trials));
  }
  return out;
}

void merge_counts(std::vector<TailEstimate>& into, const std::vector<TailEstimate>& more) {
  if (into.empty()) {
    into = more;
    return;
  }
  if (into.size() != more.size()) throw std::invalid_argument("index grids differ");
  for (std::size_t i = 0; i < into.size(); ++i) {
    if (into[i].index != more[i].index) throw std::invalid_argument("index grids differ");
    into[i] = make_estimate(into[i].index, into[i].successes + more[i].successes, into[i].trials + more[i].trials);
  }
}

std::string tail_csv_header() { return "index,trials,successes,p_hat,lo,hi"; }

std::string tail_csv_row(const TailEstimate& e) {
  std::ostringstream out;
  out << std::setprecision(12) << e.index << ',' << e.trials << ',' << e.successes << ',' << e.p_hat << ','
      << e.ci.lo << ',' << e.ci.hi;
  return out.str();
}

}  // namespace perclab

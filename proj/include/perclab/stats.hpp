#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace perclab {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

inline constexpr double kWilsonZ = 1.96;

/// Wilson score interval for `successes` out of `trials`.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kWilsonZ);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;  // 0 for two points
  std::size_t points = 0;
  double x_lo = 0.0, x_hi = 0.0;  // window actually used
};

/// Ordinary least squares of y on x over points with x in [lo, hi].
/// Throws std::invalid_argument with fewer than two usable points or a
/// non-finite value.
LinearFit rate_fit(const std::vector<std::pair<double, double>>& points,
                   std::optional<std::pair<double, double>> window = std::nullopt);

struct TailEstimate {
  double index = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double p_hat = 0.0;
  Interval ci;
};

TailEstimate make_estimate(double index, std::uint64_t successes, std::uint64_t trials);

/// Fit of log p_hat against the index over indices with nonzero counts.
/// Empty unless at least four such points lie in the window.
std::optional<LinearFit> tail_slope(const std::vector<TailEstimate>& rows,
                                    std::optional<std::pair<double, double>> window = std::nullopt);

/// For one trial, sets hits[k] = 1 for every index k at which the event
/// holds. hits arrives zeroed with one slot per index value.
using IndexedEvent = std::function<void(std::uint64_t trial, std::vector<std::uint8_t>& hits)>;

/// Runs trials first_trial .. first_trial + trials - 1 over `workers`
/// threads; counts are summed, so totals do not depend on the worker count.
std::vector<TailEstimate> estimate_event(const std::vector<double>& index, const IndexedEvent& event,
                                         std::uint64_t first_trial, std::uint64_t trials, unsigned workers = 1);

/// Adds per-index counts of `more` into `into` (same index grid).
void merge_counts(std::vector<TailEstimate>& into, const std::vector<TailEstimate>& more);

std::string tail_csv_header();
std::string tail_csv_row(const TailEstimate& e);

}  // namespace perclab

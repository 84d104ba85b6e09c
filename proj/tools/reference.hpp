#pragma once

// Brute-force reference tables. Written against plain coordinates only, so
// they share no code with the perclab library they are compared against.

#include <cstdint>
#include <string>
#include <vector>

namespace reference {

struct AnimalRow {
  int k = 0;
  std::uint64_t count = 0;  // connected k-sets of Z^2 containing the origin
  int min_frontier = 0;     // min edge boundary of the hole-filled set
  double min_ratio = 0;     // min_frontier / sqrt(k)
};
std::vector<AnimalRow> anchored_animals(int k_max);

/// q_n for n = 0..n_max: minimal edge cutsets of [-half, half]^2 separating
/// the origin from the window boundary, counted as hole-free connected sets
/// around the origin with edge boundary n.
std::vector<std::uint64_t> cutset_counts(int half, int n_max);

/// Return probabilities of the lazy (1/2) simple random walk on Z^2.
std::vector<double> lazy_return_z2(int n_max);

struct BoxCounts {
  int d = 0, n = 0;
  bool star = false;
  std::uint64_t vertices = 0, edges = 0, boundary = 0;
};
BoxCounts box_counts(int d, int n, bool star);

/// Names accepted by table_csv.
std::vector<std::string> table_names();
/// CSV text of a named table; throws std::invalid_argument for other names.
std::string table_csv(const std::string& name);

}  // namespace reference

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "perclab/keyvalue.hpp"
#include "perclab/lattice.hpp"

namespace perclab {

enum class ExperimentKind {
  repulsion_tail,
  iso_profile,
  sharpness,
  heat_kernel,
  mixing,
  wedge_entropy,
  wedge_resistance,
  cutset_census,
  block_stats,
};

std::string to_string(ExperimentKind kind);
/// Throws std::invalid_argument for an unknown name.
ExperimentKind experiment_kind_from_string(const std::string& text);
std::vector<ExperimentKind> all_experiment_kinds();

/// Plain `key = value` experiment description. Every key is checked against
/// the table of its kind on parse; accessors then cannot fail except for
/// keys the kind does not define.
class Manifest {
 public:
  /// Throws ParseError naming the offending line and field.
  static Manifest parse(const std::string& text);

  ExperimentKind kind() const { return kind_; }
  /// FNV-1a over the normalised `key=value` lines (comments and spacing
  /// do not count).
  std::uint64_t hash() const { return hash_; }
  std::string hash_hex() const;

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  int line(const std::string& key) const;

  std::string text(const std::string& key) const;
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<std::int64_t> integers(const std::string& key) const;
  std::pair<double, double> window(const std::string& key) const;

  /// Box host from dim, n and adjacency.
  Graph box() const;
  HeightFunction height() const;
  std::string output() const { return text("output"); }

 private:
  ExperimentKind kind_ = ExperimentKind::repulsion_tail;
  std::uint64_t hash_ = 0;
  std::map<std::string, KeyValue> entries_;  // explicit and defaulted values
};

/// Field table of one kind, for documentation: (key, type, required, default).
struct FieldDoc {
  std::string key, type;
  bool required = false;
  std::string fallback;
  std::string range;
};
std::vector<FieldDoc> manifest_fields(ExperimentKind kind);

}  // namespace perclab

#include "perclab/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

namespace perclab {

namespace {

enum class Type { integer, real, integers, reals, window, text, choice, height };

struct Field {
  std::string key;
  Type type;
  bool required = false;
  std::string fallback;  // used when absent and not required; empty = no value
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = false;
  std::vector<std::string> choices;
};

const char* type_name(Type t) {
  switch (t) {
    case Type::integer: return "integer";
    case Type::real: return "real";
    case Type::integers: return "integer list";
    case Type::reals: return "real list";
    case Type::window: return "window lo..hi";
    case Type::text: return "text";
    case Type::choice: return "choice";
    case Type::height: return "height function";
  }
  return "text";
}

const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names = {
      {ExperimentKind::repulsion_tail, "repulsion-tail"}, {ExperimentKind::iso_profile, "iso-profile"},
      {ExperimentKind::sharpness, "sharpness"},           {ExperimentKind::heat_kernel, "heat-kernel"},
      {ExperimentKind::mixing, "mixing"},                 {ExperimentKind::wedge_entropy, "wedge-entropy"},
      {ExperimentKind::wedge_resistance, "wedge-resistance"}, {ExperimentKind::cutset_census, "cutset-census"},
      {ExperimentKind::block_stats, "block-stats"},
  };
  return names;
}

Field field(std::string key, Type type, bool required, std::string fallback, double lo, double hi,
            bool lo_open = false) {
  Field f;
  f.key = std::move(key);
  f.type = type;
  f.required = required;
  f.fallback = std::move(fallback);
  f.lo = lo;
  f.hi = hi;
  f.lo_open = lo_open;
  return f;
}

Field choice(std::string key, std::vector<std::string> choices, std::string fallback) {
  Field f;
  f.key = std::move(key);
  f.type = Type::choice;
  f.fallback = std::move(fallback);
  f.choices = std::move(choices);
  return f;
}

constexpr double kBig = 1e12;

std::vector<Field> fields_of(ExperimentKind kind) {
  std::vector<Field> f;
  f.push_back(field("seed", Type::integer, false, "1", 0, 9.0e18));
  f.push_back(field("output", Type::text, false, "", 0, 0));
  auto box = [&](bool with_n = true) {
    f.push_back(field("dim", Type::integer, true, "", 2, kMaxDim));
    if (with_n) f.push_back(field("n", Type::integer, true, "", 1, 4096));
    f.push_back(choice("adjacency", {"l1", "linf"}, "l1"));
  };
  auto p_list = [&](bool required) { f.push_back(field("p", Type::reals, required, "", 0, 1, true)); };
  auto giant = [&](const std::string& fallback) { f.push_back(choice("giant", {"spanning", "largest"}, fallback)); };
  auto seeds = [&] { f.push_back(field("seeds", Type::integer, true, "", 1, 1e7)); };
  switch (kind) {
    case ExperimentKind::repulsion_tail:
      box();
      p_list(true);
      f.push_back(field("N", Type::integer, false, "20", 4, 1e4));
      f.push_back(field("trials", Type::integer, true, "", 1, kBig));
      f.push_back(field("t", Type::integers, true, "", 0, 1e7));
      f.push_back(field("m0", Type::integer, false, "1", 1, kBig));
      f.push_back(field("fit", Type::window, false, "", 0, kBig));
      f.push_back(field("chunk", Type::integer, false, "10000", 1, kBig));
      giant("spanning");
      break;
    case ExperimentKind::iso_profile:
      box();
      p_list(true);
      seeds();
      f.push_back(field("sizes", Type::integers, true, "", 1, 1e8));
      f.push_back(field("exact_max", Type::integer, false, "6", 0, 16));
      f.push_back(field("uniform_runs", Type::integer, false, "8", 0, 1e7));
      f.push_back(field("greedy", Type::integer, false, "1", 0, 1));
      giant("spanning");
      break;
    case ExperimentKind::sharpness:
      box();
      p_list(true);
      seeds();
      f.push_back(field("r", Type::integers, true, "", 1, 1e6));
      giant("spanning");
      break;
    case ExperimentKind::heat_kernel:
      box();
      p_list(true);
      seeds();
      f.push_back(field("n_max", Type::integer, true, "", 1, 1e7));
      f.push_back(field("fit", Type::window, true, "", 1, kBig));
      f.push_back(field("laziness", Type::real, false, "0.5", 0, 0.999999));
      giant("spanning");
      break;
    case ExperimentKind::mixing:
      box(false);
      f.push_back(field("n", Type::integers, true, "", 1, 4096));
      p_list(true);
      seeds();
      f.push_back(field("eps", Type::real, false, "0.25", 0, 1, true));
      f.push_back(field("random_starts", Type::integer, false, "32", 0, 1e6));
      f.push_back(field("linfty", Type::integer, false, "1", 0, 1));
      f.push_back(field("laziness", Type::real, false, "0.5", 0, 0.999999));
      break;
    case ExperimentKind::wedge_entropy:
      f.push_back(field("height", Type::height, true, "", 0, 0));
      f.push_back(field("x_max", Type::integer, true, "", 1, 1e5));
      f.push_back(field("y_max", Type::integer, true, "", 0, 1e5));
      f.push_back(field("sets", Type::integer, true, "", 1, kBig));
      f.push_back(field("sizes", Type::integers, true, "", 1, 1e7));
      f.push_back(field("delta", Type::reals, false, "0.5,0.25,0.125", 0, 1, true));
      break;
    case ExperimentKind::wedge_resistance:
      f.push_back(field("height", Type::height, true, "", 0, 0));
      f.push_back(field("y_max", Type::integer, true, "", 0, 1e5));
      f.push_back(field("radii", Type::integers, true, "", 1, 1e5));
      f.push_back(field("tolerance", Type::real, false, "1e-12", 0, 1e-3, true));
      f.push_back(field("lyons_terms", Type::integer, false, "1000000", 1, 1e10));
      f.push_back(field("witness", Type::real, false, "3", 0, kBig, true));
      break;
    case ExperimentKind::cutset_census:
      box();
      f.push_back(field("n_max", Type::integer, true, "", 1, 14));
      f.push_back(field("max_set_size", Type::integer, false, "0", 0, 16));
      p_list(false);
      f.push_back(field("trials", Type::integer, false, "0", 0, kBig));
      break;
    case ExperimentKind::block_stats:
      box();
      p_list(true);
      f.push_back(field("N", Type::integer, true, "", 4, 1e4));
      f.push_back(field("trials", Type::integer, true, "", 1, kBig));
      break;
  }
  return f;
}

std::int64_t parse_int(const std::string& s) {
  std::size_t pos = 0;
  const long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("trailing characters");
  return v;
}

double parse_real(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument("not a finite number");
  return v;
}

// "a", "a..b" or "a..b:step", comma separated
std::vector<std::int64_t> parse_int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  for (const auto& item : split(s, ',')) {
    if (item.empty()) throw std::invalid_argument("empty list item");
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int(item));
      continue;
    }
    std::string rest = item.substr(dots + 2);
    std::int64_t step = 1;
    if (const auto colon = rest.find(':'); colon != std::string::npos) {
      step = parse_int(trim(rest.substr(colon + 1)));
      rest = rest.substr(0, colon);
    }
    const std::int64_t a = parse_int(trim(item.substr(0, dots))), b = parse_int(trim(rest));
    if (step <= 0 || b < a) throw std::invalid_argument("bad range '" + item + "'");
    if ((b - a) / step > 10000000) throw std::invalid_argument("range too long");
    for (std::int64_t v = a; v <= b; v += step) out.push_back(v);
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) {
    if (item.empty()) throw std::invalid_argument("empty list item");
    out.push_back(parse_real(item));
  }
  return out;
}

std::pair<double, double> parse_window(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) throw std::invalid_argument("expected lo..hi");
  const double lo = parse_real(trim(s.substr(0, dots))), hi = parse_real(trim(s.substr(dots + 2)));
  if (!(lo < hi)) throw std::invalid_argument("window needs lo < hi");
  return {lo, hi};
}

std::string range_text(const Field& f) {
  if (f.type == Type::choice) {
    std::string out;
    for (const auto& c : f.choices) out += (out.empty() ? "" : "|") + c;
    return out;
  }
  if (!std::isfinite(f.lo) && !std::isfinite(f.hi)) return "";
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s%g, %g]", f.lo_open ? "(" : "[", f.lo, f.hi);
  return buf;
}

void check_range(const Field& f, double v) {
  const bool low_ok = f.lo_open ? v > f.lo : v >= f.lo;
  if (!low_ok || v > f.hi) throw std::invalid_argument("value out of range " + range_text(f));
}

void validate(const Field& f, const std::string& value) {
  switch (f.type) {
    case Type::integer:
      check_range(f, static_cast<double>(parse_int(value)));
      break;
    case Type::real:
      check_range(f, parse_real(value));
      break;
    case Type::integers: {
      const auto v = parse_int_list(value);
      if (v.empty()) throw std::invalid_argument("empty list");
      for (auto x : v) check_range(f, static_cast<double>(x));
      break;
    }
    case Type::reals: {
      const auto v = parse_real_list(value);
      if (v.empty()) throw std::invalid_argument("empty list");
      for (auto x : v) check_range(f, x);
      break;
    }
    case Type::window: {
      const auto w = parse_window(value);
      check_range(f, w.first);
      check_range(f, w.second);
      break;
    }
    case Type::text:
      if (value.empty()) throw std::invalid_argument("empty value");
      break;
    case Type::choice:
      if (std::find(f.choices.begin(), f.choices.end(), value) == f.choices.end())
        throw std::invalid_argument("expected one of " + range_text(f));
      break;
    case Type::height:
      (void)HeightFunction::parse(value);
      break;
  }
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kind_names())
    if (k == kind) return name;
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& text) {
  for (const auto& [k, name] : kind_names())
    if (name == text) return k;
  throw std::invalid_argument("unknown experiment kind '" + text + "'");
}

std::vector<ExperimentKind> all_experiment_kinds() {
  std::vector<ExperimentKind> out;
  for (const auto& [k, name] : kind_names()) out.push_back(k);
  return out;
}

Manifest Manifest::parse(const std::string& text) {
  const auto entries = parse_key_values(text);
  Manifest m;
  std::map<std::string, KeyValue> given;
  for (const auto& kv : entries)
    if (!given.emplace(kv.key, kv).second) throw ParseError(kv.line, "field '" + kv.key + "' given twice");
  const auto kind_it = given.find("kind");
  if (kind_it == given.end()) throw ParseError(entries.empty() ? 1 : entries.back().line, "missing field 'kind'");
  try {
    m.kind_ = experiment_kind_from_string(kind_it->second.value);
  } catch (const std::invalid_argument& e) {
    throw ParseError(kind_it->second.line, "field 'kind': " + std::string(e.what()));
  }

  const auto table = fields_of(m.kind_);
  std::set<std::string> known{"kind"};
  for (const auto& f : table) known.insert(f.key);
  for (const auto& kv : entries)
    if (!known.count(kv.key))
      throw ParseError(kv.line, "field '" + kv.key + "' is not used by kind '" + to_string(m.kind_) + "'");

  for (const auto& f : table) {
    const auto it = given.find(f.key);
    if (it == given.end()) {
      if (f.required)
        throw ParseError(kind_it->second.line,
                         "kind '" + to_string(m.kind_) + "' requires field '" + f.key + "' (" + type_name(f.type) + ")");
      if (!f.fallback.empty()) m.entries_[f.key] = KeyValue{f.key, f.fallback, 0};
      continue;
    }
    try {
      validate(f, it->second.value);
    } catch (const std::exception& e) {
      throw ParseError(it->second.line, "field '" + f.key + "': " + e.what());
    }
    m.entries_[f.key] = it->second;
  }
  if (!m.has("output")) m.entries_["output"] = KeyValue{"output", to_string(m.kind_), 0};
  m.entries_["kind"] = kind_it->second;

  // FNV-1a, 64 bit
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& kv : entries)
    for (char c : kv.key + "=" + kv.value + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
  m.hash_ = h;
  return m;
}

std::string Manifest::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash_));
  return buf;
}

int Manifest::line(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? 0 : it->second.line;
}

std::string Manifest::text(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end())
    throw std::invalid_argument("manifest of kind '" + to_string(kind_) + "' has no field '" + key + "'");
  return it->second.value;
}

double Manifest::real(const std::string& key) const { return parse_real(text(key)); }
std::int64_t Manifest::integer(const std::string& key) const { return parse_int(text(key)); }
std::vector<double> Manifest::reals(const std::string& key) const { return parse_real_list(text(key)); }
std::vector<std::int64_t> Manifest::integers(const std::string& key) const { return parse_int_list(text(key)); }
std::pair<double, double> Manifest::window(const std::string& key) const { return parse_window(text(key)); }

Graph Manifest::box() const {
  return build_box(static_cast<int>(integer("dim")), static_cast<int>(integer("n")),
                   adjacency_from_string(text("adjacency")));
}

HeightFunction Manifest::height() const { return HeightFunction::parse(text("height")); }

std::vector<FieldDoc> manifest_fields(ExperimentKind kind) {
  std::vector<FieldDoc> out;
  out.push_back({"kind", "choice", true, "", ""});
  for (const auto& f : fields_of(kind)) out.push_back({f.key, type_name(f.type), f.required, f.fallback, range_text(f)});
  return out;
}

}  // namespace perclab

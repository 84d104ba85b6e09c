#include "perclab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "perclab/isoperimetry.hpp"
#include "perclab/renorm.hpp"
#include "perclab/stats.hpp"
#include "perclab/wedge.hpp"

namespace perclab {

using nlohmann::json;

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t j) {
  return mix64(mix64(seed) ^ (0x9e3779b97f4a7c15ull * (j + 1)));
}

VertexId origin_of(const Graph& g) {
  const auto o = g.find(Point{});
  if (!o) throw std::invalid_argument("the graph does not contain the origin");
  return *o;
}

VertexId nearest_to_origin(const Graph& g, std::span<const VertexId> members) {
  if (members.empty()) throw std::invalid_argument("empty vertex list");
  const Point zero{};
  VertexId best = members.front();
  int best_d = std::numeric_limits<int>::max();
  for (VertexId v : members) {
    const int d = l1_distance(g.point(v), zero, g.dim());
    if (d < best_d || (d == best_d && v < best)) {
      best = v;
      best_d = d;
    }
  }
  return best;
}

std::optional<GiantSample> giant_sample(const Graph& g, double p, std::uint64_t seed, std::uint64_t trial,
                                        GiantMode mode) {
  GiantSample s{sample(g, p, seed, trial), {}, -1, -1};
  s.labeling = label(s.config);
  const auto giant = giant_proxy(s.labeling, mode);
  if (!giant.id) return std::nullopt;
  s.giant = *giant.id;
  s.anchor = nearest_to_origin(g, s.labeling.members(s.giant));
  return s;
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> repulsion_tau(const RepulsionSetup& s, std::uint64_t trial) {
  const Graph& g = *s.graph;
  const VertexId o = origin_of(g);
  // Finite means: avoids the window boundary. The exploration stops as soon
  // as it touches it, so clusters joined to the giant cost little.
  const auto lazy = explore_cluster(g, s.p, s.seed, trial, o, g.num_vertices());
  if (lazy.touches_boundary || lazy.vertices.size() < s.m0) return std::nullopt;
  const auto config = sample(g, s.p, s.seed, trial);
  const auto lab = label(config);
  const auto giant = giant_proxy(lab, s.mode);
  const std::int32_t co = lab.cluster_of(o);
  if (!giant.id) return 0;
  if (*giant.id == co) return std::nullopt;
  const VertexSet c1 = cluster_set(g, lab, co);
  const VertexSet c2 = cluster_set(g, lab, *giant.id);
  return touching_edges(c1, c2, config).count();
}

std::vector<std::uint64_t> repulsion_hits(const RepulsionSetup& s, std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> hits(s.t.size(), 0);
  for (std::uint64_t trial = lo; trial < hi; ++trial) {
    const auto tau = repulsion_tau(s, trial);
    if (!tau) continue;
    for (std::size_t i = 0; i < s.t.size(); ++i)
      if (static_cast<long long>(*tau) >= s.t[i]) ++hits[i];
  }
  return hits;
}

// ---------------------------------------------------------------------------

std::optional<HeatKernelRun> heat_kernel_run(const Graph& g, double p, std::uint64_t seed, std::uint64_t trial,
                                             int n_max, double laziness, GiantMode mode) {
  const auto s = giant_sample(g, p, seed, trial, mode);
  if (!s) return std::nullopt;
  const Subgraph sub = Subgraph::cluster(s->config, s->labeling, s->giant);
  const WalkOperator op(sub, s->anchor, laziness);
  HeatKernelRun out;
  out.anchor = s->anchor;
  out.cluster_size = op.size();
  out.kernel = heat_kernel_at_origin(op, *op.local(s->anchor), n_max);
  return out;
}

MixingRun mixing_run(const Graph& box, double p, std::uint64_t seed, std::uint64_t trial, double laziness,
                     std::optional<double> eps, std::size_t random_starts) {
  const auto s = giant_sample(box, p, seed, trial, GiantMode::largest);
  if (!s) throw std::runtime_error("empty box");
  const Subgraph sub = Subgraph::cluster(s->config, s->labeling, s->giant);
  const WalkOperator op(sub, s->anchor, laziness);
  MixingRun out;
  out.cluster_size = op.size();
  if (op.size() < 2) return out;
  out.gap = spectral_gap(op);
  if (eps) out.mixing = linfty_mixing(op, *eps, random_starts, mix64(seed ^ trial));
  return out;
}

VertexSet wedge_set(const WedgeLattice& wedge, std::uint64_t k, const std::vector<std::int64_t>& sizes,
                    std::uint64_t seed) {
  const auto size = static_cast<std::size_t>(sizes[k % sizes.size()]);
  return grow_random_set(wedge.graph, wedge.origin(), size, mix64(seed ^ mix64(k)), true);
}

BlockCount block_count(const Graph& g, double p, int scale, std::uint64_t seed, std::uint64_t trial) {
  const auto config = sample(g, p, seed, trial);
  const auto lab = label(config);
  const BlockField field(config, lab, BlockGrid(g.dim(), scale));
  BlockCount out;
  out.blocks = field.size();
  for (std::size_t b = 0; b < field.size(); ++b) out.good += field.good(static_cast<VertexId>(b)) ? 1 : 0;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string num(double x) {
  std::ostringstream out;
  out << std::setprecision(12) << x;
  return out.str();
}

template <class... T>
std::string join(const T&... parts) {
  std::ostringstream out;
  bool first = true;
  ((out << (first ? "" : ",") << parts, first = false), ...);
  return out.str();
}

json fit_json(const std::optional<LinearFit>& fit) {
  if (!fit) return nullptr;
  return json{{"slope", fit->slope},
              {"intercept", fit->intercept},
              {"stderr", fit->stderr_slope},
              {"points", fit->points},
              {"x_lo", fit->x_lo},
              {"x_hi", fit->x_hi}};
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// (a, b) grid of units, each split into chunks of trials
class Chunked {
 public:
  Chunked(std::size_t groups, std::uint64_t trials, std::uint64_t chunk)
      : groups_(groups), trials_(trials), chunk_(chunk), per_group_((trials + chunk - 1) / chunk) {}
  std::size_t size() const { return groups_ * per_group_; }
  std::size_t group(std::size_t i) const { return i / per_group_; }
  UnitInfo info(std::size_t i) const {
    const std::uint64_t lo = (i % per_group_) * chunk_;
    return {lo, std::min(trials_, lo + chunk_)};
  }

 private:
  std::size_t groups_;
  std::uint64_t trials_, chunk_, per_group_;
};

class Base : public Experiment {
 public:
  explicit Base(const Manifest& m) : m_(m), seed_(static_cast<std::uint64_t>(m.integer("seed"))) {}

 protected:
  Manifest m_;
  std::uint64_t seed_;
};

// ---------------------------------------------------------------------------

class RepulsionTail : public Base {
 public:
  explicit RepulsionTail(const Manifest& m)
      : Base(m),
        graph_(m.box()),
        p_(m.reals("p")),
        chunks_(p_.size(), m.integer("trials"), m.integer("chunk")) {
    for (auto t : m.integers("t")) t_.push_back(static_cast<int>(t));
  }
  std::string csv_columns() const override { return "p,t,trials,successes,p_hat,lo,hi"; }
  std::size_t num_units() const override { return chunks_.size(); }
  UnitInfo unit(std::size_t i) const override { return chunks_.info(i); }

  json run_unit(std::size_t i) const override {
    const std::size_t j = chunks_.group(i);
    const UnitInfo u = unit(i);
    const auto hits = repulsion_hits(setup(j), u.trial_lo, u.trial_hi);
    return json{{"p_index", j}, {"hits", hits}};
  }

  void finish(const std::vector<json>& units, std::vector<CsvRow>& rows, json& summary) const override {
    const std::uint64_t trials = m_.integer("trials");
    std::vector<std::vector<std::uint64_t>> hits(p_.size(), std::vector<std::uint64_t>(t_.size(), 0));
    for (const auto& u : units) {
      const auto h = u.at("hits").get<std::vector<std::uint64_t>>();
      auto& into = hits[u.at("p_index").get<std::size_t>()];
      for (std::size_t k = 0; k < h.size(); ++k) into[k] += h[k];
    }
    std::optional<std::pair<double, double>> window;
    if (m_.has("fit")) window = m_.window("fit");
    json per_p = json::array();
    for (std::size_t j = 0; j < p_.size(); ++j) {
      std::vector<TailEstimate> est;
      for (std::size_t k = 0; k < t_.size(); ++k) {
        est.push_back(make_estimate(t_[k], hits[j][k], trials));
        rows.push_back({stream_seed(seed_, j), 0, trials, num(p_[j]) + "," + tail_csv_row(est.back())});
      }
      const auto fit = tail_slope(est, window);
      json entry{{"p", p_[j]}, {"seed", stream_seed(seed_, j)}, {"trials", trials}, {"fit", fit_json(fit)}};
      if (fit && fit->stderr_slope > 0) entry["slope_over_stderr"] = fit->slope / fit->stderr_slope;
      per_p.push_back(entry);
    }
    summary["m0"] = m_.integer("m0");
    summary["N"] = m_.integer("N");
    summary["giant"] = m_.text("giant");
    summary["results"] = per_p;
  }

  RepulsionSetup setup(std::size_t j) const {
    RepulsionSetup s;
    s.graph = &graph_;
    s.p = p_[j];
    s.m0 = static_cast<std::size_t>(m_.integer("m0"));
    s.t = t_;
    s.mode = giant_mode_from_string(m_.text("giant"));
    s.seed = stream_seed(seed_, j);
    return s;
  }

 private:
  Graph graph_;
  std::vector<double> p_;
  std::vector<int> t_;
  Chunked chunks_;
};

// ---------------------------------------------------------------------------

class IsoProfile : public Base {
 public:
  explicit IsoProfile(const Manifest& m) : Base(m), graph_(m.box()), p_(m.reals("p")), seeds_(m.integer("seeds")) {
    for (auto s : m.integers("sizes")) sizes_.push_back(static_cast<std::size_t>(s));
  }
  std::string csv_columns() const override {
    return "n,p,sample,size_class,min_ratio,frontier,exact,samples,witness,witness_hash";
  }
  std::size_t num_units() const override { return p_.size() * seeds_; }
  UnitInfo unit(std::size_t i) const override { return {i % seeds_, i % seeds_ + 1}; }

  json run_unit(std::size_t i) const override {
    const std::size_t j = i / seeds_;
    const std::uint64_t trial = i % seeds_;
    const auto mode = giant_mode_from_string(m_.text("giant"));
    const auto s = giant_sample(graph_, p_[j], stream_seed(seed_, j), trial, mode);
    json out{{"p_index", j}, {"trial", trial}};
    if (!s) {
      out["points"] = json::array();
      return out;
    }
    const Subgraph sub = Subgraph::cluster(s->config, s->labeling, s->giant);
    ProfileBudget budget;
    budget.exact_max = static_cast<std::size_t>(m_.integer("exact_max"));
    budget.uniform_runs = static_cast<std::size_t>(m_.integer("uniform_runs"));
    budget.greedy = m_.integer("greedy") != 0;
    budget.seed = mix64(stream_seed(seed_, j) ^ trial);
    json points = json::array();
    for (const auto& pt : profile(sub, s->anchor, sizes_, budget))
      points.push_back({pt.size_class, pt.min_ratio, pt.frontier, pt.exact, pt.samples, pt.witness, pt.witness_hash});
    out["points"] = points;
    out["cluster_size"] = s->labeling.size(s->giant);
    return out;
  }

  void finish(const std::vector<json>& units, std::vector<CsvRow>& rows, json& summary) const override {
    const int n = static_cast<int>(m_.integer("n"));
    std::vector<double> min_ratio(p_.size(), std::numeric_limits<double>::infinity());
    std::vector<std::size_t> missing(p_.size(), 0);
    for (const auto& u : units) {
      const auto j = u.at("p_index").get<std::size_t>();
      const auto trial = u.at("trial").get<std::uint64_t>();
      if (u.at("points").empty()) ++missing[j];
      for (const auto& pt : u.at("points")) {
        std::ostringstream hash;
        hash << std::hex << std::setw(16) << std::setfill('0') << pt[6].get<std::uint64_t>();
        rows.push_back({stream_seed(seed_, j), trial, trial + 1,
                        join(n, num(p_[j]), trial, pt[0].get<std::size_t>(), num(pt[1].get<double>()),
                             pt[2].get<std::size_t>(), pt[3].get<bool>() ? 1 : 0, pt[4].get<std::size_t>(),
                             pt[5].get<std::string>(), hash.str())});
        min_ratio[j] = std::min(min_ratio[j], pt[1].get<double>());
      }
    }
    json per_p = json::array();
    for (std::size_t j = 0; j < p_.size(); ++j) {
      json entry{{"p", p_[j]}, {"seeds", seeds_}, {"without_giant", missing[j]}};
      if (std::isfinite(min_ratio[j])) {
        entry["min_ratio"] = min_ratio[j];
        entry["min_ratio_over_log2_n"] = min_ratio[j] / std::pow(std::log(static_cast<double>(n)), 2);
      }
      per_p.push_back(entry);
    }
    summary["results"] = per_p;
  }

 private:
  Graph graph_;
  std::vector<double> p_;
  std::uint64_t seeds_;
  std::vector<std::size_t> sizes_;
};

// ---------------------------------------------------------------------------

class Sharpness : public Base {
 public:
  explicit Sharpness(const Manifest& m)
      : Base(m), graph_(m.box()), p_(m.reals("p")), seeds_(m.integer("seeds")), r_(m.integers("r")) {}
  std::string csv_columns() const override { return "p,sample,r,success,frontier,redeclared,size,diagnostic"; }
  std::size_t num_units() const override { return p_.size() * seeds_; }
  UnitInfo unit(std::size_t i) const override { return {i % seeds_, i % seeds_ + 1}; }

  json run_unit(std::size_t i) const override {
    const std::size_t j = i / seeds_;
    const std::uint64_t trial = i % seeds_;
    const auto config = sample(graph_, p_[j], stream_seed(seed_, j), trial);
    const auto mode = giant_mode_from_string(m_.text("giant"));
    json out{{"p_index", j}, {"trial", trial}, {"witnesses", json::array()}};
    for (auto r : r_) {
      const auto w = sharpness_witness(config, static_cast<int>(r), mode);
      out["witnesses"].push_back({r, w.config.has_value(), w.frontier, w.redeclared, w.s.size(), w.diagnostic});
    }
    return out;
  }

  void finish(const std::vector<json>& units, std::vector<CsvRow>& rows, json& summary) const override {
    std::vector<std::size_t> success(p_.size(), 0), unit_frontier(p_.size(), 0), attempts(p_.size(), 0);
    for (const auto& u : units) {
      const auto j = u.at("p_index").get<std::size_t>();
      const auto trial = u.at("trial").get<std::uint64_t>();
      for (const auto& w : u.at("witnesses")) {
        std::string diag = w[5].get<std::string>();
        std::replace(diag.begin(), diag.end(), ',', ';');
        rows.push_back({stream_seed(seed_, j), trial, trial + 1,
                        join(num(p_[j]), trial, w[0].get<std::int64_t>(), w[1].get<bool>() ? 1 : 0,
                             w[2].get<std::size_t>(), w[3].get<std::size_t>(), w[4].get<std::size_t>(), diag)});
        ++attempts[j];
        if (w[1].get<bool>()) {
          ++success[j];
          if (w[2].get<std::size_t>() == 1) ++unit_frontier[j];
        }
      }
    }
    json per_p = json::array();
    for (std::size_t j = 0; j < p_.size(); ++j)
      per_p.push_back({{"p", p_[j]},
                       {"attempts", attempts[j]},
                       {"successes", success[j]},
                       {"frontier_one", unit_frontier[j]},
                       {"all_frontier_one", unit_frontier[j] == success[j]}});
    summary["results"] = per_p;
  }

 private:
  Graph graph_;
  std::vector<double> p_;
  std::uint64_t seeds_;
  std::vector<std::int64_t> r_;
};

// ---------------------------------------------------------------------------

class HeatKernelExperiment : public Base {
 public:
  explicit HeatKernelExperiment(const Manifest& m)
      : Base(m), graph_(m.box()), p_(m.reals("p")), seeds_(m.integer("seeds")) {}
  std::string csv_columns() const override { return "p,sample,cluster_size,n,p_n"; }
  std::size_t num_units() const override { return p_.size() * seeds_; }
  UnitInfo unit(std::size_t i) const override { return {i % seeds_, i % seeds_ + 1}; }

  json run_unit(std::size_t i) const override {
    const std::size_t j = i / seeds_;
    const std::uint64_t trial = i % seeds_;
    const auto run = heat_kernel_run(graph_, p_[j], stream_seed(seed_, j), trial,
                                     static_cast<int>(m_.integer("n_max")), m_.real("laziness"),
                                     giant_mode_from_string(m_.text("giant")));
    json out{{"p_index", j}, {"trial", trial}};
    if (run) {
      out["cluster_size"] = run->cluster_size;
      out["p_n"] = run->kernel.p;
      out["mass_error"] = run->kernel.max_mass_error;
    }
    return out;
  }

  void finish(const std::vector<json>& units, std::vector<CsvRow>& rows, json& summary) const override {
    const auto [lo, hi] = m_.window("fit");
    std::vector<std::vector<double>> slopes(p_.size());
    json seeds = json::array();
    for (const auto& u : units) {
      const auto j = u.at("p_index").get<std::size_t>();
      const auto trial = u.at("trial").get<std::uint64_t>();
      if (!u.contains("p_n")) continue;
      const auto pn = u.at("p_n").get<std::vector<double>>();
      const auto size = u.at("cluster_size").get<std::size_t>();
      for (std::size_t n = 0; n < pn.size(); ++n)
        rows.push_back({stream_seed(seed_, j), trial, trial + 1, join(num(p_[j]), trial, size, n, num(pn[n]))});
      const auto fit = decay_exponent(pn, static_cast<int>(lo), static_cast<int>(hi));
      slopes[j].push_back(fit.slope);
      seeds.push_back({{"p", p_[j]}, {"sample", trial}, {"slope", fit.slope}, {"stderr", fit.stderr_slope}});
    }
    json per_p = json::array();
    for (std::size_t j = 0; j < p_.size(); ++j) {
      double mean = 0;
      for (double s : slopes[j]) mean += s;
      json entry{{"p", p_[j]}, {"samples", slopes[j].size()}};
      if (!slopes[j].empty()) entry["mean_slope"] = mean / static_cast<double>(slopes[j].size());
      per_p.push_back(entry);
    }
    summary["fit"] = {lo, hi};
    summary["per_sample"] = seeds;
    summary["results"] = per_p;
  }

 private:
  Graph graph_;
  std::vector<double> p_;
  std::uint64_t seeds_;
};

// ---------------------------------------------------------------------------

class Mixing : public Base {
 public:
  explicit Mixing(const Manifest& m) : Base(m), n_(m.integers("n")), p_(m.reals("p")), seeds_(m.integer("seeds")) {
    const auto adj = adjacency_from_string(m.text("adjacency"));
    for (auto n : n_) boxes_.push_back(build_box(static_cast<int>(m.integer("dim")), static_cast<int>(n), adj));
  }
  std::string csv_columns() const override {
    return "n,p,sample,cluster_size,lambda2,relaxation_time,residual,certified,mixing_time";
  }
  std::size_t num_units() const override { return n_.size() * p_.size() * seeds_; }
  UnitInfo unit(std::size_t i) const override { return {i % seeds_, i % seeds_ + 1}; }

  json run_unit(std::size_t i) const override {
    const std::uint64_t trial = i % seeds_;
    const std::size_t j = (i / seeds_) % p_.size();
    const std::size_t a = i / seeds_ / p_.size();
    std::optional<double> eps;
    if (m_.integer("linfty")) eps = m_.real("eps");
    const auto run = mixing_run(boxes_[a], p_[j], stream_seed(seed_, a * p_.size() + j), trial,
                                m_.real("laziness"), eps, static_cast<std::size_t>(m_.integer("random_starts")));
    json out{{"n_index", a},
             {"p_index", j},
             {"trial", trial},
             {"cluster_size", run.cluster_size},
             {"lambda2", run.gap.lambda2},
             {"relaxation_time", run.gap.relaxation_time},
             {"residual", run.gap.residual},
             {"certified", run.gap.certified}};
    if (run.mixing) out["mixing_time"] = run.mixing->time;
    return out;
  }

  void finish(const std::vector<json>& units, std::vector<CsvRow>& rows, json& summary) const override {
    std::vector<std::vector<std::vector<double>>> trel(p_.size(), std::vector<std::vector<double>>(n_.size()));
    std::vector<std::vector<std::vector<double>>> tmix = trel;
    std::size_t uncertified = 0;
    for (const auto& u : units) {
      const auto a = u.at("n_index").get<std::size_t>(), j = u.at("p_index").get<std::size_t>();
      const auto trial = u.at("trial").get<std::uint64_t>();
      const double t = u.at("relaxation_time").get<double>();
      const bool cert = u.at("certified").get<bool>();
      if (!cert) ++uncertified;
      std::string mix;
      if (u.contains("mixing_time")) {
        mix = std::to_string(u.at("mixing_time").get<int>());
        tmix[j][a].push_back(u.at("mixing_time").get<int>());
      }
      trel[j][a].push_back(t);
      rows.push_back({stream_seed(seed_, a * p_.size() + j), trial, trial + 1,
                      join(n_[a], num(p_[j]), trial, u.at("cluster_size").get<std::size_t>(),
                           num(u.at("lambda2").get<double>()), num(t), num(u.at("residual").get<double>()),
                           cert ? 1 : 0, mix)});
    }
    auto exponent = [&](const std::vector<std::vector<double>>& by_n) -> json {
      std::vector<std::pair<double, double>> pts;
      json med = json::array();
      for (std::size_t a = 0; a < n_.size(); ++a) {
        const double m = median(by_n[a]);
        med.push_back(std::isfinite(m) ? json(m) : json(nullptr));
        if (std::isfinite(m) && m > 0) pts.emplace_back(std::log(static_cast<double>(n_[a])), std::log(m));
      }
      json out{{"medians", med}};
      if (pts.size() >= 2) out["fit"] = fit_json(rate_fit(pts));
      return out;
    };
    json per_p = json::array();
    for (std::size_t j = 0; j < p_.size(); ++j) {
      json entry{{"p", p_[j]}, {"n", n_}, {"relaxation", exponent(trel[j])}};
      if (m_.integer("linfty")) entry["mixing"] = exponent(tmix[j]);
      per_p.push_back(entry);
    }
    summary["uncertified"] = uncertified;
    summary["results"] = per_p;
  }

 private:
  std::vector<std::int64_t> n_;
  std::vector<double> p_;
  std::uint64_t seeds_;
  std::vector<Graph> boxes_;
};

// ---------------------------------------------------------------------------

constexpr std::uint64_t kWedgeChunk = 100;

class WedgeEntropy : public Base {
 public:
  explicit WedgeEntropy(const Manifest& m)
      : Base(m),
        wedge_(build_wedge(m.height(), static_cast<int>(m.integer("x_max")), static_cast<int>(m.integer("y_max")))),
        sizes_(m.integers("sizes")),
        delta_(m.reals("delta")),
        chunks_(1, m.integer("sets"), kWedgeChunk) {}
  std::string csv_columns() const override { return entropy_csv_header() + ",zeta_ok"; }
  std::size_t num_units() const override { return chunks_.size(); }
  UnitInfo unit(std::size_t i) const override { return chunks_.info(i); }

  json run_unit(std::size_t i) const override {
    const UnitInfo u = unit(i);
    json rows = json::array();
    std::vector<std::uint64_t> within(delta_.size(), 0);
    std::uint64_t violations = 0;
    std::vector<EntropyReport> reports;
    for (std::uint64_t k = u.trial_lo; k < u.trial_hi; ++k) {
      const VertexSet s = wedge_set(wedge_, k, sizes_, seed_);
      const auto r = entropy_report(wedge_, s);
      bool all = true;
      for (std::size_t d = 0; d < delta_.size(); ++d) {
        const bool ok = zeta_concentration(wedge_.height, r, delta_[d]).within;
        within[d] += ok;
        all = all && ok;
      }
      if (!r.checks.all()) ++violations;
      rows.push_back(entropy_csv_row(k, r) + "," + (all ? "1" : "0"));
      reports.push_back(r);
    }
    const auto psi = psi_profile_check(wedge_.height, reports);
    return json{{"rows", rows},
                {"within", within},
                {"violations", violations},
                {"ketto_failures", psi.ketto_failures},
                {"min_egy_ratio", psi.min_egy_ratio},
                {"min_psi_ratio", psi.min_psi_ratio},
                {"max_hhk_gap", psi.max_hhk_gap}};
  }

  void finish(const std::vector<json>& units, std::vector<CsvRow>& rows, json& summary) const override {
    std::vector<std::uint64_t> within(delta_.size(), 0);
    std::uint64_t violations = 0, ketto = 0;
    double egy = std::numeric_limits<double>::infinity(), psi = egy, gap = -egy;
    for (std::size_t i = 0; i < units.size(); ++i) {
      const auto& u = units[i];
      const UnitInfo info = unit(i);
      std::uint64_t k = info.trial_lo;
      for (const auto& row : u.at("rows")) {
        rows.push_back({seed_, k, k + 1, row.get<std::string>()});
        ++k;
      }
      const auto w = u.at("within").get<std::vector<std::uint64_t>>();
      for (std::size_t d = 0; d < w.size(); ++d) within[d] += w[d];
      violations += u.at("violations").get<std::uint64_t>();
      ketto += u.at("ketto_failures").get<std::uint64_t>();
      egy = std::min(egy, u.at("min_egy_ratio").get<double>());
      psi = std::min(psi, u.at("min_psi_ratio").get<double>());
      gap = std::max(gap, u.at("max_hhk_gap").get<double>());
    }
    const auto sets = static_cast<std::uint64_t>(m_.integer("sets"));
    json zeta = json::array();
    for (std::size_t d = 0; d < delta_.size(); ++d)
      zeta.push_back({{"delta", delta_[d]},
                      {"sets_within", within[d]},
                      {"fraction", static_cast<double>(within[d]) / static_cast<double>(sets)}});
    summary["height"] = wedge_.height.describe();
    summary["sets"] = sets;
    summary["entropy_violations"] = violations;
    summary["zeta"] = zeta;
    summary["psi"] = {{"ketto_failures", ketto}, {"min_egy_ratio", egy}, {"min_psi_ratio", psi},
                      {"max_hhk_gap", gap}};
  }

 private:
  WedgeLattice wedge_;
  std::vector<std::int64_t> sizes_;
  std::vector<double> delta_;
  Chunked chunks_;
};

// ---------------------------------------------------------------------------

class WedgeResistanceExperiment : public Base {
 public:
  explicit WedgeResistanceExperiment(const Manifest& m) : Base(m), h_(m.height()), radii_(m.integers("radii")) {}
  std::string csv_columns() const override { return resistance_csv_header() + ",iterations,vertices"; }
  std::size_t num_units() const override { return radii_.size(); }
  UnitInfo unit(std::size_t) const override { return {0, 1}; }

  json run_unit(std::size_t i) const override {
    const auto r = wedge_resistance_profile(h_, {static_cast<int>(radii_[i])}, static_cast<int>(m_.integer("y_max")),
                                            m_.real("tolerance"))
                       .front();
    return json{{"R", r.radius},           {"r_eff", r.r.r_eff},           {"residual", r.r.residual},
                {"iterations", r.r.iterations}, {"converged", r.r.converged}, {"vertices", r.vertices}};
  }

  void finish(const std::vector<json>& units, std::vector<CsvRow>& rows, json& summary) const override {
    std::map<int, double> reff;
    bool converged = true;
    for (const auto& u : units) {
      WedgeResistance w;
      w.radius = u.at("R").get<int>();
      w.r.r_eff = u.at("r_eff").get<double>();
      w.r.residual = u.at("residual").get<double>();
      reff[w.radius] = w.r.r_eff;
      converged = converged && u.at("converged").get<bool>();
      rows.push_back({seed_, 0, 1,
                      resistance_csv_row(w) + "," + std::to_string(u.at("iterations").get<int>()) + "," +
                          std::to_string(u.at("vertices").get<std::size_t>())});
    }
    json inc = json::array();
    std::vector<double> d;
    for (const auto& [r, v] : reff)
      if (reff.count(2 * r)) {
        d.push_back(reff.at(2 * r) - v);
        inc.push_back({{"R", r}, {"increment", d.back()}});
      }
    bool decreasing = d.size() >= 2, nondecreasing = d.size() >= 2;
    for (std::size_t k = 1; k < d.size(); ++k) {
      decreasing = decreasing && d[k] < d[k - 1];
      nondecreasing = nondecreasing && d[k] >= d[k - 1] - 1e-8;
    }
    const auto lyons = lyons_sum(h_, static_cast<std::uint64_t>(m_.integer("lyons_terms")), m_.real("witness"));
    summary["height"] = h_.describe();
    summary["converged"] = converged;
    summary["increments"] = inc;
    summary["strictly_decreasing"] = decreasing;
    summary["non_decreasing"] = nondecreasing;
    summary["lyons"] = {{"terms", lyons.terms},
                        {"sum", lyons.sum},
                        {"tail_lo", std::isfinite(lyons.tail_lo) ? json(lyons.tail_lo) : json("inf")},
                        {"tail_hi", std::isfinite(lyons.tail_hi) ? json(lyons.tail_hi) : json("inf")},
                        {"verdict", to_string(lyons.verdict)}};
  }

 private:
  HeightFunction h_;
  std::vector<std::int64_t> radii_;
};

// ---------------------------------------------------------------------------

class CutsetCensusExperiment : public Base {
 public:
  explicit CutsetCensusExperiment(const Manifest& m) : Base(m), graph_(m.box()) {
    if (m.has("p") && m.integer("trials") > 0) p_ = m.reals("p");
  }
  std::string csv_columns() const override { return "n,q_n,p,trials,hits,p_hat,bound,sigma,within"; }
  std::size_t num_units() const override { return 1 + p_.size(); }
  UnitInfo unit(std::size_t i) const override {
    return {0, i == 0 ? 0 : static_cast<std::uint64_t>(m_.integer("trials"))};
  }

  json run_unit(std::size_t i) const override {
    const auto& c = census();
    if (i == 0)
      return json{{"q", c.q},
                  {"kappa", c.kappa_estimate},
                  {"peierls_bound", c.peierls_bound},
                  {"max_set_size", c.max_set_size},
                  {"sets", c.sets_enumerated},
                  {"non_minimal", c.non_minimal}};
    const std::size_t j = i - 1;
    json checks = json::array();
    for (const auto& pc : peierls_check(graph_, origin_of(graph_), c, p_[j], m_.integer("trials"),
                                        stream_seed(seed_, j)))
      checks.push_back({pc.n, pc.trials, pc.hits, pc.p_hat, pc.bound, pc.sigma, pc.within});
    return json{{"p_index", j}, {"checks", checks}};
  }

  void finish(const std::vector<json>& units, std::vector<CsvRow>& rows, json& summary) const override {
    const auto q = units[0].at("q").get<std::vector<std::uint64_t>>();
    for (std::size_t n = 0; n < q.size(); ++n) rows.push_back({seed_, 0, 0, join(n, q[n], "", "", "", "", "", "", "")});
    bool all_within = true;
    json per_p = json::array();
    for (std::size_t i = 1; i < units.size(); ++i) {
      const auto j = units[i].at("p_index").get<std::size_t>();
      bool within = true;
      for (const auto& c : units[i].at("checks")) {
        const auto n = c[0].get<int>();
        within = within && c[6].get<bool>();
        rows.push_back({stream_seed(seed_, j), 0, c[1].get<std::uint64_t>(),
                        join(n, q[n], num(p_[j]), c[1].get<std::uint64_t>(), c[2].get<std::uint64_t>(),
                             num(c[3].get<double>()), num(c[4].get<double>()), num(c[5].get<double>()),
                             c[6].get<bool>() ? 1 : 0)});
      }
      all_within = all_within && within;
      per_p.push_back({{"p", p_[j]}, {"within", within}});
    }
    summary["q"] = q;
    summary["kappa_estimate"] = units[0].at("kappa");
    summary["peierls_bound"] = units[0].at("peierls_bound");
    summary["max_set_size"] = units[0].at("max_set_size");
    summary["sets_enumerated"] = units[0].at("sets");
    summary["non_minimal"] = units[0].at("non_minimal");
    summary["peierls"] = per_p;
    summary["all_within"] = all_within;
  }

 private:
  const CutsetCensus& census() const {
    std::call_once(once_, [&] {
      census_ = cutset_census(graph_, origin_of(graph_), static_cast<int>(m_.integer("n_max")),
                              static_cast<std::size_t>(m_.integer("max_set_size")));
    });
    return census_;
  }

  Graph graph_;
  std::vector<double> p_;
  mutable std::once_flag once_;
  mutable CutsetCensus census_;
};

// ---------------------------------------------------------------------------

constexpr std::uint64_t kBlockChunk = 50;

class BlockStats : public Base {
 public:
  explicit BlockStats(const Manifest& m)
      : Base(m), graph_(m.box()), p_(m.reals("p")), chunks_(p_.size(), m.integer("trials"), kBlockChunk) {}
  std::string csv_columns() const override { return "p,N,trials,blocks,good,fraction,lo,hi"; }
  std::size_t num_units() const override { return chunks_.size(); }
  UnitInfo unit(std::size_t i) const override { return chunks_.info(i); }

  json run_unit(std::size_t i) const override {
    const std::size_t j = chunks_.group(i);
    const UnitInfo u = unit(i);
    BlockCount total;
    for (std::uint64_t t = u.trial_lo; t < u.trial_hi; ++t) {
      const auto c = block_count(graph_, p_[j], static_cast<int>(m_.integer("N")), stream_seed(seed_, j), t);
      total.blocks += c.blocks;
      total.good += c.good;
    }
    return json{{"p_index", j}, {"blocks", total.blocks}, {"good", total.good}};
  }

  void finish(const std::vector<json>& units, std::vector<CsvRow>& rows, json& summary) const override {
    std::vector<BlockCount> total(p_.size());
    for (const auto& u : units) {
      auto& t = total[u.at("p_index").get<std::size_t>()];
      t.blocks += u.at("blocks").get<std::size_t>();
      t.good += u.at("good").get<std::size_t>();
    }
    const auto trials = static_cast<std::uint64_t>(m_.integer("trials"));
    json per_p = json::array();
    for (std::size_t j = 0; j < p_.size(); ++j) {
      const double frac = total[j].blocks ? static_cast<double>(total[j].good) / total[j].blocks : 0.0;
      const auto ci = wilson_interval(total[j].good, total[j].blocks);
      rows.push_back({stream_seed(seed_, j), 0, trials,
                      join(num(p_[j]), m_.integer("N"), trials, total[j].blocks, total[j].good, num(frac),
                           num(ci.lo), num(ci.hi))});
      per_p.push_back({{"p", p_[j]}, {"good_fraction", frac}, {"lo", ci.lo}, {"hi", ci.hi}});
    }
    summary["results"] = per_p;
  }

 private:
  Graph graph_;
  std::vector<double> p_;
  Chunked chunks_;
};

}  // namespace

std::unique_ptr<Experiment> make_experiment(const Manifest& m) {
  switch (m.kind()) {
    case ExperimentKind::repulsion_tail: return std::make_unique<RepulsionTail>(m);
    case ExperimentKind::iso_profile: return std::make_unique<IsoProfile>(m);
    case ExperimentKind::sharpness: return std::make_unique<Sharpness>(m);
    case ExperimentKind::heat_kernel: return std::make_unique<HeatKernelExperiment>(m);
    case ExperimentKind::mixing: return std::make_unique<Mixing>(m);
    case ExperimentKind::wedge_entropy: return std::make_unique<WedgeEntropy>(m);
    case ExperimentKind::wedge_resistance: return std::make_unique<WedgeResistanceExperiment>(m);
    case ExperimentKind::cutset_census: return std::make_unique<CutsetCensusExperiment>(m);
    case ExperimentKind::block_stats: return std::make_unique<BlockStats>(m);
  }
  throw std::logic_error("unhandled experiment kind");
}

std::string csv_header(const Experiment& e) {
  return "manifest_hash,code_version,seed,trial_lo,trial_hi," + e.csv_columns();
}

std::string csv_schema_line(ExperimentKind kind) {
  return "# perclab " + to_string(kind) + " schema v" + std::to_string(kCsvSchemaVersion);
}

}  // namespace perclab

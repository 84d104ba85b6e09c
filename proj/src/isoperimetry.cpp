#include "perclab/isoperimetry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace perclab {

namespace {

template <class F>
void for_usable(const Subgraph& sub, VertexId v, F&& f) {
  for (const auto& inc : sub.host().incident(v))
    if (sub.usable(inc.edge)) f(inc.to, inc.edge);
}

class Redelmeier {
 public:
  Redelmeier(const Subgraph& sub, std::size_t max_size,
             const std::function<void(const std::vector<VertexId>&)>& visit)
      : sub_(sub), max_(max_size), visit_(visit), marked_(sub.host().num_vertices(), 0) {}

  std::uint64_t run(VertexId o) {
    marked_[o] = 1;
    recurse({o});
    return count_;
  }

 private:
  const Subgraph& sub_;
  std::size_t max_;
  const std::function<void(const std::vector<VertexId>&)>& visit_;
  std::vector<std::uint8_t> marked_;
  std::vector<VertexId> current_;
  std::uint64_t count_ = 0;

  void recurse(std::vector<VertexId> untried) {
    while (!untried.empty()) {
      const VertexId u = untried.back();
      untried.pop_back();
      current_.push_back(u);
      ++count_;
      visit_(current_);
      if (current_.size() < max_) {
        std::vector<VertexId> added;
        for_usable(sub_, u, [&](VertexId w, EdgeId) {
          if (!marked_[w]) {
            marked_[w] = 1;
            added.push_back(w);
          }
        });
        std::vector<VertexId> next = untried;
        next.insert(next.end(), added.begin(), added.end());
        recurse(std::move(next));
        for (VertexId w : added) marked_[w] = 0;
      }
      current_.pop_back();
    }
  }
};

std::vector<int> bfs_distance(const Subgraph& sub, VertexId o) {
  std::vector<int> dist(sub.host().num_vertices(), -1);
  std::vector<VertexId> queue{o};
  dist[o] = 0;
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const VertexId v = queue[h];
    for_usable(sub, v, [&](VertexId w, EdgeId) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    });
  }
  return dist;
}

VertexSet to_set(const Graph& host, std::vector<VertexId> ids) {
  std::sort(ids.begin(), ids.end());
  return VertexSet(host, std::move(ids));
}

}  // namespace

std::uint64_t enumerate_anchored_sets(const Subgraph& sub, VertexId o, std::size_t max_size,
                                      const std::function<void(const std::vector<VertexId>&)>& visit) {
  if (max_size > kExactEnumerationCap)
    throw std::invalid_argument("exact enumeration is capped at size " + std::to_string(kExactEnumerationCap) +
                                "; use a sampler");
  if (max_size == 0) return 0;
  if (!sub.has_vertex(o)) throw std::invalid_argument("anchor is not a vertex of the subgraph");
  return Redelmeier(sub, max_size, visit).run(o);
}

FrontierCounter::FrontierCounter(const Subgraph& sub)
    : sub_(&sub),
      in_s_(sub.host().num_vertices(), 0),
      seen_(sub.host().num_vertices(), 0),
      group_of_(sub.host().num_vertices(), -1),
      component_(sub.host().num_vertices(), -1) {
  const Graph& g = sub.host();
  for (VertexId v = 0; v < static_cast<VertexId>(g.num_vertices()); ++v) {
    if (component_[v] >= 0 || !sub.has_vertex(v)) continue;
    const auto id = static_cast<std::int32_t>(reaches_.size());
    bool reach = false;
    std::vector<VertexId> queue{v};
    component_[v] = id;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      reach = reach || g.on_window_boundary(queue[h]);
      for_usable(sub, queue[h], [&](VertexId w, EdgeId) {
        if (component_[w] < 0) {
          component_[w] = id;
          queue.push_back(w);
        }
      });
    }
    reaches_.push_back(reach);
  }
}

void FrontierCounter::next_stamp() {
  if (++stamp_ == 0) {
    std::fill(in_s_.begin(), in_s_.end(), 0);
    stamp_ = 1;
  }
}

std::size_t FrontierCounter::raw_boundary(const std::vector<VertexId>& s) {
  next_stamp();
  for (VertexId v : s) in_s_[v] = stamp_;
  std::size_t count = 0;
  for (VertexId v : s)
    for_usable(*sub_, v, [&](VertexId w, EdgeId) { count += in_s_[w] != stamp_; });
  return count;
}

FrontierCounter::Result FrontierCounter::operator()(const std::vector<VertexId>& s) {
  const Graph& g = sub_->host();
  next_stamp();
  const std::uint32_t mark = stamp_;
  bool s_on_boundary = false;
  for (VertexId v : s) {
    in_s_[v] = mark;
    s_on_boundary = s_on_boundary || g.on_window_boundary(v);
  }
  std::vector<VertexId> seeds;
  for (VertexId v : s)
    for_usable(*sub_, v, [&](VertexId w, EdgeId) {
      if (in_s_[w] != mark) seeds.push_back(w);
    });

  enum Status : std::uint8_t { finite, truncated, infinite };
  std::vector<std::int32_t> parent;
  std::vector<Status> status;
  std::vector<std::size_t> size;
  auto find = [&](std::int32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  // An unresolved component can only be settled as infinite when it is the
  // sole unfinished one and something must reach the window boundary.
  bool must_reach = !s_on_boundary && !s.empty() && reaches_[component_[s.front()]];
  for (VertexId v : s) must_reach = must_reach && component_[v] == component_[s.front()];
  std::size_t cap = 64;
  std::vector<std::uint8_t> infinite_root;
  for (;;) {
    parent.clear();
    status.clear();
    size.clear();
    constexpr std::uint32_t seen_mark = 1;
    std::vector<VertexId> touched;
    for (VertexId w0 : seeds) {
      if (seen_[w0] == seen_mark) continue;
      const auto gid = static_cast<std::int32_t>(parent.size());
      parent.push_back(gid);
      status.push_back(finite);
      size.push_back(0);
      std::vector<VertexId> queue{w0};
      seen_[w0] = seen_mark;
      group_of_[w0] = gid;
      touched.push_back(w0);
      if (g.on_window_boundary(w0)) status[gid] = infinite;
      for (std::size_t h = 0; h < queue.size() && status[gid] == finite; ++h) {
        if (h >= cap) {
          status[gid] = truncated;
          break;
        }
        const VertexId x = queue[h];
        ++size[gid];
        for_usable(*sub_, x, [&](VertexId y, EdgeId) {
          if (in_s_[y] == mark) return;
          if (seen_[y] == seen_mark) {
            const auto a = find(gid), b = find(group_of_[y]);
            if (a != b) parent[b] = a;
            return;
          }
          seen_[y] = seen_mark;
          group_of_[y] = gid;
          touched.push_back(y);
          queue.push_back(y);
          if (g.on_window_boundary(y)) status[gid] = infinite;
        });
      }
    }
    // merge statuses
    std::vector<Status> root_status(parent.size(), finite);
    std::vector<std::size_t> root_size(parent.size(), 0);
    for (std::size_t i = 0; i < parent.size(); ++i) {
      const auto r = find(static_cast<std::int32_t>(i));
      root_status[r] = std::max(root_status[r], status[i]);
      root_size[r] += size[i];
    }
    std::size_t unknown = 0, known_infinite = 0;
    for (std::size_t i = 0; i < parent.size(); ++i) {
      if (find(static_cast<std::int32_t>(i)) != static_cast<std::int32_t>(i)) continue;
      unknown += root_status[i] == truncated;
      known_infinite += root_status[i] == infinite;
    }
    const bool exhaustive = cap >= g.num_vertices();
    const bool resolved = unknown == 0 || (unknown == 1 && known_infinite == 0 && must_reach) || exhaustive;
    if (resolved) {
      Result out;
      out.closure_size = s.size();
      infinite_root.assign(parent.size(), 0);
      for (std::size_t i = 0; i < parent.size(); ++i) {
        if (find(static_cast<std::int32_t>(i)) != static_cast<std::int32_t>(i)) continue;
        if (root_status[i] == finite)
          out.closure_size += root_size[i];
        else
          infinite_root[i] = 1;
      }
      for (VertexId v : s)
        for_usable(*sub_, v, [&](VertexId w, EdgeId) {
          if (in_s_[w] != mark && infinite_root[find(group_of_[w])]) ++out.frontier;
        });
      for (VertexId v : touched) seen_[v] = 0;
      return out;
    }
    for (VertexId v : touched) seen_[v] = 0;
    cap *= 4;
  }
}

double isoperimetric_ratio(std::size_t frontier, std::size_t size, int dim) {
  if (size == 0) throw std::invalid_argument("ratio of an empty set");
  return static_cast<double>(frontier) / std::pow(static_cast<double>(size), 1.0 - 1.0 / dim);
}

std::string to_string(Sampler s) { return s == Sampler::uniform_growth ? "uniform-growth" : "boundary-greedy"; }

Sampler sampler_from_string(const std::string& text) {
  if (text == "uniform-growth") return Sampler::uniform_growth;
  if (text == "boundary-greedy") return Sampler::boundary_greedy;
  throw std::invalid_argument("unknown sampler: " + text);
}

std::vector<VertexSet> greedy_checkpoints(const Subgraph& sub, VertexId o, const std::vector<std::size_t>& sizes) {
  const Graph& g = sub.host();
  std::vector<VertexSet> out;
  if (sizes.empty()) return out;
  if (!std::is_sorted(sizes.begin(), sizes.end())) throw std::invalid_argument("checkpoint sizes must ascend");
  const auto dist = bfs_distance(sub, o);
  std::vector<std::uint8_t> in_s(g.num_vertices(), 0), in_cand(g.num_vertices(), 0);
  std::vector<int> degree(g.num_vertices(), -1), into_s(g.num_vertices(), 0);
  auto usable_degree = [&](VertexId v) {
    if (degree[v] < 0) {
      degree[v] = 0;
      for_usable(sub, v, [&](VertexId, EdgeId) { ++degree[v]; });
    }
    return degree[v];
  };
  std::vector<VertexId> members, cand;
  auto absorb = [&](VertexId v) {
    in_s[v] = 1;
    members.push_back(v);
    for_usable(sub, v, [&](VertexId w, EdgeId) {
      ++into_s[w];
      if (!in_s[w] && !in_cand[w]) {
        in_cand[w] = 1;
        cand.push_back(w);
      }
    });
  };
  absorb(o);
  std::size_t next = 0;
  while (next < sizes.size()) {
    while (next < sizes.size() && members.size() == sizes[next]) {
      out.push_back(to_set(g, members));
      ++next;
    }
    if (next == sizes.size() || cand.empty()) break;
    std::size_t best = 0;
    auto key = [&](std::size_t i) {
      const VertexId v = cand[i];
      return std::tuple<int, int, VertexId>(usable_degree(v) - 2 * into_s[v], dist[v], v);
    };
    for (std::size_t i = 1; i < cand.size(); ++i)
      if (key(i) < key(best)) best = i;
    const VertexId v = cand[best];
    cand[best] = cand.back();
    cand.pop_back();
    in_cand[v] = 0;
    absorb(v);
  }
  return out;
}

namespace {

std::optional<VertexSet> uniform_growth(const Subgraph& sub, VertexId o, std::size_t size, std::uint64_t stream) {
  const Graph& g = sub.host();
  std::mt19937_64 rng(stream);
  std::vector<std::uint8_t> state(g.num_vertices(), 0);  // 1 member, 2 candidate
  std::vector<VertexId> members{o}, cand;
  state[o] = 1;
  auto push_neighbors = [&](VertexId v) {
    for_usable(sub, v, [&](VertexId w, EdgeId) {
      if (state[w] == 0) {
        state[w] = 2;
        cand.push_back(w);
      }
    });
  };
  push_neighbors(o);
  while (members.size() < size) {
    if (cand.empty()) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, cand.size() - 1);
    const std::size_t i = pick(rng);
    const VertexId v = cand[i];
    cand[i] = cand.back();
    cand.pop_back();
    state[v] = 1;
    members.push_back(v);
    push_neighbors(v);
  }
  return to_set(g, std::move(members));
}

}  // namespace

SampledSets sample_anchored_sets(const Subgraph& sub, VertexId o, std::size_t size, std::size_t trials,
                                 Sampler sampler, std::uint64_t seed, bool fill_holes) {
  if (size == 0) throw std::invalid_argument("size must be at least 1");
  if (!sub.has_vertex(o)) throw std::invalid_argument("anchor is not a vertex of the subgraph");
  SampledSets out;
  if (trials == 0) return out;
  if (size > 1) {
    bool any = false;
    for_usable(sub, o, [&](VertexId, EdgeId) { any = true; });
    if (!any) {
      out.diagnostic = "anchor has no usable edge";
      return out;
    }
  }
  auto finish = [&](VertexSet s) { return fill_holes ? closure(s, sub) : s; };
  if (sampler == Sampler::boundary_greedy) {
    auto sets = greedy_checkpoints(sub, o, {size});
    if (sets.empty())
      out.diagnostic = "component of the anchor has fewer than " + std::to_string(size) + " vertices";
    else
      out.sets.push_back(finish(std::move(sets.front())));
    return out;
  }
  for (std::size_t k = 0; k < trials; ++k) {
    auto s = uniform_growth(sub, o, size, mix64(mix64(seed) ^ k));
    if (!s) {
      out.diagnostic = "component of the anchor has fewer than " + std::to_string(size) + " vertices";
      return out;
    }
    out.sets.push_back(finish(std::move(*s)));
  }
  return out;
}

std::uint64_t set_hash(const VertexSet& s) {
  auto pts = s.points();
  std::sort(pts.begin(), pts.end());
  std::uint64_t h = mix64(pts.size());
  for (const auto& p : pts)
    for (int i = 0; i < s.host().dim(); ++i) h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(p[i])));
  return h;
}

std::vector<ProfilePoint> profile(const Subgraph& sub, VertexId o, const std::vector<std::size_t>& sizes,
                                  const ProfileBudget& budget) {
  const Graph& g = sub.host();
  const int d = g.dim();
  std::vector<std::size_t> classes = sizes;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  const std::size_t exact_max = std::min(budget.exact_max, kExactEnumerationCap);

  FrontierCounter counter(sub);
  std::vector<ProfilePoint> points;
  auto offer = [&](ProfilePoint& pt, const VertexSet& s, std::size_t frontier, const std::string& how) {
    const double r = isoperimetric_ratio(frontier, s.size(), d);
    ++pt.samples;
    if (pt.samples == 1 || r < pt.min_ratio) {
      pt.min_ratio = r;
      pt.frontier = frontier;
      pt.witness = how;
      pt.witness_hash = set_hash(s);
    }
  };

  std::vector<std::size_t> exact_classes, heuristic_classes;
  for (std::size_t m : classes) (m <= exact_max ? exact_classes : heuristic_classes).push_back(m);

  if (!exact_classes.empty()) {
    std::vector<ProfilePoint> ex(exact_classes.back() + 1);
    std::vector<std::optional<VertexSet>> arg(exact_classes.back() + 1);
    std::vector<double> best(exact_classes.back() + 1, std::numeric_limits<double>::infinity());
    enumerate_anchored_sets(sub, o, exact_classes.back(), [&](const std::vector<VertexId>& s) {
      const std::size_t m = s.size();
      ++ex[m].samples;
      const auto f = counter(s).frontier;
      const double r = isoperimetric_ratio(f, m, d);
      if (r < best[m]) {
        best[m] = r;
        ex[m].frontier = f;
        arg[m] = to_set(g, s);
      }
    });
    for (std::size_t m : exact_classes) {
      if (ex[m].samples == 0) continue;
      ProfilePoint pt = ex[m];
      pt.size_class = m;
      pt.min_ratio = best[m];
      pt.witness = "exact";
      pt.witness_hash = set_hash(*arg[m]);
      pt.exact = true;
      points.push_back(pt);
    }
  }

  if (!heuristic_classes.empty()) {
    std::vector<ProfilePoint> hp(heuristic_classes.size());
    for (std::size_t i = 0; i < hp.size(); ++i) hp[i].size_class = heuristic_classes[i];
    if (budget.greedy) {
      const auto sets = greedy_checkpoints(sub, o, heuristic_classes);
      for (std::size_t i = 0; i < sets.size(); ++i) offer(hp[i], sets[i], counter(sets[i].ids()).frontier, "greedy");
    }
    for (std::size_t i = 0; i < hp.size(); ++i) {
      for (std::size_t k = 0; k < budget.uniform_runs; ++k) {
        const auto s = uniform_growth(sub, o, heuristic_classes[i],
                                      mix64(mix64(budget.seed) ^ (heuristic_classes[i] << 20) ^ k));
        if (!s) break;
        offer(hp[i], *s, counter(s->ids()).frontier, "uniform-" + std::to_string(k));
      }
    }
    for (auto& pt : hp)
      if (pt.samples > 0) points.push_back(pt);
  }
  std::sort(points.begin(), points.end(),
            [](const ProfilePoint& a, const ProfilePoint& b) { return a.size_class < b.size_class; });
  return points;
}

std::string profile_csv_header() { return "n,p,seed,size_class,min_ratio,exact_flag,witness_hash"; }

std::string profile_csv_row(int n, double p, std::uint64_t seed, const ProfilePoint& point) {
  std::ostringstream out;
  out << n << ',' << std::setprecision(17) << p << ',' << seed << ',' << point.size_class << ','
      << point.min_ratio << ',' << (point.exact ? 1 : 0) << ',' << std::hex << std::setw(16) << std::setfill('0')
      << point.witness_hash;
  return out.str();
}

SharpnessWitness sharpness_witness(const EdgeConfiguration& config, int r, GiantMode mode) {
  const Graph& g = config.graph();
  const int d = g.dim();
  SharpnessWitness out;
  if (r < 0) throw std::invalid_argument("radius must be non-negative");
  for (int i = 0; i < d; ++i)
    if (g.lo()[i] >= -r || g.hi()[i] <= r) {
      out.diagnostic = "box [-r,r]^d is not strictly inside the window";
      return out;
    }
  const auto lab = label(config);
  const auto giant = giant_proxy(lab, mode);
  if (!giant.id) {
    out.diagnostic = "no giant proxy";
    return out;
  }
  auto in_box = [&](VertexId v) {
    for (int i = 0; i < d; ++i)
      if (std::abs(g.coord(v, i)) > r) return false;
    return true;
  };
  auto in_giant = [&](VertexId v) { return lab.cluster_of(v) == *giant.id; };

  // components of the giant inside and outside the box, joined by open edges
  // that stay on one side
  std::vector<std::int32_t> comp(g.num_vertices(), -1);
  std::vector<std::size_t> comp_size;
  std::vector<std::uint8_t> comp_reaches;
  for (VertexId v : lab.members(*giant.id)) {
    if (comp[v] >= 0) continue;
    const bool side = in_box(v);
    const auto id = static_cast<std::int32_t>(comp_size.size());
    comp_size.push_back(0);
    comp_reaches.push_back(0);
    std::vector<VertexId> queue{v};
    comp[v] = id;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      ++comp_size[id];
      comp_reaches[id] = comp_reaches[id] || g.on_window_boundary(queue[h]);
      for (const auto& inc : g.incident(queue[h])) {
        if (!config.open(inc.edge) || in_box(inc.to) != side || comp[inc.to] >= 0) continue;
        comp[inc.to] = id;
        queue.push_back(inc.to);
      }
    }
  }
  std::vector<EdgeId> crossing;
  for (VertexId v : lab.members(*giant.id)) {
    if (!in_box(v)) continue;
    for (const auto& inc : g.incident(v))
      if (config.open(inc.edge) && !in_box(inc.to) && in_giant(inc.to)) crossing.push_back(inc.edge);
  }
  std::sort(crossing.begin(), crossing.end());
  auto inner = [&](EdgeId e) { return in_box(g.edge(e).u) ? g.edge(e).u : g.edge(e).v; };
  auto outer_end = [&](EdgeId e) { return in_box(g.edge(e).u) ? g.edge(e).v : g.edge(e).u; };
  // the kept edge must lead to a part of the giant that reaches the window
  // boundary without passing through the box
  std::optional<EdgeId> best;
  for (EdgeId e : crossing) {
    if (!comp_reaches[comp[outer_end(e)]]) continue;
    if (!best || comp_size[comp[inner(e)]] > comp_size[comp[inner(*best)]]) best = e;
  }
  if (!best) {
    out.diagnostic = "no open edge of the giant cluster joins the box to the outside part";
    return out;
  }
  const EdgeId kept = *best;

  EdgeConfiguration modified = config;
  for (EdgeId e : crossing)
    if (e != kept) {
      modified.set_open(e, false);
      ++out.redeclared;
    }
  const auto lab2 = label(modified);
  const auto id2 = lab2.cluster_of(outer_end(kept));
  for (VertexId v : lab2.members(id2))
    if (in_box(v)) out.s.push_back(v);
  std::sort(out.s.begin(), out.s.end());
  const auto sub = Subgraph::cluster(modified, lab2, id2);
  out.frontier = FrontierCounter(sub)(out.s).frontier;
  out.kept = kept;
  out.config.emplace(std::move(modified));
  return out;
}

}  // namespace perclab

#pragma once

// RRP then WARP for the shared-pool (M:N) scheme, the dedicated 1+1 baseline,
// a verifier that re-checks a finished design from raw data only, and the
// cross-run aggregates.
//
// The 1+1 baseline solves scenario 0 alone. Its per-node counts are for one
// pool; each site of a 1+1 design holds two identical pools, so the
// effective deployment is twice that.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "regenpool/errors.hpp"
#include "regenpool/milp/branch_and_bound.hpp"
#include "regenpool/qot.hpp"
#include "regenpool/rrp.hpp"
#include "regenpool/topology.hpp"
#include "regenpool/traffic.hpp"
#include "regenpool/warp.hpp"

namespace regenpool {

enum class Scheme { mn, one_plus_one };

inline const char* to_string(Scheme s) { return s == Scheme::mn ? "MN" : "OnePlusOne"; }

struct DesignConfig {
  int k = 3;
  Weights rrp_weights;
  Weights warp_weights;
  milp::Limits limits;
};

struct DemandAssignment {
  int demand = 0;
  bool accepted = false;
  std::vector<NodeId> path;     // node sequence, empty when rejected
  std::vector<LinkId> links;
  std::vector<int> lambda;      // 1-based, per link
  std::vector<NodeId> regen;    // every regeneration node, path order
  std::vector<NodeId> added;    // the subset placed by WARP
};

struct ScenarioAssignment {
  int scenario = 0;
  bool copied_from_base = false;
  std::vector<DemandAssignment> demands;  // one per input demand
};

struct StageSummary {
  std::string status;
  double objective = 0.0;
  double best_bound = 0.0;
  std::size_t nodes = 0;
  int accepted = 0, sites = 0, regenerators = 0;
};

struct DesignReport {
  Scheme scheme = Scheme::mn;
  bool optimal = false;
  std::string topology;
  int demand_count = 0;
  int wavelengths = 0;
  std::string config_hash;  // stamped by the caller; summarize refuses to mix
  std::uint64_t seed = 0;
  StageSummary rrp, warp;
  std::vector<ScenarioAssignment> scenarios;
  std::vector<int> regenerators;            // [u-1], one pool
  std::vector<int> effective_regenerators;  // [u-1], pools actually installed

  int accepted_count() const {
    if (scenarios.empty()) return 0;
    int n = 0;
    for (const auto& d : scenarios.front().demands) n += d.accepted;
    return n;
  }
  double acceptance_ratio() const { return demand_count ? static_cast<double>(accepted_count()) / demand_count : 0.0; }
  int site_count() const {
    return static_cast<int>(std::count_if(regenerators.begin(), regenerators.end(), [](int r) { return r > 0; }));
  }
  int regenerator_total() const {
    int s = 0;
    for (int r : regenerators) s += r;
    return s;
  }
  int effective_regenerator_total() const {
    int s = 0;
    for (int r : effective_regenerators) s += r;
    return s;
  }
};

namespace detail {

inline StageSummary stage(milp::Status st, double obj, double bound, std::size_t nodes, int acc, int sites, int regs) {
  return {milp::to_string(st), obj, bound, nodes, acc, sites, regs};
}

// Per-node peak of simultaneous regenerations over all scenarios.
inline std::vector<int> usage_peaks(const std::vector<ScenarioAssignment>& sc, const std::vector<Demand>& demands,
                                    int n_nodes) {
  std::vector<int> peak(n_nodes, 0);
  std::vector<Demand> live;
  std::vector<int> idx;
  for (std::size_t i = 0; i < demands.size(); ++i)
    if (sc.front().demands[i].accepted) {
      live.push_back(demands[i]);
      idx.push_back(static_cast<int>(i));
    }
  if (live.empty()) return peak;
  const TimeGrid grid(live);
  for (const auto& a : sc)
    for (int t = 0; t < grid.instant_count(); ++t) {
      std::vector<int> use(n_nodes, 0);
      for (std::size_t li = 0; li < live.size(); ++li)
        if (grid.active(static_cast<int>(li), t))
          for (NodeId u : a.demands[idx[li]].regen) ++use[u - 1];
      for (int u = 0; u < n_nodes; ++u) peak[u] = std::max(peak[u], use[u]);
    }
  return peak;
}

// Branching order: acceptance, sites, regeneration choices, then whatever
// is left, with wavelength columns last. Wavelengths are symmetric, so
// branching on them early multiplies equivalent subtrees. RRP leaves its
// regeneration columns in the default class: on nsf14 ranking them early
// was slower by orders of magnitude.
inline milp::Limits branch_order(milp::Limits l, const milp::Model& m, const std::vector<int>& a,
                                 const std::vector<int>& phi, const std::vector<int>& regen,
                                 const std::vector<int>& last = {}) {
  l.priority.assign(static_cast<std::size_t>(m.variable_count()), 0);
  for (int j : last) l.priority[j] = -1;
  for (int j : regen) l.priority[j] = 1;
  for (int j : phi) l.priority[j] = 2;
  for (int j : a) l.priority[j] = 3;
  return l;
}

template <class Map>
std::vector<int> columns_of(const Map& m) {
  std::vector<int> out;
  for (const auto& [key, j] : m) out.push_back(j);
  return out;
}

inline DesignReport run_design(const Topology& t, const std::vector<Demand>& demands, const QotEstimator& qot,
                               const DesignConfig& cfg, Scheme scheme) {
  if (auto bad = validate_demands(t, demands); !bad.empty()) throw ValidationError(bad.front());
  const RrpInstance in = make_rrp_instance(t, demands, qot, cfg.k, cfg.rrp_weights, scheme == Scheme::one_plus_one);
  const RrpModel rm = build_rrp(in);
  const milp::Model rsm = strengthened(rm);
  const milp::Solution rs = milp::solve_milp(rsm, branch_order(cfg.limits, rsm, rm.a, rm.phi, {}));
  const RrpSolution rrp = extract_rrp(rs, in, rm);

  const WarpInstance wi = segment_accepted(in, rrp, qot, cfg.warp_weights);
  const WarpModel wm = build_warp(wi);
  const milp::Model wsm = strengthened(wi, wm);
  const milp::Solution ws = milp::solve_milp(wsm, branch_order(cfg.limits, wsm, wm.a, wm.phi, columns_of(wm.d), columns_of(wm.rho)));
  const WarpSolution warp = extract_warp(ws, wi, wm);

  DesignReport r;
  r.scheme = scheme;
  r.optimal = rs.status == milp::Status::optimal && ws.status == milp::Status::optimal;
  r.topology = t.name();
  r.demand_count = static_cast<int>(demands.size());
  r.wavelengths = t.wavelength_count();
  r.rrp = stage(rs.status, rs.objective, rs.best_bound, rs.nodes, rrp.accepted_count(), rrp.site_count(),
                rrp.regenerator_total());
  r.warp = stage(ws.status, ws.objective, ws.best_bound, ws.nodes, warp.accepted_count(), warp.site_count(),
                 warp.regenerator_total());

  std::vector<int> parent_of(demands.size(), -1);
  for (std::size_t pi = 0; pi < wi.parents.size(); ++pi) parent_of[wi.parent_source_index[pi]] = static_cast<int>(pi);

  for (std::size_t k = 0; k < rrp.scenarios.size(); ++k) {
    const ScenarioRouting& sr = rrp.scenarios[k];
    ScenarioAssignment sa;
    sa.scenario = sr.scenario;
    sa.copied_from_base = sr.copied_from_base;
    for (std::size_t i = 0; i < demands.size(); ++i) {
      DemandAssignment da;
      da.demand = demands[i].id;
      const int pi = parent_of[i];
      da.accepted = pi >= 0 && warp.accepted[pi];
      if (da.accepted) {
        const PathCandidate& c = in.candidates[i][sr.rank[i] - 1];
        da.path = c.nodes;
        da.links = c.links;
        std::set<NodeId> all(sr.regen[i].begin(), sr.regen[i].end());
        for (const SubRequest& q : wi.subs[k]) {
          if (q.parent != pi) continue;
          const SubAssignment& a = warp.subs[k][q.index - 1];
          da.lambda.insert(da.lambda.end(), a.lambda.begin(), a.lambda.end());
          da.added.insert(da.added.end(), a.added.begin(), a.added.end());
          all.insert(a.added.begin(), a.added.end());
        }
        for (NodeId u : intermediate_nodes(da.path))
          if (all.count(u)) da.regen.push_back(u);
      }
      sa.demands.push_back(std::move(da));
    }
    r.scenarios.push_back(std::move(sa));
  }

  // A WARP rejection can empty a pool that RRP relied on. That node is no
  // longer a site, so its scenario falls back to scenario 0, which never
  // regenerates there. Copying can only lower peaks, so repeat until stable.
  const int n_nodes = t.node_count();
  for (bool changed = true; changed;) {
    changed = false;
    const auto peak = usage_peaks(r.scenarios, demands, n_nodes);
    for (std::size_t k = 1; k < r.scenarios.size(); ++k) {
      ScenarioAssignment& sa = r.scenarios[k];
      if (peak[sa.scenario - 1] > 0 || sa.copied_from_base) continue;
      sa.demands = r.scenarios[0].demands;
      sa.copied_from_base = true;
      changed = true;
    }
  }
  r.regenerators = usage_peaks(r.scenarios, demands, n_nodes);
  r.effective_regenerators = r.regenerators;
  if (scheme == Scheme::one_plus_one)
    for (int& v : r.effective_regenerators) v *= 2;
  return r;
}

}  // namespace detail

inline DesignReport run_mn_design(const Topology& t, const std::vector<Demand>& demands, const QotEstimator& qot,
                                  const DesignConfig& cfg = {}) {
  return detail::run_design(t, demands, qot, cfg, Scheme::mn);
}

inline DesignReport run_one_plus_one_baseline(const Topology& t, const std::vector<Demand>& demands,
                                              const QotEstimator& qot, const DesignConfig& cfg = {}) {
  return detail::run_design(t, demands, qot, cfg, Scheme::one_plus_one);
}

// Every violation starts with a stable tag followed by ": ".
inline std::vector<std::string> verify(const DesignReport& r, const Topology& t, const std::vector<Demand>& demands,
                                       const QotEstimator& qot) {
  std::vector<std::string> out;
  auto bad = [&](const std::string& tag, const std::string& what) { out.push_back(tag + ": " + what); };
  const int n_nodes = t.node_count();
  const int W = t.wavelength_count();
  const double qth = qot.q_threshold();
  constexpr double kQTol = 1e-9;

  if (r.demand_count != static_cast<int>(demands.size())) bad("shape", "demand count differs from the input");
  const int want_scenarios = r.scheme == Scheme::mn ? t.scenario_count() : 1;
  if (static_cast<int>(r.scenarios.size()) != want_scenarios) {
    bad("shape", "expected " + std::to_string(want_scenarios) + " scenarios");
    return out;
  }
  for (std::size_t k = 0; k < r.scenarios.size(); ++k) {
    if (r.scenarios[k].scenario != static_cast<int>(k)) bad("shape", "scenarios out of order");
    if (r.scenarios[k].demands.size() != demands.size()) {
      bad("shape", "scenario " + std::to_string(k) + " does not list every demand");
      return out;
    }
  }
  if (static_cast<int>(r.regenerators.size()) != n_nodes || static_cast<int>(r.effective_regenerators.size()) != n_nodes) {
    bad("shape", "per-node counts have the wrong length");
    return out;
  }

  std::vector<bool> accepted(demands.size());
  for (std::size_t i = 0; i < demands.size(); ++i) accepted[i] = r.scenarios[0].demands[i].accepted;

  for (const ScenarioAssignment& sc : r.scenarios) {
    const int s = sc.scenario;
    const std::string where = "scenario " + std::to_string(s);
    for (std::size_t i = 0; i < demands.size(); ++i) {
      const DemandAssignment& da = sc.demands[i];
      const Demand& dm = demands[i];
      const std::string who = where + " demand " + std::to_string(dm.id);
      if (da.demand != dm.id) bad("shape", who + " listed out of order");
      if (da.accepted != accepted[i]) bad("acceptance", who + " accepted in some scenarios only");
      if (!da.accepted) {
        if (!da.path.empty() || !da.lambda.empty() || !da.regen.empty()) bad("acceptance", who + " rejected but routed");
        continue;
      }

      // Path: a simple directed walk from source to destination.
      bool path_ok = !da.links.empty() && da.path.size() == da.links.size() + 1 && da.path.front() == dm.source &&
                     da.path.back() == dm.destination;
      for (std::size_t h = 0; path_ok && h < da.links.size(); ++h) {
        const auto e = t.find_link(da.path[h], da.path[h + 1]);
        path_ok = e && *e == da.links[h];
      }
      if (path_ok && std::set<NodeId>(da.path.begin(), da.path.end()).size() != da.path.size()) path_ok = false;
      if (!path_ok) {
        bad("path", who + " path is not a simple walk between its endpoints");
        continue;
      }
      if (da.lambda.size() != da.links.size() ||
          std::any_of(da.lambda.begin(), da.lambda.end(), [&](int l) { return l < 1 || l > W; })) {
        bad("wavelength", who + " needs one wavelength in 1.." + std::to_string(W) + " per link");
        continue;
      }
      const auto mid = intermediate_nodes(da.path);
      std::vector<NodeId> ordered;
      for (NodeId u : mid)
        if (std::find(da.regen.begin(), da.regen.end(), u) != da.regen.end()) ordered.push_back(u);
      if (ordered != da.regen) bad("regeneration", who + " regenerates outside the path interior");
      for (NodeId u : da.added)
        if (std::find(da.regen.begin(), da.regen.end(), u) == da.regen.end())
          bad("regeneration", who + " lists an added regenerator that is not on its regeneration list");
      if (s >= 1 && std::find(da.regen.begin(), da.regen.end(), s) != da.regen.end())
        bad("failure-pinning", who + " regenerates at the failed node");

      // Continuity, then Q of every transparent segment at its wavelength.
      std::size_t start = 0;
      for (std::size_t h = 0; h < da.links.size(); ++h) {
        const NodeId end = da.path[h + 1];
        const bool last = h + 1 == da.links.size();
        const bool cut = !last && std::find(da.regen.begin(), da.regen.end(), end) != da.regen.end();
        if (!last && !cut && da.lambda[h] != da.lambda[h + 1])
          bad("continuity", who + " changes wavelength at node " + std::to_string(end) + " without regeneration");
        if (last || cut) {
          const std::span<const LinkId> seg(da.links.data() + start, h - start + 1);
          const double lam = wavelength_grid(qot.params(), W)[da.lambda[start] - 1];
          const double q = qot.q_segment(t, seg, lam);
          if (q < qth - kQTol)
            bad("qot", who + " segment from node " + std::to_string(da.path[start]) + " to node " + std::to_string(end) +
                           " has Q " + format_double(q) + " dB");
          start = h + 1;
        }
      }
    }
  }

  // Clash freedom and peaks on the grid of accepted demands.
  std::vector<Demand> live;
  std::vector<int> live_index;
  for (std::size_t i = 0; i < demands.size(); ++i)
    if (accepted[i]) {
      live.push_back(demands[i]);
      live_index.push_back(static_cast<int>(i));
    }
  std::vector<int> peak(n_nodes, 0);
  if (!live.empty()) {
    const TimeGrid grid(live);
    for (const ScenarioAssignment& sc : r.scenarios)
      for (int t_ = 0; t_ < grid.instant_count(); ++t_) {
        std::map<std::pair<LinkId, int>, int> seen;
        std::vector<int> use(n_nodes, 0);
        for (std::size_t li = 0; li < live.size(); ++li) {
          if (!grid.active(static_cast<int>(li), t_)) continue;
          const DemandAssignment& da = sc.demands[live_index[li]];
          if (da.lambda.size() == da.links.size())
            for (std::size_t h = 0; h < da.links.size(); ++h)
              if (++seen[{da.links[h], da.lambda[h]}] == 2)
                bad("clash", "scenario " + std::to_string(sc.scenario) + " link " + std::to_string(da.links[h]) +
                                 " wavelength " + std::to_string(da.lambda[h]) + " at instant " +
                                 format_double(grid.instants()[t_]));
          for (NodeId u : da.regen)
            if (u >= 1 && u <= n_nodes) ++use[u - 1];
        }
        for (int u = 0; u < n_nodes; ++u) peak[u] = std::max(peak[u], use[u]);
      }
  }
  for (int u = 0; u < n_nodes; ++u) {
    if (r.regenerators[u] != peak[u])
      bad("peak", "node " + std::to_string(u + 1) + " reports " + std::to_string(r.regenerators[u]) +
                      " regenerators, usage peaks at " + std::to_string(peak[u]));
    const int pools = r.scheme == Scheme::one_plus_one ? 2 : 1;
    if (r.effective_regenerators[u] != pools * r.regenerators[u])
      bad("peak", "node " + std::to_string(u + 1) + " effective count is not " + std::to_string(pools) + "x the pool");
  }

  // A failed node that hosts no pool leaves scenario 0 untouched: same paths
  // and same RRP-level regeneration.
  for (std::size_t k = 1; k < r.scenarios.size(); ++k) {
    const int s = r.scenarios[k].scenario;
    if (s < 1 || s > n_nodes || peak[s - 1] > 0) continue;
    for (std::size_t i = 0; i < demands.size(); ++i) {
      const DemandAssignment& a = r.scenarios[k].demands[i];
      const DemandAssignment& b = r.scenarios[0].demands[i];
      auto base_regen = [](const DemandAssignment& d) {
        std::vector<NodeId> v;
        for (NodeId u : d.regen)
          if (std::find(d.added.begin(), d.added.end(), u) == d.added.end()) v.push_back(u);
        return v;
      };
      if (a.path != b.path || base_regen(a) != base_regen(b))
        bad("copy-rule", "scenario " + std::to_string(s) + " demand " + std::to_string(a.demand) +
                             " differs from scenario 0 although node " + std::to_string(s) + " is not a site");
    }
  }
  return out;
}

inline bool has_violation(const std::vector<std::string>& vs, const std::string& tag) {
  return std::any_of(vs.begin(), vs.end(), [&](const std::string& v) { return v.rfind(tag + ": ", 0) == 0; });
}

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample estimator, 0 when n == 1
  int n = 0;
  bool single() const { return n == 1; }
};

inline Stat describe(const std::vector<double>& xs) {
  if (xs.empty()) throw Error("statistics of an empty sample");
  Stat s;
  s.n = static_cast<int>(xs.size());
  for (double x : xs) s.mean += x;
  s.mean /= s.n;
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(ss / (s.n - 1));
  }
  return s;
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) throw Error("median of an empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

struct Summary {
  Scheme scheme = Scheme::mn;
  std::string config_hash;
  int runs = 0;
  Stat acceptance, sites, regenerators, effective_regenerators;
  std::vector<double> node_median;  // [u-1]
};

inline Summary summarize(const std::vector<DesignReport>& rs) {
  if (rs.empty()) throw Error("nothing to summarize");
  Summary s;
  s.scheme = rs.front().scheme;
  s.config_hash = rs.front().config_hash;
  s.runs = static_cast<int>(rs.size());
  const std::size_t n_nodes = rs.front().regenerators.size();
  std::vector<double> acc, sites, regs, eff;
  for (const auto& r : rs) {
    if (r.scheme != s.scheme || r.config_hash != s.config_hash || r.topology != rs.front().topology ||
        r.regenerators.size() != n_nodes)
      throw Error("cannot summarize runs with different configurations");
    acc.push_back(r.acceptance_ratio());
    sites.push_back(r.site_count());
    regs.push_back(r.regenerator_total());
    eff.push_back(r.effective_regenerator_total());
  }
  s.acceptance = describe(acc);
  s.sites = describe(sites);
  s.regenerators = describe(regs);
  s.effective_regenerators = describe(eff);
  for (std::size_t u = 0; u < n_nodes; ++u) {
    std::vector<double> col;
    for (const auto& r : rs) col.push_back(r.regenerators[u]);
    s.node_median.push_back(median(col));
  }
  return s;
}

// Share of regenerators saved by the shared pool against duplicated pools.
inline double protection_reduction(double mn_total, double baseline_single_pool_total) {
  if (baseline_single_pool_total <= 0.0) {
    if (mn_total == 0.0) return 0.0;
    throw Error("baseline without regenerators cannot anchor a reduction");
  }
  return 1.0 - mn_total / (2.0 * baseline_single_pool_total);
}

}  // namespace regenpool

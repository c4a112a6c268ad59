#pragma once

// Wavelength assignment and regenerator placement (WARP) on the paths fixed
// by RRP. Each accepted demand is cut at its RRP regeneration nodes into
// sub-requests, separately per scenario; rejecting any sub-request in any
// scenario rejects the parent everywhere (all sub-requests share a_i) and
// releases the parent's RRP regenerators through the a_i factor in the usage
// rows.
//
// Names: a_i  rho_s_d_m_l  d_s_d_u  psi_s_u_t  phi_u  R_u, with d the 1-based
// sub-request index within scenario s and l the 1-based wavelength index.
//
// The spectral rule for link m at wavelength l is
//   Q^l * rho_m^l + Qth * sum_u d_u >= Qth * rho_m^l
// over the intermediate nodes u of the sub-path. With rho = 0 it is void;
// with rho = 1 it holds either when Q^l >= Qth or when at least one
// regenerator sits on the sub-path, because both Q^l and Qth are positive.
// No big-M is needed. Rows with Q^l >= Qth are always satisfied and are not
// generated.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "regenpool/errors.hpp"
#include "regenpool/milp/model.hpp"
#include "regenpool/qot.hpp"
#include "regenpool/rrp.hpp"
#include "regenpool/traffic.hpp"

namespace regenpool {

struct SubRequest {
  int scenario = 0;
  int index = 0;   // 1-based within the scenario
  int parent = 0;  // 0-based into WarpInstance::parents
  int demand = 0;  // demand id
  std::vector<LinkId> links;
  std::vector<NodeId> nodes;
  double setup = 0.0, teardown = 0.0;
  std::vector<double> q_spectrum;  // [l-1]
};

struct WarpInstance {
  Topology topology;
  std::vector<int> scenarios;
  std::vector<Demand> parents;
  std::vector<int> parent_source_index;                // index into the RRP demand list
  std::vector<std::vector<SubRequest>> subs;           // [k]
  std::vector<std::vector<std::vector<NodeId>>> rrp_regen;  // [k][parent]
  std::vector<std::vector<std::vector<NodeId>>> paths;      // [k][parent], node sequence
  TimeGrid grid;                                       // over the parents
  double q_threshold = 15.6;
  Weights weights;
};

inline WarpInstance segment_accepted(const RrpInstance& in, const RrpSolution& rrp, const QotEstimator& qot,
                                     Weights w = {}) {
  WarpInstance out;
  out.topology = in.topology;
  out.scenarios.clear();
  out.q_threshold = qot.q_threshold();
  out.weights = w;
  for (std::size_t i = 0; i < in.demands.size(); ++i)
    if (rrp.accepted[i]) {
      out.parents.push_back(in.demands[i]);
      out.parent_source_index.push_back(static_cast<int>(i));
    }
  if (!out.parents.empty()) out.grid = build_time_grid(out.parents);

  for (const ScenarioRouting& r : rrp.scenarios) {
    out.scenarios.push_back(r.scenario);
    std::vector<SubRequest> subs;
    std::vector<std::vector<NodeId>> regen, paths;
    for (std::size_t pi = 0; pi < out.parents.size(); ++pi) {
      const int i = out.parent_source_index[pi];
      const PathCandidate& c = in.candidates[i][r.rank[i] - 1];
      regen.push_back(r.regen[i]);
      paths.push_back(c.nodes);
      const std::set<NodeId> cuts(r.regen[i].begin(), r.regen[i].end());
      SubRequest cur;
      cur.nodes.push_back(c.nodes.front());
      for (std::size_t h = 0; h < c.links.size(); ++h) {
        cur.links.push_back(c.links[h]);
        cur.nodes.push_back(c.nodes[h + 1]);
        if (h + 1 == c.links.size() || cuts.count(c.nodes[h + 1])) {
          cur.scenario = r.scenario;
          cur.index = static_cast<int>(subs.size()) + 1;
          cur.parent = static_cast<int>(pi);
          cur.demand = out.parents[pi].id;
          cur.setup = out.parents[pi].setup;
          cur.teardown = out.parents[pi].teardown;
          cur.q_spectrum = qot.q_spectrum_for_path(in.topology, cur.links);
          subs.push_back(std::move(cur));
          cur = SubRequest{};
          cur.nodes.push_back(c.nodes[h + 1]);
        }
      }
    }
    out.subs.push_back(std::move(subs));
    out.rrp_regen.push_back(std::move(regen));
    out.paths.push_back(std::move(paths));
  }
  return out;
}

struct WarpModel {
  milp::Model model;
  std::vector<int> a;                                // [parent]
  std::vector<int> phi, R;                           // [u-1]
  std::map<std::tuple<int, int, int, int>, int> rho; // (k, d0, link position, l0)
  std::map<std::tuple<int, int, NodeId>, int> d;     // (k, d0, u)
  std::map<std::tuple<int, NodeId, int>, int> psi;   // (k, u, t)
};

inline WarpModel build_warp(const WarpInstance& in) {
  using milp::RowSense;
  using milp::Term;
  using milp::VarKind;
  using detail::vname;

  const Topology& topo = in.topology;
  const int n_nodes = topo.node_count();
  const int W = topo.wavelength_count();
  const int P = static_cast<int>(in.parents.size());
  const int T = P ? in.grid.instant_count() : 0;
  const int S = static_cast<int>(in.scenarios.size());
  const double qth = in.q_threshold;

  WarpModel wm;
  wm.model = milp::Model("warp");
  milp::Model& m = wm.model;
  m.set_sense(milp::ObjSense::maximize);

  for (int pi = 0; pi < P; ++pi) wm.a.push_back(m.add_binary(vname("a", in.parents[pi].id), in.weights.accept));
  for (int u = 1; u <= n_nodes; ++u) wm.phi.push_back(m.add_binary(vname("phi", u), -in.weights.sites));
  for (int u = 1; u <= n_nodes; ++u)
    wm.R.push_back(m.add_variable(vname("R", u), VarKind::integer, 0, kMaxRegeneratorsPerNode, -in.weights.regenerators));

  for (int k = 0; k < S; ++k) {
    const int s = in.scenarios[k];
    const auto& subs = in.subs[k];
    for (const SubRequest& q : subs) {
      if (q.links.empty()) throw BuildError("sub-request with empty path");
      const int d0 = q.index - 1;
      for (std::size_t h = 0; h < q.links.size(); ++h)
        for (int l = 0; l < W; ++l)
          wm.rho[{k, d0, static_cast<int>(h), l}] = m.add_binary(vname("rho", s, q.index, q.links[h], l + 1));
      for (NodeId u : intermediate_nodes(q.nodes)) wm.d[{k, d0, u}] = m.add_binary(vname("d", s, q.index, u));
    }
    const int bound = P + static_cast<int>(subs.size());
    for (int u = 1; u <= n_nodes; ++u)
      for (int t = 0; t < T; ++t)
        wm.psi[{k, u, t}] = m.add_variable(vname("psi", s, u, t + 1), VarKind::integer, 0, bound);
  }

  for (int k = 0; k < S; ++k) {
    const int s = in.scenarios[k];
    const auto& subs = in.subs[k];
    for (const SubRequest& q : subs) {
      const int d0 = q.index - 1;
      const int h = static_cast<int>(q.links.size());
      for (int pos = 0; pos < h; ++pos) {
        std::vector<Term> row{{wm.a[q.parent], -1.0}};
        for (int l = 0; l < W; ++l) row.push_back({wm.rho.at({k, d0, pos, l}), 1.0});
        m.add_constraint(vname("wl", s, q.index, q.links[pos]), row, RowSense::eq, 0.0);
      }
      for (int pos = 0; pos + 1 < h; ++pos) {
        const NodeId u = q.nodes[pos + 1];
        const int dv = wm.d.at({k, d0, u});
        for (int l = 0; l < W; ++l) {
          const int r1 = wm.rho.at({k, d0, pos, l}), r2 = wm.rho.at({k, d0, pos + 1, l});
          m.add_constraint(vname("cont_a", s, q.index, q.links[pos], l + 1), {{r1, 1.0}, {r2, -1.0}, {dv, -1.0}},
                           RowSense::le, 0.0);
          m.add_constraint(vname("cont_b", s, q.index, q.links[pos], l + 1), {{r2, 1.0}, {r1, -1.0}, {dv, -1.0}},
                           RowSense::le, 0.0);
        }
      }
      for (int l = 0; l < W; ++l) {
        const double ql = q.q_spectrum[l];
        if (ql >= qth) continue;
        for (int pos = 0; pos < h; ++pos) {
          std::vector<Term> row{{wm.rho.at({k, d0, pos, l}), ql - qth}};
          for (NodeId u : intermediate_nodes(q.nodes)) row.push_back({wm.d.at({k, d0, u}), qth});
          m.add_constraint(vname("qlam", s, q.index, q.links[pos], l + 1), row, RowSense::ge, 0.0);
        }
      }
    }

    // Clash rows only where at least two sub-requests compete.
    for (int t = 0; t < T; ++t) {
      std::map<LinkId, std::vector<std::pair<int, int>>> on_link;  // link -> (d0, pos)
      for (const SubRequest& q : subs) {
        if (!in.grid.active(q.parent, t)) continue;
        for (std::size_t pos = 0; pos < q.links.size(); ++pos)
          on_link[q.links[pos]].push_back({q.index - 1, static_cast<int>(pos)});
      }
      for (const auto& [e, users] : on_link) {
        if (users.size() < 2) continue;
        for (int l = 0; l < W; ++l) {
          std::vector<Term> row;
          for (auto [d0, pos] : users) row.push_back({wm.rho.at({k, d0, pos, l}), 1.0});
          m.add_constraint(vname("clash", s, e, l + 1, t + 1), row, RowSense::le, 1.0);
        }
      }
    }

    for (int u = 1; u <= n_nodes; ++u)
      for (int t = 0; t < T; ++t) {
        const int pv = wm.psi.at({k, u, t});
        std::vector<Term> row{{pv, 1.0}};
        for (int pi = 0; pi < P; ++pi) {
          if (!in.grid.active(pi, t)) continue;
          const auto& rg = in.rrp_regen[k][pi];
          if (std::find(rg.begin(), rg.end(), u) != rg.end()) row.push_back({wm.a[pi], -1.0});
        }
        for (const SubRequest& q : subs)
          if (in.grid.active(q.parent, t))
            if (auto it = wm.d.find({k, q.index - 1, u}); it != wm.d.end()) row.push_back({it->second, -1.0});
        m.add_constraint(vname("use", s, u, t + 1), row, RowSense::eq, 0.0);
        m.add_constraint(vname("peak", s, u, t + 1), {{wm.R[u - 1], 1.0}, {pv, -1.0}}, RowSense::ge, 0.0);
      }
    if (s >= 1)
      for (int t = 0; t < T; ++t)
        m.add_constraint(vname("fail", s, t + 1), {{wm.psi.at({k, s, t}), 1.0}}, RowSense::eq, 0.0);
  }

  for (int u = 1; u <= n_nodes; ++u)
    m.add_constraint(vname("site", u), {{wm.phi[u - 1], 1.0}, {wm.R[u - 1], -1e-3}}, RowSense::ge, 0.0);
  return wm;
}

// Same implication rows as for RRP: WARP regenerations and the RRP
// regenerations carried by an accepted parent both need a site.
inline milp::Model strengthened(const WarpInstance& in, const WarpModel& wm) {
  milp::Model m = wm.model;
  for (const auto& [key, dv] : wm.d) {
    const NodeId u = std::get<2>(key);
    m.add_constraint("imp_" + m.variable(dv).name.substr(2), {{dv, 1.0}, {wm.phi[u - 1], -1.0}}, milp::RowSense::le, 0.0);
  }
  std::set<std::pair<int, NodeId>> carried;
  for (const auto& per_parent : in.rrp_regen)
    for (std::size_t p = 0; p < per_parent.size(); ++p)
      for (NodeId u : per_parent[p]) carried.insert({static_cast<int>(p), u});
  for (auto [p, u] : carried)
    m.add_constraint("imp_a_" + std::to_string(in.parents[p].id) + "_" + std::to_string(u),
                     {{wm.a[p], 1.0}, {wm.phi[u - 1], -1.0}}, milp::RowSense::le, 0.0);
  return m;
}


struct SubAssignment {
  std::vector<int> lambda;      // [link position], 1-based; empty when rejected
  std::vector<NodeId> added;    // WARP regenerations, in path order
};

struct WarpSolution {
  milp::Status status = milp::Status::infeasible;
  double objective = 0.0;
  double best_bound = 0.0;
  std::size_t nodes = 0;
  std::vector<bool> accepted;                        // [parent]
  std::vector<std::vector<SubAssignment>> subs;      // [k][d0]
  std::vector<std::vector<std::vector<int>>> usage;  // [k][u-1][t]
  std::vector<int> regenerators;                     // [u-1]
  std::vector<bool> site;

  int accepted_count() const { return static_cast<int>(std::count(accepted.begin(), accepted.end(), true)); }
  int site_count() const { return static_cast<int>(std::count(site.begin(), site.end(), true)); }
  int regenerator_total() const {
    int s = 0;
    for (int r : regenerators) s += r;
    return s;
  }
};

inline WarpSolution extract_warp(const milp::Solution& sol, const WarpInstance& in, const WarpModel& wm) {
  if (!sol.has_assignment()) throw ExtractionError(std::string("WARP has no assignment (status ") + milp::to_string(sol.status) + ")");
  auto fail = [](const std::string& what) { throw ExtractionError("WARP extraction: " + what); };
  const int n_nodes = in.topology.node_count();
  const int W = in.topology.wavelength_count();
  const int P = static_cast<int>(in.parents.size());
  const int T = P ? in.grid.instant_count() : 0;
  const int S = static_cast<int>(in.scenarios.size());

  WarpSolution out;
  out.status = sol.status;
  out.objective = sol.objective;
  out.best_bound = sol.best_bound;
  out.nodes = sol.nodes;
  for (int pi = 0; pi < P; ++pi) out.accepted.push_back(sol.is_one(wm.a[pi]));

  out.subs.resize(S);
  out.usage.assign(S, std::vector<std::vector<int>>(n_nodes, std::vector<int>(T, 0)));
  for (int k = 0; k < S; ++k) {
    const int s = in.scenarios[k];
    for (const SubRequest& q : in.subs[k]) {
      const int d0 = q.index - 1;
      SubAssignment sa;
      const bool alive = out.accepted[q.parent];
      for (std::size_t pos = 0; pos < q.links.size(); ++pos) {
        int chosen = 0;
        for (int l = 0; l < W; ++l)
          if (sol.is_one(wm.rho.at({k, d0, static_cast<int>(pos), l}))) {
            if (chosen) fail("two wavelengths on one link");
            chosen = l + 1;
          }
        if (alive != (chosen != 0)) fail("wavelength reservation disagrees with acceptance of demand " + std::to_string(q.demand));
        if (chosen) sa.lambda.push_back(chosen);
      }
      if (alive) {
        for (NodeId u : intermediate_nodes(q.nodes))
          if (sol.is_one(wm.d.at({k, d0, u}))) sa.added.push_back(u);
        for (std::size_t pos = 0; pos + 1 < q.links.size(); ++pos)
          if (sa.lambda[pos] != sa.lambda[pos + 1] &&
              std::find(sa.added.begin(), sa.added.end(), q.nodes[pos + 1]) == sa.added.end())
            fail("wavelength changes without regeneration");
        for (std::size_t pos = 0; pos < q.links.size(); ++pos)
          if (q.q_spectrum[sa.lambda[pos] - 1] < in.q_threshold && sa.added.empty()) fail("degraded wavelength without repair");
      }
      out.subs[k].push_back(std::move(sa));
    }
    // Usage = surviving RRP regenerations + WARP additions.
    for (int pi = 0; pi < P; ++pi) {
      if (!out.accepted[pi]) continue;
      for (NodeId u : in.rrp_regen[k][pi])
        for (int t = 0; t < T; ++t)
          if (in.grid.active(pi, t)) ++out.usage[k][u - 1][t];
    }
    for (const SubRequest& q : in.subs[k]) {
      if (!out.accepted[q.parent]) continue;
      for (NodeId u : out.subs[k][q.index - 1].added)
        for (int t = 0; t < T; ++t)
          if (in.grid.active(q.parent, t)) ++out.usage[k][u - 1][t];
    }
    if (s >= 1)
      for (int v : out.usage[k][s - 1])
        if (v) fail("regenerator used at failed node " + std::to_string(s));

    for (int t = 0; t < T; ++t) {
      std::map<std::pair<LinkId, int>, int> seen;
      for (const SubRequest& q : in.subs[k]) {
        if (!out.accepted[q.parent] || !in.grid.active(q.parent, t)) continue;
        for (std::size_t pos = 0; pos < q.links.size(); ++pos)
          if (++seen[{q.links[pos], out.subs[k][q.index - 1].lambda[pos]}] > 1) fail("wavelength clash");
      }
    }
  }

  out.regenerators.assign(n_nodes, 0);
  for (const auto& per : out.usage)
    for (int u = 0; u < n_nodes; ++u)
      for (int v : per[u]) out.regenerators[u] = std::max(out.regenerators[u], v);
  for (int u = 0; u < n_nodes; ++u) {
    out.site.push_back(out.regenerators[u] > 0);
    if (out.regenerators[u] > sol.value(wm.R[u]) + milp::kFeasibilityTol) fail("recomputed peak exceeds R");
  }
  return out;
}

inline double warp_objective(const WarpInstance& in, const WarpSolution& s) {
  return in.weights.accept * s.accepted_count() - in.weights.sites * s.site_count() -
         in.weights.regenerators * s.regenerator_total();
}

}  // namespace regenpool

#pragma once

// Routing and regenerator placement (RRP): choose acceptance, one candidate
// path per scenario and the regeneration nodes, all at the reference
// wavelength.
//
// Variable names in the exported model:
//   a_i  p_s_i_j  z_s_i_j_m_n  d_s_i_u  psi_s_u_t  phi_u  R_u
// with i the demand id, j the candidate rank, m/n global link ids, u a node id
// and t the 1-based index into the time grid.
//
// Scenario 0 carries the acceptance equation. A failure scenario s routes an
// accepted demand only when s is a regeneration site (p sums to a_i*phi_s,
// linearized by three inequalities); otherwise the demand is copied from
// scenario 0 after solving.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "regenpool/errors.hpp"
#include "regenpool/ksp.hpp"
#include "regenpool/milp/branch_and_bound.hpp"
#include "regenpool/milp/model.hpp"
#include "regenpool/qot.hpp"
#include "regenpool/topology.hpp"
#include "regenpool/traffic.hpp"

namespace regenpool {

struct Weights {
  double accept = 1e5;
  double sites = 1e2;
  double regenerators = 1.0;
};

// Cap on R_u implied by the 1e-3 site coefficient.
inline constexpr int kMaxRegeneratorsPerNode = 1000;

struct RrpInstance {
  Topology topology;
  std::vector<Demand> demands;
  TimeGrid grid;
  std::vector<std::vector<PathCandidate>> candidates;  // per demand, ranks 1..K
  double q_threshold = 15.6;
  Weights weights;
  std::vector<int> scenarios;  // ascending, starts with 0
};

inline std::vector<int> all_scenarios(const Topology& t) {
  std::vector<int> s(static_cast<std::size_t>(t.scenario_count()));
  for (int k = 0; k < t.scenario_count(); ++k) s[k] = k;
  return s;
}

inline RrpInstance make_rrp_instance(const Topology& t, std::vector<Demand> demands, const QotEstimator& qot, int k,
                                     Weights w = {}, bool scenario_zero_only = false) {
  RrpInstance in;
  in.topology = t;
  in.grid = build_time_grid(demands);
  in.candidates = candidate_paths(t, demands, qot, k);
  in.demands = std::move(demands);
  in.q_threshold = qot.q_threshold();
  in.weights = w;
  in.scenarios = scenario_zero_only ? std::vector<int>{0} : all_scenarios(t);
  return in;
}

inline std::vector<NodeId> intermediate_nodes(const std::vector<NodeId>& path_nodes) {
  if (path_nodes.size() < 3) return {};
  return {path_nodes.begin() + 1, path_nodes.end() - 1};
}

struct RrpModel {
  milp::Model model;
  std::vector<int> scenarios;
  std::vector<int> a;                            // [i]
  std::vector<int> phi, R;                       // [u-1]
  std::vector<std::vector<std::vector<int>>> p;  // [k][i][j]
  std::map<std::tuple<int, int, int, int, int>, int> zeta;  // (k, i, j, m_pos, n_pos)
  std::map<std::tuple<int, int, NodeId>, int> d;            // (k, i, u)
  std::map<std::tuple<int, NodeId, int>, int> psi;          // (k, u, t)
  int capacity_rows = 0;
  int failure_rows = 0;
};

namespace detail {

template <class... Ts>
std::string vname(const char* head, Ts... ix) {
  std::string s = head;
  ((s += "_" + std::to_string(ix)), ...);
  return s;
}

}  // namespace detail

inline RrpModel build_rrp(const RrpInstance& in) {
  using milp::RowSense;
  using milp::Term;
  using milp::VarKind;
  using detail::vname;

  const Topology& topo = in.topology;
  const int n_nodes = topo.node_count();
  const int D = static_cast<int>(in.demands.size());
  const int T = in.grid.instant_count();
  if (in.scenarios.empty() || in.scenarios.front() != 0) throw BuildError("scenario list must start with scenario 0");
  if (in.candidates.size() != in.demands.size()) throw BuildError("candidate list does not match demands");
  for (int i = 0; i < D; ++i)
    if (in.candidates[i].empty()) throw BuildError("demand " + std::to_string(in.demands[i].id) + " has no candidate path");
  if (!(in.weights.accept > 0 && in.weights.sites > 0 && in.weights.regenerators > 0))
    throw BuildError("objective weights must be positive");

  RrpModel rm;
  rm.model = milp::Model("rrp");
  rm.scenarios = in.scenarios;
  milp::Model& m = rm.model;
  m.set_sense(milp::ObjSense::maximize);

  for (int i = 0; i < D; ++i) rm.a.push_back(m.add_binary(vname("a", in.demands[i].id), in.weights.accept));
  for (int u = 1; u <= n_nodes; ++u) rm.phi.push_back(m.add_binary(vname("phi", u), -in.weights.sites));
  for (int u = 1; u <= n_nodes; ++u)
    rm.R.push_back(m.add_variable(vname("R", u), VarKind::integer, 0, kMaxRegeneratorsPerNode, -in.weights.regenerators));

  // Regeneration candidates per demand: intermediate nodes of any candidate.
  std::vector<std::set<NodeId>> regen_nodes(D);
  for (int i = 0; i < D; ++i)
    for (const auto& c : in.candidates[i])
      for (NodeId u : intermediate_nodes(c.nodes)) regen_nodes[i].insert(u);

  // Link usage per demand, for the capacity rows.
  std::set<LinkId> used_links;
  for (const auto& cs : in.candidates)
    for (const auto& c : cs) used_links.insert(c.links.begin(), c.links.end());

  const int S = static_cast<int>(in.scenarios.size());
  rm.p.assign(S, {});
  for (int k = 0; k < S; ++k) {
    const int s = in.scenarios[k];
    rm.p[k].assign(D, {});
    for (int i = 0; i < D; ++i) {
      const int id = in.demands[i].id;
      for (const auto& c : in.candidates[i]) rm.p[k][i].push_back(m.add_binary(vname("p", s, id, c.rank)));
      for (const auto& c : in.candidates[i]) {
        const int h = static_cast<int>(c.links.size());
        for (int mp = 0; mp < h; ++mp)
          for (int np = mp; np < h; ++np)
            rm.zeta[{k, i, c.rank - 1, mp, np}] = m.add_binary(vname("z", s, id, c.rank, c.links[mp], c.links[np]));
      }
      for (NodeId u : regen_nodes[i]) rm.d[{k, i, u}] = m.add_binary(vname("d", s, id, u));
    }
    for (int u = 1; u <= n_nodes; ++u)
      for (int t = 0; t < T; ++t) rm.psi[{k, u, t}] = m.add_variable(vname("psi", s, u, t + 1), VarKind::integer, 0, D);
  }

  for (int k = 0; k < S; ++k) {
    const int s = in.scenarios[k];
    // Acceptance in scenario 0, linked product a_i * phi_s elsewhere.
    for (int i = 0; i < D; ++i) {
      const int id = in.demands[i].id;
      std::vector<Term> sum;
      for (int v : rm.p[k][i]) sum.push_back({v, 1.0});
      if (s == 0) {
        auto row = sum;
        row.push_back({rm.a[i], -1.0});
        m.add_constraint(vname("accept", id), row, RowSense::eq, 0.0);
      } else {
        auto r1 = sum;
        r1.push_back({rm.a[i], -1.0});
        m.add_constraint(vname("lin_a", s, id), r1, RowSense::le, 0.0);
        auto r2 = sum;
        r2.push_back({rm.phi[s - 1], -1.0});
        m.add_constraint(vname("lin_phi", s, id), r2, RowSense::le, 0.0);
        auto r3 = sum;
        r3.push_back({rm.a[i], -1.0});
        r3.push_back({rm.phi[s - 1], -1.0});
        m.add_constraint(vname("lin_both", s, id), r3, RowSense::ge, -1.0);
      }
    }

    // Capacity per instant and link.
    for (int t = 0; t < T; ++t) {
      const auto active = in.grid.active_demands(t);
      if (active.empty()) continue;
      for (LinkId e : used_links) {
        std::vector<Term> row;
        std::set<int> users;
        for (int i : active)
          for (const auto& c : in.candidates[i])
            if (std::find(c.links.begin(), c.links.end(), e) != c.links.end()) {
              row.push_back({rm.p[k][i][c.rank - 1], 1.0});
              users.insert(i);
            }
        // At most one candidate per demand is chosen, so fewer than W+1
        // distinct demands can never overload the link.
        if (static_cast<int>(users.size()) <= topo.wavelength_count()) continue;
        m.add_constraint(vname("cap", s, t + 1, e), row, RowSense::le, topo.wavelength_count());
        ++rm.capacity_rows;
      }
    }

    // Segment cover and regeneration implication.
    for (int i = 0; i < D; ++i) {
      const int id = in.demands[i].id;
      const NodeId src = in.demands[i].source;
      for (const auto& c : in.candidates[i]) {
        const int j = c.rank - 1;
        const int pv = rm.p[k][i][j];
        const int h = static_cast<int>(c.links.size());
        for (int np = 0; np < h; ++np) {
          std::vector<Term> q_row{{pv, -in.q_threshold}}, sel_row{{pv, -1.0}};
          for (int mp = 0; mp <= np; ++mp) {
            const int z = rm.zeta.at({k, i, j, mp, np});
            q_row.push_back({z, c.q_matrix.at(mp, np)});
            sel_row.push_back({z, 1.0});
          }
          m.add_constraint(vname("qcov", s, id, c.rank, c.links[np]), q_row, RowSense::ge, 0.0);
          m.add_constraint(vname("qsel", s, id, c.rank, c.links[np]), sel_row, RowSense::eq, 0.0);
        }
        for (int mp = 0; mp < h; ++mp) {
          const NodeId u = topo.link(c.links[mp]).from;
          if (u == src) continue;
          const int dv = rm.d.at({k, i, u});
          for (int np = mp; np < h; ++np)
            m.add_constraint(vname("regen", s, id, c.rank, c.links[mp], c.links[np]),
                             {{dv, 1.0}, {rm.zeta.at({k, i, j, mp, np}), -1.0}}, RowSense::ge, 0.0);
        }
      }
    }

    // Usage, peak and failure pinning.
    for (int u = 1; u <= n_nodes; ++u)
      for (int t = 0; t < T; ++t) {
        const int pv = rm.psi.at({k, u, t});
        std::vector<Term> row{{pv, 1.0}};
        for (int i : in.grid.active_demands(t))
          if (auto it = rm.d.find({k, i, u}); it != rm.d.end()) row.push_back({it->second, -1.0});
        m.add_constraint(vname("use", s, u, t + 1), row, RowSense::eq, 0.0);
        m.add_constraint(vname("peak", s, u, t + 1), {{rm.R[u - 1], 1.0}, {pv, -1.0}}, RowSense::ge, 0.0);
      }
    if (s >= 1)
      for (int t = 0; t < T; ++t) {
        m.add_constraint(vname("fail", s, t + 1), {{rm.psi.at({k, s, t}), 1.0}}, RowSense::eq, 0.0);
        ++rm.failure_rows;
      }
  }

  for (int u = 1; u <= n_nodes; ++u)
    m.add_constraint(vname("site", u), {{rm.phi[u - 1], 1.0}, {rm.R[u - 1], -1e-3}}, RowSense::ge, 0.0);
  return rm;
}

// The site row alone lets the LP open a site at a thousandth of its cost.
// Any d = 1 forces R >= 1 and so phi = 1, hence d <= phi holds for every
// integer solution. Solving with these rows gives the same optimum with far
// fewer nodes; exported models keep the plain formulation.
inline milp::Model strengthened(const RrpModel& rm) {
  milp::Model m = rm.model;
  for (const auto& [key, dv] : rm.d) {
    const NodeId u = std::get<2>(key);
    m.add_constraint("imp_" + m.variable(dv).name.substr(2), {{dv, 1.0}, {rm.phi[u - 1], -1.0}}, milp::RowSense::le, 0.0);
  }
  return m;
}


// Routing of every demand in one scenario. rank 0 means not routed.
struct ScenarioRouting {
  int scenario = 0;
  bool copied_from_base = false;
  std::vector<int> rank;                        // [i]
  std::vector<std::vector<int>> cover;          // [i][n_pos] -> m_pos of the covering segment
  std::vector<std::vector<NodeId>> regen;       // [i], in path order
};

struct RrpSolution {
  milp::Status status = milp::Status::infeasible;
  double objective = 0.0;
  double best_bound = 0.0;
  std::size_t nodes = 0;
  std::vector<bool> accepted;                   // [i]
  std::vector<ScenarioRouting> scenarios;       // same order as the instance
  std::vector<std::vector<std::vector<int>>> usage;  // [k][u-1][t]
  std::vector<int> regenerators;                // [u-1]
  std::vector<bool> site;                       // [u-1]

  int accepted_count() const { return static_cast<int>(std::count(accepted.begin(), accepted.end(), true)); }
  int site_count() const { return static_cast<int>(std::count(site.begin(), site.end(), true)); }
  int regenerator_total() const {
    int s = 0;
    for (int r : regenerators) s += r;
    return s;
  }
};

namespace detail {

inline std::vector<std::vector<std::vector<int>>> usage_from(const RrpInstance& in,
                                                             const std::vector<ScenarioRouting>& sc) {
  const int n_nodes = in.topology.node_count();
  const int T = in.grid.instant_count();
  std::vector<std::vector<std::vector<int>>> use(sc.size(),
                                                 std::vector<std::vector<int>>(n_nodes, std::vector<int>(T, 0)));
  for (std::size_t k = 0; k < sc.size(); ++k)
    for (std::size_t i = 0; i < sc[k].regen.size(); ++i)
      for (NodeId u : sc[k].regen[i])
        for (int t = 0; t < T; ++t)
          if (in.grid.active(static_cast<int>(i), t)) ++use[k][u - 1][t];
  return use;
}

}  // namespace detail

inline RrpSolution extract_rrp(const milp::Solution& sol, const RrpInstance& in, const RrpModel& rm) {
  if (!sol.has_assignment()) throw ExtractionError(std::string("RRP has no assignment (status ") + milp::to_string(sol.status) + ")");
  const Topology& topo = in.topology;
  const int D = static_cast<int>(in.demands.size());
  const int n_nodes = topo.node_count();
  const int S = static_cast<int>(rm.scenarios.size());
  const double tol = milp::kFeasibilityTol;

  RrpSolution out;
  out.status = sol.status;
  out.objective = sol.objective;
  out.best_bound = sol.best_bound;
  out.nodes = sol.nodes;
  for (int i = 0; i < D; ++i) out.accepted.push_back(sol.is_one(rm.a[i]));

  auto fail = [](const std::string& what) { throw ExtractionError("RRP extraction: " + what); };

  std::vector<bool> routed(S, false);
  out.scenarios.resize(S);
  for (int k = 0; k < S; ++k) {
    const int s = rm.scenarios[k];
    ScenarioRouting& r = out.scenarios[k];
    r.scenario = s;
    r.rank.assign(D, 0);
    r.cover.assign(D, {});
    r.regen.assign(D, {});
    routed[k] = s == 0 || sol.is_one(rm.phi[s - 1]);
    for (int i = 0; i < D; ++i) {
      int chosen = 0;
      for (std::size_t j = 0; j < rm.p[k][i].size(); ++j)
        if (sol.is_one(rm.p[k][i][j])) {
          if (chosen) fail("demand " + std::to_string(in.demands[i].id) + " has two paths in scenario " + std::to_string(s));
          chosen = static_cast<int>(j) + 1;
        }
      const bool want = out.accepted[i] && routed[k];
      if (want != (chosen != 0))
        fail("path selection of demand " + std::to_string(in.demands[i].id) + " in scenario " + std::to_string(s) +
             " disagrees with acceptance");
      if (!chosen) continue;
      r.rank[i] = chosen;
      const PathCandidate& c = in.candidates[i][chosen - 1];
      const int h = static_cast<int>(c.links.size());
      std::set<NodeId> implied;
      for (int np = 0; np < h; ++np) {
        int mp_sel = -1;
        for (int mp = 0; mp <= np; ++mp)
          if (sol.is_one(rm.zeta.at({k, i, chosen - 1, mp, np}))) {
            if (mp_sel >= 0) fail("two covering segments");
            mp_sel = mp;
          }
        if (mp_sel < 0) fail("uncovered link");
        if (c.q_matrix.at(mp_sel, np) < in.q_threshold - tol * in.q_threshold) fail("covering segment below threshold");
        r.cover[i].push_back(mp_sel);
        if (mp_sel > 0) implied.insert(topo.link(c.links[mp_sel]).from);
      }
      for (NodeId u : intermediate_nodes(c.nodes))
        if (sol.is_one(rm.d.at({k, static_cast<int>(i), u}))) r.regen[i].push_back(u);
      for (NodeId u : implied)
        if (std::find(r.regen[i].begin(), r.regen[i].end(), u) == r.regen[i].end()) fail("segment start without regeneration flag");
    }
  }

  // Provisional peaks over routed scenarios decide which nodes are sites.
  std::vector<ScenarioRouting> routed_only;
  for (int k = 0; k < S; ++k)
    if (routed[k]) routed_only.push_back(out.scenarios[k]);
  const auto use0 = detail::usage_from(in, routed_only);
  std::vector<int> peak(n_nodes, 0);
  for (const auto& per : use0)
    for (int u = 0; u < n_nodes; ++u)
      for (int v : per[u]) peak[u] = std::max(peak[u], v);

  // Non-site failure scenarios reuse scenario 0.
  for (int k = 1; k < S; ++k) {
    const int s = rm.scenarios[k];
    if (peak[s - 1] > 0) {
      if (!routed[k]) fail("scenario " + std::to_string(s) + " not routed although node is a site");
      continue;
    }
    const int keep = out.scenarios[k].scenario;
    out.scenarios[k] = out.scenarios[0];
    out.scenarios[k].scenario = keep;
    out.scenarios[k].copied_from_base = true;
  }

  out.usage = detail::usage_from(in, out.scenarios);
  out.regenerators.assign(n_nodes, 0);
  for (const auto& per : out.usage)
    for (int u = 0; u < n_nodes; ++u)
      for (int v : per[u]) out.regenerators[u] = std::max(out.regenerators[u], v);
  for (int u = 0; u < n_nodes; ++u) {
    out.site.push_back(out.regenerators[u] > 0);
    if (out.regenerators[u] > sol.value(rm.R[u]) + tol) fail("recomputed peak exceeds R_" + std::to_string(u + 1));
  }

  // Invariants on the final routing.
  for (int k = 0; k < S; ++k) {
    const int s = out.scenarios[k].scenario;
    for (int u = 0; u < n_nodes; ++u)
      if (s >= 1 && u + 1 == s)
        for (int v : out.usage[k][u])
          if (v != 0) fail("regenerator used at failed node " + std::to_string(s));
    for (int t = 0; t < in.grid.instant_count(); ++t) {
      std::map<LinkId, int> load;
      for (int i = 0; i < D; ++i) {
        const int j = out.scenarios[k].rank[i];
        if (!j || !in.grid.active(i, t)) continue;
        for (LinkId e : in.candidates[i][j - 1].links) ++load[e];
      }
      for (const auto& [e, c] : load)
        if (c > topo.wavelength_count()) fail("capacity exceeded on link " + std::to_string(e));
    }
    for (int i = 0; i < D; ++i)
      if ((out.scenarios[k].rank[i] != 0) != static_cast<bool>(out.accepted[i])) fail("accepted demand left unrouted");
  }
  return out;
}

inline double rrp_objective(const RrpInstance& in, const RrpSolution& s) {
  return in.weights.accept * s.accepted_count() - in.weights.sites * s.site_count() -
         in.weights.regenerators * s.regenerator_total();
}

}  // namespace regenpool

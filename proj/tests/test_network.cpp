#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "regenpool/ksp.hpp"
#include "regenpool/qot.hpp"
#include "regenpool/topology.hpp"
#include "regenpool/traffic.hpp"
#include "support/brute_force.hpp"

using namespace regenpool;

namespace {

std::vector<LinkId> walk(const Topology& t, std::initializer_list<NodeId> nodes) {
  std::vector<LinkId> out;
  auto it = nodes.begin();
  NodeId prev = *it++;
  for (; it != nodes.end(); ++it) {
    out.push_back(*t.find_link(prev, *it));
    prev = *it;
  }
  return out;
}

bool has_invariant(const std::vector<Violation>& vs, const std::string& tag) {
  for (const auto& v : vs)
    if (v.invariant == tag) return true;
  return false;
}

}  // namespace

// ---- topology

TEST(Topology, Nsf14Shape) {
  const Topology t = load_topology("nsf14");
  EXPECT_EQ(t.node_count(), 14);
  EXPECT_EQ(t.link_count(), 40);
  EXPECT_EQ(t.wavelength_count(), 20);
  EXPECT_EQ(t.scenario_count(), 15);
  ASSERT_TRUE(t.find_link(1, 9));
  EXPECT_DOUBLE_EQ(t.link(*t.find_link(1, 9)).length_km, 1500.0);
  EXPECT_TRUE(validate_topology(t).empty());
}

TEST(Topology, Nsf14UndirectedLengthSum) {
  const Topology t = nsf14();
  double sum = 0.0;
  for (const auto& l : t.links())
    if (l.from < l.to) sum += l.length_km;
  EXPECT_DOUBLE_EQ(sum, 13760.0);
}

TEST(Topology, EveryLinkHasEqualReverse) {
  const Topology t = nsf14();
  for (const auto& l : t.links()) {
    auto r = t.reverse_of(l.id);
    ASSERT_TRUE(r) << l.id;
    EXPECT_EQ(t.link(*r).from, l.to);
    EXPECT_EQ(t.link(*r).length_km, l.length_km);
  }
}

TEST(Topology, LoadIsIdempotent) {
  EXPECT_EQ(to_text(load_topology("nsf14")), to_text(load_topology("nsf14")));
  EXPECT_EQ(to_text(load_topology_text(to_text(nsf14()))), to_text(nsf14()));
}

TEST(Topology, MissingReverseLinkRejected) {
  EXPECT_THROW(load_topology_text("node 1\nnode 2\nlink 1 2 100\n"), ValidationError);
  EXPECT_NO_THROW(load_topology_text("node 1\nnode 2\nlink 1 2 100\nlink 2 1 100\n"));
  EXPECT_NO_THROW(load_topology_text("node 1\nnode 2\nedge 1 2 100\n"));
}

TEST(Topology, ParseErrorCarriesLine) {
  try {
    parse_topology("node 1\nnode 2\nedge 1 two 5\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_topology("bogus 1\n"), ParseError);
}

TEST(Topology, DanglingNodeRejected) {
  EXPECT_THROW(load_topology_text("node 1\nnode 2\nedge 1 3 100\n"), ValidationError);
}

TEST(Topology, ViolationsNameInvariantAndElement) {
  auto zero = parse_topology("node 1\nnode 2\nedge 1 2 0\n");
  auto vs = validate_topology(zero);
  ASSERT_TRUE(has_invariant(vs, "link-length-positive"));
  EXPECT_FALSE(vs.front().element.empty());

  auto gap = parse_topology("node 1\nnode 3\nedge 1 3 10\n");
  EXPECT_TRUE(has_invariant(validate_topology(gap), "node-contiguity"));
}

// ---- qot

TEST(Qot, Checkpoints) {
  // Values from an independent evaluation of the surrogate formulas.
  const Topology t = nsf14();
  const SurrogateQot q;
  EXPECT_NEAR(q.q_segment(t, walk(t, {1, 9}), 1550.0), 21.13693, 1e-4);
  EXPECT_NEAR(q.q_segment(t, walk(t, {1, 9, 10}), 1550.0), 18.45034, 1e-4);
  EXPECT_NEAR(q.q_segment(t, walk(t, {1, 9, 10, 12}), 1550.0), 15.02999, 1e-4);
  EXPECT_LT(q.q_segment(t, walk(t, {1, 9, 10, 12}), 1550.0), q.q_threshold());
  EXPECT_NEAR(q.q_segment(t, walk(t, {1, 9}), 1538.97), 20.13693, 1e-4);
  EXPECT_NEAR(q.q_segment(t, walk(t, {10, 12}), 1550.0), 28.0039, 1e-3);
}

TEST(Qot, TiltPenaltyAtFirstWavelength) {
  const SurrogateQot q;
  EXPECT_DOUBLE_EQ(q.tilt_penalty(1550.0, 4), 0.0);
  EXPECT_NEAR(q.tilt_penalty(1538.97, 4), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(q.tilt_penalty(1550.0 + 3.0, 2), q.tilt_penalty(1550.0 - 3.0, 2));
  EXPECT_LT(q.tilt_penalty(1551.0, 3), q.tilt_penalty(1552.0, 3));
}

TEST(Qot, ErrorsOnBadWalks) {
  const Topology t = nsf14();
  const SurrogateQot q;
  std::vector<LinkId> none;
  EXPECT_THROW(q.q_segment(t, none, 1550.0), Error);
  std::vector<LinkId> broken{*t.find_link(1, 2), *t.find_link(9, 10)};
  EXPECT_THROW(q.q_segment(t, broken, 1550.0), Error);
}

TEST(Qot, Grid) {
  const auto g = wavelength_grid(TransmissionParams{}, 20);
  ASSERT_EQ(g.size(), 20u);
  EXPECT_DOUBLE_EQ(g.front(), 1538.97);
  EXPECT_NEAR(g.back(), 1554.13, 1e-9);
  EXPECT_NEAR(g[1] - g[0], (1554.13 - 1538.97) / 19, 1e-9);
  for (std::size_t k = 1; k < g.size(); ++k) EXPECT_LT(g[k - 1], g[k]);
}

TEST(Qot, MatrixAndSpectrum) {
  const Topology t = nsf14();
  const SurrogateQot q;
  const auto p = walk(t, {1, 9, 10});
  const auto m = q.q_matrix_for_path(t, p);
  EXPECT_EQ(m.entry_count(), 3u);
  EXPECT_NEAR(m.at(0, 1), 18.45034, 1e-4);
  EXPECT_DOUBLE_EQ(m.at(1, 1), q.q_segment(t, std::vector<LinkId>{p[1]}, 1550.0));
  EXPECT_EQ(q.q_matrix_for_path(t, walk(t, {1, 9, 10, 12})).entry_count(), 6u);

  std::vector<LinkId> one = walk(t, {1, 9});
  const auto spec = q.q_spectrum_for_path(t, one);
  ASSERT_EQ(spec.size(), 20u);
  EXPECT_NEAR(spec[0], 20.13693, 1e-4);
  // Maximum at the grid point closest to the reference wavelength.
  const auto g = wavelength_grid(q.params(), 20);
  std::size_t nearest = 0;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (std::abs(g[k] - 1550.0) < std::abs(g[nearest] - 1550.0)) nearest = k;
  EXPECT_EQ(std::max_element(spec.begin(), spec.end()) - spec.begin(), static_cast<long>(nearest));
  for (double v : spec) EXPECT_LE(v, m.at(0, 0));
}

TEST(Qot, OneHopAdmissibleEverywhere) {
  const Topology t = nsf14();
  const SurrogateQot q;
  for (const auto& l : t.links())
    for (double v : q.q_spectrum_for_path(t, std::vector<LinkId>{l.id})) EXPECT_GE(v, 15.6) << l.id;
}

TEST(Qot, MonotoneSplitAndSymmetric) {
  const Topology t = nsf14();
  const SurrogateQot q;
  const auto lambdas = wavelength_grid(q.params(), 20);
  // Every loopless path from node 1 to each destination.
  for (int dst = 2; dst <= 14; ++dst) {
    for (const auto& p : oracle::all_simple_paths(t, 1, dst)) {
      if (p.links.size() > 6) continue;
      std::vector<LinkId> rev;
      for (auto it = p.links.rbegin(); it != p.links.rend(); ++it) rev.push_back(*t.reverse_of(*it));
      for (double lam : {1550.0, lambdas.front(), lambdas[9]}) {
        const double full = q.q_segment(t, p.links, lam);
        EXPECT_DOUBLE_EQ(full, q.q_segment(t, rev, lam));
        for (std::size_t cut = 1; cut < p.links.size(); ++cut) {
          std::span<const LinkId> all(p.links);
          const double a = q.q_segment(t, all.first(cut), lam);
          const double b = q.q_segment(t, all.subspan(cut), lam);
          EXPECT_GT(a, full);
          EXPECT_GE(std::min(a, b), full);
        }
      }
    }
  }
}

TEST(Qot, BitIdenticalRepeat) {
  const Topology t = nsf14();
  const SurrogateQot q;
  const auto p = walk(t, {1, 2, 4, 5, 7, 9});
  EXPECT_EQ(q.q_segment(t, p, 1541.3), q.q_segment(t, p, 1541.3));
}

// ---- traffic

TEST(Traffic, PermanentDemands) {
  const auto ds = generate_demands(nsf14(), {3, 1.0, 24.0, 5});
  ASSERT_EQ(ds.size(), 3u);
  for (const auto& d : ds) {
    EXPECT_EQ(d.setup, 0.0);
    EXPECT_EQ(d.teardown, 24.0);
  }
  const auto g = build_time_grid(ds);
  EXPECT_EQ(g.instants(), (std::vector<double>{0.0, 24.0}));
  for (int i = 0; i < 3; ++i) {
    EXPECT_TRUE(g.active(i, 0));
    EXPECT_FALSE(g.active(i, 1));
  }
}

TEST(Traffic, ScheduledDurationsAndEndpoints) {
  const Topology t = nsf14();
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const auto ds = generate_demands(t, {1000, 0.5, 24.0, seed});
    EXPECT_TRUE(validate_demands(t, ds).empty());
    for (const auto& d : ds) {
      const double dur = d.teardown - d.setup;
      EXPECT_GE(dur, 11.0);
      EXPECT_LE(dur, 13.0);
      EXPECT_GE(d.setup, 0.0);
      EXPECT_LE(d.teardown, 24.0);
      EXPECT_FALSE(t.adjacent(d.source, d.destination));
      EXPECT_FALSE(d.source == 1 && d.destination == 2);
    }
  }
}

TEST(Traffic, Reproducible) {
  const TrafficParams p{50, 0.3, 24.0, 17};
  EXPECT_EQ(generate_demands(nsf14(), p), generate_demands(nsf14(), p));
  auto q = p;
  q.seed = 18;
  EXPECT_NE(generate_demands(nsf14(), p), generate_demands(nsf14(), q));
}

TEST(Traffic, GeneratorErrors) {
  EXPECT_THROW(generate_demands(nsf14(), {1, 0.02, 24.0, 1}), ValidationError);
  const Topology full = load_topology_text("node 1\nnode 2\nedge 1 2 10\n");
  EXPECT_THROW(generate_demands(full, {1, 1.0, 24.0, 1}), ValidationError);
}

TEST(Traffic, TimeGridHalfOpen) {
  std::vector<Demand> ds{{1, 1, 3, 0, 10, 1}, {2, 1, 3, 5, 12, 1}};
  const auto g = build_time_grid(ds);
  EXPECT_EQ(g.instants(), (std::vector<double>{0, 5, 10, 12}));
  EXPECT_EQ((std::vector<bool>{g.active(0, 0), g.active(0, 1), g.active(0, 2), g.active(0, 3)}),
            (std::vector<bool>{true, true, false, false}));
  EXPECT_EQ((std::vector<bool>{g.active(1, 0), g.active(1, 1), g.active(1, 2), g.active(1, 3)}),
            (std::vector<bool>{false, true, true, false}));

  std::vector<Demand> apart{{1, 1, 3, 0, 5, 1}, {2, 1, 3, 5, 9, 1}};
  const auto h = build_time_grid(apart);
  for (int k = 0; k < h.instant_count(); ++k) EXPECT_FALSE(h.active(0, k) && h.active(1, k));
  EXPECT_LE(h.instant_count(), 4);
}

TEST(Traffic, CsvRoundTrip) {
  const auto ds = generate_demands(nsf14(), {20, 0.25, 24.0, 3});
  const std::string csv = traffic_to_csv(ds);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "id,src,dst,setup,teardown,rate");
  EXPECT_EQ(traffic_from_csv(csv), ds);
  EXPECT_THROW(traffic_from_csv("id,src,dst,setup,teardown,rate\n1,2,x,0,1,1\n"), ParseError);
}

// ---- k shortest paths

TEST(Ksp, Nsf14OneToNine) {
  const Topology t = nsf14();
  const auto ps = k_shortest(t, 1, 9, 2);
  ASSERT_EQ(ps.size(), 2u);
  EXPECT_EQ(ps[0].nodes, (std::vector<NodeId>{1, 9}));
  EXPECT_DOUBLE_EQ(ps[0].length, 1500.0);
  EXPECT_EQ(ps[1].nodes, (std::vector<NodeId>{1, 2, 4, 5, 7, 9}));
  EXPECT_DOUBLE_EQ(ps[1].length, 2260.0);
}

TEST(Ksp, SingleEdgeExhausts) {
  const Topology t = load_topology_text("node 1\nnode 2\nedge 1 2 7\n");
  EXPECT_EQ(k_shortest(t, 1, 2, 3).size(), 1u);
  EXPECT_THROW(k_shortest(t, 1, 1, 3), ValidationError);
  EXPECT_THROW(k_shortest(t, 1, 2, 0), ValidationError);
}

TEST(Ksp, UnreachableIsEmpty) {
  const Topology t = load_topology_text("node 1\nnode 2\nnode 3\nedge 1 2 7\n");
  EXPECT_TRUE(k_shortest(t, 1, 3, 2).empty());
}

TEST(Ksp, MatchesEnumerationOnSmallGraphs) {
  Rng rng(4242);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + static_cast<int>(rng.index(5));
    std::string text;
    for (int u = 1; u <= n; ++u) text += "node " + std::to_string(u) + "\n";
    std::set<std::pair<int, int>> used;
    for (int u = 1; u <= n; ++u) {
      const int v = u % n + 1;
      used.insert({std::min(u, v), std::max(u, v)});
      // Small integer lengths provoke ties.
      text += "edge " + std::to_string(u) + " " + std::to_string(v) + " " + std::to_string(1 + rng.index(4)) + "\n";
    }
    for (int extra = 0; extra < n; ++extra) {
      int u = 1 + static_cast<int>(rng.index(n)), v = 1 + static_cast<int>(rng.index(n));
      if (u == v || used.count({std::min(u, v), std::max(u, v)})) continue;
      used.insert({std::min(u, v), std::max(u, v)});
      text += "edge " + std::to_string(u) + " " + std::to_string(v) + " " + std::to_string(1 + rng.index(4)) + "\n";
    }
    const Topology t = load_topology_text(text);
    for (int s = 1; s <= n; ++s)
      for (int d = 1; d <= n; ++d) {
        if (s == d) continue;
        const auto all = oracle::all_simple_paths(t, s, d);
        for (int k = 1; k <= 5; ++k) {
          const auto got = k_shortest(t, s, d, k);
          ASSERT_EQ(got.size(), std::min<std::size_t>(k, all.size()));
          for (std::size_t r = 0; r < got.size(); ++r) {
            EXPECT_EQ(got[r].nodes, all[r].nodes) << text << s << "->" << d << " k=" << k;
            EXPECT_DOUBLE_EQ(got[r].length, all[r].length);
          }
        }
      }
  }
}

TEST(Ksp, CandidatesCarryTables) {
  const Topology t = nsf14();
  const SurrogateQot q;
  std::vector<Demand> ds{{1, 1, 12, 0, 24, 1}};
  const auto cs = candidate_paths(t, ds, q, 3);
  ASSERT_EQ(cs.size(), 1u);
  ASSERT_EQ(cs[0].size(), 3u);
  for (const auto& c : cs[0]) {
    EXPECT_EQ(c.nodes.front(), 1);
    EXPECT_EQ(c.nodes.back(), 12);
    EXPECT_EQ(c.q_matrix.size(), static_cast<int>(c.links.size()));
    EXPECT_EQ(c.q_spectrum.size(), 20u);
    std::set<NodeId> distinct(c.nodes.begin(), c.nodes.end());
    EXPECT_EQ(distinct.size(), c.nodes.size());
  }
  EXPECT_LE(cs[0][0].length_km, cs[0][1].length_km);
  EXPECT_LE(cs[0][1].length_km, cs[0][2].length_km);
  const std::string csv = candidates_to_csv(cs);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "demand,rank,length_km,node_sequence");
}

#pragma once

// K loopless shortest paths (Yen) ordered by effective length, with ties
// broken by lexicographic node sequence and then link-id sequence.

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "regenpool/qot.hpp"
#include "regenpool/topology.hpp"
#include "regenpool/traffic.hpp"

namespace regenpool {

using EdgeWeight = std::function<double(const Link&)>;

// Effective length is the physical length; no per-node penalty.
inline double physical_length(const Link& l) { return l.length_km; }

struct Path {
  std::vector<LinkId> links;
  std::vector<NodeId> nodes;
  double length = 0.0;

  auto key() const { return std::tie(length, nodes, links); }
  friend bool operator<(const Path& a, const Path& b) { return a.key() < b.key(); }
  friend bool operator==(const Path& a, const Path& b) { return a.links == b.links; }
};

struct PathCandidate {
  int demand = 0;  // 1-based demand id
  int rank = 0;    // 1-based
  std::vector<LinkId> links;
  std::vector<NodeId> nodes;
  double length_km = 0.0;
  SegmentQMatrix q_matrix;          // at the reference wavelength
  std::vector<double> q_spectrum;   // end-to-end, per grid wavelength
};

namespace detail {

inline double path_weight(const Topology& t, const std::vector<LinkId>& links, const EdgeWeight& w) {
  double s = 0.0;
  for (LinkId e : links) s += w(t.link(e));
  return s;
}

// Lexicographically smallest shortest path from `src` to `dst` that avoids
// the banned nodes and links. Distances to `dst` come from a reverse
// Dijkstra; the walk then greedily takes the smallest next node along tight
// links.
inline std::optional<std::vector<LinkId>> spur_path(const Topology& t, NodeId src, NodeId dst,
                                                    const std::set<NodeId>& banned_nodes,
                                                    const std::set<LinkId>& banned_links, const EdgeWeight& w) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::map<NodeId, std::vector<LinkId>> in;
  for (const auto& l : t.links())
    if (!banned_links.count(l.id) && !banned_nodes.count(l.from) && !banned_nodes.count(l.to)) in[l.to].push_back(l.id);

  std::map<NodeId, double> dist;
  for (const auto& n : t.nodes()) dist[n.id] = kInf;
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[dst] = 0.0;
  pq.push({0.0, dst});
  while (!pq.empty()) {
    auto [du, u] = pq.top();
    pq.pop();
    if (du > dist[u]) continue;
    for (LinkId e : in[u]) {
      const Link& l = t.link(e);
      const double nd = du + w(l);
      if (nd < dist[l.from]) {
        dist[l.from] = nd;
        pq.push({nd, l.from});
      }
    }
  }
  if (banned_nodes.count(src) || dist[src] == kInf) return std::nullopt;

  std::vector<LinkId> out;
  NodeId u = src;
  while (u != dst) {
    const double eps = 1e-9 * std::max(1.0, dist[u]);
    std::optional<LinkId> best;
    for (LinkId e : t.out_links(u)) {
      const Link& l = t.link(e);
      if (banned_links.count(e) || banned_nodes.count(l.to) || dist[l.to] == kInf) continue;
      if (std::abs(w(l) + dist[l.to] - dist[u]) > eps) continue;
      if (!best || l.to < t.link(*best).to || (l.to == t.link(*best).to && e < *best)) best = e;
    }
    if (!best) return std::nullopt;
    out.push_back(*best);
    u = t.link(*best).to;
  }
  return out;
}

inline Path make_path(const Topology& t, NodeId src, std::vector<LinkId> links, const EdgeWeight& w) {
  Path p;
  p.nodes.push_back(src);
  for (LinkId e : links) p.nodes.push_back(t.link(e).to);
  p.length = path_weight(t, links, w);
  p.links = std::move(links);
  return p;
}

}  // namespace detail

inline std::vector<Path> k_shortest(const Topology& t, NodeId src, NodeId dst, int k,
                                    const EdgeWeight& w = physical_length) {
  if (src == dst) throw ValidationError("k_shortest: source equals destination");
  if (k < 1) throw ValidationError("k_shortest: K must be at least 1");
  std::vector<Path> found;
  auto first = detail::spur_path(t, src, dst, {}, {}, w);
  if (!first) return found;
  found.push_back(detail::make_path(t, src, std::move(*first), w));

  std::set<Path> candidates;
  while (static_cast<int>(found.size()) < k) {
    const Path prev = found.back();
    for (std::size_t i = 0; i + 1 < prev.nodes.size(); ++i) {
      const NodeId spur = prev.nodes[i];
      std::set<LinkId> banned_links;
      for (const Path& p : found) {
        if (p.nodes.size() > i && std::equal(prev.nodes.begin(), prev.nodes.begin() + i + 1, p.nodes.begin()) &&
            std::equal(prev.links.begin(), prev.links.begin() + i, p.links.begin()))
          banned_links.insert(p.links[i]);
      }
      std::set<NodeId> banned_nodes(prev.nodes.begin(), prev.nodes.begin() + i);
      auto tail = detail::spur_path(t, spur, dst, banned_nodes, banned_links, w);
      if (!tail) continue;
      std::vector<LinkId> links(prev.links.begin(), prev.links.begin() + i);
      links.insert(links.end(), tail->begin(), tail->end());
      candidates.insert(detail::make_path(t, src, std::move(links), w));
    }
    if (candidates.empty()) break;
    found.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return found;
}

// K candidates per demand, with the Q tables the builders need attached.
inline std::vector<std::vector<PathCandidate>> candidate_paths(const Topology& t, const std::vector<Demand>& ds,
                                                               const QotEstimator& qot, int k,
                                                               const EdgeWeight& w = physical_length) {
  std::vector<std::vector<PathCandidate>> out;
  out.reserve(ds.size());
  for (const auto& d : ds) {
    std::vector<PathCandidate> cs;
    int rank = 0;
    for (auto& p : k_shortest(t, d.source, d.destination, k, w)) {
      PathCandidate c;
      c.demand = d.id;
      c.rank = ++rank;
      c.q_matrix = qot.q_matrix_for_path(t, p.links);
      c.q_spectrum = qot.q_spectrum_for_path(t, p.links);
      c.length_km = detail::path_weight(t, p.links, physical_length);
      c.links = std::move(p.links);
      c.nodes = std::move(p.nodes);
      cs.push_back(std::move(c));
    }
    out.push_back(std::move(cs));
  }
  return out;
}

inline std::string node_sequence(const std::vector<NodeId>& nodes) {
  std::string s;
  for (NodeId n : nodes) {
    if (!s.empty()) s += "-";
    s += std::to_string(n);
  }
  return s;
}

inline std::string candidates_to_csv(const std::vector<std::vector<PathCandidate>>& cs) {
  std::string out = "demand,rank,length_km,node_sequence\n";
  for (const auto& per : cs)
    for (const auto& c : per)
      out += std::to_string(c.demand) + "," + std::to_string(c.rank) + "," + format_double(c.length_km) + "," +
             node_sequence(c.nodes) + "\n";
  return out;
}

}  // namespace regenpool

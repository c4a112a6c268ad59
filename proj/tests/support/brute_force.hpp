#pragma once

// Exhaustive reference computations used to cross-check the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <tuple>
#include <vector>

#include "regenpool/milp/model.hpp"
#include "regenpool/topology.hpp"

namespace oracle {

struct SimplePath {
  std::vector<int> nodes;
  std::vector<int> links;
  double length = 0.0;
};

// Every loopless directed path src -> dst by DFS, sorted by (length, nodes, links).
inline std::vector<SimplePath> all_simple_paths(const regenpool::Topology& t, int src, int dst) {
  std::vector<SimplePath> out;
  SimplePath cur;
  cur.nodes.push_back(src);
  std::vector<char> seen(static_cast<std::size_t>(t.node_count()) + 1, 0);
  seen[src] = 1;
  std::function<void(int)> go = [&](int u) {
    if (u == dst) {
      out.push_back(cur);
      return;
    }
    for (int e : t.out_links(u)) {
      const auto& l = t.link(e);
      if (seen[l.to]) continue;
      seen[l.to] = 1;
      cur.nodes.push_back(l.to);
      cur.links.push_back(e);
      cur.length += l.length_km;
      go(l.to);
      cur.length -= l.length_km;
      cur.links.pop_back();
      cur.nodes.pop_back();
      seen[l.to] = 0;
    }
  };
  go(src);
  // Recompute lengths left to right so they match summation order elsewhere.
  for (auto& p : out) {
    p.length = 0.0;
    for (int e : p.links) p.length += t.link(e).length_km;
  }
  std::sort(out.begin(), out.end(), [](const SimplePath& a, const SimplePath& b) {
    return std::tie(a.length, a.nodes, a.links) < std::tie(b.length, b.nodes, b.links);
  });
  return out;
}

struct Enumerated {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> x;
};

// Best assignment of a model whose variables are all binary, by trying all
// 2^n points. Ties keep the first point in counting order.
inline Enumerated enumerate_binary(const regenpool::milp::Model& m) {
  const int n = m.variable_count();
  Enumerated best;
  std::vector<double> x(static_cast<std::size_t>(n));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (int j = 0; j < n; ++j) x[j] = (mask >> j) & 1 ? 1.0 : 0.0;
    if (!regenpool::milp::check_feasibility(m, x, 1e-9).empty()) continue;
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += m.objective()[j] * x[j];
    const bool better = m.sense() == regenpool::milp::ObjSense::maximize ? obj > best.objective : obj < best.objective;
    if (!best.feasible || better) {
      best = {true, obj, x};
    }
  }
  return best;
}

}  // namespace oracle

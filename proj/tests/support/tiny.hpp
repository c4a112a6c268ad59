#pragma once

// Randomized 6-node instances small enough for exhaustive enumeration:
// a ring with one or two chords, 300-1500 km links, 2-4 demands, K <= 2,
// W in {2, 3}, permanent or scheduled traffic.

#include <set>
#include <string>

#include "regenpool/qot.hpp"
#include "regenpool/rrp.hpp"
#include "regenpool/topology.hpp"
#include "regenpool/traffic.hpp"

namespace tiny {

struct Spec {
  regenpool::Topology topology;
  std::vector<regenpool::Demand> demands;
  int k = 1;
  std::uint64_t seed = 0;
};

inline std::string describe(const Spec& s) {
  std::string out = "seed " + std::to_string(s.seed) + " W=" + std::to_string(s.topology.wavelength_count()) +
                    " K=" + std::to_string(s.k) + " D=" + std::to_string(s.demands.size());
  return out;
}

inline Spec make(std::uint64_t seed) {
  regenpool::Rng rng(0x9e3779b97f4a7c15ULL ^ (seed * 0x100000001b3ULL));
  const int n = 6;
  const int w = 2 + static_cast<int>(rng.index(2));
  std::string text = "name tiny" + std::to_string(seed) + "\nwavelengths " + std::to_string(w) + "\n";
  for (int u = 1; u <= n; ++u) text += "node " + std::to_string(u) + "\n";
  auto km = [&] { return std::to_string(300 + 10 * rng.index(121)); };
  std::set<std::pair<int, int>> used;
  for (int u = 1; u <= n; ++u) {
    const int v = u % n + 1;
    used.insert({std::min(u, v), std::max(u, v)});
    text += "edge " + std::to_string(u) + " " + std::to_string(v) + " " + km() + "\n";
  }
  const int chords = 1 + static_cast<int>(rng.index(2));
  for (int c = 0; c < chords;) {
    const int u = 1 + static_cast<int>(rng.index(n)), v = 1 + static_cast<int>(rng.index(n));
    if (u == v || used.count({std::min(u, v), std::max(u, v)})) continue;
    used.insert({std::min(u, v), std::max(u, v)});
    text += "edge " + std::to_string(u) + " " + std::to_string(v) + " " + km() + "\n";
    ++c;
  }
  Spec s;
  s.seed = seed;
  s.topology = regenpool::load_topology_text(text);
  const int d = 2 + static_cast<int>(rng.index(3));
  const double pi = rng.uniform01() < 0.5 ? 1.0 : 0.5;
  s.demands = regenpool::generate_demands(s.topology, {d, pi, 24.0, seed + 1000});
  s.k = 1 + static_cast<int>(rng.index(2));
  return s;
}

inline regenpool::RrpInstance rrp_instance(const Spec& s, bool scenario_zero_only = false) {
  return regenpool::make_rrp_instance(s.topology, s.demands, regenpool::SurrogateQot{}, s.k, {}, scenario_zero_only);
}

}  // namespace tiny

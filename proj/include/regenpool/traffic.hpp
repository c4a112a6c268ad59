#pragma once

// Scheduled (SLD) and permanent (PLD) lightpath demands, the event-time grid
// and the request-activity matrix.
//
// Random draws use std::mt19937_64, whose output sequence is fixed by the C++
// standard, and hand-rolled uniform mappings (53-bit mantissa for reals,
// rejection sampling for indices). The standard distributions are avoided
// because their algorithms are implementation-defined.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "regenpool/errors.hpp"
#include "regenpool/topology.hpp"

namespace regenpool {

struct Demand {
  int id = 0;  // 1-based
  NodeId source = 0;
  NodeId destination = 0;
  double setup = 0.0;
  double teardown = 0.0;
  int rate = 1;

  friend bool operator==(const Demand&, const Demand&) = default;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform in [0, n).
  std::uint64_t index(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

inline std::vector<std::pair<NodeId, NodeId>> non_adjacent_pairs(const Topology& t) {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const auto& a : t.nodes())
    for (const auto& b : t.nodes())
      if (a.id != b.id && !t.adjacent(a.id, b.id)) out.emplace_back(a.id, b.id);
  std::sort(out.begin(), out.end());
  return out;
}

struct TrafficParams {
  int demands = 1;
  double activity = 1.0;  // pi
  double horizon = 24.0;  // Delta
  std::uint64_t seed = 1;
};

// Endpoints are uniform over ordered non-adjacent node pairs. With
// activity == 1 every demand is permanent on [0, horizon). Otherwise the
// duration is uniform on [horizon*activity - 1, horizon*activity + 1] (capped
// at the horizon) and the setup is uniform on [0, horizon - duration].
inline std::vector<Demand> generate_demands(const Topology& t, const TrafficParams& p) {
  if (p.demands < 1) throw ValidationError("demand count must be at least 1");
  if (!(p.activity > 0.0 && p.activity <= 1.0)) throw ValidationError("activity must lie in (0, 1]");
  const double centre = p.horizon * p.activity;
  if (centre - 1.0 <= 0.0) throw ValidationError("horizon * activity - 1 must be positive");
  const auto pairs = non_adjacent_pairs(t);
  if (pairs.empty()) throw ValidationError("topology has no non-adjacent node pair");

  Rng rng(p.seed);
  std::vector<Demand> out;
  out.reserve(static_cast<std::size_t>(p.demands));
  for (int i = 1; i <= p.demands; ++i) {
    const auto [s, d] = pairs[rng.index(pairs.size())];
    Demand dm{i, s, d, 0.0, p.horizon, 1};
    if (p.activity < 1.0) {
      const double duration = std::min(rng.uniform(centre - 1.0, centre + 1.0), p.horizon);
      dm.setup = rng.uniform(0.0, p.horizon - duration);
      dm.teardown = dm.setup + duration;
    }
    out.push_back(dm);
  }
  return out;
}

inline std::vector<std::string> validate_demands(const Topology& t, const std::vector<Demand>& ds) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const Demand& d = ds[k];
    const std::string tag = "demand " + std::to_string(d.id);
    if (d.id != static_cast<int>(k) + 1) out.push_back(tag + ": ids must be contiguous from 1");
    if (!t.has_node(d.source) || !t.has_node(d.destination)) out.push_back(tag + ": unknown endpoint");
    if (d.source == d.destination) out.push_back(tag + ": source equals destination");
    else if (t.adjacent(d.source, d.destination)) out.push_back(tag + ": endpoints are adjacent");
    if (!(0.0 <= d.setup && d.setup < d.teardown)) out.push_back(tag + ": requires 0 <= setup < teardown");
    if (d.rate != 1) out.push_back(tag + ": rate must be 1");
  }
  return out;
}

// Sorted distinct event instants and the activity matrix
// active(i, t) = setup_i <= tau_t < teardown_i.
class TimeGrid {
 public:
  TimeGrid() = default;

  explicit TimeGrid(const std::vector<Demand>& ds) {
    for (const auto& d : ds) {
      instants_.push_back(d.setup);
      instants_.push_back(d.teardown);
    }
    std::sort(instants_.begin(), instants_.end());
    instants_.erase(std::unique(instants_.begin(), instants_.end()), instants_.end());
    rows_ = ds.size();
    active_.assign(rows_ * instants_.size(), 0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t t = 0; t < instants_.size(); ++t)
        active_[i * instants_.size() + t] = ds[i].setup <= instants_[t] && instants_[t] < ds[i].teardown;
  }

  const std::vector<double>& instants() const noexcept { return instants_; }
  int instant_count() const noexcept { return static_cast<int>(instants_.size()); }
  int demand_count() const noexcept { return static_cast<int>(rows_); }

  // Row index i is 0-based (demand id - 1).
  bool active(int i, int t) const { return active_[static_cast<std::size_t>(i) * instants_.size() + t] != 0; }

  bool any_active(int t) const {
    for (std::size_t i = 0; i < rows_; ++i)
      if (active(static_cast<int>(i), t)) return true;
    return false;
  }

  std::vector<int> active_demands(int t) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < rows_; ++i)
      if (active(static_cast<int>(i), t)) out.push_back(static_cast<int>(i));
    return out;
  }

 private:
  std::vector<double> instants_;
  std::size_t rows_ = 0;
  std::vector<std::uint8_t> active_;
};

inline TimeGrid build_time_grid(const std::vector<Demand>& ds) {
  if (ds.empty()) throw ValidationError("time grid needs at least one demand");
  return TimeGrid(ds);
}

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string traffic_to_csv(const std::vector<Demand>& ds) {
  std::string out = "id,src,dst,setup,teardown,rate\n";
  for (const auto& d : ds) {
    out += std::to_string(d.id) + "," + std::to_string(d.source) + "," + std::to_string(d.destination) + "," +
           format_double(d.setup) + "," + format_double(d.teardown) + "," + std::to_string(d.rate) + "\n";
  }
  return out;
}

inline std::vector<Demand> traffic_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::vector<Demand> out;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "id,src,dst,setup,teardown,rate") throw ParseError("expected header id,src,dst,setup,teardown,rate", lineno);
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 6) throw ParseError("expected 6 fields", lineno);
    try {
      out.push_back({std::stoi(f[0]), std::stoi(f[1]), std::stoi(f[2]), std::stod(f[3]), std::stod(f[4]), std::stoi(f[5])});
    } catch (const std::exception&) {
      throw ParseError("non-numeric field", lineno);
    }
  }
  if (!header) throw ParseError("empty traffic file", 0);
  return out;
}

inline std::vector<Demand> load_traffic(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open traffic file '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return traffic_from_csv(buf.str());
}

}  // namespace regenpool

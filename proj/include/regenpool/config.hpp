#pragma once

// Run configuration: a flat `key = value` text file whose keys mirror the CLI
// flags. `#` starts a comment. Unknown keys are errors. to_text() writes
// every key in a fixed order with shortest round-trip numbers, so
// parse(to_text(c)) == c and the FNV-1a hash of to_text() identifies a run.
//
//   topology = nsf14            built-in name or a topology file path
//   traffic = demands.csv       optional; overrides the generator keys
//   demands = 100
//   pi = 1                      activity, (0, 1]
//   horizon = 24
//   seeds = 1,2,3
//   k = 3
//   wavelengths = 0             0 keeps the topology's own W
//   qth = 15.6
//   gamma1 .. gamma6            RRP then WARP weights
//   scheme = mn                 mn | 1+1
//   solver = builtin            builtin | export-only
//   time_limit = 600            seconds per MILP
//   output = out

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "regenpool/errors.hpp"
#include "regenpool/pipeline.hpp"
#include "regenpool/traffic.hpp"

namespace regenpool {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "REGENPOOL_OUTPUT_DIR";

struct RunConfig {
  std::string topology = "nsf14";
  std::string traffic;
  int demands = 100;
  double pi = 1.0;
  double horizon = 24.0;
  std::vector<std::uint64_t> seeds{1};
  int k = 3;
  int wavelengths = 0;
  double qth = 15.6;
  double gamma[6] = {1e5, 1e2, 1.0, 1e5, 1e2, 1.0};
  std::string scheme = "mn";
  std::string solver = "builtin";
  double time_limit = 600.0;
  std::string output = "out";

  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    for (int g = 0; g < 6; ++g)
      if (a.gamma[g] != b.gamma[g]) return false;
    return a.topology == b.topology && a.traffic == b.traffic && a.demands == b.demands && a.pi == b.pi &&
           a.horizon == b.horizon && a.seeds == b.seeds && a.k == b.k && a.wavelengths == b.wavelengths &&
           a.qth == b.qth && a.scheme == b.scheme && a.solver == b.solver && a.time_limit == b.time_limit &&
           a.output == b.output;
  }
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_number(const std::string& key, const std::string& v, std::size_t line) {
  double x = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(x))
    throw ParseError("'" + key + "' needs a number, got '" + v + "'", line);
  return x;
}

inline int to_int(const std::string& key, const std::string& v, std::size_t line) {
  const double x = to_number(key, v, line);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw ParseError("'" + key + "' needs an integer, got '" + v + "'", line);
  return static_cast<int>(x);
}

}  // namespace detail

// Range checks; file existence is checked where the file is opened.
inline std::vector<std::string> validate_config(const RunConfig& c) {
  std::vector<std::string> out;
  if (c.topology.empty()) out.push_back("topology must be set");
  if (c.traffic.empty()) {
    if (c.demands < 1 || c.demands > 100000) out.push_back("demands must lie in 1..100000");
    if (!(c.pi > 0.0 && c.pi <= 1.0)) out.push_back("pi must lie in (0, 1]");
    if (!(c.horizon > 0.0)) out.push_back("horizon must be positive");
  }
  if (c.seeds.empty()) out.push_back("at least one seed is required");
  if (c.k < 1 || c.k > 20) out.push_back("k must lie in 1..20");
  if (c.wavelengths < 0 || c.wavelengths > 200) out.push_back("wavelengths must lie in 0..200");
  if (!(c.qth > 0.0)) out.push_back("qth must be positive");
  for (int g = 0; g < 6; ++g)
    if (!(c.gamma[g] > 0.0)) out.push_back("gamma" + std::to_string(g + 1) + " must be positive");
  if (c.scheme != "mn" && c.scheme != "1+1") out.push_back("scheme must be mn or 1+1");
  if (c.solver != "builtin" && c.solver != "export-only") out.push_back("solver must be builtin or export-only");
  if (!(c.time_limit > 0.0)) out.push_back("time_limit must be positive");
  if (c.output.empty()) out.push_back("output must be set");
  return out;
}

// Applies one key. Shared by the file parser and the CLI flag overrides.
inline void set_config_key(RunConfig& c, const std::string& key, const std::string& value, std::size_t line = 0) {
  using detail::to_int;
  using detail::to_number;
  if (key == "topology") c.topology = value;
  else if (key == "traffic") c.traffic = value;
  else if (key == "demands") c.demands = to_int(key, value, line);
  else if (key == "pi") c.pi = to_number(key, value, line);
  else if (key == "horizon") c.horizon = to_number(key, value, line);
  else if (key == "seeds") {
    c.seeds.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = detail::trim(item);
      const int v = to_int(key, item, line);
      if (v < 0) throw ParseError("seeds must be non-negative", line);
      c.seeds.push_back(static_cast<std::uint64_t>(v));
    }
  } else if (key == "k") c.k = to_int(key, value, line);
  else if (key == "wavelengths") c.wavelengths = to_int(key, value, line);
  else if (key == "qth") c.qth = to_number(key, value, line);
  else if (key.size() == 6 && key.rfind("gamma", 0) == 0 && key[5] >= '1' && key[5] <= '6')
    c.gamma[key[5] - '1'] = to_number(key, value, line);
  else if (key == "scheme") c.scheme = value;
  else if (key == "solver") c.solver = value;
  else if (key == "time_limit") c.time_limit = to_number(key, value, line);
  else if (key == "output") c.output = value;
  else throw ParseError("unknown key '" + key + "'", line);
}

inline RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    const std::string s = detail::trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line);
    set_config_key(c, detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)), line);
  }
  if (auto bad = validate_config(c); !bad.empty()) throw ValidationError("config: " + bad.front());
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

inline std::string to_text(const RunConfig& c) {
  std::string seeds;
  for (std::size_t k = 0; k < c.seeds.size(); ++k) seeds += (k ? "," : "") + std::to_string(c.seeds[k]);
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  kv("topology", c.topology);
  if (!c.traffic.empty()) kv("traffic", c.traffic);
  kv("demands", std::to_string(c.demands));
  kv("pi", format_double(c.pi));
  kv("horizon", format_double(c.horizon));
  kv("seeds", seeds);
  kv("k", std::to_string(c.k));
  kv("wavelengths", std::to_string(c.wavelengths));
  kv("qth", format_double(c.qth));
  for (int g = 0; g < 6; ++g) kv("gamma" + std::to_string(g + 1), format_double(c.gamma[g]));
  kv("scheme", c.scheme);
  kv("solver", c.solver);
  kv("time_limit", format_double(c.time_limit));
  kv("output", c.output);
  return out;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Hash of everything that shapes results; the output directory is left out
// so moving a sweep does not change its identity.
inline std::string config_hash(const RunConfig& c) {
  RunConfig k = c;
  k.output.clear();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_text(k))));
  return buf;
}

inline DesignConfig design_config(const RunConfig& c) {
  DesignConfig d;
  d.k = c.k;
  d.rrp_weights = {c.gamma[0], c.gamma[1], c.gamma[2]};
  d.warp_weights = {c.gamma[3], c.gamma[4], c.gamma[5]};
  d.limits.time_limit_s = c.time_limit;
  return d;
}

}  // namespace regenpool

#pragma once

// Artifacts of a design run.
//
// Report JSON (keys in this order, nothing time-dependent, so identical runs
// give identical bytes):
//   tool, version, config_hash, scheme, status ("optimal" | "non-optimal"),
//   topology, wavelengths, seed, demand_count,
//   summary  {accepted, acceptance_ratio, sites, regenerators,
//             effective_regenerators}
//   regenerators_per_node [R_1..R_N]   one pool
//   effective_per_node    [..]         installed (2x for 1+1)
//   stages   {rrp, warp: {status, objective, best_bound, nodes, accepted,
//             sites, regenerators}}
//   scenarios [{scenario, copied_from_base,
//               demands: [{id, accepted, path, links, lambda, regen, added}]}]
//
// CSV files start with one `# regenpool <version> config <hash>` line.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "regenpool/config.hpp"
#include "regenpool/errors.hpp"
#include "regenpool/pipeline.hpp"
#include "regenpool/traffic.hpp"

namespace regenpool {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline ordered_json stage_json(const StageSummary& s) {
  ordered_json j;
  j["status"] = s.status;
  j["objective"] = s.objective;
  j["best_bound"] = s.best_bound;
  j["nodes"] = s.nodes;
  j["accepted"] = s.accepted;
  j["sites"] = s.sites;
  j["regenerators"] = s.regenerators;
  return j;
}

inline StageSummary stage_from(const ordered_json& j) {
  StageSummary s;
  s.status = j.at("status").get<std::string>();
  s.objective = j.at("objective").get<double>();
  s.best_bound = j.at("best_bound").get<double>();
  s.nodes = j.at("nodes").get<std::size_t>();
  s.accepted = j.at("accepted").get<int>();
  s.sites = j.at("sites").get<int>();
  s.regenerators = j.at("regenerators").get<int>();
  return s;
}

inline std::string csv_banner(const std::string& hash) {
  return std::string("# regenpool ") + kToolVersion + " config " + hash + "\n";
}

inline std::string num(double v) { return format_double(v); }

}  // namespace detail

inline ordered_json report_to_json(const DesignReport& r) {
  ordered_json j;
  j["tool"] = "regenpool";
  j["version"] = kToolVersion;
  j["config_hash"] = r.config_hash;
  j["scheme"] = to_string(r.scheme);
  j["status"] = r.optimal ? "optimal" : "non-optimal";
  j["topology"] = r.topology;
  j["wavelengths"] = r.wavelengths;
  j["seed"] = r.seed;
  j["demand_count"] = r.demand_count;
  ordered_json sum;
  sum["accepted"] = r.accepted_count();
  sum["acceptance_ratio"] = r.acceptance_ratio();
  sum["sites"] = r.site_count();
  sum["regenerators"] = r.regenerator_total();
  sum["effective_regenerators"] = r.effective_regenerator_total();
  j["summary"] = sum;
  j["regenerators_per_node"] = r.regenerators;
  j["effective_per_node"] = r.effective_regenerators;
  j["stages"]["rrp"] = detail::stage_json(r.rrp);
  j["stages"]["warp"] = detail::stage_json(r.warp);
  ordered_json scs = ordered_json::array();
  for (const auto& sc : r.scenarios) {
    ordered_json s;
    s["scenario"] = sc.scenario;
    s["copied_from_base"] = sc.copied_from_base;
    ordered_json ds = ordered_json::array();
    for (const auto& d : sc.demands) {
      ordered_json x;
      x["id"] = d.demand;
      x["accepted"] = d.accepted;
      x["path"] = d.path;
      x["links"] = d.links;
      x["lambda"] = d.lambda;
      x["regen"] = d.regen;
      x["added"] = d.added;
      ds.push_back(std::move(x));
    }
    s["demands"] = std::move(ds);
    scs.push_back(std::move(s));
  }
  j["scenarios"] = std::move(scs);
  return j;
}

inline std::string report_to_text(const DesignReport& r) { return report_to_json(r).dump(2) + "\n"; }

inline DesignReport report_from_json(const ordered_json& j) {
  try {
    DesignReport r;
    const std::string scheme = j.at("scheme").get<std::string>();
    if (scheme == "MN") r.scheme = Scheme::mn;
    else if (scheme == "OnePlusOne") r.scheme = Scheme::one_plus_one;
    else throw Error("unknown scheme '" + scheme + "'");
    r.config_hash = j.at("config_hash").get<std::string>();
    r.optimal = j.at("status").get<std::string>() == "optimal";
    r.topology = j.at("topology").get<std::string>();
    r.wavelengths = j.at("wavelengths").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.demand_count = j.at("demand_count").get<int>();
    r.regenerators = j.at("regenerators_per_node").get<std::vector<int>>();
    r.effective_regenerators = j.at("effective_per_node").get<std::vector<int>>();
    r.rrp = detail::stage_from(j.at("stages").at("rrp"));
    r.warp = detail::stage_from(j.at("stages").at("warp"));
    for (const auto& s : j.at("scenarios")) {
      ScenarioAssignment sc;
      sc.scenario = s.at("scenario").get<int>();
      sc.copied_from_base = s.at("copied_from_base").get<bool>();
      for (const auto& x : s.at("demands")) {
        DemandAssignment d;
        d.demand = x.at("id").get<int>();
        d.accepted = x.at("accepted").get<bool>();
        d.path = x.at("path").get<std::vector<NodeId>>();
        d.links = x.at("links").get<std::vector<LinkId>>();
        d.lambda = x.at("lambda").get<std::vector<int>>();
        d.regen = x.at("regen").get<std::vector<NodeId>>();
        d.added = x.at("added").get<std::vector<NodeId>>();
        sc.demands.push_back(std::move(d));
      }
      r.scenarios.push_back(std::move(sc));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
}

inline DesignReport report_from_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("report is not valid JSON: ") + e.what());
  }
  return report_from_json(j);
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

inline DesignReport load_report(const std::string& path) { return report_from_text(read_file(path)); }

// One row per summary, columns as in the result tables: mean and sample std
// of acceptance ratio, sites and regenerators.
inline std::string summary_csv(const std::vector<Summary>& ss) {
  if (ss.empty()) throw Error("no summaries to write");
  std::string out = detail::csv_banner(ss.front().config_hash);
  out += "scheme,runs,acceptance_mean,acceptance_std,sites_mean,sites_std,regenerators_mean,regenerators_std,"
         "effective_regenerators_mean,effective_regenerators_std,single_run\n";
  using detail::num;
  for (const auto& s : ss) {
    out += std::string(to_string(s.scheme)) + "," + std::to_string(s.runs) + "," + num(s.acceptance.mean) + "," +
           num(s.acceptance.std) + "," + num(s.sites.mean) + "," + num(s.sites.std) + "," + num(s.regenerators.mean) +
           "," + num(s.regenerators.std) + "," + num(s.effective_regenerators.mean) + "," +
           num(s.effective_regenerators.std) + "," + (s.acceptance.single() ? "1" : "0") + "\n";
  }
  return out;
}

inline std::string node_median_csv(const Summary& s) {
  std::string out = detail::csv_banner(s.config_hash) + "node,median_regenerators\n";
  for (std::size_t u = 0; u < s.node_median.size(); ++u)
    out += std::to_string(u + 1) + "," + detail::num(s.node_median[u]) + "\n";
  return out;
}

struct ComparisonRow {
  std::uint64_t seed = 0;
  DesignReport mn, baseline;
  bool equal_acceptance() const { return mn.accepted_count() == baseline.accepted_count(); }
};

inline std::string comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& hash) {
  std::string out = detail::csv_banner(hash);
  out += "seed,mn_accepted,baseline_accepted,mn_regenerators,baseline_single_pool,baseline_effective,reduction\n";
  for (const auto& r : rows) {
    const int mn = r.mn.regenerator_total(), base = r.baseline.regenerator_total();
    std::string red = "n/a";
    if (base > 0 || mn == 0) red = detail::num(protection_reduction(mn, base));
    out += std::to_string(r.seed) + "," + std::to_string(r.mn.accepted_count()) + "," +
           std::to_string(r.baseline.accepted_count()) + "," + std::to_string(mn) + "," + std::to_string(base) + "," +
           std::to_string(r.baseline.effective_regenerator_total()) + "," + red + "\n";
  }
  return out;
}

}  // namespace regenpool

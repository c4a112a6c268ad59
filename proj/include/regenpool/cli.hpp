#pragma once

// regenpool command line. Subcommands:
//   gen-traffic  write a demand CSV
//   qot          Q factors of links or of one path
//   design       solve one scheme per seed, or export the RRP model
//   verify       re-check a report JSON against topology and traffic
//   compare      both schemes on identical inputs, reduction table
//   report       aggregate report JSONs into summary and per-node CSVs
//
// Exit codes: 0 success (also when a solver limit leaves a run non-optimal),
// 1 verification found violations, 2 bad input or usage.
//
// Output directory: --output, else $REGENPOOL_OUTPUT_DIR, else the config
// file's `output`, else ./out.

#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "regenpool/config.hpp"
#include "regenpool/errors.hpp"
#include "regenpool/ksp.hpp"
#include "regenpool/milp/mps.hpp"
#include "regenpool/pipeline.hpp"
#include "regenpool/qot.hpp"
#include "regenpool/report_io.hpp"
#include "regenpool/rrp.hpp"
#include "regenpool/topology.hpp"
#include "regenpool/traffic.hpp"

namespace regenpool::cli {

namespace detail {

// Flags that mirror config keys. Strings so "given" is just "non-empty".
struct Overrides {
  std::string config;
  std::map<std::string, std::string> kv;

  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>("--" + flag, [this, key](const std::string& v) { kv[key] = v; }, help);
  }
};

inline void add_run_flags(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "key = value config file");
  o.add(app, "topology", "topology", "nsf14 or a topology file");
  o.add(app, "traffic", "traffic", "demand CSV (replaces the generator)");
  o.add(app, "demands", "demands", "number of generated demands");
  o.add(app, "pi", "pi", "activity in (0, 1]; 1 gives permanent demands");
  o.add(app, "horizon", "horizon", "time horizon");
  o.add(app, "seed", "seeds", "seed or comma list of seeds");
  o.add(app, "k", "k", "candidate paths per demand");
  o.add(app, "wavelengths", "wavelengths", "override W (0 keeps the topology's)");
  o.add(app, "qth", "qth", "Q threshold in dB");
  for (int g = 1; g <= 6; ++g) o.add(app, "gamma" + std::to_string(g), "gamma" + std::to_string(g), "objective weight");
  o.add(app, "scheme", "scheme", "mn or 1+1");
  o.add(app, "solver", "solver", "builtin or export-only");
  o.add(app, "time-limit", "time_limit", "seconds per MILP");
  o.add(app, "output", "output", "output directory");
}

inline RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) c.output = env;
  for (const auto& [k, v] : o.kv) set_config_key(c, k, v);
  if (auto bad = validate_config(c); !bad.empty()) throw ValidationError(bad.front());
  return c;
}

struct Inputs {
  Topology topology;
  SurrogateQot qot;
};

inline Inputs inputs(const RunConfig& c) {
  Topology t = load_topology(c.topology);
  if (c.wavelengths > 0) t = t.with_wavelength_count(c.wavelengths);
  TransmissionParams p;
  p.q_threshold_db = c.qth;
  return {t, SurrogateQot(p)};
}

inline std::vector<Demand> demands_for(const RunConfig& c, const Topology& t, std::uint64_t seed) {
  std::vector<Demand> ds = c.traffic.empty() ? generate_demands(t, {c.demands, c.pi, c.horizon, seed}) : load_traffic(c.traffic);
  if (auto bad = validate_demands(t, ds); !bad.empty()) throw ValidationError(bad.front());
  return ds;
}

inline std::string out_path(const RunConfig& c, const std::string& file) {
  std::filesystem::create_directories(c.output);
  return (std::filesystem::path(c.output) / file).string();
}

inline std::string tag(Scheme s) { return s == Scheme::mn ? "mn" : "1p1"; }

inline DesignReport solve(const RunConfig& c, const Inputs& in, const std::vector<Demand>& ds, Scheme s,
                          std::uint64_t seed) {
  DesignReport r = s == Scheme::mn ? run_mn_design(in.topology, ds, in.qot, design_config(c))
                                   : run_one_plus_one_baseline(in.topology, ds, in.qot, design_config(c));
  r.config_hash = config_hash(c);
  r.seed = seed;
  return r;
}

inline int cmd_design(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Inputs in = inputs(c);
  const Scheme scheme = c.scheme == "mn" ? Scheme::mn : Scheme::one_plus_one;
  std::vector<DesignReport> reports;
  bool clean = true;
  for (std::uint64_t seed : c.seeds) {
    const auto ds = demands_for(c, in.topology, seed);
    const std::string stem = tag(scheme) + "_seed" + std::to_string(seed);
    milp::save_text(out_path(c, "traffic_seed" + std::to_string(seed) + ".csv"), traffic_to_csv(ds));
    if (c.solver == "export-only") {
      const RrpInstance ri = make_rrp_instance(in.topology, ds, in.qot, c.k, design_config(c).rrp_weights,
                                               scheme == Scheme::one_plus_one);
      const RrpModel rm = build_rrp(ri);
      const std::string path = out_path(c, "rrp_" + stem + ".mps");
      milp::save_text(path, milp::write_mps(rm.model));
      out << "seed " << seed << ": exported " << rm.model.constraint_count() << " rows, " << rm.model.variable_count()
          << " columns to " << path << "\n";
      continue;
    }
    DesignReport r = solve(c, in, ds, scheme, seed);
    const auto vs = verify(r, in.topology, ds, in.qot);
    milp::save_text(out_path(c, "report_" + stem + ".json"), report_to_text(r));
    out << "seed " << seed << ": " << (r.optimal ? "optimal" : "non-optimal") << ", accepted " << r.accepted_count()
        << "/" << r.demand_count << ", sites " << r.site_count() << ", regenerators " << r.regenerator_total()
        << " (installed " << r.effective_regenerator_total() << "), verify " << (vs.empty() ? "clean" : "FAILED")
        << "\n";
    for (const auto& v : vs) err << "  " << v << "\n";
    clean = clean && vs.empty();
    reports.push_back(std::move(r));
  }
  if (!reports.empty()) {
    const Summary s = summarize(reports);
    milp::save_text(out_path(c, "summary_" + tag(scheme) + ".csv"), summary_csv({s}));
    milp::save_text(out_path(c, "node_median_" + tag(scheme) + ".csv"), node_median_csv(s));
  }
  return clean ? 0 : 1;
}

inline int cmd_compare(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Inputs in = inputs(c);
  std::vector<ComparisonRow> rows;
  bool clean = true;
  for (std::uint64_t seed : c.seeds) {
    const auto ds = demands_for(c, in.topology, seed);
    ComparisonRow row;
    row.seed = seed;
    row.mn = solve(c, in, ds, Scheme::mn, seed);
    row.baseline = solve(c, in, ds, Scheme::one_plus_one, seed);
    for (const DesignReport* r : {&row.mn, &row.baseline}) {
      const auto vs = verify(*r, in.topology, ds, in.qot);
      for (const auto& v : vs) err << "  " << v << "\n";
      clean = clean && vs.empty();
      milp::save_text(out_path(c, "report_" + tag(r->scheme) + "_seed" + std::to_string(seed) + ".json"),
                      report_to_text(*r));
    }
    const int mn = row.mn.regenerator_total(), base = row.baseline.regenerator_total();
    out << "seed " << seed << ": M:N " << mn << ", 1+1 " << base << " per pool (" << 2 * base << " installed)";
    if (!row.equal_acceptance()) out << ", acceptance differs";
    else if (base > 0 || mn == 0) out << ", reduction " << format_double(100.0 * protection_reduction(mn, base)) << "%";
    out << "\n";
    rows.push_back(std::move(row));
  }
  milp::save_text(out_path(c, "compare.csv"), comparison_csv(rows, config_hash(c)));
  return clean ? 0 : 1;
}

inline int cmd_verify(const std::string& report_path, const RunConfig& c, std::ostream& out) {
  const Inputs in = inputs(c);
  if (c.traffic.empty()) throw ValidationError("verify needs --traffic");
  const DesignReport r = load_report(report_path);
  const auto ds = load_traffic(c.traffic);
  const auto vs = verify(r, in.topology, ds, in.qot);
  if (vs.empty()) out << "clean\n";
  for (const auto& v : vs) out << v << "\n";
  return vs.empty() ? 0 : 1;
}

inline int cmd_report(const std::vector<std::string>& files, const RunConfig& c, std::ostream& out) {
  std::vector<DesignReport> mn, base;
  for (const auto& f : files) {
    DesignReport r = load_report(f);
    (r.scheme == Scheme::mn ? mn : base).push_back(std::move(r));
  }
  std::vector<Summary> ss;
  for (auto* group : {&mn, &base})
    if (!group->empty()) ss.push_back(summarize(*group));
  milp::save_text(out_path(c, "summary.csv"), summary_csv(ss));
  for (const auto& s : ss) {
    milp::save_text(out_path(c, "node_median_" + tag(s.scheme) + ".csv"), node_median_csv(s));
    out << to_string(s.scheme) << ": " << s.runs << " runs, regenerators mean " << format_double(s.regenerators.mean)
        << " std " << format_double(s.regenerators.std) << (s.regenerators.single() ? " (n=1)" : "") << "\n";
  }
  return 0;
}

inline int cmd_qot(const RunConfig& c, const std::string& path_text, std::ostream& out) {
  const Inputs in = inputs(c);
  const Topology& t = in.topology;
  const auto grid = wavelength_grid(in.qot.params(), t.wavelength_count());
  if (path_text.empty()) {
    out << "link,from,to,km,q_ref,q_min,admissible\n";
    for (const Link& l : t.links()) {
      const LinkId e[] = {l.id};
      const auto spec = in.qot.q_spectrum_for_path(t, e);
      const double qmin = *std::min_element(spec.begin(), spec.end());
      out << l.id << "," << l.from << "," << l.to << "," << format_double(l.length_km) << ","
          << format_double(in.qot.q_segment(t, e, in.qot.reference_wavelength())) << "," << format_double(qmin) << ","
          << (admissible(qmin, in.qot.q_threshold()) ? 1 : 0) << "\n";
    }
    return 0;
  }
  std::vector<NodeId> nodes;
  std::stringstream ss(path_text);
  std::string item;
  while (std::getline(ss, item, ',')) nodes.push_back(std::stoi(item));
  if (nodes.size() < 2) throw ValidationError("--path needs at least two nodes");
  std::vector<LinkId> links;
  for (std::size_t h = 0; h + 1 < nodes.size(); ++h) {
    const auto e = t.find_link(nodes[h], nodes[h + 1]);
    if (!e) throw ValidationError("no link " + std::to_string(nodes[h]) + "->" + std::to_string(nodes[h + 1]));
    links.push_back(*e);
  }
  out << "wavelength_index,lambda_nm,q_db,admissible\n";
  const double qref = in.qot.q_segment(t, links, in.qot.reference_wavelength());
  out << "ref," << format_double(in.qot.reference_wavelength()) << "," << format_double(qref) << ","
      << (admissible(qref, in.qot.q_threshold()) ? 1 : 0) << "\n";
  for (std::size_t l = 0; l < grid.size(); ++l) {
    const double q = in.qot.q_segment(t, links, grid[l]);
    out << l + 1 << "," << format_double(grid[l]) << "," << format_double(q) << ","
        << (admissible(q, in.qot.q_threshold()) ? 1 : 0) << "\n";
  }
  return 0;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"regenpool: translucent network design with shared regenerator pools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  detail::Overrides gen_o, qot_o, design_o, verify_o, compare_o, report_o;
  auto* gen = app.add_subcommand("gen-traffic", "write a demand CSV");
  detail::add_run_flags(gen, gen_o);
  std::string gen_file;
  gen->add_option("--file", gen_file, "write here instead of stdout");

  auto* qot = app.add_subcommand("qot", "Q factor of every link, or of one path per wavelength");
  detail::add_run_flags(qot, qot_o);
  std::string qot_path;
  qot->add_option("--path", qot_path, "comma-separated node ids, e.g. 1,9,10");

  auto* design = app.add_subcommand("design", "solve one scheme for each seed");
  detail::add_run_flags(design, design_o);

  auto* ver = app.add_subcommand("verify", "re-check a report from raw data");
  detail::add_run_flags(ver, verify_o);
  std::string report_path;
  ver->add_option("--report", report_path, "report JSON")->required();

  auto* cmp = app.add_subcommand("compare", "M:N against 1+1 on identical inputs");
  detail::add_run_flags(cmp, compare_o);

  auto* rep = app.add_subcommand("report", "aggregate report JSONs");
  detail::add_run_flags(rep, report_o);
  std::vector<std::string> report_files;
  rep->add_option("--input", report_files, "report JSON files")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      const RunConfig c = detail::resolve(gen_o);
      const Topology t = detail::inputs(c).topology;
      const std::string csv = traffic_to_csv(generate_demands(t, {c.demands, c.pi, c.horizon, c.seeds.front()}));
      if (gen_file.empty()) out << csv;
      else milp::save_text(gen_file, csv);
      return 0;
    }
    if (qot->parsed()) return detail::cmd_qot(detail::resolve(qot_o), qot_path, out);
    if (design->parsed()) return detail::cmd_design(detail::resolve(design_o), out, err);
    if (ver->parsed()) return detail::cmd_verify(report_path, detail::resolve(verify_o), out);
    if (cmp->parsed()) return detail::cmd_compare(detail::resolve(compare_o), out, err);
    if (rep->parsed()) return detail::cmd_report(report_files, detail::resolve(report_o), out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace regenpool::cli

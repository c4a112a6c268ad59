#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "regenpool/cli.hpp"

namespace fs = std::filesystem;
using namespace regenpool;

namespace {

const std::string kSamples = std::string(REGENPOOL_SOURCE_DIR) + "/samples/";

struct Result {
  int rc;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "regenpool");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = regenpool::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {rc, out.str(), err.str()};
}

fs::path fresh(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("regenpool_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::vector<std::string> ring6(const fs::path& out) {
  return {"--topology", kSamples + "ring6.topo", "--traffic", kSamples + "ring6_demands.csv", "--k", "1",
          "--output", out.string()};
}

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST(Cli, DesignWritesCleanReport) {
  const auto dir = fresh("design");
  const auto r = run(with({"design"}, ring6(dir)));
  ASSERT_EQ(r.rc, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("seed 1: optimal, accepted 3/3"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("verify clean"), std::string::npos);
  for (const char* f : {"report_mn_seed1.json", "traffic_seed1.csv", "summary_mn.csv", "node_median_mn.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;

  const auto v = run(with({"verify", "--report", (dir / "report_mn_seed1.json").string()}, ring6(dir)));
  EXPECT_EQ(v.rc, 0) << v.out;
  EXPECT_EQ(v.out, "clean\n");
}

TEST(Cli, DesignIsByteDeterministic) {
  const auto a = fresh("det_a"), b = fresh("det_b");
  ASSERT_EQ(run(with({"design", "--scheme", "1+1"}, ring6(a))).rc, 0);
  ASSERT_EQ(run(with({"design", "--scheme", "1+1"}, ring6(b))).rc, 0);
  for (const char* f : {"report_1p1_seed1.json", "summary_1p1.csv", "node_median_1p1.csv"})
    EXPECT_EQ(read_file((a / f).string()), read_file((b / f).string())) << f;
}

TEST(Cli, TamperedReportFailsVerify) {
  const auto dir = fresh("tamper");
  ASSERT_EQ(run(with({"design"}, ring6(dir))).rc, 0);
  const std::string path = (dir / "report_mn_seed1.json").string();
  auto rep = load_report(path);
  rep.regenerators.assign(rep.regenerators.size(), 0);
  milp::save_text(path, report_to_text(rep));
  const auto v = run(with({"verify", "--report", path}, ring6(dir)));
  EXPECT_EQ(v.rc, 1);
  EXPECT_NE(v.out.find("peak:"), std::string::npos) << v.out;
}

TEST(Cli, BadInputExitsTwo) {
  const auto dir = fresh("bad");
  EXPECT_EQ(run({"design", "--no-such-flag"}).rc, 2);
  EXPECT_EQ(run({}).rc, 2);
  EXPECT_EQ(run({"design", "--topology", kSamples + "missing.topo", "--output", dir.string()}).rc, 2);
  EXPECT_EQ(run(with({"design", "--k", "0"}, ring6(dir))).rc, 2);
  EXPECT_EQ(run(with({"design", "--scheme", "ring"}, ring6(dir))).rc, 2);
  EXPECT_EQ(run({"verify"}).rc, 2);
  EXPECT_EQ(run({"report", "--input", (dir / "none.json").string()}).rc, 2);
  const auto bad_cfg = run({"design", "--config", kSamples + "ring6_demands.csv"});
  EXPECT_EQ(bad_cfg.rc, 2);
  EXPECT_FALSE(bad_cfg.err.empty());
}

TEST(Cli, EnvironmentSetsOutputDirectory) {
  const auto env_dir = fresh("env"), flag_dir = fresh("flag");
  ::setenv(kOutputDirEnv, env_dir.string().c_str(), 1);
  auto args = ring6(flag_dir);
  args.resize(args.size() - 2);  // drop --output
  const auto r = run(with({"design"}, args));
  EXPECT_EQ(r.rc, 0) << r.err;
  EXPECT_TRUE(fs::exists(env_dir / "report_mn_seed1.json"));
  // An explicit flag still wins.
  EXPECT_EQ(run(with({"design"}, ring6(flag_dir))).rc, 0);
  EXPECT_TRUE(fs::exists(flag_dir / "report_mn_seed1.json"));
  ::unsetenv(kOutputDirEnv);
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
  const auto dir = fresh("cfg");
  fs::create_directories(dir);
  const std::string cfg = (dir / "run.conf").string();
  milp::save_text(cfg, "topology = " + kSamples + "ring6.topo\ntraffic = " + kSamples +
                           "ring6_demands.csv\nk = 1\nscheme = 1+1\noutput = " + (dir / "from_file").string() + "\n");
  ASSERT_EQ(run({"design", "--config", cfg}).rc, 0);
  EXPECT_TRUE(fs::exists(dir / "from_file" / "report_1p1_seed1.json"));
  ASSERT_EQ(run({"design", "--config", cfg, "--scheme", "mn"}).rc, 0);
  EXPECT_TRUE(fs::exists(dir / "from_file" / "report_mn_seed1.json"));
}

TEST(Cli, ReportAggregatesSeveralRuns) {
  const auto dir = fresh("agg");
  const auto d = run({"design", "--topology", kSamples + "ring6.topo", "--demands", "3", "--k", "1", "--seed",
                      "1,2,3", "--output", dir.string()});
  ASSERT_EQ(d.rc, 0) << d.out << d.err;
  const std::string summary = read_file((dir / "summary_mn.csv").string());
  EXPECT_NE(summary.find("\nMN,3,"), std::string::npos) << summary;

  const auto agg = dir / "agg";
  const auto r = run({"report", "--input", (dir / "report_mn_seed1.json").string(),
                      (dir / "report_mn_seed2.json").string(), (dir / "report_mn_seed3.json").string(), "--output",
                      agg.string()});
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.out.find("MN: 3 runs"), std::string::npos) << r.out;
  EXPECT_EQ(read_file((agg / "summary.csv").string()), summary);
  EXPECT_TRUE(fs::exists(agg / "node_median_mn.csv"));
}

TEST(Cli, CompareWritesTable) {
  const auto dir = fresh("cmp");
  const auto r = run(with({"compare"}, ring6(dir)));
  ASSERT_EQ(r.rc, 0) << r.err;
  EXPECT_NE(r.out.find("seed 1: M:N "), std::string::npos);
  const std::string csv = read_file((dir / "compare.csv").string());
  EXPECT_NE(csv.find("seed,mn_accepted,baseline_accepted"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "report_1p1_seed1.json"));
  EXPECT_TRUE(fs::exists(dir / "report_mn_seed1.json"));
}

TEST(Cli, ExportOnlyWritesReadableMps) {
  const auto dir = fresh("mps");
  const auto r = run(with({"design", "--solver", "export-only"}, ring6(dir)));
  ASSERT_EQ(r.rc, 0) << r.err;
  const auto m = milp::load_mps((dir / "rrp_mn_seed1.mps").string());
  EXPECT_GT(m.constraint_count(), 0);
  EXPECT_FALSE(fs::exists(dir / "report_mn_seed1.json"));
}

TEST(Cli, GenTrafficAndQot) {
  const auto g = run({"gen-traffic", "--demands", "5", "--pi", "0.5", "--seed", "3"});
  ASSERT_EQ(g.rc, 0);
  const auto ds = traffic_from_csv(g.out);
  EXPECT_EQ(ds.size(), 5u);
  EXPECT_EQ(run({"gen-traffic", "--demands", "5", "--pi", "0.5", "--seed", "3"}).out, g.out);

  const auto q = run({"qot", "--path", "1,9,10"});
  ASSERT_EQ(q.rc, 0);
  EXPECT_NE(q.out.find("ref,1550,18.450"), std::string::npos) << q.out;
  const auto links = run({"qot"});
  EXPECT_EQ(std::count(links.out.begin(), links.out.end(), '\n'), 41);
  EXPECT_EQ(run({"qot", "--path", "1,12"}).rc, 2);
}

#include "cli_app.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using polsq::cli::json;

namespace {

struct CliRun {
  int code = 0;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "polsq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CliRun r;
  r.code = polsq::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

/// CSV body lines after the `#` header.
std::vector<std::string> csv_body(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& l : lines(s))
    if (!l.empty() && l[0] != '#') out.push_back(l);
  return out;
}

}  // namespace

TEST(Cli, StateJson) {
  const CliRun r = run({"state", "--nc", "1", "--ns", "0.3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["header"]["command"], "state");
  EXPECT_EQ(j["header"]["version"], polsq::kVersion);
  EXPECT_TRUE(j["header"]["config"].contains("nth"));
  EXPECT_TRUE(j["header"]["seed"].is_null());
  for (const char* k : {"s0", "sx", "var_sz", "wineland", "squeezing_db", "var_x", "var_p", "purified"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_NEAR(j["squeezing_db"].get<double>(), polsq::squeezing_db(polsq::StateParams::make(1, 0.3, 0)), 1e-12);
  EXPECT_EQ(j["purified"]["eta"], 1.0);
}

TEST(Cli, StateNotPurifiable) {
  const CliRun r = run({"state", "--nc", "1", "--ns", "0.001", "--nth", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out)["purified"].is_null());
}

TEST(Cli, CorrelatorText) {
  const CliRun r = run({"corr", "--ns", "0.3", "--m", "1", "--n", "1"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "2.9999999999999999e-01\n");
  const CliRun j = run({"corr", "--ns", "0.3", "--m", "0", "--n", "2", "--format", "json"});
  EXPECT_NEAR(json::parse(j.out)["value"].get<double>(), 0.62449979983983982, 1e-15);
}

TEST(Cli, OracleAgreesWithCorrelator) {
  const CliRun a = run({"corr", "--ns", "0.3", "--nth", "0.1", "--m", "2", "--n", "2"});
  const CliRun b = run({"oracle", "corr", "--ns", "0.3", "--nth", "0.1", "--m", "2", "--n", "2"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_NEAR(std::stod(a.out), std::stod(b.out), 1e-9 * std::stod(a.out));
}

TEST(Cli, ReducedHundredPhotons) {
  const CliRun r = run({"reduced", "--nc", "100", "--ns", "0.3", "--nth", "0", "--n", "100"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["concurrence"].get<double>(), 0.00468, 1e-5);
  EXPECT_EQ(j["matrix"].size(), 4u);
  EXPECT_TRUE(j["ppt_negative"].get<bool>());
}

TEST(Cli, ReducedNeedsPhotonNumber) {
  const CliRun r = run({"reduced", "--nc", "100", "--ns", "0.3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.err)["error"]["kind"], "usage");
}

TEST(Cli, OdmJsonAndCsv) {
  const CliRun j = run({"odm", "--nc", "1", "--ns", "0.2", "--n", "3"});
  ASSERT_EQ(j.code, 0) << j.err;
  const json d = json::parse(j.out);
  EXPECT_EQ(d["matrix"].size(), 8u);
  EXPECT_EQ(d["compressed"].size(), 4u);
  const CliRun c = run({"odm", "--nc", "1", "--ns", "0.2", "--n", "3", "--format", "csv"});
  const auto head = lines(c.out);
  EXPECT_EQ(head[1], "# schema_version: 1");
  EXPECT_EQ(head[2], "# command: odm");
  const auto body = csv_body(c.out);
  EXPECT_EQ(body.front(), "v_i,v_j,value");
  EXPECT_EQ(body.size(), 17u);
}

TEST(Cli, EntangleOptimized) {
  const CliRun r = run({"entangle", "--nc", "100", "--n", "100", "--optimize-ns"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["ns"].get<double>(), 0.3, 0.05);
  EXPECT_LE(j["ratio"].get<double>(), 1.0);
  EXPECT_EQ(run({"entangle", "--nc", "1", "--n", "2"}).code, 2);
}

TEST(Cli, SweepCsv) {
  const CliRun r = run({"sweep", "--n", "2,17", "--ns", "0.3", "--nc", "1,4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto body = csv_body(r.out);
  ASSERT_EQ(body.size(), 5u);
  EXPECT_EQ(body[0], "n_c,n_s,N,C,C_max,ratio,delta");
}

TEST(Cli, DepthJson) {
  const CliRun r = run({"depth", "--nc", "100", "--ns", "0.3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["k"].get<double>(), 100.92663654953960, 1e-8);
  EXPECT_FALSE(j["grey"].get<bool>());
}

TEST(Cli, DepthContourAndValidation) {
  const CliRun r = run({"depth-contour", "--resolution", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto body = csv_body(r.out);
  EXPECT_EQ(body.size(), 26u);
  EXPECT_EQ(body[0], "n_s,n_th,fraction,is_grey");
  const CliRun bad = run({"depth-contour", "--ns-range", "1e-5,1"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(json::parse(bad.err)["error"]["kind"], "InvalidParams");
}

TEST(Cli, FigureData) {
  const CliRun f2 = run({"figure-data", "fig2", "--resolution", "4"});
  ASSERT_EQ(f2.code, 0) << f2.err;
  EXPECT_EQ(csv_body(f2.out).size(), 17u);
  EXPECT_NE(f2.out.find("\"figure\":\"fig2\""), std::string::npos);
  const CliRun f5 = run({"figure-data", "fig5"});
  ASSERT_EQ(f5.code, 0) << f5.err;
  const auto body = csv_body(f5.out);
  EXPECT_EQ(body[0], "N,n_c,n_s,cut,negativity,pt_min_eigenvalue");
  EXPECT_EQ(body.size(), 1u + 21 * (1 + 2 + 2 + 3));
}

TEST(Cli, SimulateDeterministic) {
  const std::vector<std::string> args{"simulate", "--nc", "10", "--ns", "0.3", "--shots", "50", "--seed", "4"};
  const CliRun a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto ls = lines(a.out);
  ASSERT_EQ(ls.size(), 51u);
  const json head = json::parse(ls[0]);
  EXPECT_EQ(head["schema_version"], 1);
  EXPECT_EQ(head["header"]["seed"], 4);
  EXPECT_EQ(head["header"]["schedule"].size(), 4u);
  EXPECT_EQ(json::parse(ls[7])["shot"], 6);
  auto c = args;
  c.back() = "5";
  EXPECT_NE(run(c).out, a.out);
}

TEST(Cli, SimulateSummaryFormats) {
  const CliRun j = run({"simulate", "--nc", "8", "--ns", "0.3", "--n", "8", "--shots", "2000", "--format", "json",
                     "--bootstrap", "20"});
  ASSERT_EQ(j.code, 0) << j.err;
  const json d = json::parse(j.out);
  EXPECT_EQ(d["used_shots"], 2000);
  EXPECT_GT(d["delta_se"].get<double>(), 0.0);
  const CliRun c = run({"simulate", "--nc", "8", "--ns", "0.3", "--n", "8", "--shots", "500", "--format", "csv",
                     "--bootstrap", "10"});
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_EQ(csv_body(c.out).size(), 2u);
}

TEST(Cli, ScheduleFile) {
  const auto path = std::filesystem::temp_directory_path() / "polsq_test_schedule.txt";
  {
    std::ofstream f(path);
    f << "# custom\nZ\nphi 0\nphi 0.7853981633974483 # pi/4\nphi 1.5707963267948966\n";
  }
  const CliRun r = run({"simulate", "--nc", "8", "--ns", "0.3", "--n", "8", "--shots", "400", "--format", "json",
                     "--bootstrap", "5", "--schedule", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["schedule"].size(), 4u);
  {
    std::ofstream f(path);
    f << "Z\nphi 0\n";
  }
  const CliRun bad = run({"simulate", "--nc", "8", "--ns", "0.3", "--n", "8", "--shots", "400", "--format", "json",
                       "--schedule", path.string()});
  EXPECT_EQ(bad.code, 3);
  EXPECT_EQ(json::parse(bad.err)["error"]["kind"], "IncompleteSchedule");
  std::filesystem::remove(path);
}

TEST(Cli, OutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "polsq_test_out.json";
  const CliRun r = run({"depth", "--nc", "10", "--ns", "0.3", "-o", path.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  EXPECT_EQ(json::parse(f)["header"]["command"], "depth");
  std::filesystem::remove(path);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"state", "--nc", "1"}).code, 2);
  EXPECT_EQ(run({"state", "--nc", "x", "--ns", "1"}).code, 2);
  EXPECT_EQ(run({"state", "--nc", "-1", "--ns", "0.3"}).code, 2);
  EXPECT_EQ(run({"oracle", "odm", "--nc", "1", "--ns", "0.3", "--n", "6"}).code, 2);
  const CliRun tf = run({"reduced", "--nc", "1", "--ns", "0.3", "--n", "1"});
  EXPECT_EQ(tf.code, 3);
  const json e = json::parse(tf.err);
  EXPECT_EQ(e["schema_version"], 1);
  EXPECT_EQ(e["error"]["kind"], "TooFewPhotons");
  EXPECT_EQ(e["error"]["exit_code"], 3);
  EXPECT_EQ(run({"oracle", "corr", "--ns", "1", "--nth", "1", "--m", "1", "--n", "1", "--cutoff", "40"}).code, 3);
  EXPECT_EQ(run({"--version"}).code, 0);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, VerifySubset) {
  const CliRun r = run({"verify", "--only", "9", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["total"], 1);
  EXPECT_EQ(j["criteria"][0]["id"], 9);
  EXPECT_EQ(j["header"]["seed"], 1);
}

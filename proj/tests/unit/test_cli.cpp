#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "farey/cli.hpp"

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const char* threads_env = nullptr) {
  args.insert(args.begin(), "farey");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = farey::cli::run(static_cast<int>(argv.size()), argv.data(), out, err, [threads_env](const char* key) {
    return std::string(key) == farey::cli::kThreadsEnv ? threads_env : nullptr;
  });
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::string body(const std::string& s) { return s.substr(s.find('\n') + 1); }

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
  const auto p = std::filesystem::temp_directory_path() / ("farey_cli_test_" + name);
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(Cli, SumLevelSmallValues) {
  const auto r = run({"sumlevel", "--n", "1..5", "--method", "sb"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto L = lines(r.out);
  ASSERT_EQ(L.size(), 7U);
  EXPECT_EQ(L[0].rfind("# farey sumlevel ", 0), 0U);
  EXPECT_EQ(L[1], "n,lambda,lambda_float,method");
  EXPECT_EQ(L[5].substr(0, L[5].find(',', 2)), "4,39/140");
  EXPECT_EQ(L[6].substr(0, L[6].find(',', 2)), "5,1129/4290");
}

TEST(Cli, CfAndPreimageRowsAgree) {
  const auto cf = lines(run({"sumlevel", "--n", "2", "--method", "cf"}).out);
  const auto pre = lines(run({"sumlevel", "--n", "2", "--method", "preimage"}).out);
  ASSERT_EQ(cf.size(), 3U);
  EXPECT_EQ(cf[2].substr(0, cf[2].rfind(',')), pre[2].substr(0, pre[2].rfind(',')));
  const auto all = run({"sumlevel", "--n", "1..8", "--method", "all"});
  EXPECT_EQ(all.code, 0);
  EXPECT_EQ(all.out.find(",false"), std::string::npos);
}

TEST(Cli, SetEmissionPrintsEndpoints) {
  const auto r = run({"sumlevel", "--n", "3", "--emit", "set", "--method", "preimage"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(body(r.out), "n,lo,hi\n3,1/4,2/5\n3,3/5,3/4\n");
}

TEST(Cli, TransferColumnIsDecreasing) {
  const auto r = run({"sumlevel", "--u", "7/10", "--n", "1..20", "--method", "transfer"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto L = lines(r.out);
  double prev = 2.0;
  for (std::size_t i = 2; i < L.size(); ++i) {
    const auto a = L[i].find(',') + 1;
    const double v = std::stod(L[i].substr(a, L[i].find(',', a) - a));
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Cli, PreimageColumns) {
  const auto r = run({"preimage", "--alpha", "1/2", "--beta", "1", "--depth", "2", "--mode", "exact"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out)[1], "depth,lambda,mu,interval_count");
  EXPECT_EQ(lines(r.out)[2].substr(0, 7), "2,3/10,");
  const auto f = run({"preimage", "--depth", "30", "--mode", "float"});
  ASSERT_EQ(f.code, 0);
  EXPECT_NE(f.out.find("lambda_error_bound="), std::string::npos);
}

TEST(Cli, SternBrocotLevel) {
  const auto r = run({"stern-brocot", "--level", "2"});
  EXPECT_EQ(body(r.out), "k,fraction\n0,0/1\n1,1/3\n2,1/2\n3,2/3\n4,1/1\n");
}

TEST(Cli, TransferReportsRelativeError) {
  const auto r = run({"transfer", "--u", "1/2", "--n", "22", "--mesh", "2048"});
  ASSERT_EQ(r.code, 0);
  const auto L = lines(r.out);
  EXPECT_EQ(L[1], "n,lambda_grid,lambda_exact,rel_err");
  EXPECT_EQ(L.size(), 24U);
  EXPECT_NE(L[21].find("/"), std::string::npos);   // n = 20 carries the exact value
  EXPECT_EQ(L[23].substr(L[23].size() - 2), ",,");  // n = 22 does not
  const auto g = run({"transfer", "--n", "3", "--mesh", "64", "--emit", "gridfn"});
  EXPECT_EQ(lines(g.out).size(), 2U + 64U);
}

TEST(Cli, AsymptoticJson) {
  const auto r = run({"asympt", "--law", "lemma3", "--u", "1/2", "--grid", "1e2,1e3"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("{\"config\":{\"command\":\"asympt\"", 0), 0U);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["law"], "lemma3");
  EXPECT_EQ(j["points"].size(), 2U);
  EXPECT_TRUE(j["points"][0].contains("scaled_error"));
  EXPECT_TRUE(j.contains("K"));
  EXPECT_EQ(j["verdict"], "bounded");
}

TEST(Cli, RepeatedRunsAreIdentical) {
  const std::vector<std::string> a{"preimage", "--alpha", "1/3", "--beta", "4/5", "--depth", "0..16", "--threads", "4"};
  EXPECT_EQ(run(a).out, run(a).out);
  auto single = a;
  single.back() = "1";
  EXPECT_EQ(body(run(a).out), body(run(single).out));
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, farey::cli::kExitConfigError);
  EXPECT_EQ(run({"nope"}).code, farey::cli::kExitConfigError);
  EXPECT_EQ(run({"sumlevel", "--bogus", "1"}).code, farey::cli::kExitConfigError);
  EXPECT_EQ(run({"sumlevel", "--n", "x"}).code, farey::cli::kExitConfigError);
  EXPECT_EQ(run({"sumlevel", "--method", "sb", "--u", "1/3"}).code, farey::cli::kExitConfigError);
  EXPECT_EQ(run({"preimage", "--alpha", "2/3", "--beta", "1/3"}).code, farey::cli::kExitConfigError);
  EXPECT_EQ(run({"sumlevel", "--help"}).code, farey::cli::kExitOk);
  const auto cap = run({"sumlevel", "--n", "30", "--method", "sb"});
  EXPECT_EQ(cap.code, farey::cli::kExitConfigError);
  EXPECT_NE(cap.err.find("preimage"), std::string::npos);
  EXPECT_EQ(run({"preimage", "--depth", "25", "--emit", "set"}).code, farey::cli::kExitConfigError);
}

TEST(Cli, VerificationFailureExitsWithTwo) {
  // A 16-node mesh cannot reach the grid-fidelity tolerance.
  const auto r = run({"verify", "--suite", "oracles", "--mesh", "16"});
  EXPECT_EQ(r.code, farey::cli::kExitVerificationFailed);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["passed"].get<bool>());
  EXPECT_GT(j["failed"].get<int>(), 0);
  EXPECT_EQ(j["checks"].size(), j["total"].get<std::size_t>());
}

TEST(Cli, ConfigFileIsOverriddenByFlags) {
  const auto cfg = temp_file("override.cfg", "# comment\nn = 2..3\nmethod=cf\nalpha=1/3\n");
  const auto r = run({"--config", cfg.string(), "sumlevel", "--method", "sb"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(lines(r.out)[0].find(" method=sb "), std::string::npos);
  EXPECT_NE(lines(r.out)[0].find(" n=2..3 "), std::string::npos);
  EXPECT_EQ(lines(r.out).size(), 4U);
  const auto bad = temp_file("bad.cfg", "colour=blue\n");
  EXPECT_EQ(run({"--config", bad.string(), "sumlevel"}).code, farey::cli::kExitConfigError);
  EXPECT_EQ(run({"--config", "/nonexistent/farey.cfg", "sumlevel"}).code, farey::cli::kExitConfigError);
}

TEST(Cli, ThreadsFromEnvironment) {
  const auto env = run({"stern-brocot", "--level", "1"}, "3");
  EXPECT_EQ(lines(env.out)[0].find("threads"), std::string::npos);  // stern-brocot has no thread option
  const auto p = run({"preimage", "--depth", "3"}, "3");
  EXPECT_NE(lines(p.out)[0].find(" threads=3"), std::string::npos);
  const auto flag = run({"preimage", "--depth", "3", "--threads", "2"}, "3");
  EXPECT_NE(lines(flag.out)[0].find(" threads=2"), std::string::npos);
  EXPECT_EQ(run({"preimage", "--depth", "3"}, "zero").code, farey::cli::kExitConfigError);
}

TEST(Cli, OutputFile) {
  const auto path = std::filesystem::temp_directory_path() / "farey_cli_test_out.csv";
  std::filesystem::remove(path);
  const auto r = run({"--output", path.string(), "stern-brocot", "--level", "1"});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "# farey stern-brocot level=1 max-level=26\nk,fraction\n0,0/1\n1,1/2\n2,1/1\n");
}

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include <linsync/io.hpp>

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string temp_path(const std::string& name) { return testing::TempDir() + "linsync_cli_" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

Run run(const std::string& args, const std::string& env = "") {
  const std::string err_path = temp_path("stderr.txt");
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" LINSYNC_CLI_PATH "' " + args + " 2>'" + err_path + "'";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err_path);
  return r;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST(Cli, CheckGeneratedSingleState) {
  const auto r = run("check --gen-n 1 --gen-k 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "synchronizing");
  EXPECT_NE(r.err.find("elapsed:"), std::string::npos);
}

TEST(Cli, CheckPermutationFallsBack) {
  const auto path = temp_path("perm.txt");
  write_file(path, "3 2\n1 1\n2 0\n0 2\n");
  const auto r = run("check '" + path + "'");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "not synchronizing\nmethod: fallback\nfail_reason: no_unique_tallest_branch\n");
}

TEST(Cli, LinearOnlyIsIndeterminateOnGuardFailure) {
  // Letter 0 has two 1-branches of height 2; letter 1 is a 7-cycle.
  const auto path = temp_path("tie.txt");
  write_file(path, "7 2\n1 1\n2 2\n0 3\n0 4\n3 5\n1 6\n5 0\n");
  const auto r = run("check '" + path + "' --method linear-only");
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "fail: no_unique_tallest_branch");
  const auto a = run("check '" + path + "'");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, "synchronizing\nmethod: fallback\nfail_reason: no_unique_tallest_branch\n");
}

TEST(Cli, QuadraticAndJson) {
  const auto r = run("check --gen-n 30 --gen-k 2 --seed 4 --method quadratic --format json");
  ASSERT_TRUE(r.code == 0 || r.code == 1);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["method"], "quadratic");
  EXPECT_EQ(j["verdict"], r.code == 0 ? "synchronizing" : "not synchronizing");
  EXPECT_TRUE(j["fail_reason"].is_null());
  const auto a = run("check --gen-n 30 --gen-k 2 --seed 4 --format json");
  EXPECT_EQ(a.code, r.code);
  EXPECT_TRUE(nlohmann::json::parse(a.out).contains("step"));
}

TEST(Cli, IdenticalRunsGiveIdenticalBytes) {
  EXPECT_EQ(run("check --gen-n 40 --gen-k 3 --seed 2").out, run("check --gen-n 40 --gen-k 3 --seed 2").out);
}

TEST(Cli, UsageAndIoErrors) {
  EXPECT_EQ(run("check").code, 2);
  EXPECT_EQ(run("check '" + temp_path("missing.txt") + "'").code, 2);
  const auto bad = temp_path("bad.txt");
  write_file(bad, "2 2\n1 1\n0 3\n");
  EXPECT_EQ(run("check '" + bad + "'").code, 2);
  EXPECT_EQ(run("check '" + bad + "' --gen-n 3").code, 2);
  EXPECT_EQ(run("check --gen-n 3 --method fast").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST(Cli, OracleCapFromEnvironmentAndFlag) {
  const auto path = temp_path("perm4.txt");
  write_file(path, "4 2\n1 1\n2 0\n3 2\n0 3\n");
  EXPECT_EQ(run("check '" + path + "'", "LINSYNC_ORACLE_CAP=3").code, 2);
  EXPECT_EQ(run("check '" + path + "' --oracle-cap 4", "LINSYNC_ORACLE_CAP=3").code, 1);
  EXPECT_EQ(run("check '" + path + "' --oracle-cap 3").code, 2);
  EXPECT_EQ(run("check '" + path + "'", "LINSYNC_ORACLE_CAP=abc").code, 2);
}

TEST(Cli, GenIsDeterministicAndParses) {
  const auto a = temp_path("gen_a.txt"), b = temp_path("gen_b.txt");
  ASSERT_EQ(run("gen -n 5 -k 2 --seed 7 --out '" + a + "'").code, 0);
  ASSERT_EQ(run("gen -n 5 -k 2 --seed 7 --out '" + b + "'").code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  const auto A = linsync::parse(slurp(a));
  EXPECT_EQ(A.states(), 5u);
  EXPECT_EQ(A.letters(), 2u);
  const auto j = run("gen -n 5 -k 2 --seed 7 --format json");
  EXPECT_EQ(linsync::parse(j.out), A);
  EXPECT_EQ(run("gen -n 0").code, 2);
  EXPECT_EQ(run("gen -n 3 --out /nonexistent-dir/x.txt").code, 2);
}

TEST(Cli, EstimateFn) {
  const auto r = run("estimate-fn -n 20 --eps 1 --p0 0.99 --seed 1");
  ASSERT_EQ(r.code, 0);
  ASSERT_EQ(count_lines(r.out), 2);
  const auto row = r.out.substr(r.out.find('\n') + 1);
  EXPECT_EQ(row.rfind("20,1060,", 0), 0u);  // t = ceil(2.649 * 20) = 53
  EXPECT_EQ(run("estimate-fn -n 20 --eps 0").code, 2);
  EXPECT_EQ(run("estimate-fn -n 20 --p0 1").code, 2);
}

TEST(Cli, Bench) {
  const auto r = run("bench --ns 1000,10000 --ks 2 --reps 100");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(count_lines(r.out), 3);
  EXPECT_EQ(r.out.rfind("n,k,reps,mean_seconds\n1000,2,100,", 0), 0u);
}

TEST(Cli, Crossover) {
  const auto r = run("crossover --min 5 --max 50 --runs 1000");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(count_lines(r.out), 47);
  const auto pos = r.err.find("n0: ");
  ASSERT_NE(pos, std::string::npos);
  const auto n0 = std::stoul(r.err.substr(pos + 4));
  EXPECT_LE(n0, 50u);
  EXPECT_EQ(run("crossover --min 5 --max 50 --oracle-cap 40").code, 2);
}

TEST(Cli, MainTime) {
  const auto r = run("main-time --ns 100,200 --fn 6 --quad-runs 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(count_lines(r.out), 3);
  EXPECT_EQ(r.out.rfind("n,fn,t_lin,t_quad,estimate\n100,6,", 0), 0u);
}

#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(QNET_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string data(const std::string& name) { return std::string(QNET_TEST_DATA) + "/data/" + name; }

std::string golden(const std::string& name) { return std::string(QNET_TEST_DATA) + "/golden/" + name; }

nlohmann::ordered_json read(const std::string& path) {
  FILE* f = fopen(path.c_str(), "r");
  EXPECT_NE(f, nullptr) << path;
  auto j = nlohmann::ordered_json::parse(f);
  fclose(f);
  return j;
}

}  // namespace

TEST(Cli, AnalyzeFig1) {
  const auto r = run("analyze " + data("fig1.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["h_max"], 3);
  EXPECT_EQ(j["levels"][0]["D"], 6);
  EXPECT_EQ(j["levels"][0]["sets"], nlohmann::json::parse("[[1,3],[1,4],[1,5],[2,4],[2,5],[3,5]]"));
  EXPECT_EQ(j["levels"][1]["sets"], nlohmann::json::parse("[[1,3,5]]"));
  EXPECT_EQ(run("analyze " + data("fig1.json")).out, r.out);
}

TEST(Cli, AnalyzeMatchesGolden) {
  auto out = nlohmann::ordered_json::parse(run("analyze " + data("fig1.json")).out);
  auto expected = read(golden("analyze_fig1.json"));
  for (auto* j : {&out, &expected}) {
    j->erase("version");
    j->erase("input_digest");
  }
  EXPECT_EQ(out, expected);
}

TEST(Cli, AnalyzeTriangleFlagged) {
  const auto r = run("analyze " + data("triangle.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["h_max"], 1);
  EXPECT_EQ(j["no_independent_pair"], true);
}

TEST(Cli, EvalBilocal) {
  const auto r = run("eval " + data("bilocal_canonical.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["S"].get<double>(), 2.8284271, 1e-6);
  EXPECT_EQ(j["tsirelson_satisfied"], true);
  EXPECT_EQ(j["violation"], true);
  EXPECT_EQ(j["report"], "eval");
  auto out = nlohmann::ordered_json::parse(r.out);
  auto expected = read(golden("eval_bilocal.json"));
  for (auto* k : {&out, &expected}) k->erase("version");
  EXPECT_EQ(out, expected);
}

TEST(Cli, EvalFlags) {
  const auto r = run("eval " + data("fig1.json") + " --indep-set A1,A4 --correlations");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["independent_set"], nlohmann::json::parse("[1,4]"));
  EXPECT_EQ(j["correlations"].size(), 32u);
  const auto t = run("eval " + data("bilocal_canonical.json") + " --indep-set 1,3 --format table");
  EXPECT_EQ(t.code, 0);
  EXPECT_NE(t.out.find("tsirelson_satisfied"), std::string::npos);
}

TEST(Cli, OptimizeAndCertify) {
  const auto o = run("optimize " + data("bilocal_canonical.json") + " --restarts 4 --seed 2");
  ASSERT_EQ(o.code, 0);
  const auto j = nlohmann::json::parse(o.out);
  EXPECT_GE(j["S"].get<double>(), 2.8284271 - 1e-6);
  EXPECT_EQ(j["restarts"].size(), 4u);
  EXPECT_EQ(j["config"]["seed"], 2);
  EXPECT_TRUE(j["observables"].contains("A2"));
  const auto a = run("optimize " + data("bilocal_canonical.json") + " --restarts 2 --constraint abelian_pairs");
  EXPECT_NEAR(nlohmann::json::parse(a.out)["S"].get<double>(), 2.0, 1e-4);
  const auto c = run("certify " + data("bilocal_canonical.json") + " --tol 1e-10");
  ASSERT_EQ(c.code, 0);
  EXPECT_EQ(nlohmann::json::parse(c.out)["pass"], true);
}

TEST(Cli, VerifyTrig) {
  const auto r = run("verify --suite trig --trials 10000 --seed 7");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["pass"], true);
  EXPECT_EQ(j["suites"][0]["passed"], 10000);
  EXPECT_EQ(j["suites"][0]["trials"], 10000);
}

TEST(Cli, InputErrorsExitTwo) {
  EXPECT_EQ(run("eval " + data("missing_a2.json")).code, 2);
  EXPECT_EQ(run("eval " + data("nonsquare.json")).code, 2);
  EXPECT_EQ(run("eval /nonexistent.json").code, 2);
  EXPECT_EQ(run("eval " + data("bilocal_canonical.json") + " --indep-set A1,A2").code, 2);
  EXPECT_EQ(run("eval " + data("triangle.json")).code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("verify --suite nope").code, 2);
  EXPECT_EQ(run("").code, 2);
}

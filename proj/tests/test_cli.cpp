#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "genwass/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int exit_code = -1;
  std::string out;  // stdout and stderr interleaved
};

Run run(const std::string& args) {
  const std::string cmd = std::string(GENWASS_CLI) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// stdout only, written to `path`; the human-readable lines on stderr are dropped
int run_to_file(const std::string& args, const fs::path& path) {
  const std::string cmd = std::string(GENWASS_CLI) + " " + args + " > " + path.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string sample(const std::string& name) { return std::string(GENWASS_SAMPLES) + "/" + name; }

fs::path scratch(const std::string& name, const std::string& content) {
  const fs::path dir = fs::temp_directory_path() / "genwass_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << content;
  return p;
}

}  // namespace

TEST(Cli, DistOnTwoPoints) {
  auto r = run("dist --input " + sample("two_point.json"));
  EXPECT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("value: 1"), std::string::npos) << r.out;
}

TEST(Cli, VerifyPassesOnSolverOutput) {
  auto r = run("verify --input " + sample("two_point.json"));
  EXPECT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("optimality verified"), std::string::npos) << r.out;
}

TEST(Cli, TriangleViolationIsAnInputError) {
  auto r = run("dist --input " + sample("bad_triangle.json"));
  EXPECT_EQ(r.exit_code, 2) << r.out;
  EXPECT_NE(r.out.find("(x,z,y)"), std::string::npos) << r.out;
}

TEST(Cli, PlanReportRoundTripsThroughVerify) {
  const fs::path report = fs::temp_directory_path() / "genwass_cli_test" / "report.json";
  fs::create_directories(report.parent_path());
  ASSERT_EQ(run_to_file("plan --format json --input " + sample("two_point.json"), report), 0);
  auto doc = genwass::io::read_json_file(report.string());
  EXPECT_EQ(doc["value"], 1);
  auto verify = run("verify --input " + sample("two_point.json") + " --report " + report.string());
  EXPECT_EQ(verify.exit_code, 0) << verify.out;
}

TEST(Cli, SuboptimalPlanFailsVerification) {
  // shipping nothing on the unit-distance pair leaves value 2 against the optimum 1
  auto report = scratch("empty_plan.json", R"({"plan": [[0, 0], [0, 0]]})");
  auto r = run("verify --input " + sample("two_point.json") + " --report " + report.string());
  EXPECT_EQ(r.exit_code, 1) << r.out;
}

TEST(Cli, DualPrintsZeroGap) {
  auto r = run("dual --format json --input " + sample("two_point.json"));
  ASSERT_EQ(r.exit_code, 0) << r.out;
  auto json_start = r.out.find('{');
  ASSERT_NE(json_start, std::string::npos);
  auto doc = genwass::io::json::parse(r.out.substr(json_start));
  EXPECT_EQ(doc["gap"], 0);
  EXPECT_EQ(doc["certificate"]["passed"], true);
}

TEST(Cli, MalformedJsonReportsLine) {
  auto bad = scratch("malformed.json", "{\n  \"space\": {\"points\": [\"x\"],\n  \"d\": [[0]]\n");
  auto r = run("dist --input " + bad.string());
  EXPECT_EQ(r.exit_code, 2) << r.out;
  EXPECT_NE(r.out.find("malformed.json:4:"), std::string::npos) << r.out;
}

TEST(Cli, ParameterOverrides) {
  auto r = run("dist --input " + sample("two_point.json") + " --p 2 --a 1/4");
  EXPECT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("value: 1/2"), std::string::npos) << r.out;
  auto bad = run("dist --input " + sample("two_point.json") + " --a 0");
  EXPECT_EQ(bad.exit_code, 2) << bad.out;
}

TEST(Cli, UnknownFlagIsAnInputError) {
  EXPECT_EQ(run("dist --nonsense").exit_code, 2);
  EXPECT_EQ(run("dist").exit_code, 2);
}

TEST(Cli, QuotientOnSwap) {
  auto r = run("quotient --input " + sample("swap_quotient.json"));
  EXPECT_EQ(r.exit_code, 0) << r.out;
}

TEST(Cli, GhOnStretchedPair) {
  auto r = run("gh --format json --input " + sample("gh_stretch.json"));
  ASSERT_EQ(r.exit_code, 0) << r.out;
}

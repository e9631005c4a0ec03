#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace nocf {
namespace {

std::string config_path(const std::string& name) {
  return std::string(NOCF_TEST_CONFIG_DIR) + "/" + name;
}

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

Invocation run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Invocation r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

TEST(Cli, SimHappyPath) {
  const auto r = run({"sim", "--config", config_path("isolation.yaml"), "--cycles", "2000",
                      "--format", "structured"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("\"type\":\"stats\""), std::string::npos);
}

TEST(Cli, MissingConfigIsExitTwo) {
  const auto r = run({"sim", "--config", "/nonexistent.yaml"});
  EXPECT_EQ(r.code, cli::kConfigError);
  EXPECT_NE(r.err.find("/nonexistent.yaml"), std::string::npos);
}

TEST(Cli, OverrideEchoedInHeader) {
  const auto r = run({"sim", "--config", config_path("prototype.yaml"), "--cycles", "3",
                      "--set", "kernel.latency=5", "--format", "structured"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const std::string header = r.out.substr(0, r.out.find('\n'));
  EXPECT_NE(header.find("\"kernel_latency\":\"5\""), std::string::npos) << header;
  EXPECT_NE(header.find("\"kernel.latency\":\"5\""), std::string::npos) << header;
}

TEST(Cli, CheckExitCodes) {
  EXPECT_EQ(run({"check", "--config", config_path("check_vulnerable.yaml")}).code,
            cli::kViolation);
  EXPECT_EQ(run({"check", "--config", config_path("check_commit_buffered.yaml")}).code, cli::kOk);
  const auto zero = run({"check", "--config", config_path("check_commit_buffered.yaml"), "--set",
                         "check.depth=0"});
  EXPECT_EQ(zero.code, cli::kOk);
  EXPECT_NE(zero.out.find("VERIFIED to depth 0"), std::string::npos);
  EXPECT_EQ(run({"check", "--config", config_path("check_commit_buffered.yaml"), "--set",
                 "check.state_limit=5"})
                .code,
            cli::kInconclusive);
}

TEST(Cli, CheckWritesCounterexampleFile) {
  const std::string path = ::testing::TempDir() + "nocf_cx.jsonl";
  const auto r = run({"check", "--config", config_path("check_vulnerable.yaml"), "--format",
                      "structured", "-o", path});
  EXPECT_EQ(r.code, cli::kViolation);
  std::ifstream in(path);
  std::string first;
  ASSERT_TRUE(std::getline(in, first));
  EXPECT_NE(first.find("\"type\":\"header\""), std::string::npos);
  std::remove(path.c_str());
}

TEST(Cli, ScenarioOutcomes) {
  const auto restricted = run({"scenario", "gpu", "--policy", "restricted"});
  EXPECT_EQ(restricted.code, cli::kOk) << restricted.err;
  EXPECT_NE(restricted.out.find("injected: false"), std::string::npos);
  const auto permissive = run({"scenario", "gpu", "--policy", "permissive"});
  EXPECT_EQ(permissive.code, cli::kOk);
  EXPECT_NE(permissive.out.find("injected: true"), std::string::npos);
  const auto iso = run({"scenario", "isolation"});
  EXPECT_EQ(iso.code, cli::kOk);
  EXPECT_NE(iso.out.find("cross_boundary_forwards: 0"), std::string::npos);
}

TEST(Cli, UnknownScenarioIsExitTwo) {
  EXPECT_EQ(run({"scenario", "bogus"}).code, cli::kConfigError);
}

TEST(Cli, ValidateReportsErrors) {
  EXPECT_EQ(run({"validate", "--config", config_path("prototype.yaml")}).code, cli::kOk);
  EXPECT_EQ(run({"validate", "--config", config_path("prototype.yaml"), "--set",
                 "masters.0.ports.0.capacity=0"})
                .code,
            cli::kConfigError);
}

TEST(Cli, BadUsageIsExitTwo) {
  EXPECT_EQ(run({}).code, cli::kConfigError);
  EXPECT_EQ(run({"sim", "--format", "xml", "--config", config_path("prototype.yaml")}).code,
            cli::kConfigError);
}

}  // namespace
}  // namespace nocf

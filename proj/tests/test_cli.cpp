#include <gtest/gtest.h>

#include <sstream>

#include "dinesim/cli.hpp"
#include "dinesim/stats.hpp"

namespace dinesim {
namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

TEST(Cli, ClassicRunReportsDeadlock) {
  const auto r = invoke({"run", "--scenario", "classic", "--n", "5", "--seed", "7", "--diag"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_GE(lines.size(), 3u);
  EXPECT_EQ(lines.front().rfind("P", 0), 0u);
  EXPECT_EQ(lines.back().rfind("DEADLOCK detected at t=", 0), 0u);
  EXPECT_NE(lines.back().find("counts=[1, 1, 1, 1, 1]"), std::string::npos);
}

TEST(Cli, DiagLinesUseRequestedPrecision) {
  const auto r = invoke({"run", "--scenario", "ordered", "--n", "3", "--until", "50", "--diag",
                         "--precision", "3"});
  ASSERT_EQ(r.code, 0);
  const auto first = lines_of(r.out).front();
  const auto at = first.rfind('@');
  ASSERT_NE(at, std::string::npos);
  const auto dot = first.find('.', at);
  ASSERT_NE(dot, std::string::npos);
  EXPECT_EQ(first.size() - dot - 1, 3u);
}

TEST(Cli, CounterTraceOpensWithSampleBlock) {
  const auto r = invoke({"run", "--scenario", "counter", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = lines_of(r.out);
  ASSERT_GE(lines.size(), 4u);
  EXPECT_EQ(lines[0], "The operator fell asleep @0.0");
  EXPECT_EQ(lines[1], "Customer arrived @0.0");
  EXPECT_EQ(lines[2], "The operator woke up @0.0");
  bool left = false;
  for (const auto& l : lines) left |= l.rfind("Customer left @", 0) == 0;
  EXPECT_TRUE(left);
  EXPECT_NE(r.out.find("customers: 10"), std::string::npos);
}

TEST(Cli, JsonlRecordsHaveFixedKeys) {
  const auto r = invoke({"run", "--scenario", "counter", "--seed", "3", "--format", "jsonl"});
  ASSERT_EQ(r.code, 0);
  const auto lines = lines_of(r.out);
  EXPECT_EQ(lines[0].rfind("{\"time\":0.0,\"actor\":\"The operator\",\"message\":\"fell asleep\"}", 0),
            0u)
      << lines[0];
  EXPECT_EQ(lines.back().rfind("{\"summary\":", 0), 0u);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  const std::vector<std::string> args{"run", "--scenario", "impatient", "--n", "6",
                                      "--seed", "5", "--until", "3000", "--diag"};
  EXPECT_EQ(invoke(args).out, invoke(args).out);
}

TEST(Cli, SweepCsvParsesBack) {
  const auto r = invoke({"sweep", "--scenario", "ordered", "--n", "2..4", "--until", "1000",
                         "--seeds", "2", "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(lines_of(r.out).front(), "variant,n,t,seed,mean_waiting,deadlocked");
  std::istringstream in(r.out);
  const auto rows = read_csv(in);
  ASSERT_EQ(rows.size(), 6u);
  const auto direct = simulate(2, 1000.0, Variant::Ordered, 0);
  EXPECT_EQ(rows[0].mean_waiting, direct.mean_waiting);
  EXPECT_EQ(rows[0].deadlocked, direct.deadlocked);
}

TEST(Cli, ZeroCustomerCounterStillSucceeds) {
  const auto r = invoke({"run", "--scenario", "counter", "--customers", "0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("customers: 0"), std::string::npos);
}

TEST(Cli, ValidatePasses) {
  const auto r = invoke({"validate", "--customers", "100000", "--seed", "1"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST(Cli, ValidateFailureExitsTwo) {
  const auto r = invoke({"validate", "--customers", "10", "--tolerance", "0.0000001"});
  EXPECT_EQ(r.code, cli::kExitSimulation);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, UsageErrors) {
  const std::vector<std::vector<std::string>> bad{
      {},
      {"run"},
      {"run", "--scenario", "banquet"},
      {"run", "--scenario", "classic", "--n", "1"},
      {"run", "--scenario", "counter", "--n", "4"},
      {"run", "--scenario", "ordered", "--customers", "4"},
      {"run", "--scenario", "ordered", "--format", "xml"},
      {"run", "--scenario", "ordered", "--bogus"},
      {"sweep", "--scenario", "ordered", "--n", "5..2"},
      {"sweep", "--scenario", "ordered", "--seeds", "0"},
      {"validate", "--lambda", "0.2", "--mu", "0.1"},
  };
  for (const auto& args : bad) {
    const auto r = invoke(args);
    EXPECT_EQ(r.code, cli::kExitUsage) << ::testing::PrintToString(args);
    EXPECT_FALSE(r.err.empty()) << ::testing::PrintToString(args);
  }
}

TEST(Cli, HelpIsNotAnError) {
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

}  // namespace
}  // namespace dinesim

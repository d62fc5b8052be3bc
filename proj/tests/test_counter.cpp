#include <gtest/gtest.h>

#include <numeric>

#include "dinesim/counter.hpp"

namespace dinesim {
namespace {

TEST(Counter, OpeningBlockOrdering) {
  const auto report = run_counter(3);
  ASSERT_GE(report.trace.size(), 3u);
  const std::vector<std::pair<std::string, std::string>> expected{
      {"The operator", "fell asleep"}, {"Customer", "arrived"}, {"The operator", "woke up"}};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(report.trace[i].time, 0.0);
    EXPECT_EQ(report.trace[i].actor, expected[i].first);
    EXPECT_EQ(report.trace[i].message, expected[i].second);
  }
}

TEST(Counter, SingleCustomerLeavesAfterServiceDelay) {
  CounterConfig cfg;
  cfg.n_customers = 1;
  cfg.fail_one_in = 1'000'000;
  const auto report = run_counter(1, cfg);
  ASSERT_EQ(report.customers.size(), 1u);
  EXPECT_EQ(report.customers[0].departure, 10.0);
  // The operator loops back to sleep before the customer resumes.
  const auto n = report.trace.size();
  ASSERT_EQ(n, 5u);
  EXPECT_EQ(report.trace[n - 2].message, "fell asleep");
  EXPECT_EQ(report.trace[n - 1].message, "left");
  EXPECT_EQ(report.trace[n - 1].time, 10.0);
}

TEST(Counter, AlwaysFailingServiceIsHandled) {
  CounterConfig cfg;
  cfg.n_customers = 5;
  cfg.fail_one_in = 1;
  const auto report = run_counter(2, cfg);
  for (const auto& c : report.customers) EXPECT_TRUE(c.failed);
  EXPECT_TRUE(report.outcome.exhausted());
}

TEST(Counter, ZeroCustomersJustSleeps) {
  CounterConfig cfg;
  cfg.n_customers = 0;
  const auto report = run_counter(0, cfg);
  ASSERT_EQ(report.trace.size(), 1u);
  EXPECT_EQ(report.trace[0].message, "fell asleep");
}

TEST(Counter, ConfigValidated) {
  CounterConfig cfg;
  cfg.fail_one_in = 0;
  EXPECT_THROW(run_counter(0, cfg), ArgumentError);
  cfg = {};
  cfg.service_delay = 0;
  EXPECT_THROW(run_counter(0, cfg), ArgumentError);
}

TEST(Counter, ServiceIsExactAndInArrivalOrder) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CounterConfig cfg;
    cfg.n_customers = 300;
    const auto report = run_counter(seed, cfg);
    ASSERT_EQ(report.customers.size(), 300u);
    std::vector<int> ids(300);
    std::iota(ids.begin(), ids.end(), 0);
    EXPECT_EQ(report.resolution_order, ids);
    SimTime prev_departure = 0.0;
    for (const auto& c : report.customers) {
      ASSERT_TRUE(c.service_start.has_value());
      ASSERT_TRUE(c.departure.has_value());
      EXPECT_EQ(*c.departure, *c.service_start + 10.0);
      EXPECT_GE(*c.service_start, c.arrival);
      EXPECT_GE(*c.service_start, prev_departure);
      prev_departure = *c.departure;
    }
  }
}

}  // namespace
}  // namespace dinesim

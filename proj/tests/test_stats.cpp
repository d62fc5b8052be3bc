#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "dinesim/stats.hpp"

namespace dinesim {
namespace {

TEST(Simulate, RejectsTooFewPhilosophers) {
  EXPECT_THROW(simulate(1, 100.0, Variant::Ordered, 0), ArgumentError);
  EXPECT_THROW(simulate(3, 0.0, Variant::Ordered, 0), ArgumentError);
}

TEST(Simulate, SameInputsSameResult) {
  const auto a = simulate(7, 5000.0, Variant::Impatient, 12);
  const auto b = simulate(7, 5000.0, Variant::Impatient, 12);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.mean_waiting, simulate(7, 5000.0, Variant::Impatient, 13).mean_waiting);
}

TEST(Simulate, MeanIsAverageOfPerPhilosopherTotals) {
  const auto r = simulate(4, 3000.0, Variant::Bowl, 1);
  ASSERT_EQ(r.per_philosopher.size(), 4u);
  double sum = 0.0;
  for (double w : r.per_philosopher) sum += w;
  EXPECT_DOUBLE_EQ(r.mean_waiting, sum / 4.0);
  EXPECT_FALSE(r.deadlocked);
}

TEST(DeriveSeed, DependsOnEveryComponent) {
  const auto base = derive_seed(1, Variant::Ordered, 5);
  EXPECT_EQ(base, derive_seed(1, Variant::Ordered, 5));
  EXPECT_NE(base, derive_seed(2, Variant::Ordered, 5));
  EXPECT_NE(base, derive_seed(1, Variant::Bowl, 5));
  EXPECT_NE(base, derive_seed(1, Variant::Ordered, 6));
}

TEST(Sweep, CellsMatchStandaloneRunsAndAreOrdered) {
  const std::vector<int> ns{5, 2, 3};
  const std::vector<std::uint64_t> seeds{4, 1};
  const auto multi = sweep(Variant::Ordered, ns, 2000.0, seeds, 3);
  const auto single = sweep(Variant::Ordered, ns, 2000.0, seeds, 1);
  ASSERT_EQ(multi.size(), 6u);
  EXPECT_EQ(multi, single);
  EXPECT_EQ(multi[0].n, 2);
  EXPECT_EQ(multi[0].seed, 1u);
  EXPECT_EQ(multi[5].n, 5);
  EXPECT_EQ(multi[5].seed, 4u);
  for (const auto& r : multi) {
    EXPECT_EQ(r, simulate(r.n, 2000.0, Variant::Ordered, r.seed));
  }
}

TEST(Csv, RoundTripIsLossless) {
  const std::vector<int> ns{2, 3};
  const std::vector<std::uint64_t> seeds{0, 1, 2};
  auto results = sweep(Variant::Bowl, ns, 1000.0, seeds, 1);
  results[1].deadlocked = true;
  results[2].mean_waiting = 0.1 + 0.2;
  std::stringstream ss;
  write_csv(ss, results);
  const auto back = read_csv(ss);
  ASSERT_EQ(back.size(), results.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].variant, results[i].variant);
    EXPECT_EQ(back[i].n, results[i].n);
    EXPECT_EQ(back[i].t, results[i].t);
    EXPECT_EQ(back[i].seed, results[i].seed);
    EXPECT_EQ(back[i].mean_waiting, results[i].mean_waiting);
    EXPECT_EQ(back[i].deadlocked, results[i].deadlocked);
  }
}

TEST(Csv, HeaderOnlyAndMalformed) {
  std::stringstream empty;
  write_csv(empty, {});
  EXPECT_EQ(empty.str(), "variant,n,t,seed,mean_waiting,deadlocked\n");
  EXPECT_TRUE(read_csv(empty).empty());
  std::stringstream bad("variant,n,t,seed,mean_waiting,deadlocked\nordered,x,1,0,1,false\n");
  EXPECT_THROW(read_csv(bad), ArgumentError);
  std::stringstream noheader("ordered,2,1,0,1,false\n");
  EXPECT_THROW(read_csv(noheader), ArgumentError);
}

TEST(Summarize, MeanAndSampleSd) {
  std::vector<SweepResult> rs(3);
  const double vals[] = {2.0, 4.0, 9.0};
  for (int i = 0; i < 3; ++i) {
    rs[static_cast<std::size_t>(i)].n = 4;
    rs[static_cast<std::size_t>(i)].mean_waiting = vals[i];
  }
  const auto s = summarize(rs);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_DOUBLE_EQ(s[0].mean, 5.0);
  EXPECT_DOUBLE_EQ(s[0].sd, std::sqrt(13.0));  // (9 + 1 + 16) / 2
  EXPECT_DOUBLE_EQ(s[0].se(), std::sqrt(13.0 / 3.0));
}

TEST(Shape, TwoPhilosophersWaitLessThanThree) {
  double two = 0.0, three = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    two += simulate(2, 20000.0, Variant::Ordered, s).mean_waiting;
    three += simulate(3, 20000.0, Variant::Ordered, s).mean_waiting;
  }
  EXPECT_LT(two, three);
}

TEST(MM1, ClosedForm) {
  EXPECT_DOUBLE_EQ(mm1_expected_wait({0.05, 0.1}), 10.0);
  EXPECT_NEAR(mm1_expected_wait({0.01, 0.1}), 10.0 / 9.0, 1e-12);
  EXPECT_NEAR(mm1_expected_wait({1e-12, 0.1}), 0.0, 1e-9);
  EXPECT_THROW(mm1_expected_wait({0.1, 0.1}), ArgumentError);
  EXPECT_THROW(mm1_expected_wait({0.2, 0.1}), ArgumentError);
  EXPECT_THROW(mm1_expected_wait({0.0, 0.1}), ArgumentError);
}

// Lindley recursion W' = max(0, W + S - A), drawn from the standard library,
// as a kernel-free reference for the same quantity.
double lindley_mean_wait(double lambda, double mu, int customers, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> inter(lambda), service(mu);
  double w = 0.0, sum = 0.0;
  for (int i = 0; i < customers; ++i) {
    sum += w;
    w = std::max(0.0, w + service(gen) - inter(gen));
  }
  return sum / customers;
}

TEST(MM1, SimulationConvergesToClosedForm) {
  for (const MM1Params p : {MM1Params{0.05, 0.1}, MM1Params{0.01, 0.1}}) {
    const double expected = p.arrival_rate / (p.service_rate * (p.service_rate - p.arrival_rate));
    const double observed = mm1_simulate(p, 100'000, 42);
    EXPECT_NEAR(observed, expected, 0.10 * expected);
    EXPECT_NEAR(lindley_mean_wait(p.arrival_rate, p.service_rate, 100'000, 42), expected,
                0.10 * expected);
  }
}

TEST(MM1, NoCustomersNoWait) {
  EXPECT_EQ(mm1_simulate({0.05, 0.1}, 0, 1), 0.0);
  EXPECT_THROW(mm1_simulate({0.1, 0.05}, 10, 1), ArgumentError);
}

}  // namespace
}  // namespace dinesim

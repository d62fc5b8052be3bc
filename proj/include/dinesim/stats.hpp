#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dinesim/kernel.hpp"
#include "dinesim/philosophers.hpp"

namespace dinesim {

struct SweepResult {
  Variant variant = Variant::Ordered;
  int n = 0;
  SimTime t = 0.0;
  std::uint64_t seed = 0;  // replication seed; the environment seed is derived
  double mean_waiting = 0.0;
  bool deadlocked = false;
  std::vector<double> per_philosopher;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

// Environment seed for one sweep cell: splitmix64 chained over
// (seed, variant, n), so each cell is reproducible on its own.
std::uint64_t derive_seed(std::uint64_t seed, Variant variant, int n);

// One party of n philosophers run until t (or deadlock).
SweepResult simulate(int n, SimTime t, Variant variant, std::uint64_t seed,
                     const PartyOptions& options = {});

// Every (n, seed) cell. Results come back ordered by (n, seed) regardless of
// how many worker threads ran them.
std::vector<SweepResult> sweep(Variant variant, std::span<const int> ns, SimTime t,
                               std::span<const std::uint64_t> seeds,
                               unsigned threads = 0);

// CSV schema: variant,n,t,seed,mean_waiting,deadlocked (LF line endings).
// Reals are written with 17 significant digits so they round-trip exactly.
void write_csv(std::ostream& out, std::span<const SweepResult> results);
std::vector<SweepResult> read_csv(std::istream& in);

struct CellSummary {
  Variant variant = Variant::Ordered;
  int n = 0;
  std::size_t replications = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  double se() const;
};

// Mean and sample standard deviation of mean_waiting per (variant, n).
std::vector<CellSummary> summarize(std::span<const SweepResult> results);

struct MM1Params {
  double arrival_rate = 0.0;  // lambda
  double service_rate = 0.0;  // mu

  void validate() const;
};

// Closed-form mean time in queue, lambda / (mu (mu - lambda)).
double mm1_expected_wait(const MM1Params& params);

// Single-server FIFO queue built from a capacity-1 Resource; returns the
// observed mean time spent waiting for the server.
double mm1_simulate(const MM1Params& params, std::uint64_t n_customers,
                    std::uint64_t seed);

}  // namespace dinesim

#pragma once

#include <deque>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dinesim/kernel.hpp"
#include "dinesim/process.hpp"
#include "dinesim/trace.hpp"

namespace dinesim {

struct CounterConfig {
  double service_delay = 10.0;
  int n_customers = 10;
  int fail_one_in = 10;  // a service fails when a draw in [0, fail_one_in) hits the top value

  void validate() const;
};

class CustomerFailed : public std::runtime_error {
 public:
  CustomerFailed() : std::runtime_error("customer failed") {}
};

struct CustomerRecord {
  int id = 0;
  SimTime arrival = 0.0;
  std::optional<SimTime> service_start;
  std::optional<SimTime> departure;
  bool failed = false;
};

// Customer service counter: a generator produces customers, each customer
// queues a ticket and waits on it, and the operator serves tickets one by
// one, sleeping on an event that never fires when the line is empty.
class CounterModel {
 public:
  CounterModel(Environment& env, CounterConfig config, Trace& trace);

  CounterModel(const CounterModel&) = delete;
  CounterModel& operator=(const CounterModel&) = delete;

  const std::vector<CustomerRecord>& customers() const { return customers_; }
  // Customer ids in the order their tickets resolved.
  const std::vector<int>& resolution_order() const { return resolved_; }
  bool counter_idle() const { return idle_; }

 private:
  struct Ticket {
    int customer = 0;
    Event event;
  };

  Process<> customer_generator();
  Process<> customer(int id);
  Process<> counter();

  Environment* env_;
  CounterConfig config_;
  Trace* trace_;
  std::deque<Ticket> service_line_;
  bool idle_ = false;
  ProcessHandle<> counter_;
  std::vector<CustomerRecord> customers_;
  std::vector<int> resolved_;
};

struct CounterReport {
  RunOutcome outcome;
  std::vector<TraceRecord> trace;
  std::vector<CustomerRecord> customers;
  std::vector<int> resolution_order;
};

// Fresh environment seeded with `seed`, run to exhaustion.
CounterReport run_counter(std::uint64_t seed, const CounterConfig& config = {});

}  // namespace dinesim

#include "dinesim/counter.hpp"

#include <fmt/format.h>

namespace dinesim {

void CounterConfig::validate() const {
  if (!(service_delay > 0.0)) throw ArgumentError("service_delay must be positive");
  if (n_customers < 0) throw ArgumentError("n_customers must be >= 0");
  if (fail_one_in < 1) throw ArgumentError("fail_one_in must be >= 1");
}

CounterModel::CounterModel(Environment& env, CounterConfig config, Trace& trace)
    : env_(&env), config_(config), trace_(&trace) {
  config_.validate();
  customers_.reserve(static_cast<std::size_t>(config_.n_customers));
  spawn(env, customer_generator(), "customer generator");
  counter_ = spawn(env, counter(), "counter");
}

Process<> CounterModel::customer_generator() {
  for (int i = 0; i < config_.n_customers; ++i) {
    spawn(*env_, customer(i), fmt::format("customer {}", i));
    co_await env_->timeout(env_->rng().exponential(config_.service_delay));
  }
}

Process<> CounterModel::customer(int id) {
  trace_->record(env_->now(), "Customer", "arrived");
  customers_.push_back({id, env_->now(), {}, {}, false});
  Event ticket = env_->event();
  ticket.set_label(fmt::format("ticket {}", id));
  service_line_.push_back({id, ticket});

  if (idle_) counter_.interrupt();

  try {
    co_await ticket;
    trace_->record(env_->now(), "Customer", "left");
  } catch (const CustomerFailed&) {
    trace_->record(env_->now(), "Customer", "failed (and left)");
    customers_[static_cast<std::size_t>(id)].failed = true;
  }
  customers_[static_cast<std::size_t>(id)].departure = env_->now();
  resolved_.push_back(id);
}

Process<> CounterModel::counter() {
  for (;;) {
    if (!service_line_.empty()) {
      Ticket ticket = std::move(service_line_.front());
      service_line_.pop_front();
      customers_[static_cast<std::size_t>(ticket.customer)].service_start = env_->now();
      co_await env_->timeout(config_.service_delay);
      const auto top = static_cast<std::int64_t>(config_.fail_one_in) - 1;
      if (env_->rng().uniform_int(0, top) == top) {
        ticket.event.fail(CustomerFailed{});
      } else {
        ticket.event.succeed();
      }
    } else {
      idle_ = true;
      trace_->record(env_->now(), "The operator", "fell asleep");
      try {
        co_await env_->event();
      } catch (const Interrupt&) {
        idle_ = false;
        trace_->record(env_->now(), "The operator", "woke up");
      }
    }
  }
}

CounterReport run_counter(std::uint64_t seed, const CounterConfig& config) {
  CounterReport report;
  Environment env(seed);
  Trace trace;
  {
    CounterModel model(env, config, trace);
    report.outcome = env.run();
    report.customers = model.customers();
    report.resolution_order = model.resolution_order();
  }
  report.trace = trace.records();
  return report;
}

}  // namespace dinesim

#pragma once

#include <cstddef>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "dinesim/kernel.hpp"
#include "dinesim/process.hpp"

namespace dinesim {

class Resource;
class Container;

namespace detail {

struct RequestCore {
  Event event;
  const Resource* resource = nullptr;
  bool granted = false;
  bool released = false;
  bool cancelled = false;
};

struct TransferCore {
  Event event;
  const Container* container = nullptr;
  double amount = 0.0;
  bool is_get = true;
  bool done = false;
  bool cancelled = false;
};

}  // namespace detail

// Handle returned by Resource::request(). Awaiting it blocks until granted.
class Request {
 public:
  Request() = default;

  const Event& event() const { return core_->event; }
  operator Event() const { return core_->event; }  // NOLINT
  bool granted() const { return core_->granted; }
  bool released() const { return core_->released; }
  bool cancelled() const { return core_->cancelled; }
  bool processed() const { return core_->event.processed(); }
  const Resource& resource() const { return *core_->resource; }

  explicit operator bool() const { return core_ != nullptr; }
  friend bool operator==(const Request& a, const Request& b) {
    return a.core_ == b.core_;
  }

 private:
  friend class Resource;
  explicit Request(std::shared_ptr<detail::RequestCore> core)
      : core_(std::move(core)) {}
  std::shared_ptr<detail::RequestCore> core_;
};

struct ResourceCounts {
  std::size_t count = 0;   // granted users
  std::size_t queued = 0;  // pending requests
  friend bool operator==(const ResourceCounts&, const ResourceCounts&) = default;
};

// Renewable, capacity-limited resource with FIFO granting.
class Resource {
 public:
  Resource(Environment& env, int capacity, std::string name = {});

  Resource(const Resource&) = delete;
  Resource& operator=(const Resource&) = delete;

  Request request();
  // Non-blocking. Hands the freed slot to the head of the wait queue.
  void release(const Request& request);
  // Withdraw a request that has not been granted yet.
  void cancel(const Request& request);

  int capacity() const { return capacity_; }
  std::size_t count() const { return users_.size(); }
  std::size_t queued() const { return queue_.size(); }
  ResourceCounts counts() const { return {count(), queued()}; }
  const std::vector<Request>& users() const { return users_; }
  const std::string& name() const { return name_; }
  Environment& env() const { return *env_; }

 private:
  void check_owner(const Request& request, const char* op) const;
  void grant_waiting();

  Environment* env_;
  int capacity_;
  std::string name_;
  std::vector<Request> users_;
  std::deque<Request> queue_;
};

// Pending or completed container get/put.
class Transfer {
 public:
  Transfer() = default;

  const Event& event() const { return core_->event; }
  operator Event() const { return core_->event; }  // NOLINT
  double amount() const { return core_->amount; }
  bool done() const { return core_->done; }
  bool cancelled() const { return core_->cancelled; }
  bool processed() const { return core_->event.processed(); }

  explicit operator bool() const { return core_ != nullptr; }

 private:
  friend class Container;
  explicit Transfer(std::shared_ptr<detail::TransferCore> core)
      : core_(std::move(core)) {}
  std::shared_ptr<detail::TransferCore> core_;
};

// Consumable stock. Gets and puts are served strictly FIFO per queue: a
// blocked head blocks everything behind it.
class Container {
 public:
  Container(Environment& env, double init, double capacity);

  Container(const Container&) = delete;
  Container& operator=(const Container&) = delete;

  Transfer get(double amount);
  Transfer put(double amount);
  void cancel_get(const Transfer& get);

  double level() const { return level_; }
  double capacity() const { return capacity_; }
  std::size_t pending_gets() const { return gets_.size(); }
  std::size_t pending_puts() const { return puts_.size(); }

  // Running totals of completed transfers.
  double total_got() const { return total_got_; }
  double total_put() const { return total_put_; }
  double initial_level() const { return init_; }

 private:
  Transfer enqueue(double amount, bool is_get);
  void settle();

  Environment* env_;
  double init_;
  double capacity_;
  double level_;
  double total_got_ = 0.0;
  double total_put_ = 0.0;
  std::deque<std::shared_ptr<detail::TransferCore>> gets_;
  std::deque<std::shared_ptr<detail::TransferCore>> puts_;
};

}  // namespace dinesim

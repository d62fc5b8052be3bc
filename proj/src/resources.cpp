#include "dinesim/resources.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace dinesim {

// --- Resource ----------------------------------------------------------------

Resource::Resource(Environment& env, int capacity, std::string name)
    : env_(&env), capacity_(capacity), name_(std::move(name)) {
  if (capacity < 1) {
    throw ArgumentError(fmt::format("resource capacity must be >= 1, got {}", capacity));
  }
}

Request Resource::request() {
  auto core = std::make_shared<detail::RequestCore>();
  core->event = env_->event();
  core->resource = this;
  Request rq(std::move(core));
  queue_.push_back(rq);
  grant_waiting();
  return rq;
}

void Resource::check_owner(const Request& request, const char* op) const {
  if (!request || request.core_->resource != this) {
    throw ArgumentError(fmt::format("{}: request does not belong to this resource", op));
  }
}

void Resource::release(const Request& request) {
  check_owner(request, "release");
  auto& core = *request.core_;
  if (core.released) throw LifecycleError("release: request already released");
  if (!core.granted) throw LifecycleError("release: request was never granted");
  users_.erase(std::find(users_.begin(), users_.end(), request));
  core.released = true;
  grant_waiting();
}

void Resource::cancel(const Request& request) {
  check_owner(request, "cancel");
  auto& core = *request.core_;
  if (core.granted) throw LifecycleError("cancel: request already granted, release it");
  auto it = std::find(queue_.begin(), queue_.end(), request);
  if (it == queue_.end()) throw LifecycleError("cancel: request is not queued");
  queue_.erase(it);
  core.cancelled = true;
}

void Resource::grant_waiting() {
  while (!queue_.empty() &&
         users_.size() < static_cast<std::size_t>(capacity_)) {
    Request head = queue_.front();
    queue_.pop_front();
    head.core_->granted = true;
    users_.push_back(head);
    head.core_->event.succeed();
  }
}

// --- Container ---------------------------------------------------------------

Container::Container(Environment& env, double init, double capacity)
    : env_(&env), init_(init), capacity_(capacity), level_(init) {
  if (!std::isfinite(capacity) || !(capacity > 0.0)) {
    throw ArgumentError(fmt::format("container capacity must be positive, got {}", capacity));
  }
  if (!std::isfinite(init) || init < 0.0 || init > capacity) {
    throw ArgumentError(
        fmt::format("container init {} outside [0, {}]", init, capacity));
  }
}

Transfer Container::get(double amount) { return enqueue(amount, true); }

Transfer Container::put(double amount) { return enqueue(amount, false); }

Transfer Container::enqueue(double amount, bool is_get) {
  const char* op = is_get ? "get" : "put";
  if (!std::isfinite(amount) || !(amount > 0.0)) {
    throw ArgumentError(fmt::format("container {}: amount must be > 0, got {}", op, amount));
  }
  if (amount > capacity_) {
    throw ArgumentError(fmt::format(
        "container {}: amount {} exceeds capacity {}", op, amount, capacity_));
  }
  auto core = std::make_shared<detail::TransferCore>();
  core->event = env_->event();
  core->container = this;
  core->amount = amount;
  core->is_get = is_get;
  (is_get ? gets_ : puts_).push_back(core);
  settle();
  return Transfer(std::move(core));
}

void Container::cancel_get(const Transfer& get) {
  if (!get || get.core_->container != this || !get.core_->is_get) {
    throw ArgumentError("cancel_get: not a get on this container");
  }
  auto& core = *get.core_;
  if (core.done) throw LifecycleError("cancel_get: get already completed");
  auto it = std::find(gets_.begin(), gets_.end(), get.core_);
  if (it == gets_.end()) throw LifecycleError("cancel_get: get is not pending");
  gets_.erase(it);
  core.cancelled = true;
  // The cancelled get may have been blocking the head.
  settle();
}

void Container::settle() {
  bool progress = true;
  while (progress) {
    progress = false;
    while (!puts_.empty() && level_ + puts_.front()->amount <= capacity_) {
      auto head = std::move(puts_.front());
      puts_.pop_front();
      level_ += head->amount;
      total_put_ += head->amount;
      head->done = true;
      head->event.succeed();
      progress = true;
    }
    while (!gets_.empty() && gets_.front()->amount <= level_) {
      auto head = std::move(gets_.front());
      gets_.pop_front();
      level_ -= head->amount;
      total_got_ += head->amount;
      head->done = true;
      head->event.succeed();
      progress = true;
    }
  }
}

}  // namespace dinesim

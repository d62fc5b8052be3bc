#pragma once

// Test-only invariant checker. It keeps its own ordered set of scheduled
// keys, independent of the kernel's heap, and checks every processed entry
// against it.

#include <set>
#include <string>
#include <vector>

#include "dinesim/kernel.hpp"
#include "dinesim/resources.hpp"

namespace dinesim::testing {

class InvariantObserver : public KernelObserver {
 public:
  void watch(const Resource* r) { resources_.push_back(r); }
  void watch(const Container* c) { containers_.push_back(c); }

  void on_schedule(const ScheduleKey& key, const Event&) override {
    if (!pending_.insert(key).second) fail("duplicate schedule key");
    if (key.time < last_time_) fail("scheduled into the past");
  }

  void on_process(const ScheduleKey& key, const Event& e) override {
    ++steps_;
    if (pending_.empty() || !(*pending_.begin() == key)) {
      fail("processed entry is not the least pending key");
    } else {
      pending_.erase(pending_.begin());
    }
    if (key.time < last_time_) fail("clock moved backward");
    last_time_ = key.time;
    if (!processed_ids_.insert(static_cast<std::uint64_t>(e.id())).second) {
      fail("event processed twice");
    }
    // Bounds are sampled before callbacks; check them from the previous step.
    for (const auto* r : resources_) {
      if (r->count() > static_cast<std::size_t>(r->capacity())) fail("resource over capacity");
      if (r->count() < static_cast<std::size_t>(r->capacity()) && r->queued() > 0) {
        fail("resource not work-conserving");
      }
    }
    for (const auto* c : containers_) {
      if (c->level() < 0.0 || c->level() > c->capacity()) fail("container level out of bounds");
    }
  }

  const std::vector<std::string>& violations() const { return violations_; }
  std::size_t steps() const { return steps_; }
  SimTime last_time() const { return last_time_; }

 private:
  void fail(std::string what) {
    if (violations_.size() < 20) violations_.push_back(std::move(what));
  }

  std::set<ScheduleKey> pending_;
  std::set<std::uint64_t> processed_ids_;
  SimTime last_time_ = 0.0;
  std::size_t steps_ = 0;
  std::vector<const Resource*> resources_;
  std::vector<const Container*> containers_;
  std::vector<std::string> violations_;
};

}  // namespace dinesim::testing

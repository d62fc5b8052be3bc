#include "dinesim/process.hpp"

#include <fmt/format.h>

namespace dinesim::detail {

ProcessCore::ProcessCore(Environment& env, std::coroutine_handle<> frame,
                         PromiseBase& promise, std::string name)
    : env_(&env),
      frame_(frame),
      promise_(&promise),
      name_(std::move(name)),
      completion_(env.event()) {
  if (name_.empty()) {
    name_ = fmt::format("process #{}", static_cast<std::uint64_t>(completion_.id()));
  }
  completion_.set_label(name_);
}

ProcessCore::~ProcessCore() { shutdown(); }

void ProcessCore::shutdown() noexcept {
  if (frame_) {
    frame_.destroy();
    frame_ = nullptr;
  }
}

void ProcessCore::start() {
  // Registered first so alive() flips before any waiter observes completion.
  completion_.add_callback([weak = weak_from_this()](const Event&) {
    if (auto self = weak.lock()) self->alive_ = false;
  });
  Event init = env_->event();
  init.set_label(name_ + " (start)");
  init.add_callback([self = shared_from_this()](const Event&) {
    self->started_ = true;
    self->resume();
  });
  env_->schedule(init, kUrgent, 0.0);
}

void ProcessCore::resume() {
  if (running_) throw ContractError(name_ + " resumed while running");
  ++resumes_;
  running_ = true;
  frame_.resume();
  running_ = false;
  if (frame_.done()) finish();
}

void ProcessCore::finish() {
  finished_ = true;
  std::exception_ptr error = promise_->error;
  std::any result = std::move(promise_->result);
  frame_.destroy();
  frame_ = nullptr;
  promise_ = nullptr;
  // Pin ourselves: retire() may drop the environment's last reference.
  auto self = shared_from_this();
  env_->retire(this);
  if (error) {
    completion_.fail(std::move(error));
  } else {
    completion_.succeed(std::move(result));
  }
}

bool ProcessCore::suspend_on(const Event& event) {
  if (!event || &event.env() != env_) {
    injected_ = std::make_exception_ptr(
        ContractError(name_ + " awaited an event from another environment"));
    return false;
  }
  for (auto& cause : deferred_interrupts_) schedule_interrupt(std::move(cause));
  deferred_interrupts_.clear();

  if (event.processed()) return false;
  awaited_ = event;
  suspended_ = true;
  token_ = awaited_.add_callback(
      [self = shared_from_this()](const Event& fired) { self->resume_from(fired); });
  return true;
}

std::any ProcessCore::take_resume_value(const Event& event) {
  if (injected_) std::rethrow_exception(std::exchange(injected_, nullptr));
  if (!event.ok()) {
    event.defuse();
    std::rethrow_exception(event.failure());
  }
  return event.value();
}

void ProcessCore::resume_from(const Event& event) {
  if (!suspended_ || !(awaited_ == event)) return;
  suspended_ = false;
  awaited_ = Event();
  resume();
}

void ProcessCore::interrupt(std::any cause) {
  if (finished_ || !alive_) {
    throw LifecycleError(fmt::format("cannot interrupt {}: it has terminated", name_));
  }
  if (running_) {
    throw LifecycleError(fmt::format("{} cannot interrupt itself", name_));
  }
  if (!started_) {
    deferred_interrupts_.push_back(std::move(cause));
    return;
  }
  schedule_interrupt(std::move(cause));
}

void ProcessCore::schedule_interrupt(std::any cause) {
  Event ev = env_->event();
  ev.set_label(name_ + " (interrupt)");
  ev.add_callback([self = shared_from_this(), cause = std::move(cause)](const Event&) {
    self->deliver_interrupt(cause);
  });
  env_->schedule(ev, kUrgent, 0.0);
}

void ProcessCore::deliver_interrupt(std::any cause) {
  if (finished_) return;
  if (!suspended_) {
    // Not parked on anything yet; hand it to the next yield point.
    deferred_interrupts_.push_back(std::move(cause));
    return;
  }
  awaited_.remove_callback(token_);
  awaited_ = Event();
  suspended_ = false;
  injected_ = std::make_exception_ptr(Interrupt(std::move(cause)));
  resume();
}

}  // namespace dinesim::detail

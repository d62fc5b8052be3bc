#pragma once

#include <any>
#include <coroutine>
#include <exception>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "dinesim/kernel.hpp"

namespace dinesim {

// Thrown at the yield point of an interrupted process.
class Interrupt : public std::exception {
 public:
  explicit Interrupt(std::any cause) : cause_(std::move(cause)) {}
  const char* what() const noexcept override { return "process interrupted"; }
  const std::any& cause() const { return cause_; }

 private:
  std::any cause_;
};

// Generic failure carrying an opaque payload; bodies may also throw any
// other exception type to fail.
class ProcessFailure : public std::runtime_error {
 public:
  explicit ProcessFailure(std::any payload,
                          const std::string& message = "process failed")
      : std::runtime_error(message), payload_(std::move(payload)) {}
  const std::any& payload() const { return payload_; }

 private:
  std::any payload_;
};

[[noreturn]] inline void fail_process(std::any payload,
                                      const std::string& message = "process failed") {
  throw ProcessFailure(std::move(payload), message);
}

namespace detail {

class ProcessCore;

struct PromiseBase {
  ProcessCore* core = nullptr;
  std::any result;
  std::exception_ptr error;

  std::suspend_always initial_suspend() noexcept { return {}; }
  std::suspend_always final_suspend() noexcept { return {}; }
  void unhandled_exception() noexcept { error = std::current_exception(); }
};

template <typename T>
struct ReturnChannel : PromiseBase {
  template <typename U>
  void return_value(U&& v) {
    result = T(std::forward<U>(v));
  }
};

template <>
struct ReturnChannel<void> : PromiseBase {
  void return_void() noexcept {}
};

class ProcessCore final : public Activity,
                          public std::enable_shared_from_this<ProcessCore> {
 public:
  ProcessCore(Environment& env, std::coroutine_handle<> frame,
              PromiseBase& promise, std::string name);
  ~ProcessCore() override;

  void start();
  void interrupt(std::any cause);
  void shutdown() noexcept override;

  // Awaiter protocol. suspend_on returns false when the process should
  // continue without suspending.
  bool suspend_on(const Event& event);
  std::any take_resume_value(const Event& event);

  Environment& env() const { return *env_; }
  const Event& completion() const { return completion_; }
  const std::string& name() const { return name_; }
  bool alive() const { return alive_; }
  bool started() const { return started_; }
  bool finished() const { return finished_; }
  std::uint64_t resume_count() const { return resumes_; }

 private:
  void resume();
  void resume_from(const Event& event);
  void deliver_interrupt(std::any cause);
  void schedule_interrupt(std::any cause);
  void finish();

  Environment* env_;
  std::coroutine_handle<> frame_;
  PromiseBase* promise_;
  std::string name_;
  Event completion_;
  bool started_ = false;
  bool running_ = false;
  bool finished_ = false;
  bool alive_ = true;
  bool suspended_ = false;
  Event awaited_;
  CallbackToken token_{};
  std::exception_ptr injected_;
  std::vector<std::any> deferred_interrupts_;
  std::uint64_t resumes_ = 0;
};

}  // namespace detail

// Coroutine return type for process bodies. A body co_awaits events and
// other processes, then co_returns a T (or nothing for void).
template <typename T = void>
class Process {
 public:
  struct promise_type : detail::ReturnChannel<T> {
    Process get_return_object() {
      return Process(std::coroutine_handle<promise_type>::from_promise(*this));
    }
  };

  Process(Process&& other) noexcept
      : frame_(std::exchange(other.frame_, nullptr)) {}
  Process& operator=(Process&& other) noexcept {
    if (this != &other) {
      if (frame_) frame_.destroy();
      frame_ = std::exchange(other.frame_, nullptr);
    }
    return *this;
  }
  Process(const Process&) = delete;
  Process& operator=(const Process&) = delete;
  ~Process() {
    if (frame_) frame_.destroy();
  }

  std::coroutine_handle<promise_type> release() {
    return std::exchange(frame_, nullptr);
  }

 private:
  explicit Process(std::coroutine_handle<promise_type> frame) : frame_(frame) {}
  std::coroutine_handle<promise_type> frame_;
};

// Suspends the awaiting process until the event is processed.
class EventAwaiter {
 public:
  explicit EventAwaiter(Event event) : event_(std::move(event)) {}

  bool await_ready() const noexcept { return false; }

  template <typename P>
  bool await_suspend(std::coroutine_handle<P> h) {
    static_assert(std::is_base_of_v<detail::PromiseBase, P>,
                  "events can only be awaited from a Process body");
    core_ = h.promise().core;
    return core_->suspend_on(event_);
  }

  std::any await_resume() { return core_->take_resume_value(event_); }

 private:
  Event event_;
  detail::ProcessCore* core_ = nullptr;
};

inline EventAwaiter operator co_await(Event event) {
  return EventAwaiter(std::move(event));
}

// Handle to a spawned process. Its completion event succeeds with the
// body's return value or fails with the exception that escaped the body.
template <typename T = void>
class ProcessHandle {
 public:
  ProcessHandle() = default;
  explicit ProcessHandle(std::shared_ptr<detail::ProcessCore> core)
      : core_(std::move(core)) {}

  const Event& completion() const { return core_->completion(); }
  operator Event() const { return core_->completion(); }  // NOLINT
  bool alive() const { return core_->alive(); }
  const std::string& name() const { return core_->name(); }

  // Raise Interrupt(cause) in the process at its current yield point.
  void interrupt(std::any cause = {}) const { core_->interrupt(std::move(cause)); }

  // Completion value; only valid once the completion event succeeded.
  T value() const {
    if constexpr (!std::is_void_v<T>) {
      return std::any_cast<T>(completion().value());
    }
  }

  explicit operator bool() const { return core_ != nullptr; }

 private:
  std::shared_ptr<detail::ProcessCore> core_;
};

template <typename T>
class ProcessAwaiter {
 public:
  explicit ProcessAwaiter(Event completion) : inner_(std::move(completion)) {}
  bool await_ready() const noexcept { return false; }
  template <typename P>
  bool await_suspend(std::coroutine_handle<P> h) {
    return inner_.await_suspend(h);
  }
  T await_resume() {
    auto value = inner_.await_resume();
    if constexpr (!std::is_void_v<T>) return std::any_cast<T>(std::move(value));
  }

 private:
  EventAwaiter inner_;
};

template <typename T>
ProcessAwaiter<T> operator co_await(const ProcessHandle<T>& handle) {
  return ProcessAwaiter<T>(handle.completion());
}

// Register a body with the environment. It starts at the current time,
// ahead of same-time normal-priority entries.
template <typename T>
ProcessHandle<T> spawn(Environment& env, Process<T> body, std::string name = {}) {
  auto frame = body.release();
  if (!frame) throw ArgumentError("spawn: body already spawned");
  auto core = std::make_shared<detail::ProcessCore>(env, frame, frame.promise(),
                                                    std::move(name));
  frame.promise().core = core.get();
  env.adopt(core);
  core->start();
  return ProcessHandle<T>(std::move(core));
}

}  // namespace dinesim

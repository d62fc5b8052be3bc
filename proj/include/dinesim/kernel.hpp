#pragma once

#include <any>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "dinesim/rng.hpp"

namespace dinesim {

// Simulation clock value in abstract time units. Always finite and >= 0.
using SimTime = double;

enum class EventId : std::uint64_t {};

// Smaller priority values are processed first at equal times.
inline constexpr int kUrgent = 0;
inline constexpr int kNormal = 1;

enum class EventState { Pending, Triggered, Processed };

struct ScheduleKey {
  SimTime time = 0.0;
  int priority = kNormal;
  EventId sequence{};

  friend bool operator==(const ScheduleKey&, const ScheduleKey&) = default;
  friend bool operator<(const ScheduleKey& a, const ScheduleKey& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.priority != b.priority) return a.priority < b.priority;
    return a.sequence < b.sequence;
  }
};

// Illegal event or process state transition.
class LifecycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A process broke the suspension contract (e.g. awaited a foreign event).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A failed event was processed and nobody took delivery of the failure.
class UnhandledFailure : public std::runtime_error {
 public:
  UnhandledFailure(std::string source, std::exception_ptr cause);

  const std::string& source() const { return source_; }
  std::exception_ptr cause() const { return cause_; }

 private:
  std::string source_;
  std::exception_ptr cause_;
};

// Best-effort human description of a failure cause.
std::string describe(std::exception_ptr cause);

class Environment;
class Event;

using Callback = std::function<void(const Event&)>;
enum class CallbackToken : std::uint64_t {};

namespace detail {

struct EventCore {
  Environment* env = nullptr;
  EventId id{};
  EventState state = EventState::Pending;
  bool ok = true;
  bool defused = false;
  std::any value;
  std::exception_ptr failure;
  std::string label;
  std::vector<std::pair<CallbackToken, Callback>> callbacks;
  std::uint64_t next_token = 0;
};

// Something the environment must tear down before its queue, e.g. a
// suspended coroutine frame that keeps events alive.
class Activity {
 public:
  virtual ~Activity() = default;
  virtual void shutdown() noexcept = 0;
};

}  // namespace detail

// Shared handle to a one-shot event. Copies refer to the same event.
class Event {
 public:
  Event() = default;

  EventId id() const { return core_->id; }
  EventState state() const { return core_->state; }
  bool triggered() const { return core_->state != EventState::Pending; }
  bool processed() const { return core_->state == EventState::Processed; }
  // Only meaningful once triggered.
  bool ok() const { return core_->ok; }
  const std::any& value() const { return core_->value; }
  std::exception_ptr failure() const { return core_->failure; }
  Environment& env() const { return *core_->env; }

  const std::string& label() const { return core_->label; }
  Event& set_label(std::string label);

  // Set the outcome and schedule processing at the current time.
  Event& succeed(std::any value = {});
  Event& fail(std::exception_ptr cause);
  template <typename E>
    requires(!std::is_same_v<std::decay_t<E>, std::exception_ptr>)
  Event& fail(E&& cause) {
    return fail(std::make_exception_ptr(std::forward<E>(cause)));
  }

  CallbackToken add_callback(Callback cb);
  // Returns false if the token is unknown or already fired.
  bool remove_callback(CallbackToken token);
  std::size_t callback_count() const { return core_->callbacks.size(); }

  // Marks a failure as delivered so processing it does not abort the run.
  void defuse() const { core_->defused = true; }
  bool defused() const { return core_->defused; }

  explicit operator bool() const { return core_ != nullptr; }
  friend bool operator==(const Event& a, const Event& b) {
    return a.core_ == b.core_;
  }

 private:
  friend class Environment;
  explicit Event(std::shared_ptr<detail::EventCore> core)
      : core_(std::move(core)) {}

  std::shared_ptr<detail::EventCore> core_;
};

// Outcome value of any_of / all_of: the constituents processed by the time
// the composite fired, in constituent order.
struct ConditionValue {
  std::vector<Event> events;

  bool contains(const Event& e) const;
  const std::any& operator[](const Event& e) const;
};

struct RunOutcome {
  enum class Kind { Exhausted, ReachedHorizon };
  Kind kind = Kind::Exhausted;
  SimTime now = 0.0;

  bool exhausted() const { return kind == Kind::Exhausted; }
};

const char* to_string(RunOutcome::Kind kind);

// Instrumentation hook for invariant checking.
class KernelObserver {
 public:
  virtual ~KernelObserver() = default;
  virtual void on_schedule(const ScheduleKey&, const Event&) {}
  virtual void on_process(const ScheduleKey&, const Event&) {}
};

// Owns the clock, the future event list and the environment RNG.
// Confined to a single thread.
class Environment {
 public:
  explicit Environment(std::uint64_t seed = 0);
  ~Environment();

  Environment(const Environment&) = delete;
  Environment& operator=(const Environment&) = delete;

  SimTime now() const { return now_; }
  Rng& rng() { return rng_; }

  // New pending event, owned by this environment.
  Event event();
  Event timeout(SimTime delay, std::any value = {});

  // Trigger a pending event: it is processed at now + delay. An event
  // without an outcome succeeds with an empty value.
  void schedule(const Event& event, int priority = kNormal,
                SimTime delay = 0.0);

  Event any_of(const std::vector<Event>& events);
  Event all_of(const std::vector<Event>& events);

  // Process the next queued event. Returns false iff the queue was empty.
  bool step();
  RunOutcome run(std::optional<SimTime> until = std::nullopt);

  std::optional<SimTime> peek() const;
  std::size_t queue_size() const { return queue_.size(); }
  std::uint64_t processed_count() const { return processed_; }

  void set_observer(KernelObserver* observer) { observer_ = observer; }

  // Activity registry used by the process layer.
  void adopt(std::shared_ptr<detail::Activity> activity);
  void retire(const detail::Activity* activity);
  std::size_t live_activities() const { return activities_.size(); }

 private:
  struct Entry {
    ScheduleKey key;
    std::shared_ptr<detail::EventCore> event;
    bool operator>(const Entry& other) const { return other.key < key; }
  };

  Event make_condition(const std::vector<Event>& events, bool need_all);

  SimTime now_ = 0.0;
  std::uint64_t next_id_ = 0;
  std::uint64_t processed_ = 0;
  Rng rng_;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
  std::unordered_map<const detail::Activity*,
                     std::shared_ptr<detail::Activity>>
      activities_;
  KernelObserver* observer_ = nullptr;
};

Event operator|(const Event& a, const Event& b);
Event operator&(const Event& a, const Event& b);

}  // namespace dinesim

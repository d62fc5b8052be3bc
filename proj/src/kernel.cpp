#include "dinesim/kernel.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace dinesim {

namespace {

void check_delay(SimTime delay, const char* what) {
  if (!std::isfinite(delay) || delay < 0.0) {
    throw ArgumentError(fmt::format("{}: delay must be finite and >= 0, got {}",
                                    what, delay));
  }
}

std::string event_name(const detail::EventCore& core) {
  if (!core.label.empty()) return core.label;
  return fmt::format("event #{}", static_cast<std::uint64_t>(core.id));
}

}  // namespace

UnhandledFailure::UnhandledFailure(std::string source, std::exception_ptr cause)
    : std::runtime_error(
          fmt::format("unhandled failure in {}: {}", source, describe(cause))),
      source_(std::move(source)),
      cause_(std::move(cause)) {}

std::string describe(std::exception_ptr cause) {
  if (!cause) return "no cause";
  try {
    std::rethrow_exception(cause);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown failure";
  }
}

const char* to_string(RunOutcome::Kind kind) {
  return kind == RunOutcome::Kind::Exhausted ? "Exhausted" : "ReachedHorizon";
}

// --- Event -----------------------------------------------------------------

Event& Event::set_label(std::string label) {
  core_->label = std::move(label);
  return *this;
}

Event& Event::succeed(std::any value) {
  if (triggered()) {
    throw LifecycleError(fmt::format("{} already triggered", event_name(*core_)));
  }
  core_->ok = true;
  core_->value = std::move(value);
  core_->env->schedule(*this, kNormal, 0.0);
  return *this;
}

Event& Event::fail(std::exception_ptr cause) {
  if (triggered()) {
    throw LifecycleError(fmt::format("{} already triggered", event_name(*core_)));
  }
  if (!cause) throw ArgumentError("fail() needs a cause");
  core_->ok = false;
  core_->failure = std::move(cause);
  core_->env->schedule(*this, kNormal, 0.0);
  return *this;
}

CallbackToken Event::add_callback(Callback cb) {
  if (processed()) {
    throw LifecycleError(
        fmt::format("cannot add a callback to processed {}", event_name(*core_)));
  }
  const CallbackToken token{core_->next_token++};
  core_->callbacks.emplace_back(token, std::move(cb));
  return token;
}

bool Event::remove_callback(CallbackToken token) {
  auto& cbs = core_->callbacks;
  auto it = std::find_if(cbs.begin(), cbs.end(),
                         [token](const auto& p) { return p.first == token; });
  if (it == cbs.end()) return false;
  cbs.erase(it);
  return true;
}

bool ConditionValue::contains(const Event& e) const {
  return std::find(events.begin(), events.end(), e) != events.end();
}

const std::any& ConditionValue::operator[](const Event& e) const {
  auto it = std::find(events.begin(), events.end(), e);
  if (it == events.end()) throw ArgumentError("event not in condition value");
  return it->value();
}

// --- Environment -------------------------------------------------------------

Environment::Environment(std::uint64_t seed) : rng_(seed) {}

Environment::~Environment() {
  // Coroutine frames hold event handles whose callbacks hold the frames'
  // owners; destroy the frames first to break those cycles.
  auto activities = std::move(activities_);
  activities_.clear();
  for (auto& [_, activity] : activities) activity->shutdown();
  activities.clear();
  while (!queue_.empty()) queue_.pop();
}

Event Environment::event() {
  auto core = std::make_shared<detail::EventCore>();
  core->env = this;
  core->id = EventId{next_id_++};
  return Event(std::move(core));
}

Event Environment::timeout(SimTime delay, std::any value) {
  check_delay(delay, "timeout");
  Event ev = event();
  ev.core_->value = std::move(value);
  schedule(ev, kNormal, delay);
  return ev;
}

void Environment::schedule(const Event& event, int priority, SimTime delay) {
  check_delay(delay, "schedule");
  auto& core = *event.core_;
  if (core.env != this) throw ContractError("event belongs to another environment");
  if (core.state != EventState::Pending) {
    throw LifecycleError(fmt::format("{} already scheduled", event_name(core)));
  }
  core.state = EventState::Triggered;
  const ScheduleKey key{now_ + delay, priority, core.id};
  queue_.push(Entry{key, event.core_});
  if (observer_) observer_->on_schedule(key, event);
}

bool Environment::step() {
  if (queue_.empty()) return false;
  Entry entry = queue_.top();
  queue_.pop();
  now_ = entry.key.time;
  auto& core = *entry.event;
  core.state = EventState::Processed;
  ++processed_;
  Event handle(entry.event);
  if (observer_) observer_->on_process(entry.key, handle);

  auto callbacks = std::move(core.callbacks);
  core.callbacks.clear();
  for (auto& [_, cb] : callbacks) cb(handle);

  if (!core.ok && !core.defused) {
    throw UnhandledFailure(event_name(core), core.failure);
  }
  return true;
}

RunOutcome Environment::run(std::optional<SimTime> until) {
  if (until) {
    if (!std::isfinite(*until) || *until < now_) {
      throw ArgumentError(fmt::format(
          "run: horizon {} must be finite and >= now ({})", *until, now_));
    }
  }
  while (!queue_.empty()) {
    if (until && queue_.top().key.time > *until) {
      now_ = *until;
      return {RunOutcome::Kind::ReachedHorizon, now_};
    }
    step();
  }
  // A drained queue at exactly the horizon still counts as reaching it.
  if (until && now_ == *until) return {RunOutcome::Kind::ReachedHorizon, now_};
  return {RunOutcome::Kind::Exhausted, now_};
}

std::optional<SimTime> Environment::peek() const {
  if (queue_.empty()) return std::nullopt;
  return queue_.top().key.time;
}

void Environment::adopt(std::shared_ptr<detail::Activity> activity) {
  const auto* key = activity.get();
  activities_.emplace(key, std::move(activity));
}

void Environment::retire(const detail::Activity* activity) {
  activities_.erase(activity);
}

// --- Conditions ------------------------------------------------------------

namespace {

struct ConditionState {
  Event composite;
  std::vector<std::weak_ptr<detail::EventCore>> members;
  std::vector<CallbackToken> tokens;
  std::vector<Event> fired;  // strong refs, filled as members are processed
  std::size_t needed = 0;
  std::size_t seen = 0;
};

}  // namespace

Event Environment::make_condition(const std::vector<Event>& events,
                                  bool need_all) {
  if (events.empty()) throw ArgumentError("condition needs at least one event");
  for (const auto& e : events) {
    if (!e) throw ArgumentError("condition over a null event");
    if (&e.env() != this) {
      throw ContractError("condition mixes events from different environments");
    }
  }

  auto state = std::make_shared<ConditionState>();
  state->composite = event();
  state->composite.set_label(need_all ? "all_of" : "any_of");
  state->needed = need_all ? events.size() : 1;
  for (const auto& e : events) state->members.push_back(e.core_);
  state->tokens.resize(events.size());
  state->fired.resize(events.size());

  auto finish = [](ConditionState& s) {
    for (std::size_t i = 0; i < s.members.size(); ++i) {
      if (auto m = s.members[i].lock(); m && m->state != EventState::Processed) {
        Event(m).remove_callback(s.tokens[i]);
      }
    }
  };

  auto check = [finish](ConditionState& s, std::size_t i, const Event& e) {
    if (s.composite.triggered()) return;
    s.fired[i] = e;
    if (!e.ok()) {
      e.defuse();
      s.composite.fail(e.failure());
      finish(s);
      return;
    }
    if (++s.seen < s.needed) return;
    ConditionValue value;
    for (const auto& f : s.fired) {
      if (f) value.events.push_back(f);
    }
    s.composite.succeed(std::move(value));
    finish(s);
  };

  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (state->composite.triggered()) break;
    if (e.processed()) {
      check(*state, i, e);
    } else {
      // The callback holds the state; the state only weakly holds members.
      state->tokens[i] = Event(e).add_callback(
          [state, check, i](const Event& fired) { check(*state, i, fired); });
    }
  }
  return state->composite;
}

Event Environment::any_of(const std::vector<Event>& events) {
  return make_condition(events, false);
}

Event Environment::all_of(const std::vector<Event>& events) {
  return make_condition(events, true);
}

Event operator|(const Event& a, const Event& b) {
  return a.env().any_of({a, b});
}

Event operator&(const Event& a, const Event& b) {
  return a.env().all_of({a, b});
}

}  // namespace dinesim

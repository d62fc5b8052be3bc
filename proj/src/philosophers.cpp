#include "dinesim/philosophers.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace dinesim {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Classic: return "classic";
    case Variant::Ordered: return "ordered";
    case Variant::Bowl: return "bowl";
    case Variant::Impatient: return "impatient";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "classic") return Variant::Classic;
  if (name == "ordered") return Variant::Ordered;
  if (name == "bowl") return Variant::Bowl;
  if (name == "impatient") return Variant::Impatient;
  throw ArgumentError(fmt::format("unknown philosopher variant '{}'", name));
}

const char* to_string(PhilosopherState s) {
  switch (s) {
    case PhilosopherState::Thinking: return "Thinking";
    case PhilosopherState::Hungry: return "Hungry";
    case PhilosopherState::HungryWithOneChopstick: return "HungryWithOneChopstick";
    case PhilosopherState::Eating: return "Eating";
  }
  return "?";
}

bool is_legal_transition(PhilosopherState from, PhilosopherState to,
                         bool impatient) {
  using S = PhilosopherState;
  switch (from) {
    case S::Thinking: return to == S::Hungry;
    case S::Hungry: return to == S::HungryWithOneChopstick;
    case S::HungryWithOneChopstick:
      return to == S::Eating || (impatient && to == S::Thinking);
    case S::Eating: return to == S::Thinking;
  }
  return false;
}

namespace {

void require_positive(double v, const char* what) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw ArgumentError(fmt::format("{} must be positive and finite, got {}", what, v));
  }
}

}  // namespace

void PhilosopherConfig::validate(bool has_bowl) const {
  require_positive(think_mean, "think_mean");
  require_positive(eat_mean, "eat_mean");
  require_positive(pickup_pause, "pickup_pause");
  require_positive(portion, "portion");
  require_positive(max_wait, "max_wait");
  if (impatient && !has_bowl) {
    throw ArgumentError("impatient philosophers need a bowl");
  }
}

void ChefConfig::validate() const { require_positive(period, "chef period"); }

// --- Philosopher -------------------------------------------------------------

Philosopher::Philosopher(Environment& env, int id, Resource& left,
                         std::size_t left_index, Resource& right,
                         std::size_t right_index, Container* bowl,
                         PhilosopherConfig config, Trace* trace,
                         bool record_history)
    : env_(&env),
      id_(id),
      actor_(fmt::format("P{}", id)),
      first_(&left),
      second_(&right),
      bowl_(bowl),
      config_(config),
      trace_(trace),
      record_history_(record_history),
      meal_size_(config.portion) {
  config_.validate(bowl != nullptr);
  if (config_.ordered && right_index < left_index) std::swap(first_, second_);
}

void Philosopher::diag(std::string_view message) {
  if (trace_) trace_->record(env_->now(), actor_, message);
}

void Philosopher::enter(PhilosopherState next) {
  if (record_history_) transitions_.push_back({env_->now(), state_, next});
  state_ = next;
}

Process<ChopstickPair> Philosopher::get_hungry(double meal_size) {
  const SimTime start_waiting = env_->now();
  diag("requested chopstick");
  Request rq1 = first_->request();
  co_await rq1;
  diag("obtained chopstick");
  enter(PhilosopherState::HungryWithOneChopstick);
  co_await env_->timeout(config_.pickup_pause);

  diag("requested another chopstick");
  Request rq2 = second_->request();
  co_await rq2;
  diag("obtained another chopstick");

  if (bowl_ != nullptr) {
    Transfer food = bowl_->get(meal_size);
    if (config_.impatient) {
      co_await (food.event() | env_->timeout(config_.max_wait));
      // A get granted in the same instant as the timeout already holds the
      // rice; count it as reserved rather than losing the portion.
      if (!food.processed() && !food.done()) {
        diag("gave up");
        bowl_->cancel_get(food);
        waiting_ += env_->now() - start_waiting;
        throw GaveUp(rq1, rq2);
      }
    } else {
      co_await food;
    }
    diag("reserved food");
    rice_eaten_ += meal_size;
  }

  waiting_ += env_->now() - start_waiting;
  co_return ChopstickPair{rq1, rq2};
}

Process<> Philosopher::run_the_party() {
  for (;;) {
    co_await env_->timeout(env_->rng().exponential(config_.think_mean));
    enter(PhilosopherState::Hungry);

    auto hungry = spawn(*env_, get_hungry(meal_size_),
                        fmt::format("{} get_hungry", actor_));
    ChopstickPair held;
    bool fed = false;
    try {
      held = co_await hungry;
      fed = true;
    } catch (const GaveUp& g) {
      held = {g.first, g.second};
    }

    if (record_history_) attempts_.push_back({meal_size_, streak_, fed});
    if (fed) {
      enter(PhilosopherState::Eating);
      co_await env_->timeout(env_->rng().exponential(config_.eat_mean));
      meal_size_ = config_.portion;
      ++meals_;
      streak_ = 0;
    } else {
      meal_size_ += config_.portion;
      ++give_ups_;
      ++streak_;
    }

    first_->release(held.first);
    second_->release(held.second);
    diag("released the chopsticks");
    enter(PhilosopherState::Thinking);
  }
}

// --- Chef --------------------------------------------------------------------

Chef::Chef(Environment& env, Container& bowl, ChefConfig config)
    : env_(&env), bowl_(&bowl), config_(config) {
  config_.validate();
}

Process<> Chef::replenish() {
  for (;;) {
    co_await env_->timeout(config_.period);
    if (bowl_->level() < bowl_->capacity()) {
      const double amount = bowl_->capacity() - bowl_->level();
      co_await bowl_->put(amount);
      total_put_ += amount;
      ++refills_;
    }
  }
}

// --- Party -------------------------------------------------------------------

double Party::mean_waiting() const {
  const auto w = waiting_totals();
  return std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
}

std::vector<double> Party::waiting_totals() const {
  std::vector<double> out;
  out.reserve(philosophers.size());
  for (const auto& p : philosophers) out.push_back(p->waiting());
  return out;
}

std::vector<std::size_t> Party::counts() const {
  std::vector<std::size_t> out;
  out.reserve(chopsticks.size());
  for (const auto& c : chopsticks) out.push_back(c->count());
  return out;
}

Party build_party(Environment& env, int n, Variant variant,
                  const PartyOptions& options) {
  if (n < 2) throw ArgumentError(fmt::format("a party needs n >= 2, got {}", n));

  Party party;
  party.variant = variant;
  PhilosopherConfig config = options.config;
  config.ordered = variant != Variant::Classic;
  config.impatient = variant == Variant::Impatient;

  if (variant == Variant::Bowl || variant == Variant::Impatient) {
    party.bowl = std::make_unique<Container>(env, options.bowl_capacity,
                                             options.bowl_capacity);
    if (options.spawn_chef) {
      party.chef = std::make_unique<Chef>(env, *party.bowl, options.chef);
      spawn(env, party.chef->replenish(), "chef");
    }
  }

  for (int i = 0; i < n; ++i) {
    party.chopsticks.push_back(
        std::make_unique<Resource>(env, 1, fmt::format("chopstick {}", i)));
  }
  for (int i = 0; i < n; ++i) {
    const auto left = static_cast<std::size_t>(i);
    const auto right = static_cast<std::size_t>((i + 1) % n);
    party.philosophers.push_back(std::make_unique<Philosopher>(
        env, i, *party.chopsticks[left], left, *party.chopsticks[right], right,
        party.bowl.get(), config, options.trace, options.record_history));
  }
  for (auto& p : party.philosophers) {
    spawn(env, p->run_the_party(), fmt::format("P{}", p->id()));
  }
  return party;
}

bool detect_deadlock(const std::vector<std::unique_ptr<Resource>>& chopsticks) {
  std::size_t held = 0;
  for (const auto& c : chopsticks) {
    if (c->count() > 0) ++held;
  }
  return held >= 2;
}

}  // namespace dinesim

#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dinesim/kernel.hpp"
#include "dinesim/process.hpp"
#include "dinesim/resources.hpp"
#include "dinesim/trace.hpp"

namespace dinesim {

enum class Variant { Classic, Ordered, Bowl, Impatient };

const char* to_string(Variant v);
// Throws ArgumentError for unknown names.
Variant parse_variant(std::string_view name);

struct PhilosopherConfig {
  double think_mean = 10.0;    // T0
  double eat_mean = 10.0;      // T1
  double pickup_pause = 1.0;   // DT, held with one chopstick
  double portion = 20.0;       // single meal size
  double max_wait = 75.0;      // give-up horizon, half the chef period
  bool ordered = false;        // acquire chopsticks in global index order
  bool impatient = false;      // race the food request against max_wait

  void validate(bool has_bowl) const;
};

struct ChefConfig {
  double period = 150.0;  // T2

  void validate() const;
};

enum class PhilosopherState { Thinking, Hungry, HungryWithOneChopstick, Eating };

const char* to_string(PhilosopherState s);

// True iff from -> to is an edge of the philosopher state machine; the
// give-up edge only exists for impatient philosophers.
bool is_legal_transition(PhilosopherState from, PhilosopherState to,
                         bool impatient);

struct Transition {
  SimTime time = 0.0;
  PhilosopherState from = PhilosopherState::Thinking;
  PhilosopherState to = PhilosopherState::Thinking;
};

// One trip through get_hungry, as recorded for accounting checks.
struct MealAttempt {
  double meal_size = 0.0;
  std::uint64_t give_ups_before = 0;  // consecutive give-ups preceding it
  bool succeeded = false;
};

// Raised by get_hungry when an impatient philosopher stops waiting for food.
// Carries the chopstick requests so the parent can release them.
class GaveUp : public std::runtime_error {
 public:
  GaveUp(Request first, Request second)
      : std::runtime_error("gave up waiting for food"),
        first(std::move(first)),
        second(std::move(second)) {}

  Request first;
  Request second;
};

using ChopstickPair = std::pair<Request, Request>;

class Philosopher {
 public:
  // `left` and `right` are the chopsticks as wired at the table; with
  // `config.ordered` they are picked up by ascending `*_index`.
  Philosopher(Environment& env, int id, Resource& left, std::size_t left_index,
              Resource& right, std::size_t right_index, Container* bowl,
              PhilosopherConfig config, Trace* trace = nullptr,
              bool record_history = false);

  Philosopher(const Philosopher&) = delete;
  Philosopher& operator=(const Philosopher&) = delete;

  Process<> run_the_party();
  Process<ChopstickPair> get_hungry(double meal_size);

  int id() const { return id_; }
  double waiting() const { return waiting_; }
  PhilosopherState state() const { return state_; }
  double meal_size() const { return meal_size_; }
  std::uint64_t meals() const { return meals_; }
  std::uint64_t give_ups() const { return give_ups_; }
  double rice_eaten() const { return rice_eaten_; }
  const Resource& first_chopstick() const { return *first_; }
  const Resource& second_chopstick() const { return *second_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  const std::vector<MealAttempt>& attempts() const { return attempts_; }

 private:
  void diag(std::string_view message);
  void enter(PhilosopherState next);

  Environment* env_;
  int id_;
  std::string actor_;
  Resource* first_;
  Resource* second_;
  Container* bowl_;
  PhilosopherConfig config_;
  Trace* trace_;
  bool record_history_;

  PhilosopherState state_ = PhilosopherState::Thinking;
  double waiting_ = 0.0;
  double meal_size_;
  std::uint64_t meals_ = 0;
  std::uint64_t give_ups_ = 0;
  std::uint64_t streak_ = 0;
  double rice_eaten_ = 0.0;
  std::vector<Transition> transitions_;
  std::vector<MealAttempt> attempts_;
};

class Chef {
 public:
  Chef(Environment& env, Container& bowl, ChefConfig config = {});

  Process<> replenish();

  std::uint64_t refills() const { return refills_; }
  double total_put() const { return total_put_; }

 private:
  Environment* env_;
  Container* bowl_;
  ChefConfig config_;
  std::uint64_t refills_ = 0;
  double total_put_ = 0.0;
};

struct PartyOptions {
  PhilosopherConfig config{};
  ChefConfig chef{};
  double bowl_capacity = 1000.0;
  bool spawn_chef = true;
  Trace* trace = nullptr;
  bool record_history = false;
};

// A ring of n capacity-1 chopsticks; philosopher i holds chopsticks i and
// (i + 1) mod n. Must not outlive the environment it was built in.
struct Party {
  Variant variant = Variant::Classic;
  std::vector<std::unique_ptr<Resource>> chopsticks;
  std::unique_ptr<Container> bowl;
  std::unique_ptr<Chef> chef;
  std::vector<std::unique_ptr<Philosopher>> philosophers;

  double mean_waiting() const;
  std::vector<double> waiting_totals() const;
  std::vector<std::size_t> counts() const;
};

// Builds and spawns every process of the chosen variant.
Party build_party(Environment& env, int n, Variant variant,
                  const PartyOptions& options = {});

// Probable deadlock: at least two chopsticks are held.
bool detect_deadlock(const std::vector<std::unique_ptr<Resource>>& chopsticks);

}  // namespace dinesim

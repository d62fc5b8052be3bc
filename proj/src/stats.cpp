#include "dinesim/stats.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "dinesim/resources.hpp"

namespace dinesim {

std::uint64_t derive_seed(std::uint64_t seed, Variant variant, int n) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(variant));
  h = mix64(h ^ static_cast<std::uint64_t>(n));
  return h;
}

SweepResult simulate(int n, SimTime t, Variant variant, std::uint64_t seed,
                     const PartyOptions& options) {
  if (n < 2) throw ArgumentError(fmt::format("simulate: n must be >= 2, got {}", n));
  if (!std::isfinite(t) || !(t > 0.0)) {
    throw ArgumentError(fmt::format("simulate: horizon must be positive, got {}", t));
  }
  Environment env(derive_seed(seed, variant, n));
  Party party = build_party(env, n, variant, options);
  const RunOutcome outcome = env.run(t);

  SweepResult r;
  r.variant = variant;
  r.n = n;
  r.t = t;
  r.seed = seed;
  r.per_philosopher = party.waiting_totals();
  double sum = 0.0;
  for (double w : r.per_philosopher) sum += w;
  r.mean_waiting = sum / static_cast<double>(n);
  r.deadlocked = outcome.exhausted();
  return r;
}

std::vector<SweepResult> sweep(Variant variant, std::span<const int> ns, SimTime t,
                               std::span<const std::uint64_t> seeds,
                               unsigned threads) {
  struct Cell {
    int n;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (int n : ns) {
    for (auto s : seeds) cells.push_back({n, s});
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return a.n != b.n ? a.n < b.n : a.seed < b.seed;
  });

  std::vector<SweepResult> results(cells.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, cells.size())));

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        results[i] = simulate(cells[i].n, t, variant, cells[i].seed);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

// --- CSV ---------------------------------------------------------------------

void write_csv(std::ostream& out, std::span<const SweepResult> results) {
  out << "variant,n,t,seed,mean_waiting,deadlocked\n";
  for (const auto& r : results) {
    out << fmt::format("{},{},{:.17g},{},{:.17g},{}\n", to_string(r.variant), r.n,
                       r.t, r.seed, r.mean_waiting, r.deadlocked ? "true" : "false");
  }
}

namespace {

template <typename T>
T parse_number(const std::string& field, std::size_t line) {
  T value{};
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ArgumentError(fmt::format("csv line {}: bad number '{}'", line, field));
  }
  return value;
}

}  // namespace

std::vector<SweepResult> read_csv(std::istream& in) {
  std::vector<SweepResult> out;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line) || line != "variant,n,t,seed,mean_waiting,deadlocked") {
    throw ArgumentError("csv: missing or unexpected header");
  }
  ++lineno;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (fields.size() != 6) {
      throw ArgumentError(fmt::format("csv line {}: expected 6 fields", lineno));
    }
    SweepResult r;
    r.variant = parse_variant(fields[0]);
    r.n = parse_number<int>(fields[1], lineno);
    r.t = parse_number<double>(fields[2], lineno);
    r.seed = parse_number<std::uint64_t>(fields[3], lineno);
    r.mean_waiting = parse_number<double>(fields[4], lineno);
    if (fields[5] == "true") {
      r.deadlocked = true;
    } else if (fields[5] == "false") {
      r.deadlocked = false;
    } else {
      throw ArgumentError(fmt::format("csv line {}: bad flag '{}'", lineno, fields[5]));
    }
    out.push_back(std::move(r));
  }
  return out;
}

// --- Summaries ---------------------------------------------------------------

double CellSummary::se() const {
  return replications > 0 ? sd / std::sqrt(static_cast<double>(replications)) : 0.0;
}

std::vector<CellSummary> summarize(std::span<const SweepResult> results) {
  std::map<std::pair<int, int>, std::vector<double>> groups;
  for (const auto& r : results) {
    groups[{static_cast<int>(r.variant), r.n}].push_back(r.mean_waiting);
  }
  std::vector<CellSummary> out;
  for (const auto& [key, values] : groups) {
    CellSummary s;
    s.variant = static_cast<Variant>(key.first);
    s.n = key.second;
    s.replications = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    out.push_back(s);
  }
  return out;
}

// --- M/M/1 -------------------------------------------------------------------

void MM1Params::validate() const {
  if (!(arrival_rate > 0.0) || !(service_rate > 0.0) || !std::isfinite(arrival_rate) ||
      !std::isfinite(service_rate)) {
    throw ArgumentError("M/M/1 rates must be positive and finite");
  }
  if (!(arrival_rate < service_rate)) {
    throw ArgumentError(fmt::format("M/M/1 unstable: lambda {} >= mu {}", arrival_rate,
                                    service_rate));
  }
}

double mm1_expected_wait(const MM1Params& params) {
  params.validate();
  const double lambda = params.arrival_rate;
  const double mu = params.service_rate;
  return lambda / (mu * (mu - lambda));
}

namespace {

struct MM1Model {
  Environment& env;
  Resource server;
  MM1Params params;
  std::uint64_t n_customers;
  double total_wait = 0.0;
  std::uint64_t served = 0;

  Process<> customer() {
    const SimTime arrival = env.now();
    Request rq = server.request();
    co_await rq;
    total_wait += env.now() - arrival;
    co_await env.timeout(env.rng().exponential(1.0 / params.service_rate));
    server.release(rq);
    ++served;
  }

  Process<> source() {
    for (std::uint64_t i = 0; i < n_customers; ++i) {
      spawn(env, customer());
      co_await env.timeout(env.rng().exponential(1.0 / params.arrival_rate));
    }
  }
};

}  // namespace

double mm1_simulate(const MM1Params& params, std::uint64_t n_customers,
                    std::uint64_t seed) {
  params.validate();
  if (n_customers == 0) return 0.0;
  Environment env(seed);
  MM1Model model{env, Resource(env, 1, "server"), params, n_customers};
  spawn(env, model.source(), "source");
  env.run();
  return model.total_wait / static_cast<double>(model.served);
}

}  // namespace dinesim

#include "dinesim/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "dinesim/counter.hpp"
#include "dinesim/philosophers.hpp"
#include "dinesim/stats.hpp"
#include "dinesim/trace.hpp"

namespace dinesim::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::string scenario;
  int n = 5;
  std::optional<double> until;
  std::uint64_t seed = 0;
  bool diag = false;
  std::string format = "human";
  std::optional<int> precision;
  std::string output;
  std::uint64_t max_events = 0;
  int customers = 10;
  int fail_one_in = 10;
  double service_delay = 10.0;
};

struct SweepOptions {
  std::string scenario;
  std::string n_range = "2..19";
  double until = 50000.0;
  std::uint64_t seeds = 10;
  std::uint64_t seed_base = 0;
  std::string format = "csv";
  unsigned threads = 0;
  std::string output;
};

struct ValidateOptions {
  double lambda = 0.05;
  double mu = 0.1;
  std::uint64_t customers = 100000;
  std::uint64_t seed = 0;
  double tolerance = 0.10;
};

TraceFormat parse_format(const std::string& s) {
  if (s == "human") return TraceFormat::Human;
  if (s == "jsonl") return TraceFormat::Jsonl;
  if (s == "csv") return TraceFormat::Csv;
  throw UsageError(fmt::format("unknown format '{}'", s));
}

int parse_int(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError(fmt::format("bad integer '{}'", s));
  }
  return v;
}

// "2..19", "7" or "2,3,5".
std::vector<int> parse_range(const std::string& text) {
  std::vector<int> out;
  if (auto dots = text.find(".."); dots != std::string::npos) {
    const int lo = parse_int(std::string_view(text).substr(0, dots));
    const int hi = parse_int(std::string_view(text).substr(dots + 2));
    if (hi < lo) throw UsageError(fmt::format("empty range '{}'", text));
    for (int n = lo; n <= hi; ++n) out.push_back(n);
  } else {
    std::string_view rest = text;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      out.push_back(parse_int(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  if (out.empty()) throw UsageError("empty --n");
  for (int n : out) {
    if (n < 2) throw UsageError(fmt::format("--n must be >= 2, got {}", n));
  }
  return out;
}

// Steps until the horizon, exhaustion or the event cap.
struct Stop {
  RunOutcome outcome;
  bool capped = false;
};

Stop drive(Environment& env, std::optional<double> until, std::uint64_t max_events) {
  if (max_events == 0) return {env.run(until), false};
  std::uint64_t done = 0;
  while (auto next = env.peek()) {
    if (until && *next > *until) return {env.run(until), false};
    if (done++ == max_events) return {{RunOutcome::Kind::Exhausted, env.now()}, true};
    env.step();
  }
  return {env.run(until), false};
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw UsageError(fmt::format("cannot open '{}' for writing", path));
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

int do_run_philosophers(const RunOptions& o, Variant variant, std::ostream& out) {
  const TraceFormat format = parse_format(o.format);
  const int precision = o.precision.value_or(6);
  if (format == TraceFormat::Csv && o.diag) out << "time,actor,message\n";

  Environment env(o.seed);
  Trace trace([&](const TraceRecord& r) { emit_record(out, r, format, precision); });
  PartyOptions options;
  options.trace = o.diag ? &trace : nullptr;
  Party party = build_party(env, o.n, variant, options);
  const Stop stop = drive(env, o.until, o.max_events);

  const auto counts = party.counts();
  const bool deadlock =
      stop.outcome.exhausted() && !stop.capped && detect_deadlock(party.chopsticks);
  const char* outcome = stop.capped ? "EventCap" : to_string(stop.outcome.kind);

  if (format == TraceFormat::Jsonl) {
    nlohmann::ordered_json j;
    j["outcome"] = outcome;
    j["now"] = stop.outcome.now;
    j["mean_waiting"] = party.mean_waiting();
    j["deadlock"] = deadlock;
    j["counts"] = counts;
    out << nlohmann::ordered_json{{"summary", j}}.dump() << '\n';
    return kExitOk;
  }
  const char* prefix = format == TraceFormat::Csv ? "# " : "";
  out << fmt::format("{}outcome: {} at t={:.{}f}\n", prefix, outcome, stop.outcome.now,
                     precision);
  out << fmt::format("{}mean waiting: {:.{}f}\n", prefix, party.mean_waiting(), precision);
  if (deadlock) {
    out << fmt::format("{}DEADLOCK detected at t={:.{}f}; counts=[{}]\n", prefix,
                       stop.outcome.now, precision, fmt::join(counts, ", "));
  }
  return kExitOk;
}

int do_run_counter(const RunOptions& o, std::ostream& out) {
  const TraceFormat format = parse_format(o.format);
  const int precision = o.precision.value_or(1);
  if (format == TraceFormat::Csv) out << "time,actor,message\n";

  CounterConfig config;
  config.n_customers = o.customers;
  config.fail_one_in = o.fail_one_in;
  config.service_delay = o.service_delay;
  config.validate();

  Environment env(o.seed);
  Trace trace([&](const TraceRecord& r) { emit_record(out, r, format, precision); });
  CounterModel model(env, config, trace);
  const Stop stop = drive(env, o.until, o.max_events);

  std::size_t left = 0, failed = 0;
  for (const auto& c : model.customers()) {
    if (!c.departure) continue;
    (c.failed ? failed : left)++;
  }
  const char* outcome = stop.capped ? "EventCap" : to_string(stop.outcome.kind);
  if (format == TraceFormat::Jsonl) {
    nlohmann::ordered_json j;
    j["outcome"] = outcome;
    j["now"] = stop.outcome.now;
    j["customers"] = model.customers().size();
    j["served"] = left;
    j["failed"] = failed;
    out << nlohmann::ordered_json{{"summary", j}}.dump() << '\n';
    return kExitOk;
  }
  const char* prefix = format == TraceFormat::Csv ? "# " : "";
  out << fmt::format("{}outcome: {} at t={:.{}f}\n", prefix, outcome, stop.outcome.now,
                     precision);
  out << fmt::format("{}customers: {} served: {} failed: {}\n", prefix,
                     model.customers().size(), left, failed);
  return kExitOk;
}

int do_run(const RunOptions& o, bool n_given, bool counter_flags_given, std::ostream& out) {
  if (o.precision && (*o.precision < 0 || *o.precision > 17)) {
    throw UsageError("--precision must be in [0, 17]");
  }
  if (o.until && !(*o.until >= 0.0)) throw UsageError("--until must be >= 0");
  if (o.scenario == "counter") {
    if (n_given) throw UsageError("--n does not apply to the counter scenario");
    Output sink(o.output, out);
    return do_run_counter(o, sink.get());
  }
  if (counter_flags_given) {
    throw UsageError("--customers/--fail-one-in/--service-delay only apply to counter");
  }
  Variant variant;
  try {
    variant = parse_variant(o.scenario);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  if (o.n < 2) throw UsageError(fmt::format("--n must be >= 2, got {}", o.n));
  Output sink(o.output, out);
  return do_run_philosophers(o, variant, sink.get());
}

int do_sweep(const SweepOptions& o, std::ostream& out) {
  Variant variant;
  try {
    variant = parse_variant(o.scenario);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  const auto ns = parse_range(o.n_range);
  if (o.seeds == 0) throw UsageError("--seeds must be >= 1");
  if (!(o.until > 0.0)) throw UsageError("--until must be > 0");
  if (o.format != "csv" && o.format != "summary") {
    throw UsageError(fmt::format("sweep --format must be csv or summary, got '{}'", o.format));
  }
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < o.seeds; ++i) seeds.push_back(o.seed_base + i);

  Output sink(o.output, out);
  const auto results = sweep(variant, ns, o.until, seeds, o.threads);
  if (o.format == "csv") {
    write_csv(sink.get(), results);
  } else {
    sink.get() << "variant,n,replications,mean,sd,se\n";
    for (const auto& s : summarize(results)) {
      sink.get() << fmt::format("{},{},{},{:.17g},{:.17g},{:.17g}\n", to_string(s.variant),
                                s.n, s.replications, s.mean, s.sd, s.se());
    }
  }
  return kExitOk;
}

int do_validate(const ValidateOptions& o, std::ostream& out, std::ostream& err) {
  const MM1Params params{o.lambda, o.mu};
  double expected = 0.0;
  try {
    expected = mm1_expected_wait(params);
  } catch (const ArgumentError& e) {
    throw UsageError(e.what());
  }
  const double observed = mm1_simulate(params, o.customers, o.seed);
  const double rel = std::abs(observed - expected) / expected;
  const bool pass = rel <= o.tolerance;
  out << fmt::format(
      "mm1 lambda={} mu={} customers={} seed={}\n"
      "expected_wait={:.6f} observed_wait={:.6f} relative_error={:.4f} tolerance={} {}\n",
      o.lambda, o.mu, o.customers, o.seed, expected, observed, rel, o.tolerance,
      pass ? "PASS" : "FAIL");
  if (!pass) {
    err << "validation failed: observed M/M/1 wait outside tolerance\n";
    return kExitSimulation;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Process-oriented discrete event simulation of dining philosophers "
               "and a service counter"};
  app.name("dinesim");
  app.require_subcommand(1);

  RunOptions ro;
  auto* run_cmd = app.add_subcommand("run", "Run one scenario and emit its trace");
  run_cmd->add_option("--scenario", ro.scenario,
                      "classic | ordered | bowl | impatient | counter")
      ->required();
  auto* n_opt = run_cmd->add_option("--n", ro.n, "Number of philosophers (>= 2)");
  run_cmd->add_option("--until", ro.until, "Simulation horizon (default: run to exhaustion)");
  run_cmd->add_option("--seed", ro.seed, "RNG seed");
  run_cmd->add_flag("--diag", ro.diag, "Emit philosopher diagnostics");
  run_cmd->add_option("--format", ro.format, "human | jsonl | csv");
  run_cmd->add_option("--precision", ro.precision,
                      "Decimals for times (default 6, counter 1)");
  run_cmd->add_option("--output", ro.output, "Output file (default stdout)");
  run_cmd->add_option("--max-events", ro.max_events,
                      "Stop after this many events (0 = no cap)");
  auto* cust_opt = run_cmd->add_option("--customers", ro.customers, "Counter: customers");
  auto* fail_opt =
      run_cmd->add_option("--fail-one-in", ro.fail_one_in, "Counter: 1-in-k failure");
  auto* delay_opt =
      run_cmd->add_option("--service-delay", ro.service_delay, "Counter: service time");

  SweepOptions so;
  auto* sweep_cmd = app.add_subcommand("sweep", "Replicated waiting-time sweep over n");
  sweep_cmd->add_option("--scenario", so.scenario, "classic | ordered | bowl | impatient")
      ->required();
  sweep_cmd->add_option("--n", so.n_range, "Party sizes: 2..19, 7 or 2,3,5");
  sweep_cmd->add_option("--until", so.until, "Horizon per cell");
  sweep_cmd->add_option("--seeds", so.seeds, "Replications per cell");
  sweep_cmd->add_option("--seed-base", so.seed_base, "First replication seed");
  sweep_cmd->add_option("--format", so.format, "csv | summary");
  sweep_cmd->add_option("--threads", so.threads, "Worker threads (0 = all cores)");
  sweep_cmd->add_option("--output", so.output, "Output file (default stdout)");

  ValidateOptions vo;
  auto* val_cmd = app.add_subcommand("validate", "Check the kernel against M/M/1");
  val_cmd->add_option("--lambda", vo.lambda, "Arrival rate");
  val_cmd->add_option("--mu", vo.mu, "Service rate");
  val_cmd->add_option("--customers", vo.customers, "Customers to simulate");
  val_cmd->add_option("--seed", vo.seed, "RNG seed");
  val_cmd->add_option("--tolerance", vo.tolerance, "Allowed relative error");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run_cmd->parsed()) {
      const bool counter_flags =
          cust_opt->count() + fail_opt->count() + delay_opt->count() > 0;
      return do_run(ro, n_opt->count() > 0, counter_flags, out);
    }
    if (sweep_cmd->parsed()) return do_sweep(so, out);
    return do_validate(vo, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnhandledFailure& e) {
    err << "simulation error: " << e.what() << '\n';
    return kExitSimulation;
  } catch (const std::logic_error& e) {
    err << "simulation error: " << e.what() << '\n';
    return kExitSimulation;
  }
}

}  // namespace dinesim::cli

#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dinesim/kernel.hpp"

namespace dinesim {

struct TraceRecord {
  SimTime time = 0.0;
  std::string actor;
  std::string message;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// Collects diagnostic records, or forwards them to a sink when one is set.
class Trace {
 public:
  using Sink = std::function<void(const TraceRecord&)>;

  Trace() = default;
  explicit Trace(Sink sink) : sink_(std::move(sink)) {}

  void record(SimTime time, std::string_view actor, std::string_view message);

  const std::vector<TraceRecord>& records() const { return records_; }
  std::size_t size() const { return count_; }

 private:
  Sink sink_;
  std::vector<TraceRecord> records_;
  std::size_t count_ = 0;
};

enum class TraceFormat { Human, Jsonl, Csv };

// "{actor} {message} @{time}" with `precision` decimals.
std::string format_human(const TraceRecord& record, int precision);
void emit_record(std::ostream& out, const TraceRecord& record, TraceFormat format,
                 int precision);
void emit_trace(std::ostream& out, std::span<const TraceRecord> records,
                TraceFormat format, int precision);

}  // namespace dinesim

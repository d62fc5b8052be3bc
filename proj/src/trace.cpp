#include "dinesim/trace.hpp"

#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

namespace dinesim {

void Trace::record(SimTime time, std::string_view actor, std::string_view message) {
  ++count_;
  TraceRecord rec{time, std::string(actor), std::string(message)};
  if (sink_) {
    sink_(rec);
  } else {
    records_.push_back(std::move(rec));
  }
}

std::string format_human(const TraceRecord& record, int precision) {
  if (record.actor.empty()) {
    return fmt::format("{} @{:.{}f}", record.message, record.time, precision);
  }
  return fmt::format("{} {} @{:.{}f}", record.actor, record.message, record.time,
                     precision);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void emit_record(std::ostream& out, const TraceRecord& record, TraceFormat format,
                 int precision) {
  switch (format) {
    case TraceFormat::Human:
      out << format_human(record, precision) << '\n';
      break;
    case TraceFormat::Jsonl: {
      nlohmann::ordered_json j;
      j["time"] = record.time;
      j["actor"] = record.actor;
      j["message"] = record.message;
      out << j.dump() << '\n';
      break;
    }
    case TraceFormat::Csv:
      out << fmt::format("{:.{}f},{},{}\n", record.time, precision,
                         csv_field(record.actor), csv_field(record.message));
      break;
  }
}

void emit_trace(std::ostream& out, std::span<const TraceRecord> records,
                TraceFormat format, int precision) {
  for (const auto& r : records) emit_record(out, r, format, precision);
}

}  // namespace dinesim

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wshex {

struct TraceStep {
  std::string rule;    // inference rule name, e.g. "OpenShape", "TripleConstraint"
  std::string detail;  // may be empty
  bool operator==(const TraceStep&) const = default;
};

using Trace = std::vector<TraceStep>;

// "OpenShape > TripleConstraint :P27 ..." form.
std::string trace_to_string(const Trace& trace);

enum class Verdict { Conforming, NonConforming, EngineLimit };

std::string_view verdict_name(Verdict v);  // "conforms" / "fails" / "engine-limit"

struct ReportEntry {
  std::string node;
  std::string shape;
  Verdict verdict = Verdict::NonConforming;
  Trace trace;          // empty unless the verdict is not Conforming
  bool approx = false;  // set by local-only validation when a reference was approximated
};

struct ValidationReport {
  std::vector<ReportEntry> entries;

  bool all_conforming() const;
  bool any_engine_limit() const;
};

// `Q80@Person: CONFORMS` / `Q80@Person: FAILS (<rule-path>)`
std::string format_text_line(const ReportEntry& entry);
// {"node":..,"shape":..,"status":..,"trace":[..]}
std::string format_json_line(const ReportEntry& entry);
// {"entity":..,"shape":..,"status":..,"approx":..}
std::string format_stream_json_line(const ReportEntry& entry);

// Reads one line produced by either JSON formatter; nullopt if the line is
// not a report record.
std::optional<ReportEntry> read_report_line(std::string_view line);

}  // namespace wshex

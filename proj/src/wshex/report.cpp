#include "wshex/report.hpp"

#include <algorithm>

#include "json.hpp"

namespace wshex {

using nlohmann::json;

std::string trace_to_string(const Trace& trace) {
  std::string out;
  for (const auto& step : trace) {
    if (!out.empty()) out += " > ";
    out += step.rule;
    if (!step.detail.empty()) out += " " + step.detail;
  }
  return out;
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Conforming: return "conforms";
    case Verdict::NonConforming: return "fails";
    case Verdict::EngineLimit: return "engine-limit";
  }
  return "fails";
}

bool ValidationReport::all_conforming() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ReportEntry& e) { return e.verdict == Verdict::Conforming; });
}

bool ValidationReport::any_engine_limit() const {
  return std::any_of(entries.begin(), entries.end(),
                     [](const ReportEntry& e) { return e.verdict == Verdict::EngineLimit; });
}

std::string format_text_line(const ReportEntry& entry) {
  std::string out = entry.node + "@" + entry.shape + ": ";
  switch (entry.verdict) {
    case Verdict::Conforming: out += "CONFORMS"; break;
    case Verdict::NonConforming: out += "FAILS (" + trace_to_string(entry.trace) + ")"; break;
    case Verdict::EngineLimit: out += "ENGINE-LIMIT (" + trace_to_string(entry.trace) + ")"; break;
  }
  if (entry.approx) out += " [local-approx]";
  return out;
}

namespace {
json trace_json(const Trace& trace) {
  json arr = json::array();
  for (const auto& s : trace) arr.push_back({{"rule", s.rule}, {"detail", s.detail}});
  return arr;
}

std::optional<Verdict> verdict_from(std::string_view s) {
  if (s == "conforms") return Verdict::Conforming;
  if (s == "fails") return Verdict::NonConforming;
  if (s == "engine-limit") return Verdict::EngineLimit;
  return std::nullopt;
}
}  // namespace

std::string format_json_line(const ReportEntry& entry) {
  json j = {{"node", entry.node},
            {"shape", entry.shape},
            {"status", std::string(verdict_name(entry.verdict))},
            {"trace", trace_json(entry.trace)}};
  return j.dump();
}

std::string format_stream_json_line(const ReportEntry& entry) {
  // Built by hand so the key order stays fixed.
  std::string out = "{\"entity\":" + json(entry.node).dump() + ",\"shape\":" + json(entry.shape).dump() +
                    ",\"status\":" + json(std::string(verdict_name(entry.verdict))).dump() +
                    ",\"approx\":" + (entry.approx ? "true" : "false");
  if (!entry.trace.empty()) out += ",\"trace\":" + trace_json(entry.trace).dump();
  return out + "}";
}

std::optional<ReportEntry> read_report_line(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  ReportEntry e;
  const char* node_key = j.contains("entity") ? "entity" : "node";
  if (!j.contains(node_key) || !j[node_key].is_string()) return std::nullopt;
  if (!j.contains("shape") || !j["shape"].is_string()) return std::nullopt;
  if (!j.contains("status") || !j["status"].is_string()) return std::nullopt;
  auto v = verdict_from(j["status"].get<std::string>());
  if (!v) return std::nullopt;
  e.node = j[node_key].get<std::string>();
  e.shape = j["shape"].get<std::string>();
  e.verdict = *v;
  if (j.contains("approx") && j["approx"].is_boolean()) e.approx = j["approx"].get<bool>();
  if (j.contains("trace") && j["trace"].is_array())
    for (const auto& s : j["trace"])
      e.trace.push_back({s.value("rule", ""), s.value("detail", "")});
  return e;
}

}  // namespace wshex

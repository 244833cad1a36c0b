// wshex: command-line front end over the C API.
//
//   wshex parse SCHEMA [--render]
//   wshex validate --schema S --data D --shape L (--target ID... | --all)
//                  [--mode full|local] [--format text|json] [--pedantic] [--jobs N]
//   wshex convert INPUT [-o OUTPUT]
//
// Exit codes: 0 ok, 1 non-conforming or rejected constraints, 2 usage or
// parse error, 3 I/O error, 4 engine limit.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "wshex/wshex.h"

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kIo = 3, kEngineLimit = 4 };

struct SchemaFree {
  void operator()(wshex_schema* s) const { wshex_schema_free(s); }
};
struct GraphFree {
  void operator()(wshex_graph* g) const { wshex_graph_free(g); }
};
struct ReportFree {
  void operator()(wshex_report* r) const { wshex_report_free(r); }
};
struct ConversionFree {
  void operator()(wshex_conversion* c) const { wshex_conversion_free(c); }
};
struct StringFree {
  void operator()(char* s) const { wshex_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringFree>;

int exit_for(wshex_status status) {
  switch (status) {
    case WSHEX_OK: return kOk;
    case WSHEX_ERR_IO: return kIo;
    case WSHEX_ERR_ENGINE_LIMIT: return kEngineLimit;
    default: return kUsage;
  }
}

int report_error(wshex_status status, const std::string& context) {
  std::cerr << "wshex: " << context << ": " << wshex_status_name(status) << "\n";
  std::string msg = wshex_last_error_message();
  if (!msg.empty()) std::cerr << msg << "\n";
  return exit_for(status);
}

std::unique_ptr<wshex_schema, SchemaFree> load_schema(const std::string& path, int& code) {
  wshex_schema* raw = nullptr;
  wshex_status st = wshex_schema_parse_file(path.c_str(), &raw);
  if (st != WSHEX_OK) code = report_error(st, path);
  return std::unique_ptr<wshex_schema, SchemaFree>(raw);
}

int cmd_parse(const std::string& path, bool render) {
  int code = kOk;
  auto schema = load_schema(path, code);
  if (!schema) return code;
  char* raw = nullptr;
  wshex_status st = render ? wshex_schema_render(schema.get(), &raw) : wshex_schema_summary(schema.get(), &raw);
  if (st != WSHEX_OK) return report_error(st, path);
  OwnedString text(raw);
  std::cout << text.get();
  return kOk;
}

struct ValidateArgs {
  std::string schema;
  std::string data;
  std::string shape;
  std::vector<std::string> targets;
  bool all = false;
  std::string mode = "full";
  std::string format = "text";
  bool pedantic = false;
  bool strict = false;
  unsigned jobs = 0;
};

bool step_budget_from_env(std::uint64_t& budget) {
  budget = 0;
  const char* env = std::getenv("WSHEX_STEP_BUDGET");
  if (!env || !*env) return true;
  char* end = nullptr;
  unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v == 0) return false;
  budget = v;
  return true;
}

struct StreamState {
  std::set<std::string> only;
  bool any_failed = false;
  bool any_limit = false;
};

void on_record(void* user, const char* entity, wshex_verdict verdict, int, const char* line) {
  auto* state = static_cast<StreamState*>(user);
  if (!state->only.empty() && !state->only.contains(entity)) return;
  if (verdict == WSHEX_FAILS) state->any_failed = true;
  if (verdict == WSHEX_ENGINE_LIMIT) state->any_limit = true;
  std::cout << line << "\n";
}

int cmd_validate(const ValidateArgs& args) {
  if (args.targets.empty() && !args.all) {
    std::cerr << "wshex validate: give --target ID... or --all\n";
    return kUsage;
  }
  wshex_validate_options vopts;
  wshex_validate_options_init(&vopts);
  vopts.pedantic = args.pedantic ? 1 : 0;
  vopts.jobs = args.jobs ? args.jobs : std::max(1u, std::thread::hardware_concurrency());
  if (!step_budget_from_env(vopts.step_budget)) {
    std::cerr << "wshex: WSHEX_STEP_BUDGET must be a positive integer\n";
    return kUsage;
  }
  wshex_ingest_options iopts;
  wshex_ingest_options_init(&iopts);
  iopts.strict = args.strict ? 1 : 0;
  iopts.jobs = vopts.jobs;
  const wshex_format format = args.format == "json" ? WSHEX_FORMAT_JSON : WSHEX_FORMAT_TEXT;

  int code = kOk;
  auto schema = load_schema(args.schema, code);
  if (!schema) return code;

  if (args.mode == "local") {
    StreamState state;
    if (!args.all) state.only.insert(args.targets.begin(), args.targets.end());
    wshex_ingest_stats stats;
    wshex_status st = wshex_stream_validate_file(args.data.c_str(), schema.get(), args.shape.c_str(), &iopts, &vopts,
                                                 format, on_record, &state, &stats);
    if (st != WSHEX_OK) return report_error(st, args.data);
    if (stats.malformed_lines)
      std::cerr << "wshex: skipped " << stats.malformed_lines << " malformed line(s)\n";
    if (state.any_limit) return kEngineLimit;
    return state.any_failed ? kFailed : kOk;
  }

  wshex_graph* raw_graph = nullptr;
  wshex_ingest_stats stats;
  wshex_status st = wshex_graph_load_file(args.data.c_str(), &iopts, &raw_graph, &stats);
  if (st != WSHEX_OK) return report_error(st, args.data);
  std::unique_ptr<wshex_graph, GraphFree> graph(raw_graph);
  if (stats.malformed_lines) std::cerr << "wshex: skipped " << stats.malformed_lines << " malformed line(s)\n";

  wshex_report* raw_report = nullptr;
  if (args.all) {
    st = wshex_validate_all(graph.get(), schema.get(), args.shape.c_str(), &vopts, &raw_report);
  } else {
    std::vector<const char*> ids;
    for (const auto& t : args.targets) ids.push_back(t.c_str());
    st = wshex_validate(graph.get(), schema.get(), args.shape.c_str(), ids.data(), ids.size(), &vopts, &raw_report);
  }
  if (st != WSHEX_OK) return report_error(st, "validate");
  std::unique_ptr<wshex_report, ReportFree> report(raw_report);

  char* raw_text = nullptr;
  st = wshex_report_format(report.get(), format, &raw_text);
  if (st != WSHEX_OK) return report_error(st, "report");
  OwnedString text(raw_text);
  std::cout << text.get();

  bool failed = false;
  for (size_t i = 0; i < wshex_report_size(report.get()); ++i) {
    wshex_verdict v = wshex_report_verdict(report.get(), i);
    if (v == WSHEX_ENGINE_LIMIT) return kEngineLimit;
    if (v == WSHEX_FAILS) failed = true;
  }
  return failed ? kFailed : kOk;
}

int cmd_convert(const std::string& input, const std::string& output) {
  wshex_conversion* raw = nullptr;
  wshex_status st = wshex_convert_file(input.c_str(), &raw);
  if (st != WSHEX_OK) return report_error(st, input);
  std::unique_ptr<wshex_conversion, ConversionFree> conversion(raw);

  char* raw_text = nullptr;
  st = wshex_conversion_render(conversion.get(), &raw_text);
  if (st != WSHEX_OK) return report_error(st, input);
  OwnedString text(raw_text);
  if (output.empty() || output == "-") {
    std::cout << text.get();
  } else {
    std::ofstream out(output, std::ios::binary);
    out << text.get();
    if (!out) {
      std::cerr << "wshex: cannot write " << output << "\n";
      return kIo;
    }
  }
  for (size_t i = 0; i < wshex_conversion_note_count(conversion.get()); ++i)
    std::cerr << "note: " << wshex_conversion_note(conversion.get(), i) << "\n";
  size_t rejected = wshex_conversion_rejected_count(conversion.get());
  for (size_t i = 0; i < rejected; ++i)
    std::cerr << "rejected: " << wshex_conversion_rejected(conversion.get(), i) << "\n";
  return rejected ? kFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WShEx schema toolkit for Wikibase graphs"};
  app.set_version_flag("--version", wshex_version());
  app.require_subcommand(1);

  std::string parse_path;
  bool render = false;
  auto* parse = app.add_subcommand("parse", "Parse a WShEx schema and print a summary");
  parse->add_option("schema", parse_path, "WShEx schema file")->required();
  parse->add_flag("--render", render, "Print the pretty-printed schema instead of the summary");

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Validate entities of a JSON dump against a shape");
  validate->add_option("--schema", va.schema, "WShEx schema file")->required();
  validate->add_option("--data", va.data, "Wikibase JSON dump, one entity per line")->required();
  validate->add_option("--shape", va.shape, "Shape label to check")->required();
  auto* target = validate->add_option("--target", va.targets, "Entity id to validate (repeatable)");
  auto* all = validate->add_flag("--all", va.all, "Validate every entity document in the dump");
  target->excludes(all);
  validate->add_option("--mode", va.mode, "full: whole graph; local: each document on its own")
      ->check(CLI::IsMember({"full", "local"}));
  validate->add_option("--format", va.format, "Report format")->check(CLI::IsMember({"text", "json"}));
  validate->add_flag("--pedantic", va.pedantic, "Literal EachOfQs rule: operands match the same qualifier set");
  validate->add_flag("--strict", va.strict, "Stop at the first malformed dump line");
  validate->add_option("--jobs", va.jobs, "Worker threads (default: available parallelism)");

  std::string convert_input;
  std::string convert_output;
  auto* convert = app.add_subcommand("convert", "Convert a ShEx entity schema to WShEx");
  convert->add_option("input", convert_input, "ShEx schema (wdt:/p:/ps:/pq: pattern)")->required();
  convert->add_option("-o,--output", convert_output, "Output file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (parse->parsed()) return cmd_parse(parse_path, render);
  if (validate->parsed()) return cmd_validate(va);
  return cmd_convert(convert_input, convert_output);
}

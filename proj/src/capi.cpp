#include "wshex/wshex.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "wshex/convert.hpp"
#include "wshex/error.hpp"
#include "wshex/ingest.hpp"
#include "wshex/parser.hpp"
#include "wshex/validator.hpp"

struct wshex_schema {
  wshex::Schema schema;
};

struct wshex_graph {
  wshex::WikibaseGraph graph;
  std::vector<std::string> documents;
};

struct wshex_report {
  wshex::ValidationReport report;
  std::vector<std::string> traces;
};

struct wshex_conversion {
  wshex::ConversionReport report;
  std::vector<std::string> notes;
  std::vector<std::string> rejected;
};

namespace {

thread_local std::string g_last_error;

wshex_status fail(wshex_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

wshex_status map_code(wshex::ErrorCode code) {
  using wshex::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::RangeError: return WSHEX_ERR_INVALID_ARGUMENT;
    case ErrorCode::DuplicateStatementId: return WSHEX_ERR_DUPLICATE_STATEMENT;
    case ErrorCode::ParseError: return WSHEX_ERR_PARSE;
    case ErrorCode::UnknownShape: return WSHEX_ERR_UNKNOWN_SHAPE;
    case ErrorCode::MalformedLine:
    case ErrorCode::OversizeLine: return WSHEX_ERR_MALFORMED_INPUT;
    case ErrorCode::UnsupportedSnak: return WSHEX_ERR_UNSUPPORTED;
    case ErrorCode::EngineLimit: return WSHEX_ERR_ENGINE_LIMIT;
    case ErrorCode::Io: return WSHEX_ERR_IO;
  }
  return WSHEX_ERR_INTERNAL;
}

template <class F>
wshex_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const wshex::Error& e) {
    return fail(map_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(WSHEX_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(WSHEX_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(WSHEX_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

bool read_file(const char* path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return !in.bad();
}

wshex::IngestOptions ingest_options(const wshex_ingest_options* o) {
  wshex::IngestOptions out;
  if (!o) return out;
  out.strict = o->strict != 0;
  out.on_unsupported_snak =
      o->error_on_unsupported ? wshex::UnsupportedSnakPolicy::Error : wshex::UnsupportedSnakPolicy::Skip;
  if (o->max_line_bytes) out.max_line_bytes = o->max_line_bytes;
  out.jobs = o->jobs;
  return out;
}

wshex::ValidatorOptions validator_options(const wshex_validate_options* o) {
  wshex::ValidatorOptions out;
  if (!o) return out;
  out.pedantic = o->pedantic != 0;
  if (o->step_budget) out.step_budget = o->step_budget;
  return out;
}

void copy_stats(const wshex::IngestStats& s, wshex_ingest_stats* out) {
  if (!out) return;
  *out = {s.lines,
          s.entities,
          s.statements,
          s.malformed_lines,
          s.duplicate_entities,
          s.duplicate_statements,
          s.snaks.skipped_snaks,
          s.snaks.unsupported_snaks,
          s.snaks.references};
}

wshex_verdict to_c(wshex::Verdict v) {
  switch (v) {
    case wshex::Verdict::Conforming: return WSHEX_CONFORMS;
    case wshex::Verdict::NonConforming: return WSHEX_FAILS;
    case wshex::Verdict::EngineLimit: return WSHEX_ENGINE_LIMIT;
  }
  return WSHEX_FAILS;
}

wshex_status load_stream(std::istream& in, const wshex_ingest_options* options, wshex_graph** out,
                         wshex_ingest_stats* stats) {
  auto loaded = wshex::load_graph(in, ingest_options(options));
  auto g = std::make_unique<wshex_graph>();
  g->graph = std::move(loaded.graph);
  for (const auto& id : loaded.documents) g->documents.push_back(id.str());
  copy_stats(loaded.stats, stats);
  *out = g.release();
  return WSHEX_OK;
}

void collect_qualifier_specs(const wshex::TripleExpr& te, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, wshex::EachOf> || std::is_same_v<T, wshex::OneOf>) {
          collect_qualifier_specs(*n.lhs, out);
          collect_qualifier_specs(*n.rhs, out);
        } else if constexpr (std::is_same_v<T, wshex::Star> || std::is_same_v<T, wshex::Repeat>) {
          collect_qualifier_specs(*n.expr, out);
        } else if constexpr (std::is_same_v<T, wshex::TripleConstraint>) {
          bool trivial = n.qualifiers.openness == wshex::Openness::Open &&
                         std::holds_alternative<wshex::EmptyQs>(n.qualifiers.body->node);
          if (trivial) return;
          bool open = n.qualifiers.openness == wshex::Openness::Open;
          out.push_back(":" + n.predicate.str() + " " + (open ? "{| " : "[| ") +
                        wshex::render_property_spec(*n.qualifiers.body) + (open ? " |}" : " |]"));
        }
      },
      te.node);
}

std::string summarize(const wshex::Schema& schema) {
  std::string out = std::to_string(schema.labels().size()) + " shapes\n";
  for (const auto& label : schema.labels()) {
    const wshex::ShapeExpr& se = *schema.find(label);
    out += "<" + label + ">";
    std::vector<const wshex::Shape*> shapes;
    std::vector<const wshex::ShapeExpr*> stack{&se};
    while (!stack.empty()) {
      const auto* cur = stack.back();
      stack.pop_back();
      if (auto* s = std::get_if<wshex::Shape>(&cur->node)) shapes.push_back(s);
      if (auto* a = std::get_if<wshex::ShapeAnd>(&cur->node)) {
        stack.push_back(a->rhs.get());
        stack.push_back(a->lhs.get());
      }
    }
    if (shapes.empty()) {
      out += " node constraint " + wshex::render_shape_expr(se) + "\n";
      continue;
    }
    std::size_t tcs = 0;
    bool closed = false;
    std::vector<std::string> specs;
    for (const auto* s : shapes) {
      tcs += wshex::count_triple_constraints(*s->expr);
      closed = closed || s->closed;
      collect_qualifier_specs(*s->expr, specs);
    }
    out += closed ? " closed" : " open";
    out += ", " + std::to_string(tcs) + (tcs == 1 ? " triple constraint" : " triple constraints");
    for (const auto& q : specs) out += "\n  qualifiers " + q;
    out += "\n";
  }
  return out;
}

wshex_status parse_text(std::string_view text, wshex_schema** out) {
  auto parsed = wshex::parse_schema(text);
  if (!parsed.ok()) {
    std::string msg;
    for (const auto& d : parsed.diagnostics) msg += (msg.empty() ? "" : "\n") + d.str();
    return fail(WSHEX_ERR_PARSE, msg);
  }
  *out = new wshex_schema{std::move(*parsed.schema)};
  return WSHEX_OK;
}

wshex_status run_validation(const wshex_graph* graph, const wshex_schema* schema, std::vector<wshex::Target> targets,
                            const wshex_validate_options* options, wshex_report** out) {
  auto vopts = validator_options(options);
  unsigned jobs = options ? options->jobs : 0;
  auto report = std::make_unique<wshex_report>();
  report->report = jobs > 1 ? wshex::validate_parallel(graph->graph, schema->schema, targets, vopts, jobs)
                            : wshex::validate(graph->graph, schema->schema, targets, vopts);
  for (const auto& e : report->report.entries) report->traces.push_back(wshex::trace_to_string(e.trace));
  *out = report.release();
  return WSHEX_OK;
}

}  // namespace

extern "C" {

const char* wshex_version(void) { return "0.1.0"; }

const char* wshex_status_name(wshex_status status) {
  switch (status) {
    case WSHEX_OK: return "ok";
    case WSHEX_ERR_INVALID_ARGUMENT: return "invalid argument";
    case WSHEX_ERR_PARSE: return "parse error";
    case WSHEX_ERR_IO: return "I/O error";
    case WSHEX_ERR_ENGINE_LIMIT: return "engine limit";
    case WSHEX_ERR_MALFORMED_INPUT: return "malformed input";
    case WSHEX_ERR_DUPLICATE_STATEMENT: return "duplicate statement id";
    case WSHEX_ERR_UNKNOWN_SHAPE: return "unknown shape";
    case WSHEX_ERR_UNSUPPORTED: return "unsupported";
    case WSHEX_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* wshex_last_error_message(void) { return g_last_error.c_str(); }

void wshex_string_free(char* s) { std::free(s); }

wshex_status wshex_schema_parse(const char* text, size_t len, wshex_schema** out) {
  if (!text || !out) return fail(WSHEX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] { return parse_text(std::string_view(text, len), out); });
}

wshex_status wshex_schema_parse_file(const char* path, wshex_schema** out) {
  if (!path || !out) return fail(WSHEX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::string text;
    if (!read_file(path, text)) return fail(WSHEX_ERR_IO, std::string("cannot read ") + path);
    return parse_text(text, out);
  });
}

void wshex_schema_free(wshex_schema* schema) { delete schema; }

size_t wshex_schema_shape_count(const wshex_schema* schema) { return schema ? schema->schema.labels().size() : 0; }

const char* wshex_schema_shape_label(const wshex_schema* schema, size_t index) {
  if (!schema || index >= schema->schema.labels().size()) return nullptr;
  return schema->schema.labels()[index].c_str();
}

wshex_status wshex_schema_summary(const wshex_schema* schema, char** out) {
  if (!schema || !out) return fail(WSHEX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(summarize(schema->schema));
    return WSHEX_OK;
  });
}

wshex_status wshex_schema_render(const wshex_schema* schema, char** out) {
  if (!schema || !out) return fail(WSHEX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(wshex::render_schema(schema->schema));
    return WSHEX_OK;
  });
}

void wshex_ingest_options_init(wshex_ingest_options* options) {
  if (options) *options = {0, 0, 0, 0};
}

wshex_status wshex_graph_load_file(const char* path, const wshex_ingest_options* options, wshex_graph** out,
                                   wshex_ingest_stats* stats) {
  if (!path || !out) return fail(WSHEX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) return fail(WSHEX_ERR_IO, std::string("cannot read ") + path);
    return load_stream(in, options, out, stats);
  });
}

wshex_status wshex_graph_load_buffer(const char* data, size_t len, const wshex_ingest_options* options,
                                     wshex_graph** out, wshex_ingest_stats* stats) {
  if ((!data && len) || !out) return fail(WSHEX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::istringstream in(std::string(data ? data : "", len));
    return load_stream(in, options, out, stats);
  });
}

wshex_status wshex_graph_fixture(wshex_graph** out) {
  if (!out) return fail(WSHEX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto g = std::make_unique<wshex_graph>();
    g->graph = wshex::load_fixture_graph();
    for (const auto& id : g->graph.subjects()) g->documents.push_back(id.str());
    *out = g.release();
    return WSHEX_OK;
  });
}

void wshex_graph_free(wshex_graph* graph) { delete graph; }

size_t wshex_graph_statement_count(const wshex_graph* graph) { return graph ? graph->graph.statements().size() : 0; }

size_t wshex_graph_document_count(const wshex_graph* graph) { return graph ? graph->documents.size() : 0; }

const char* wshex_graph_document_id(const wshex_graph* graph, size_t index) {
  if (!graph || index >= graph->documents.size()) return nullptr;
  return graph->documents[index].c_str();
}

void wshex_validate_options_init(wshex_validate_options* options) {
  if (options) *options = {0, 0, 0};
}

wshex_status wshex_validate(const wshex_graph* graph, const wshex_schema* schema, const char* shape,
                            const char* const* targets, size_t target_count, const wshex_validate_options* options,
                            wshex_report** out) {
  if (!graph || !schema || !shape || !out || (!targets && target_count))
    return fail(WSHEX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<wshex::Target> ts;
    for (size_t i = 0; i < target_count; ++i) {
      auto id = targets[i] ? wshex::EntityId::parse(targets[i]) : std::nullopt;
      if (!id) return fail(WSHEX_ERR_INVALID_ARGUMENT, std::string("not an entity id: ") + (targets[i] ? targets[i] : "(null)"));
      ts.push_back({*id, shape});
    }
    return run_validation(graph, schema, std::move(ts), options, out);
  });
}

wshex_status wshex_validate_all(const wshex_graph* graph, const wshex_schema* schema, const char* shape,
                                const wshex_validate_options* options, wshex_report** out) {
  if (!graph || !schema || !shape || !out) return fail(WSHEX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::vector<wshex::Target> ts;
    for (const auto& d : graph->documents) ts.push_back({*wshex::EntityId::parse(d), shape});
    return run_validation(graph, schema, std::move(ts), options, out);
  });
}

void wshex_report_free(wshex_report* report) { delete report; }

size_t wshex_report_size(const wshex_report* report) { return report ? report->report.entries.size() : 0; }

const char* wshex_report_node(const wshex_report* report, size_t index) {
  if (!report || index >= report->report.entries.size()) return nullptr;
  return report->report.entries[index].node.c_str();
}

const char* wshex_report_shape(const wshex_report* report, size_t index) {
  if (!report || index >= report->report.entries.size()) return nullptr;
  return report->report.entries[index].shape.c_str();
}

wshex_verdict wshex_report_verdict(const wshex_report* report, size_t index) {
  if (!report || index >= report->report.entries.size()) return WSHEX_FAILS;
  return to_c(report->report.entries[index].verdict);
}

const char* wshex_report_trace(const wshex_report* report, size_t index) {
  if (!report || index >= report->traces.size()) return nullptr;
  return report->traces[index].c_str();
}

wshex_status wshex_report_format(const wshex_report* report, wshex_format format, char** out) {
  if (!report || !out) return fail(WSHEX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::string text;
    for (const auto& e : report->report.entries)
      text += (format == WSHEX_FORMAT_JSON ? wshex::format_json_line(e) : wshex::format_text_line(e)) + "\n";
    *out = dup_string(text);
    return WSHEX_OK;
  });
}

wshex_status wshex_stream_validate_file(const char* path, const wshex_schema* schema, const char* shape,
                                        const wshex_ingest_options* ingest, const wshex_validate_options* options,
                                        wshex_format format, wshex_record_fn record, void* user,
                                        wshex_ingest_stats* stats) {
  if (!path || !schema || !shape || !record) return fail(WSHEX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) return fail(WSHEX_ERR_IO, std::string("cannot read ") + path);
    auto iopts = ingest_options(ingest);
    iopts.mode = wshex::IngestMode::LocalOnly;
    auto s = wshex::stream_validate(in, schema->schema, shape, iopts, validator_options(options),
                                    [&](const wshex::ReportEntry& e) {
                                      std::string line = format == WSHEX_FORMAT_JSON
                                                             ? wshex::format_stream_json_line(e)
                                                             : wshex::format_text_line(e);
                                      record(user, e.node.c_str(), to_c(e.verdict), e.approx ? 1 : 0, line.c_str());
                                    });
    copy_stats(s, stats);
    return WSHEX_OK;
  });
}

wshex_status wshex_convert(const char* text, size_t len, wshex_conversion** out) {
  if (!text || !out) return fail(WSHEX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto parsed = wshex::parse_shexc_subset(std::string_view(text, len));
    if (!parsed.ok()) {
      std::string msg;
      for (const auto& d : parsed.diagnostics) msg += (msg.empty() ? "" : "\n") + d.str();
      return fail(WSHEX_ERR_PARSE, msg);
    }
    auto c = std::make_unique<wshex_conversion>();
    c->report = wshex::convert(*parsed.schema);
    for (const auto& n : c->report.notes) c->notes.push_back(n.shape + ": " + n.message);
    for (const auto& r : c->report.rejected)
      c->rejected.push_back(r.shape + ": " + r.constraint + " (" + r.reason + ") at " +
                            std::to_string(r.position.line) + ":" + std::to_string(r.position.column));
    *out = c.release();
    return WSHEX_OK;
  });
}

wshex_status wshex_convert_file(const char* path, wshex_conversion** out) {
  if (!path || !out) return fail(WSHEX_ERR_INVALID_ARGUMENT, "null argument");
  std::string text;
  if (!read_file(path, text)) return fail(WSHEX_ERR_IO, std::string("cannot read ") + path);
  return wshex_convert(text.data(), text.size(), out);
}

void wshex_conversion_free(wshex_conversion* conversion) { delete conversion; }

wshex_status wshex_conversion_render(const wshex_conversion* conversion, char** out) {
  if (!conversion || !out) return fail(WSHEX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(wshex::render_schema(conversion->report.converted));
    return WSHEX_OK;
  });
}

size_t wshex_conversion_note_count(const wshex_conversion* conversion) {
  return conversion ? conversion->notes.size() : 0;
}

const char* wshex_conversion_note(const wshex_conversion* conversion, size_t index) {
  if (!conversion || index >= conversion->notes.size()) return nullptr;
  return conversion->notes[index].c_str();
}

size_t wshex_conversion_rejected_count(const wshex_conversion* conversion) {
  return conversion ? conversion->rejected.size() : 0;
}

const char* wshex_conversion_rejected(const wshex_conversion* conversion, size_t index) {
  if (!conversion || index >= conversion->rejected.size()) return nullptr;
  return conversion->rejected[index].c_str();
}

}  // extern "C"

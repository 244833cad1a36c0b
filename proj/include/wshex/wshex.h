#ifndef WSHEX_WSHEX_H
#define WSHEX_WSHEX_H

/*
 * C interface to the WShEx toolkit: schema parsing, Wikibase dump loading,
 * conformance checking and ShEx entity schema conversion.
 *
 * Objects are opaque handles released with their *_free function. Every
 * fallible call returns a wshex_status; on failure the message is available
 * from wshex_last_error_message() on the calling thread. Strings returned
 * through char** are heap allocated and released with wshex_string_free();
 * const char* results are owned by the handle they came from.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(WSHEX_BUILDING_LIBRARY)
#    define WSHEX_API __declspec(dllexport)
#  else
#    define WSHEX_API __declspec(dllimport)
#  endif
#else
#  define WSHEX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wshex_status {
  WSHEX_OK = 0,
  WSHEX_ERR_INVALID_ARGUMENT = 1,
  WSHEX_ERR_PARSE = 2,
  WSHEX_ERR_IO = 3,
  WSHEX_ERR_ENGINE_LIMIT = 4,
  WSHEX_ERR_MALFORMED_INPUT = 5,
  WSHEX_ERR_DUPLICATE_STATEMENT = 6,
  WSHEX_ERR_UNKNOWN_SHAPE = 7,
  WSHEX_ERR_UNSUPPORTED = 8,
  WSHEX_ERR_INTERNAL = 9
} wshex_status;

typedef enum wshex_verdict {
  WSHEX_CONFORMS = 0,
  WSHEX_FAILS = 1,
  WSHEX_ENGINE_LIMIT = 2
} wshex_verdict;

typedef enum wshex_format {
  WSHEX_FORMAT_TEXT = 0,
  WSHEX_FORMAT_JSON = 1
} wshex_format;

typedef struct wshex_schema wshex_schema;
typedef struct wshex_graph wshex_graph;
typedef struct wshex_report wshex_report;
typedef struct wshex_conversion wshex_conversion;

WSHEX_API const char* wshex_version(void);
WSHEX_API const char* wshex_status_name(wshex_status status);
WSHEX_API const char* wshex_last_error_message(void);
WSHEX_API void wshex_string_free(char* s);

/* Schemas. Parse failures return WSHEX_ERR_PARSE with one diagnostic per
 * line ("line:col: message") in the last error message. */
WSHEX_API wshex_status wshex_schema_parse(const char* text, size_t len, wshex_schema** out);
WSHEX_API wshex_status wshex_schema_parse_file(const char* path, wshex_schema** out);
WSHEX_API void wshex_schema_free(wshex_schema* schema);
WSHEX_API size_t wshex_schema_shape_count(const wshex_schema* schema);
WSHEX_API const char* wshex_schema_shape_label(const wshex_schema* schema, size_t index);
WSHEX_API wshex_status wshex_schema_summary(const wshex_schema* schema, char** out);
WSHEX_API wshex_status wshex_schema_render(const wshex_schema* schema, char** out);

/* Dump loading. */
typedef struct wshex_ingest_options {
  int strict;                /* abort on the first malformed line */
  int error_on_unsupported;  /* unknown datavalue types are errors instead of skipped */
  size_t max_line_bytes;     /* 0 = 256 MiB */
  unsigned jobs;             /* 0 = hardware concurrency */
} wshex_ingest_options;

typedef struct wshex_ingest_stats {
  uint64_t lines;
  uint64_t entities;
  uint64_t statements;
  uint64_t malformed_lines;
  uint64_t duplicate_entities;
  uint64_t duplicate_statements;
  uint64_t skipped_snaks;
  uint64_t unsupported_snaks;
  uint64_t references;
} wshex_ingest_stats;

WSHEX_API void wshex_ingest_options_init(wshex_ingest_options* options);
WSHEX_API wshex_status wshex_graph_load_file(const char* path, const wshex_ingest_options* options,
                                             wshex_graph** out, wshex_ingest_stats* stats);
WSHEX_API wshex_status wshex_graph_load_buffer(const char* data, size_t len, const wshex_ingest_options* options,
                                               wshex_graph** out, wshex_ingest_stats* stats);
/* The built-in Tim Berners-Lee example graph. */
WSHEX_API wshex_status wshex_graph_fixture(wshex_graph** out);
WSHEX_API void wshex_graph_free(wshex_graph* graph);
WSHEX_API size_t wshex_graph_statement_count(const wshex_graph* graph);
/* Entities that had their own document in the loaded dump, in input order. */
WSHEX_API size_t wshex_graph_document_count(const wshex_graph* graph);
WSHEX_API const char* wshex_graph_document_id(const wshex_graph* graph, size_t index);

/* Validation. */
typedef struct wshex_validate_options {
  int pedantic;          /* literal EachOfQs rule */
  uint64_t step_budget;  /* 0 = default */
  unsigned jobs;         /* 0 or 1 = sequential */
} wshex_validate_options;

WSHEX_API void wshex_validate_options_init(wshex_validate_options* options);

/* Targets are entity ids ("Q80"). Non-conformance is not an error: check
 * the verdicts in the report. */
WSHEX_API wshex_status wshex_validate(const wshex_graph* graph, const wshex_schema* schema, const char* shape,
                                      const char* const* targets, size_t target_count,
                                      const wshex_validate_options* options, wshex_report** out);
/* Every document entity of the graph against `shape`. */
WSHEX_API wshex_status wshex_validate_all(const wshex_graph* graph, const wshex_schema* schema, const char* shape,
                                          const wshex_validate_options* options, wshex_report** out);
WSHEX_API void wshex_report_free(wshex_report* report);
WSHEX_API size_t wshex_report_size(const wshex_report* report);
WSHEX_API const char* wshex_report_node(const wshex_report* report, size_t index);
WSHEX_API const char* wshex_report_shape(const wshex_report* report, size_t index);
WSHEX_API wshex_verdict wshex_report_verdict(const wshex_report* report, size_t index);
WSHEX_API const char* wshex_report_trace(const wshex_report* report, size_t index);
/* All entries, one line each. */
WSHEX_API wshex_status wshex_report_format(const wshex_report* report, wshex_format format, char** out);

/* Local (per-document) validation of a dump; `record` receives each result
 * in input order, `line` already formatted in `format`. */
typedef void (*wshex_record_fn)(void* user, const char* entity, wshex_verdict verdict, int approx,
                                const char* line);

WSHEX_API wshex_status wshex_stream_validate_file(const char* path, const wshex_schema* schema, const char* shape,
                                                  const wshex_ingest_options* ingest,
                                                  const wshex_validate_options* options, wshex_format format,
                                                  wshex_record_fn record, void* user, wshex_ingest_stats* stats);

/* ShEx entity schema conversion. */
WSHEX_API wshex_status wshex_convert(const char* text, size_t len, wshex_conversion** out);
WSHEX_API wshex_status wshex_convert_file(const char* path, wshex_conversion** out);
WSHEX_API void wshex_conversion_free(wshex_conversion* conversion);
WSHEX_API wshex_status wshex_conversion_render(const wshex_conversion* conversion, char** out);
WSHEX_API size_t wshex_conversion_note_count(const wshex_conversion* conversion);
WSHEX_API const char* wshex_conversion_note(const wshex_conversion* conversion, size_t index);
WSHEX_API size_t wshex_conversion_rejected_count(const wshex_conversion* conversion);
WSHEX_API const char* wshex_conversion_rejected(const wshex_conversion* conversion, size_t index);

#ifdef __cplusplus
}
#endif

#endif

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "wshex/wshex.h"

namespace {

std::string data(const char* name) { return std::string(WSHEX_TEST_DATA_DIR) + "/" + name; }

std::string take(char* s) {
  std::string out = s ? s : "";
  wshex_string_free(s);
  return out;
}

struct Handles {
  wshex_schema* schema = nullptr;
  wshex_graph* graph = nullptr;
  wshex_report* report = nullptr;
  ~Handles() {
    wshex_report_free(report);
    wshex_graph_free(graph);
    wshex_schema_free(schema);
  }
};

}  // namespace

TEST(CApi, ParseSummaryAndRender) {
  Handles h;
  ASSERT_EQ(wshex_schema_parse_file(data("listing2.wshex").c_str(), &h.schema), WSHEX_OK);
  EXPECT_EQ(wshex_schema_shape_count(h.schema), 5u);
  EXPECT_STREQ(wshex_schema_shape_label(h.schema, 0), "Researcher");
  EXPECT_EQ(wshex_schema_shape_label(h.schema, 99), nullptr);
  char* s = nullptr;
  ASSERT_EQ(wshex_schema_summary(h.schema, &s), WSHEX_OK);
  auto summary = take(s);
  EXPECT_EQ(summary.rfind("5 shapes\n", 0), 0u) << summary;
  ASSERT_EQ(wshex_schema_render(h.schema, &s), WSHEX_OK);
  auto text = take(s);
  wshex_schema* again = nullptr;
  ASSERT_EQ(wshex_schema_parse(text.data(), text.size(), &again), WSHEX_OK);
  EXPECT_EQ(wshex_schema_shape_count(again), 5u);
  wshex_schema_free(again);
}

TEST(CApi, ErrorsAreReported) {
  wshex_schema* s = nullptr;
  std::string bad = "<A> { :P1 Bogus }";
  EXPECT_EQ(wshex_schema_parse(bad.data(), bad.size(), &s), WSHEX_ERR_PARSE);
  EXPECT_EQ(s, nullptr);
  EXPECT_NE(std::string(wshex_last_error_message()).find("1:"), std::string::npos);
  EXPECT_EQ(wshex_schema_parse_file("/nonexistent/x.wshex", &s), WSHEX_ERR_IO);
  EXPECT_EQ(wshex_schema_parse(nullptr, 0, &s), WSHEX_ERR_INVALID_ARGUMENT);
  EXPECT_STREQ(wshex_status_name(WSHEX_ERR_ENGINE_LIMIT), "engine limit");
}

TEST(CApi, ValidateFixtureGraph) {
  Handles h;
  ASSERT_EQ(wshex_schema_parse_file(data("fixture.wshex").c_str(), &h.schema), WSHEX_OK);
  ASSERT_EQ(wshex_graph_fixture(&h.graph), WSHEX_OK);
  EXPECT_EQ(wshex_graph_statement_count(h.graph), 11u);
  const char* targets[] = {"Q145", "Q49145"};
  wshex_validate_options opts;
  wshex_validate_options_init(&opts);
  ASSERT_EQ(wshex_validate(h.graph, h.schema, "Place", targets, 2, &opts, &h.report), WSHEX_OK);
  ASSERT_EQ(wshex_report_size(h.report), 2u);
  EXPECT_EQ(wshex_report_verdict(h.report, 1), WSHEX_FAILS);
  EXPECT_STREQ(wshex_report_node(h.report, 1), "Q49145");
  EXPECT_STREQ(wshex_report_shape(h.report, 1), "Place");
  EXPECT_NE(std::string(wshex_report_trace(h.report, 1)).find("TripleConstraint"), std::string::npos);
  char* s = nullptr;
  ASSERT_EQ(wshex_report_format(h.report, WSHEX_FORMAT_TEXT, &s), WSHEX_OK);
  EXPECT_NE(take(s).find("Q49145@Place: FAILS"), std::string::npos);

  wshex_report* r = nullptr;
  const char* unknown[] = {"Q1"};
  EXPECT_EQ(wshex_validate(h.graph, h.schema, "Nope", unknown, 1, &opts, &r), WSHEX_ERR_UNKNOWN_SHAPE);
  const char* bad[] = {"X1"};
  EXPECT_EQ(wshex_validate(h.graph, h.schema, "Place", bad, 1, &opts, &r), WSHEX_ERR_INVALID_ARGUMENT);
}

TEST(CApi, EngineLimitVerdict) {
  Handles h;
  ASSERT_EQ(wshex_schema_parse_file(data("fixture.wshex").c_str(), &h.schema), WSHEX_OK);
  ASSERT_EQ(wshex_graph_fixture(&h.graph), WSHEX_OK);
  wshex_validate_options opts;
  wshex_validate_options_init(&opts);
  opts.step_budget = 1;
  ASSERT_EQ(wshex_validate_all(h.graph, h.schema, "Person", &opts, &h.report), WSHEX_OK);
  bool limited = false;
  for (size_t i = 0; i < wshex_report_size(h.report); ++i)
    limited |= wshex_report_verdict(h.report, i) == WSHEX_ENGINE_LIMIT;
  EXPECT_TRUE(limited);
}

TEST(CApi, LoadDumpAndStream) {
  Handles h;
  ASSERT_EQ(wshex_schema_parse_file(data("fixture.wshex").c_str(), &h.schema), WSHEX_OK);
  wshex_ingest_options io;
  wshex_ingest_options_init(&io);
  wshex_ingest_stats stats;
  ASSERT_EQ(wshex_graph_load_file(data("fixture.jsonl").c_str(), &io, &h.graph, &stats), WSHEX_OK);
  EXPECT_EQ(stats.entities, 5u);
  EXPECT_EQ(stats.statements, 11u);
  ASSERT_EQ(wshex_graph_document_count(h.graph), 5u);
  EXPECT_STREQ(wshex_graph_document_id(h.graph, 0), "Q80");

  struct Seen {
    std::vector<std::string> lines;
  } seen;
  wshex_validate_options vo;
  wshex_validate_options_init(&vo);
  auto cb = [](void* user, const char*, wshex_verdict, int, const char* line) {
    static_cast<Seen*>(user)->lines.emplace_back(line);
  };
  ASSERT_EQ(wshex_stream_validate_file(data("fixture.jsonl").c_str(), h.schema, "Place", &io, &vo, WSHEX_FORMAT_JSON,
                                       cb, &seen, &stats),
            WSHEX_OK);
  ASSERT_EQ(seen.lines.size(), 5u);
  EXPECT_EQ(seen.lines[1].front(), '{');

  std::string broken = "{nope\n";
  wshex_graph* g = nullptr;
  io.strict = 1;
  EXPECT_EQ(wshex_graph_load_buffer(broken.data(), broken.size(), &io, &g, &stats), WSHEX_ERR_MALFORMED_INPUT);
}

TEST(CApi, Conversion) {
  wshex_conversion* c = nullptr;
  ASSERT_EQ(wshex_convert_file(data("listing1.shex").c_str(), &c), WSHEX_OK);
  EXPECT_EQ(wshex_conversion_rejected_count(c), 0u);
  EXPECT_EQ(wshex_conversion_note_count(c), 3u);
  EXPECT_NE(std::string(wshex_conversion_note(c, 1)).find("Researcher: "), std::string::npos);
  char* s = nullptr;
  ASSERT_EQ(wshex_conversion_render(c, &s), WSHEX_OK);
  auto text = take(s);
  wshex_schema* parsed = nullptr;
  EXPECT_EQ(wshex_schema_parse(text.data(), text.size(), &parsed), WSHEX_OK);
  wshex_schema_free(parsed);
  wshex_conversion_free(c);

  ASSERT_EQ(wshex_convert_file(data("references.shex").c_str(), &c), WSHEX_OK);
  ASSERT_EQ(wshex_conversion_rejected_count(c), 1u);
  EXPECT_NE(std::string(wshex_conversion_rejected(c, 0)).find("(ReferencesUnsupported) at 9:3"), std::string::npos);
  wshex_conversion_free(c);

  EXPECT_EQ(wshex_convert_file(data("listing2.wshex").c_str(), &c), WSHEX_ERR_PARSE);
}

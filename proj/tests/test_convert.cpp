#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "support.hpp"
#include "wshex/convert.hpp"
#include "wshex/ingest.hpp"
#include "wshex/validator.hpp"

using namespace wshex;

namespace {

ConversionReport convert_text(std::string_view text) {
  auto parsed = parse_shexc_subset(text);
  EXPECT_TRUE(parsed.ok()) << (parsed.diagnostics.empty() ? "" : parsed.diagnostics.front().str());
  return parsed.ok() ? convert(*parsed.schema) : ConversionReport{};
}

const char* kPrefixes =
    "PREFIX wdt: <http://www.wikidata.org/prop/direct/>\n"
    "PREFIX p: <http://www.wikidata.org/prop/>\n"
    "PREFIX ps: <http://www.wikidata.org/prop/statement/>\n"
    "PREFIX pq: <http://www.wikidata.org/prop/qualifier/>\n"
    "PREFIX wd: <http://www.wikidata.org/entity/>\n"
    "PREFIX xsd: <http://www.w3.org/2001/XMLSchema#>\n"
    "PREFIX prov: <http://www.w3.org/ns/prov#>\n"
    "PREFIX wikibase: <http://wikiba.se/ontology#>\n";

struct Golden {
  std::string entity, shape, verdict;
};

std::vector<Golden> golden_verdicts() {
  std::vector<Golden> out;
  std::istringstream in(support::read_file("listing1_rdf_verdicts.tsv"));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    Golden g;
    fields >> g.entity >> g.shape >> g.verdict;
    out.push_back(g);
  }
  return out;
}

void expect_accounting(const ConversionReport& r) {
  std::size_t constraint_rejections = 0;
  for (const auto& rej : r.rejected) constraint_rejections += !rej.shape_level;
  EXPECT_EQ(r.input_constraints, r.mapped_constraints + constraint_rejections);
}

}  // namespace

TEST(ConvertResearcherShex, ProducesTheSourceFaithfulSchema) {
  auto r = convert_text(support::read_file("listing1.shex"));
  EXPECT_TRUE(r.rejected.empty());
  auto preserved = support::load_schema("listing2_preserved.wshex");
  EXPECT_EQ(desugar(r.converted), desugar(preserved));
  EXPECT_EQ(r.converted.labels(), preserved.labels());
  expect_accounting(r);
  EXPECT_EQ(r.input_constraints, 9u);
}

TEST(ConvertResearcherShex, RenderedOutputParses) {
  auto r = convert_text(support::read_file("listing1.shex"));
  auto reparsed = parse_schema(render_schema(r.converted));
  ASSERT_TRUE(reparsed.ok());
  EXPECT_EQ(desugar(*reparsed.schema), desugar(r.converted));
}

TEST(ConvertResearcherShex, NotesTheCardinalitiesItKeeps) {
  auto r = convert_text(support::read_file("listing1.shex"));
  bool together = false, award_country = false;
  for (const auto& n : r.notes) {
    if (n.shape == "Researcher" && n.message.find("pq:P1706") != std::string::npos) together = true;
    if (n.shape == "Award" && n.message.find("P17") != std::string::npos) award_country = true;
  }
  EXPECT_TRUE(together);
  EXPECT_TRUE(award_country);
}

TEST(ConvertResearcherShex, MatchesHandDerivedRdfVerdicts) {
  auto r = convert_text(support::read_file("listing1.shex"));
  auto hand = support::load_schema("listing2.wshex");
  std::istringstream in(support::read_file("researchers.jsonl"));
  auto loaded = load_graph(in);
  Validator converted(loaded.graph, r.converted);
  Validator listing2(loaded.graph, hand);
  auto golden = golden_verdicts();
  ASSERT_EQ(golden.size(), loaded.documents.size());
  for (const auto& g : golden) {
    auto id = *EntityId::parse(g.entity);
    bool expect = g.verdict == "conforms";
    EXPECT_EQ(converted.check(id, g.shape) == Verdict::Conforming, expect) << g.entity << "@" << g.shape;
    EXPECT_EQ(listing2.check(id, g.shape) == Verdict::Conforming, expect) << g.entity << "@" << g.shape;
  }
}

TEST(ConvertRejections, EachUnsupportedConstructIsReported) {
  std::string text = std::string(kPrefixes) +
                     "<S> CLOSED EXTRA wdt:P1 {\n"
                     "  wdt:P1 . ;\n"
                     "  p:P2 { ps:P2 . ; prov:wasDerivedFrom . } ;\n"
                     "  p:P3 { ps:P3 . ; wikibase:rank . } ;\n"
                     "  wdt:P4 xsd:gYear ;\n"
                     "  p:P5 . ;\n"
                     "  p:P6 { ps:P7 . } ;\n"
                     "  p:P8 { pq:P9 . } ;\n"
                     "  wdt:P10 { wdt:P11 . } ;\n"
                     "  ps:P12 . ;\n"
                     "  wdt:P13 . %{ code %}\n"
                     "}\n";
  auto r = convert_text(text);
  std::multiset<std::string> reasons;
  for (const auto& rej : r.rejected) reasons.insert(rej.reason);
  for (const char* reason :
       {"ClosedUnsupported", "ExtraUnsupported", "ReferencesUnsupported", "RanksUnsupported", "UnsupportedDatatype",
        "StatementNodeUnsupported", "MismatchedStatementProperty", "MissingStatementValue", "NestedShapeUnsupported",
        "StatementPatternOutsideBlock", "SemanticActionsUnsupported"})
    EXPECT_TRUE(reasons.contains(reason)) << reason;
  expect_accounting(r);
  EXPECT_EQ(r.mapped_constraints, 1u);
  // Shape-level rejections leave an open shape behind.
  EXPECT_FALSE(std::get<Shape>(r.converted.find("S")->node).closed);
  for (const auto& rej : r.rejected) {
    EXPECT_GE(rej.position.line, 1u);
    EXPECT_FALSE(rej.constraint.empty());
  }
}

TEST(ConvertRejections, ReferencesRejectTheWholeBlock) {
  auto r = convert_text(support::read_file("references.shex"));
  ASSERT_EQ(r.rejected.size(), 1u);
  EXPECT_EQ(r.rejected[0].reason, "ReferencesUnsupported");
  EXPECT_EQ(r.rejected[0].position.line, 9u);
  EXPECT_EQ(count_triple_constraints(*std::get<Shape>(r.converted.find("Human")->node).expr), 1u);
  expect_accounting(r);
}

TEST(ConvertMerge, NotesValueAndCardinalityDisagreements) {
  std::string text = std::string(kPrefixes) +
                     "<S> {\n"
                     "  wdt:P1 @<T> ? ;\n"
                     "  p:P1 { ps:P1 . ; pq:P2 xsd:string } *\n"
                     "}\n<T> {}\n";
  auto r = convert_text(text);
  ASSERT_EQ(r.notes.size(), 2u);
  EXPECT_NE(r.notes[0].message.find("differ"), std::string::npos);
  EXPECT_NE(r.notes[1].message.find("cardinality"), std::string::npos);
  auto expected = shape(repeat(tc(EntityId::property(1), any_value(),
                                  open_qs(prop_qs(EntityId::property(2), datatype(Datatype::String)))),
                               Cardinality::star()));
  EXPECT_EQ(desugar(*r.converted.find("S")), desugar(expected));
}

TEST(ConvertParse, RejectsWShExInput) {
  EXPECT_FALSE(parse_shexc_subset(support::read_file("listing2.wshex")).ok());
  EXPECT_FALSE(parse_shexc_subset(std::string(kPrefixes) + "<S> { wdt:P1 . {| wdt:P2 . |} }").ok());
}

TEST(ConvertParse, NamespacesAreClassifiedByIri) {
  auto parsed = parse_shexc_subset(
      "PREFIX direct: <http://www.wikidata.org/prop/direct/>\n"
      "PREFIX e: <http://www.wikidata.org/entity/>\n"
      "<S> { direct:P31 [ e:Q5 ] }\n");
  ASSERT_TRUE(parsed.ok());
  auto r = convert(*parsed.schema);
  EXPECT_TRUE(r.rejected.empty());
  EXPECT_EQ(*r.converted.find("S"), shape(tc(EntityId::property(31), value_set({EntityId::item(5)}))));
}

TEST(ConvertIdempotence, RenderParseIsStable) {
  auto r = convert_text(support::read_file("listing1.shex"));
  auto once = render_schema(r.converted);
  auto twice = render_schema(*parse_schema(once).schema);
  EXPECT_EQ(once, twice);
}

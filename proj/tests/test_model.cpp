#include <gtest/gtest.h>

#include <set>

#include "generators.hpp"
#include "wshex/error.hpp"
#include "wshex/model.hpp"

using namespace wshex;
using namespace wshex::fixture;

TEST(EntityIdTest, ParsesItemsAndProperties) {
  EXPECT_EQ(EntityId::parse("Q42"), EntityId::item(42));
  EXPECT_EQ(EntityId::parse("P31"), EntityId::property(31));
  EXPECT_FALSE(EntityId::parse("Q0"));
  EXPECT_FALSE(EntityId::parse("X1"));
  EXPECT_FALSE(EntityId::parse("Q"));
  EXPECT_FALSE(EntityId::parse("Q12a"));
  EXPECT_EQ(EntityId::item(80).str(), "Q80");
}

TEST(DataValueTest, EqualityUsesTypeAndLexicalForm) {
  EXPECT_EQ(DataValue::year(1955), DataValue::year(1955));
  EXPECT_NE(DataValue::year(1955), DataValue::year(1956));
  EXPECT_NE(DataValue::string("1955"), DataValue(Datatype::ExternalIdentifier, "1955"));
  EXPECT_NE(DataValue::monolingual("x", "en"), DataValue::monolingual("x", "fr"));
  EXPECT_THROW(DataValue(Datatype::String, ""), Error);
  EXPECT_THROW(DataValue(Datatype::String, "x", TimeValue{"+1", 9}), Error);
}

TEST(DatatypeTest, NamesRoundTrip) {
  for (auto d : all_datatypes()) EXPECT_EQ(datatype_from_name(datatype_name(d)), d);
  EXPECT_FALSE(datatype_from_name("Bogus"));
}

TEST(FixtureGraphTest, HasElevenStatements) {
  auto g = load_fixture_graph();
  EXPECT_EQ(g.statements().size(), 11u);
  EXPECT_EQ(g.properties().size(), 10u);
}

TEST(FixtureGraphTest, KeepsBothEmployerStatements) {
  auto g = load_fixture_graph();
  int employers = 0;
  for (const auto& st : g.neighs(timBl))
    if (st.property == employer) {
      ++employers;
      EXPECT_EQ(st.value, Value(CERN));
    }
  EXPECT_EQ(employers, 2);
}

TEST(FixtureGraphTest, NeighsPartitionTheStatements) {
  auto g = load_fixture_graph();
  std::size_t total = 0;
  for (const auto& n : g.items()) {
    for (const auto& st : g.neighs(n)) EXPECT_EQ(st.subject, n);
    total += g.neighs(n).size();
  }
  EXPECT_EQ(total, g.statements().size());
  EXPECT_TRUE(g.neighs(EntityId::item(999)).empty());
}

TEST(WikibaseGraphTest, RejectsDuplicateIds) {
  WikibaseGraph g;
  g.add_statement({"s1", EntityId::item(1), EntityId::property(2), EntityId::item(3), {}, Rank::Normal});
  try {
    g.add_statement({"s1", EntityId::item(4), EntityId::property(2), EntityId::item(3), {}, Rank::Normal});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DuplicateStatementId);
  }
  EXPECT_THROW(g.add_statement({"s2", EntityId::item(1), EntityId::item(2), EntityId::item(3), {}, Rank::Normal}),
               Error);
}

TEST(WikibaseGraphTest, EntityClosureOverRandomInsertions) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    gen::Generator g(seed);
    auto graph = g.graph();
    for (const auto& st : graph.statements()) {
      EXPECT_TRUE(graph.contains_entity(st.subject));
      EXPECT_TRUE(graph.contains_entity(st.property));
      if (auto* e = as_entity(st.value)) {
        EXPECT_TRUE(graph.contains_entity(*e));
      }
      for (const auto& q : st.qualifiers) {
        EXPECT_TRUE(graph.contains_entity(q.property));
        if (auto* e = as_entity(q.value)) {
          EXPECT_TRUE(graph.contains_entity(*e));
        }
      }
    }
  }
}

TEST(QualifierTest, NormalizeSortsAndDedupes) {
  std::vector<Qualifier> qs{{end, DataValue::year(2)}, {start, DataValue::year(1)}, {end, DataValue::year(2)}};
  normalize_qualifiers(qs);
  ASSERT_EQ(qs.size(), 2u);
  EXPECT_EQ(qs[0].property, start);
  EXPECT_EQ(qs[1].property, end);
}

#include <gtest/gtest.h>

#include <algorithm>

#include "generators.hpp"
#include "oracle.hpp"
#include "support.hpp"
#include "wshex/error.hpp"
#include "wshex/validator.hpp"

using namespace wshex;
using namespace wshex::fixture;

namespace {

bool has_rule(const Trace& t, const std::string& rule, const std::string& detail_part = "") {
  return std::any_of(t.begin(), t.end(), [&](const TraceStep& s) {
    return s.rule == rule && s.detail.find(detail_part) != std::string::npos;
  });
}

}  // namespace

TEST(FixtureValidation, MatrixMatchesOracle) {
  auto g = load_fixture_graph();
  auto schema = support::load_schema("fixture.wshex");
  oracle::Oracle o(g, schema);
  Validator v(g, schema);
  for (const auto& c : support::fixture_matrix()) {
    EXPECT_EQ(o.conforms(c.node, c.label), c.conforms) << c.node.str() << "@" << c.label;
    EXPECT_EQ(v.check(c.node, c.label) == Verdict::Conforming, c.conforms) << c.node.str() << "@" << c.label;
  }
}

TEST(FixtureValidation, VariantAcceptsTimBl) {
  auto g = load_fixture_graph();
  auto schema = support::load_schema("fixture_variant.wshex");
  Validator v(g, schema);
  EXPECT_EQ(v.check(timBl, "Person"), Verdict::Conforming);
  EXPECT_TRUE(oracle::Oracle(g, schema).conforms(timBl, "Person"));
  // The literal EachOfQs rule cannot accept start and end together.
  ValidatorOptions pedantic;
  pedantic.pedantic = true;
  Validator literal(g, schema, pedantic);
  EXPECT_EQ(literal.check(timBl, "Person"), Verdict::NonConforming);
  EXPECT_FALSE(oracle::Oracle(g, schema, true).conforms(timBl, "Person"));
}

TEST(FixtureValidation, TracesPointAtTheCause) {
  auto g = load_fixture_graph();
  auto schema = support::load_schema("fixture.wshex");
  Validator v(g, schema);
  auto newhaven = v.explain(NewHaven, "Place");
  EXPECT_TRUE(has_rule(newhaven, "OpenShape"));
  EXPECT_TRUE(has_rule(newhaven, "TripleConstraint", ":P27 expects exactly one matching statement, found 0"));

  auto tim = v.explain(timBl, "Person");
  EXPECT_TRUE(has_rule(tim, "TripleConstraint", "P166"));
  EXPECT_TRUE(has_rule(tim, "Ref", "@<Person> on Q92743"));

  EXPECT_TRUE(v.explain(UK, "Country").empty());
}

TEST(FixtureValidation, ConformingPairsAreAModel) {
  auto g = load_fixture_graph();
  auto schema = support::load_schema("fixture.wshex");
  Validator v(g, schema);
  for (const auto& c : support::fixture_matrix()) v.check(c.node, c.label);
  auto pairs = v.conforming_pairs();
  EXPECT_FALSE(pairs.empty());
  for (const auto& p : pairs) EXPECT_TRUE(v.holds_under_typing(p.node, p.label)) << value_key(p.node) << p.label;
}

TEST(FixtureValidation, ParallelEqualsSequential) {
  auto g = load_fixture_graph();
  auto schema = support::load_schema("fixture.wshex");
  std::vector<Target> targets;
  for (int rep = 0; rep < 5; ++rep)
    for (const auto& c : support::fixture_matrix()) targets.push_back({c.node, c.label});
  auto seq = validate(g, schema, targets);
  for (unsigned jobs : {2u, 3u, 8u}) {
    auto par = validate_parallel(g, schema, targets, {}, jobs);
    ASSERT_EQ(par.entries.size(), seq.entries.size());
    for (std::size_t i = 0; i < seq.entries.size(); ++i) {
      EXPECT_EQ(par.entries[i].node, seq.entries[i].node);
      EXPECT_EQ(par.entries[i].verdict, seq.entries[i].verdict);
      EXPECT_EQ(par.entries[i].trace, seq.entries[i].trace);
    }
  }
}

TEST(ValidatorErrors, UnknownShapeAndIllFormedSchema) {
  auto g = load_fixture_graph();
  auto schema = support::load_schema("fixture.wshex");
  Validator v(g, schema);
  try {
    v.check(timBl, "Nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownShape);
  }
  std::vector<Target> t{{timBl, "Nope"}};
  EXPECT_THROW(validate(g, schema, t), Error);

  Schema bad;
  bad.define("A", shape(tc(instanceOf, ref("Missing"))));
  EXPECT_THROW(Validator(g, bad), Error);
}

TEST(ValidatorBudget, TinyBudgetReportsEngineLimit) {
  WikibaseGraph g;
  auto focus = EntityId::item(1);
  for (int i = 0; i < 20; ++i)
    g.add_statement({"s" + std::to_string(i), focus, EntityId::property(1), DataValue::year(2000 + i), {},
                     Rank::Normal});
  Schema s;
  auto p1 = EntityId::property(1);
  s.define("S", shape(star(one_of(tc(p1, any_value()), one_of(tc(p1, datatype(Datatype::Time)),
                                                               each_of(tc(p1, any_value()), tc(p1, any_value())))))));
  ValidatorOptions tiny;
  tiny.step_budget = 1;
  Validator limited(g, s, tiny);
  EXPECT_EQ(limited.check(focus, "S"), Verdict::EngineLimit);
  EXPECT_EQ(limited.explain(focus, "S").front().rule, "EngineLimit");

  Validator normal(g, s);
  EXPECT_EQ(normal.check(focus, "S"), Verdict::Conforming);
}

TEST(ValidatorLocal, ApproximatesOtherEntities) {
  auto g = load_fixture_graph();
  auto schema = support::load_schema("fixture.wshex");
  Validator v(g, schema);
  // Locally timBl's references are accepted without looking at them.
  auto r = v.check_local(timBl, "Person");
  EXPECT_EQ(r.verdict, Verdict::Conforming);
  EXPECT_TRUE(r.approx);
  auto nh = v.check_local(NewHaven, "Place");
  EXPECT_EQ(nh.verdict, Verdict::NonConforming);
  EXPECT_FALSE(nh.approx);
  // Data values are still checked exactly.
  Schema strict;
  strict.define("P", shape(tc(birthDate, ref("S"))));
  strict.define("S", datatype(Datatype::String));
  Validator sv(g, strict);
  EXPECT_EQ(sv.check_local(timBl, "P").verdict, Verdict::NonConforming);
}

TEST(OracleSweep, RandomPairsAgree) {
  int compared = 0, accepted = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    gen::Generator g(seed);
    auto schema = g.schema();
    auto graph = g.graph();
    oracle::Oracle o(graph, schema);
    Validator v(graph, schema);
    for (const auto& item : graph.items())
      for (const auto& l : schema.labels()) {
        bool expect = o.conforms(item, l);
        ASSERT_EQ(v.check(item, l) == Verdict::Conforming, expect)
            << "seed " << seed << " " << item.str() << "@" << l << "\n"
            << render_schema(schema);
        ++compared;
        accepted += expect;
      }
  }
  // Both verdicts must be well represented for the comparison to mean anything.
  EXPECT_GT(accepted, compared / 10) << accepted << "/" << compared;
  EXPECT_LT(accepted, compared * 9 / 10) << accepted << "/" << compared;
}

TEST(OracleSweep, PedanticAgrees) {
  for (std::uint64_t seed = 500; seed < 560; ++seed) {
    gen::Generator g(seed);
    auto schema = g.schema();
    auto graph = g.graph();
    oracle::Oracle o(graph, schema, true);
    ValidatorOptions opts;
    opts.pedantic = true;
    Validator v(graph, schema, opts);
    for (const auto& item : graph.items())
      for (const auto& l : schema.labels())
        ASSERT_EQ(v.check(item, l) == Verdict::Conforming, o.conforms(item, l))
            << "seed " << seed << " " << item.str() << "@" << l << "\n"
            << render_schema(schema);
  }
}

TEST(OracleSweep, RichSchemasAgree) {
  gen::Limits lim;
  lim.rich = true;
  for (std::uint64_t seed = 2000; seed < 2060; ++seed) {
    gen::Generator g(seed, lim);
    auto schema = g.schema();
    auto graph = g.graph();
    oracle::Oracle o(graph, schema);
    Validator v(graph, schema);
    for (const auto& item : graph.items())
      for (const auto& l : schema.labels())
        ASSERT_EQ(v.check(item, l) == Verdict::Conforming, o.conforms(item, l))
            << "seed " << seed << " " << item.str() << "@" << l << "\n"
            << render_schema(schema);
  }
}

#pragma once

// Random schemas and graphs for property tests. Everything is drawn from a
// small vocabulary so that references, predicates and values collide often.

#include <random>
#include <string>
#include <vector>

#include "wshex/ast.hpp"
#include "wshex/model.hpp"

namespace gen {

using namespace wshex;

struct Limits {
  int labels = 4;
  int max_tcs = 6;         // per shape
  int predicates = 4;      // P1..Pn
  int qualifier_props = 3;  // P(n+1)..
  int items = 5;           // Q1..Qn
  int max_statements = 8;  // per node
  int max_qualifiers = 4;  // per statement
  bool surface = true;     // allow ?, +, {m,n}
  bool rich = false;       // AND, nested shapes and node-constraint definitions
};

class Generator {
 public:
  explicit Generator(std::uint64_t seed, Limits limits = {}) : rng_(seed), lim_(limits) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::string label(int i) const { return "L" + std::to_string(i); }
  EntityId pred(int i) const { return EntityId::property(i); }
  EntityId qprop(int i) const { return EntityId::property(lim_.predicates + i); }

  Value random_value() {
    switch (uniform(0, 3)) {
      case 0: return DataValue::year(2000 + uniform(0, 2));
      case 1: return DataValue::string(std::string(1, static_cast<char>('a' + uniform(0, 2))));
      default: return EntityId::item(static_cast<std::uint64_t>(uniform(1, lim_.items)));
    }
  }

  ShapeExpr value_expr(int depth) {
    int k = uniform(0, 9);
    if (k <= 4) return ref(label(uniform(0, lim_.labels - 1)));
    if (k == 5) {
      static const Datatype types[] = {Datatype::Item, Datatype::Time, Datatype::String};
      return datatype(types[uniform(0, 2)]);
    }
    if (k == 6) {
      std::vector<Value> vs;
      int n = uniform(1, 3);
      for (int i = 0; i < n; ++i) vs.push_back(random_value());
      return value_set(std::move(vs));
    }
    if (k == 7 && lim_.rich && depth < 2) {
      int budget = 2;
      return shape(triple_expr(budget, depth + 1), chance(0.3));
    }
    if (k == 8 && lim_.rich) return shape_and(ref(label(uniform(0, lim_.labels - 1))), value_expr(depth + 1));
    return any_value();
  }

  Cardinality card() {
    switch (uniform(0, 4)) {
      case 0: return Cardinality::optional();
      case 1: return Cardinality::plus();
      case 2: return Cardinality::star();
      default: {
        unsigned lo = static_cast<unsigned>(uniform(0, 2));
        return Cardinality::range(lo, chance(0.2) ? std::nullopt : std::optional<unsigned>(lo + uniform(0, 1)));
      }
    }
  }

  PropertySpec prop_spec(int& budget, int depth) {
    int k = depth > 2 || budget <= 1 ? uniform(0, 1) : uniform(0, 6);
    if (k == 0 || budget <= 0) {
      if (budget <= 0) return empty_qs();
      --budget;
      ShapeExpr v = chance(0.5) ? value_expr(2) : any_value();
      return prop_qs(qprop(uniform(1, lim_.qualifier_props)), v);
    }
    switch (k) {
      case 1: return empty_qs();
      case 2: return each_of_qs(prop_spec(budget, depth + 1), prop_spec(budget, depth + 1));
      case 3: return one_of_qs(prop_spec(budget, depth + 1), prop_spec(budget, depth + 1));
      case 4: return star_qs(prop_spec(budget, depth + 1));
      default: {
        auto inner = prop_spec(budget, depth + 1);
        if (!lim_.surface) return star_qs(inner);
        return repeat_qs(inner, card());
      }
    }
  }

  QualifierSpec qualifier_spec() {
    if (chance(0.5)) return open_qs(empty_qs());
    int budget = uniform(1, 3);
    auto body = prop_spec(budget, 0);
    return chance(0.6) ? open_qs(body) : closed_qs(body);
  }

  TripleExpr triple_expr(int& budget, int depth) {
    int k = depth > 3 || budget <= 1 ? 0 : uniform(0, 5);
    if (budget <= 0) return empty_triple();
    switch (k) {
      case 0: {
        --budget;
        auto v = value_expr(depth);
        auto q = qualifier_spec();
        return tc(pred(uniform(1, lim_.predicates)), v, q);
      }
      case 1: return one_of(triple_expr(budget, depth + 1), triple_expr(budget, depth + 1));
      case 2: return star(triple_expr(budget, depth + 1));
      case 3: {
        auto inner = triple_expr(budget, depth + 1);
        if (!lim_.surface) return star(inner);
        return repeat(inner, card());
      }
      default: return each_of(triple_expr(budget, depth + 1), triple_expr(budget, depth + 1));
    }
  }

  Schema schema() {
    Schema s;
    for (int i = 0; i < lim_.labels; ++i) {
      if (lim_.rich && chance(0.15)) {
        s.define(label(i), chance(0.5) ? datatype(Datatype::Item) : value_set({random_value(), random_value()}));
        continue;
      }
      int budget = uniform(0, lim_.max_tcs);
      auto te = budget == 0 ? empty_triple() : triple_expr(budget, 0);
      auto body = shape(te, chance(0.25));
      if (lim_.rich && chance(0.2)) body = shape_and(body, ref(label(uniform(0, lim_.labels - 1))));
      s.define(label(i), body);
    }
    return s;
  }

  std::vector<Qualifier> qualifiers() {
    std::vector<Qualifier> qs;
    int n = uniform(0, lim_.max_qualifiers);
    for (int i = 0; i < n; ++i) qs.push_back({qprop(uniform(1, lim_.qualifier_props)), random_value()});
    normalize_qualifiers(qs);
    return qs;
  }

  WikibaseGraph graph() {
    WikibaseGraph g;
    int next = 0;
    for (int q = 1; q <= lim_.items; ++q) {
      int n = uniform(0, lim_.max_statements);
      for (int i = 0; i < n; ++i) {
        Statement st;
        st.id = "S" + std::to_string(next++);
        st.subject = EntityId::item(static_cast<std::uint64_t>(q));
        st.property = pred(uniform(1, lim_.predicates));
        st.value = random_value();
        st.qualifiers = qualifiers();
        g.add_statement(std::move(st));
      }
    }
    // Items that are only ever mentioned as values still exist as nodes.
    for (int q = 1; q <= lim_.items; ++q)
      if (!g.contains_entity(EntityId::item(static_cast<std::uint64_t>(q))))
        g.add_statement({"S" + std::to_string(next++), EntityId::item(static_cast<std::uint64_t>(q)),
                         pred(lim_.predicates + lim_.qualifier_props + 1), DataValue::string("x"), {}, Rank::Normal});
    return g;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
  Limits lim_;
};

}  // namespace gen

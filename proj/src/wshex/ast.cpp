#include "wshex/ast.hpp"

#include "wshex/error.hpp"

namespace wshex {

namespace {
template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
}  // namespace

std::string Cardinality::str() const {
  if (is_exactly_one()) return "";
  if (min == 0 && max == 1u) return "?";
  if (min == 0 && !max) return "*";
  if (min == 1 && !max) return "+";
  if (max && *max == min) return "{" + std::to_string(min) + "}";
  return "{" + std::to_string(min) + "," + (max ? std::to_string(*max) : "*") + "}";
}

ShapeExpr cond(NodeConstraint c) { return ShapeExpr{std::move(c)}; }
ShapeExpr value_set(std::vector<Value> values) { return cond(ValueSetCond{std::move(values)}); }
ShapeExpr datatype(Datatype type) { return cond(DatatypeCond{type}); }
ShapeExpr any_value() { return cond(AnyValueCond{}); }
ShapeExpr ref(std::string label) { return ShapeExpr{ShapeRef{std::move(label)}}; }
ShapeExpr shape_and(ShapeExpr lhs, ShapeExpr rhs) {
  return ShapeExpr{ShapeAnd{std::move(lhs), std::move(rhs)}};
}
ShapeExpr shape(TripleExpr expr, bool closed) { return ShapeExpr{Shape{closed, std::move(expr)}}; }

TripleExpr each_of(TripleExpr lhs, TripleExpr rhs) {
  return TripleExpr{EachOf{std::move(lhs), std::move(rhs)}};
}
TripleExpr one_of(TripleExpr lhs, TripleExpr rhs) {
  return TripleExpr{OneOf{std::move(lhs), std::move(rhs)}};
}
TripleExpr star(TripleExpr expr) { return TripleExpr{Star{std::move(expr)}}; }
TripleExpr empty_triple() { return TripleExpr{EmptyTriple{}}; }
TripleExpr repeat(TripleExpr expr, Cardinality card) { return TripleExpr{Repeat{std::move(expr), card}}; }
TripleExpr tc(EntityId predicate, ShapeExpr value, QualifierSpec qs) {
  return TripleExpr{TripleConstraint{predicate, std::move(value), std::move(qs)}};
}
TripleExpr tc(EntityId predicate, ShapeExpr value) {
  return tc(predicate, std::move(value), open_qs(empty_qs()));
}

QualifierSpec open_qs(PropertySpec body) { return QualifierSpec{Openness::Open, std::move(body)}; }
QualifierSpec closed_qs(PropertySpec body) { return QualifierSpec{Openness::Closed, std::move(body)}; }
PropertySpec each_of_qs(PropertySpec lhs, PropertySpec rhs) {
  return PropertySpec{EachOfQs{std::move(lhs), std::move(rhs)}};
}
PropertySpec one_of_qs(PropertySpec lhs, PropertySpec rhs) {
  return PropertySpec{OneOfQs{std::move(lhs), std::move(rhs)}};
}
PropertySpec star_qs(PropertySpec spec) { return PropertySpec{StarQs{std::move(spec)}}; }
PropertySpec empty_qs() { return PropertySpec{EmptyQs{}}; }
PropertySpec repeat_qs(PropertySpec spec, Cardinality card) {
  return PropertySpec{RepeatQs{std::move(spec), card}};
}
PropertySpec prop_qs(EntityId property, ShapeExpr value) {
  return PropertySpec{PropQs{property, std::move(value)}};
}

void Schema::define(std::string label, ShapeExpr def) {
  if (defs_.contains(label)) throw Error(ErrorCode::InvalidArgument, "duplicate shape label <" + label + ">");
  order_.push_back(label);
  defs_.emplace(std::move(label), std::move(def));
}

const ShapeExpr* Schema::find(std::string_view label) const {
  auto it = defs_.find(label);
  return it == defs_.end() ? nullptr : &it->second;
}

namespace {

void collect_preds(const TripleExpr& te, std::set<EntityId>& out) {
  std::visit(overloaded{
                 [&](const EachOf& e) { collect_preds(*e.lhs, out), collect_preds(*e.rhs, out); },
                 [&](const OneOf& e) { collect_preds(*e.lhs, out), collect_preds(*e.rhs, out); },
                 [&](const Star& e) { collect_preds(*e.expr, out); },
                 [&](const Repeat& e) { collect_preds(*e.expr, out); },
                 [&](const TripleConstraint& t) { out.insert(t.predicate); },
                 [](const EmptyTriple&) {},
             },
             te.node);
}

void collect_preds(const PropertySpec& ps, std::set<EntityId>& out) {
  std::visit(overloaded{
                 [&](const EachOfQs& e) { collect_preds(*e.lhs, out), collect_preds(*e.rhs, out); },
                 [&](const OneOfQs& e) { collect_preds(*e.lhs, out), collect_preds(*e.rhs, out); },
                 [&](const StarQs& e) { collect_preds(*e.spec, out); },
                 [&](const RepeatQs& e) { collect_preds(*e.spec, out); },
                 [&](const PropQs& p) { out.insert(p.property); },
                 [](const EmptyQs&) {},
             },
             ps.node);
}

void check_range(const Cardinality& c) {
  if (c.max && c.min > *c.max)
    throw Error(ErrorCode::RangeError, "cardinality {" + std::to_string(c.min) + "," +
                                           std::to_string(*c.max) + "} has min > max");
}

// Same predicates as x, but no constraint accepts a value: matches at most
// the empty bag. Used for {0,0} so the predicates stay visible to OpenShape.
TripleExpr never(const TripleExpr& te) {
  return std::visit(overloaded{
                        [](const EachOf& e) { return each_of(never(*e.lhs), never(*e.rhs)); },
                        [](const OneOf& e) { return one_of(never(*e.lhs), never(*e.rhs)); },
                        [](const Star& e) { return star(never(*e.expr)); },
                        [](const Repeat& e) { return never(*e.expr); },
                        [](const TripleConstraint& t) { return tc(t.predicate, value_set({}), t.qualifiers); },
                        [](const EmptyTriple&) { return empty_triple(); },
                    },
                    te.node);
}

PropertySpec never(const PropertySpec& ps) {
  return std::visit(overloaded{
                        [](const EachOfQs& e) { return each_of_qs(never(*e.lhs), never(*e.rhs)); },
                        [](const OneOfQs& e) { return one_of_qs(never(*e.lhs), never(*e.rhs)); },
                        [](const StarQs& e) { return star_qs(never(*e.spec)); },
                        [](const RepeatQs& e) { return never(*e.spec); },
                        [](const PropQs& p) { return prop_qs(p.property, value_set({})); },
                        [](const EmptyQs&) { return empty_qs(); },
                    },
                    ps.node);
}

template <class Expr, class EachFn, class OptFn, class StarFn, class ZeroFn>
Expr expand(const Expr& x, const Cardinality& c, EachFn each, OptFn opt, StarFn star_of, ZeroFn zero) {
  check_range(c);
  std::vector<Expr> parts(c.min, x);
  if (!c.max) {
    parts.push_back(star_of(x));
  } else {
    for (unsigned i = c.min; i < *c.max; ++i) parts.push_back(opt(x));
  }
  if (parts.empty()) return zero(x);
  Expr acc = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = each(parts[i], acc);
  return acc;
}

QualifierSpec desugar(const QualifierSpec& qs) { return QualifierSpec{qs.openness, desugar(*qs.body)}; }

}  // namespace

std::set<EntityId> preds(const TripleExpr& te) {
  std::set<EntityId> out;
  collect_preds(te, out);
  return out;
}

std::set<EntityId> preds(const PropertySpec& ps) {
  std::set<EntityId> out;
  collect_preds(ps, out);
  return out;
}

TripleExpr desugar(const TripleExpr& te) {
  return std::visit(
      overloaded{
          [](const EachOf& e) { return each_of(desugar(*e.lhs), desugar(*e.rhs)); },
          [](const OneOf& e) { return one_of(desugar(*e.lhs), desugar(*e.rhs)); },
          [](const Star& e) { return star(desugar(*e.expr)); },
          [](const Repeat& e) {
            return expand<TripleExpr>(
                desugar(*e.expr), e.card, each_of,
                [](const TripleExpr& x) { return one_of(x, empty_triple()); }, star,
                [](const TripleExpr& x) { return one_of(empty_triple(), never(x)); });
          },
          [](const TripleConstraint& t) {
            return tc(t.predicate, desugar(*t.value), desugar(t.qualifiers));
          },
          [](const EmptyTriple&) { return empty_triple(); },
      },
      te.node);
}

PropertySpec desugar(const PropertySpec& ps) {
  return std::visit(
      overloaded{
          [](const EachOfQs& e) { return each_of_qs(desugar(*e.lhs), desugar(*e.rhs)); },
          [](const OneOfQs& e) { return one_of_qs(desugar(*e.lhs), desugar(*e.rhs)); },
          [](const StarQs& e) { return star_qs(desugar(*e.spec)); },
          [](const RepeatQs& e) {
            return expand<PropertySpec>(
                desugar(*e.spec), e.card, each_of_qs,
                [](const PropertySpec& x) { return one_of_qs(x, empty_qs()); }, star_qs,
                [](const PropertySpec& x) { return one_of_qs(empty_qs(), never(x)); });
          },
          [](const PropQs& p) { return prop_qs(p.property, desugar(*p.value)); },
          [](const EmptyQs&) { return empty_qs(); },
      },
      ps.node);
}

ShapeExpr desugar(const ShapeExpr& se) {
  return std::visit(overloaded{
                        [](const NodeConstraint& c) { return cond(c); },
                        [](const ShapeAnd& a) { return shape_and(desugar(*a.lhs), desugar(*a.rhs)); },
                        [](const ShapeRef& r) { return ref(r.label); },
                        [](const Shape& s) { return shape(desugar(*s.expr), s.closed); },
                    },
                    se.node);
}

Schema desugar(const Schema& schema) {
  Schema out;
  out.prefixes = schema.prefixes;
  for (const auto& label : schema.labels()) out.define(label, desugar(*schema.find(label)));
  return out;
}

bool is_core(const TripleExpr& te) {
  return std::visit(overloaded{
                        [](const EachOf& e) { return is_core(*e.lhs) && is_core(*e.rhs); },
                        [](const OneOf& e) { return is_core(*e.lhs) && is_core(*e.rhs); },
                        [](const Star& e) { return is_core(*e.expr); },
                        [](const Repeat&) { return false; },
                        [](const TripleConstraint& t) { return is_core(*t.qualifiers.body); },
                        [](const EmptyTriple&) { return true; },
                    },
                    te.node);
}

bool is_core(const PropertySpec& ps) {
  return std::visit(overloaded{
                        [](const EachOfQs& e) { return is_core(*e.lhs) && is_core(*e.rhs); },
                        [](const OneOfQs& e) { return is_core(*e.lhs) && is_core(*e.rhs); },
                        [](const StarQs& e) { return is_core(*e.spec); },
                        [](const RepeatQs&) { return false; },
                        [](const PropQs&) { return true; },
                        [](const EmptyQs&) { return true; },
                    },
                    ps.node);
}

std::size_t count_triple_constraints(const TripleExpr& te) {
  return std::visit(overloaded{
                        [](const EachOf& e) {
                          return count_triple_constraints(*e.lhs) + count_triple_constraints(*e.rhs);
                        },
                        [](const OneOf& e) {
                          return count_triple_constraints(*e.lhs) + count_triple_constraints(*e.rhs);
                        },
                        [](const Star& e) { return count_triple_constraints(*e.expr); },
                        [](const Repeat& e) { return count_triple_constraints(*e.expr); },
                        [](const TripleConstraint&) { return std::size_t{1}; },
                        [](const EmptyTriple&) { return std::size_t{0}; },
                    },
                    te.node);
}

std::string_view to_string(Diagnostic::Kind kind) {
  switch (kind) {
    case Diagnostic::Kind::UnresolvedRef: return "UnresolvedRef";
    case Diagnostic::Kind::EmptyValueSet: return "EmptyValueSet";
    case Diagnostic::Kind::InvalidRange: return "InvalidRange";
    case Diagnostic::Kind::BadPredicate: return "BadPredicate";
  }
  return "?";
}

namespace {

class WellFormedness {
 public:
  WellFormedness(const Schema& schema, std::vector<Diagnostic>& out) : schema_(schema), out_(out) {}

  void check(const std::string& label) {
    label_ = label;
    visit(*schema_.find(label), label);
  }

 private:
  void report(Diagnostic::Kind kind, const std::string& path, std::string message) {
    out_.push_back({kind, label_, path, std::move(message)});
  }

  void range(const Cardinality& c, const std::string& path) {
    if (c.max && c.min > *c.max) report(Diagnostic::Kind::InvalidRange, path, "min > max in " + c.str());
  }

  void visit(const ShapeExpr& se, const std::string& path) {
    std::visit(overloaded{
                   [&](const NodeConstraint& c) {
                     if (auto* vs = std::get_if<ValueSetCond>(&c); vs && vs->values.empty())
                       report(Diagnostic::Kind::EmptyValueSet, path, "empty value set");
                   },
                   [&](const ShapeAnd& a) {
                     visit(*a.lhs, path + "/AND.lhs");
                     visit(*a.rhs, path + "/AND.rhs");
                   },
                   [&](const ShapeRef& r) {
                     if (!schema_.contains(r.label))
                       report(Diagnostic::Kind::UnresolvedRef, path, "unresolved reference @<" + r.label + ">");
                   },
                   [&](const Shape& s) { visit(*s.expr, path + "/Shape"); },
               },
               se.node);
  }

  void visit(const TripleExpr& te, const std::string& path) {
    std::visit(overloaded{
                   [&](const EachOf& e) {
                     visit(*e.lhs, path + "/EachOf.lhs");
                     visit(*e.rhs, path + "/EachOf.rhs");
                   },
                   [&](const OneOf& e) {
                     visit(*e.lhs, path + "/OneOf.lhs");
                     visit(*e.rhs, path + "/OneOf.rhs");
                   },
                   [&](const Star& e) { visit(*e.expr, path + "/Star"); },
                   [&](const Repeat& e) {
                     range(e.card, path);
                     visit(*e.expr, path + "/Repeat");
                   },
                   [&](const TripleConstraint& t) {
                     auto here = path + "/TC(" + t.predicate.str() + ")";
                     if (!t.predicate.is_property())
                       report(Diagnostic::Kind::BadPredicate, here, t.predicate.str() + " is not a property");
                     visit(*t.value, here);
                     visit(*t.qualifiers.body, here + "/qs");
                   },
                   [](const EmptyTriple&) {},
               },
               te.node);
  }

  void visit(const PropertySpec& ps, const std::string& path) {
    std::visit(overloaded{
                   [&](const EachOfQs& e) {
                     visit(*e.lhs, path + "/EachOfQs.lhs");
                     visit(*e.rhs, path + "/EachOfQs.rhs");
                   },
                   [&](const OneOfQs& e) {
                     visit(*e.lhs, path + "/OneOfQs.lhs");
                     visit(*e.rhs, path + "/OneOfQs.rhs");
                   },
                   [&](const StarQs& e) { visit(*e.spec, path + "/StarQs"); },
                   [&](const RepeatQs& e) {
                     range(e.card, path);
                     visit(*e.spec, path + "/RepeatQs");
                   },
                   [&](const PropQs& p) {
                     auto here = path + "/PropQs(" + p.property.str() + ")";
                     if (!p.property.is_property())
                       report(Diagnostic::Kind::BadPredicate, here, p.property.str() + " is not a property");
                     visit(*p.value, here);
                   },
                   [](const EmptyQs&) {},
               },
               ps.node);
  }

  const Schema& schema_;
  std::vector<Diagnostic>& out_;
  std::string label_;
};

}  // namespace

std::vector<Diagnostic> well_formed(const Schema& schema) {
  std::vector<Diagnostic> out;
  WellFormedness checker(schema, out);
  for (const auto& label : schema.labels()) checker.check(label);
  return out;
}

}  // namespace wshex

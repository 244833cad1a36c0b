#pragma once

// WShEx abstract syntax. Nodes are immutable values; recursive children are
// held in Box<T>, which shares the pointee and compares structurally.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wshex/model.hpp"

namespace wshex {

template <class T>
class Box {
 public:
  Box(T value) : ptr_(std::make_shared<const T>(std::move(value))) {}  // NOLINT

  const T& operator*() const { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  const T* get() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) {
    return a.ptr_ == b.ptr_ || *a.ptr_ == *b.ptr_;
  }

 private:
  std::shared_ptr<const T> ptr_;
};

// Surface-only repetition bounds; `max` unset means unbounded.
struct Cardinality {
  unsigned min = 1;
  std::optional<unsigned> max = 1;

  static Cardinality exactly_one() { return {1, 1}; }
  static Cardinality optional() { return {0, 1}; }
  static Cardinality star() { return {0, std::nullopt}; }
  static Cardinality plus() { return {1, std::nullopt}; }
  static Cardinality range(unsigned lo, std::optional<unsigned> hi) { return {lo, hi}; }

  bool is_exactly_one() const { return min == 1 && max == 1u; }
  bool admits(unsigned n) const { return n >= min && (!max || n <= *max); }
  std::string str() const;

  bool operator==(const Cardinality&) const = default;
};

struct ValueSetCond {
  std::vector<Value> values;
  bool operator==(const ValueSetCond&) const = default;
};
struct DatatypeCond {
  Datatype type;
  bool operator==(const DatatypeCond&) const = default;
};
struct AnyValueCond {
  bool operator==(const AnyValueCond&) const = default;
};
using NodeConstraint = std::variant<ValueSetCond, DatatypeCond, AnyValueCond>;

struct ShapeExpr;
struct TripleExpr;
struct PropertySpec;

struct ShapeAnd {
  Box<ShapeExpr> lhs;
  Box<ShapeExpr> rhs;
  bool operator==(const ShapeAnd&) const = default;
};
struct ShapeRef {
  std::string label;
  bool operator==(const ShapeRef&) const = default;
};
struct Shape {
  bool closed = false;
  Box<TripleExpr> expr;
  bool operator==(const Shape&) const = default;
};

struct ShapeExpr {
  std::variant<NodeConstraint, ShapeAnd, ShapeRef, Shape> node;
  bool operator==(const ShapeExpr&) const = default;
};

enum class Openness : std::uint8_t { Open, Closed };

struct QualifierSpec {
  Openness openness = Openness::Open;
  Box<PropertySpec> body;
  bool operator==(const QualifierSpec&) const = default;
};

struct EachOf {
  Box<TripleExpr> lhs;
  Box<TripleExpr> rhs;
  bool operator==(const EachOf&) const = default;
};
struct OneOf {
  Box<TripleExpr> lhs;
  Box<TripleExpr> rhs;
  bool operator==(const OneOf&) const = default;
};
struct Star {
  Box<TripleExpr> expr;
  bool operator==(const Star&) const = default;
};
struct TripleConstraint {
  EntityId predicate;
  Box<ShapeExpr> value;
  QualifierSpec qualifiers;
  bool operator==(const TripleConstraint&) const = default;
};
struct EmptyTriple {
  bool operator==(const EmptyTriple&) const = default;
};
// Surface cardinality; removed by desugar().
struct Repeat {
  Box<TripleExpr> expr;
  Cardinality card;
  bool operator==(const Repeat&) const = default;
};

struct TripleExpr {
  std::variant<EachOf, OneOf, Star, TripleConstraint, EmptyTriple, Repeat> node;
  bool operator==(const TripleExpr&) const = default;
};

struct EachOfQs {
  Box<PropertySpec> lhs;
  Box<PropertySpec> rhs;
  bool operator==(const EachOfQs&) const = default;
};
struct OneOfQs {
  Box<PropertySpec> lhs;
  Box<PropertySpec> rhs;
  bool operator==(const OneOfQs&) const = default;
};
struct StarQs {
  Box<PropertySpec> spec;
  bool operator==(const StarQs&) const = default;
};
struct PropQs {
  EntityId property;
  Box<ShapeExpr> value;
  bool operator==(const PropQs&) const = default;
};
struct EmptyQs {
  bool operator==(const EmptyQs&) const = default;
};
struct RepeatQs {
  Box<PropertySpec> spec;
  Cardinality card;
  bool operator==(const RepeatQs&) const = default;
};

struct PropertySpec {
  std::variant<EachOfQs, OneOfQs, StarQs, PropQs, EmptyQs, RepeatQs> node;
  bool operator==(const PropertySpec&) const = default;
};

// Builders.
ShapeExpr cond(NodeConstraint c);
ShapeExpr value_set(std::vector<Value> values);
ShapeExpr datatype(Datatype type);
ShapeExpr any_value();
ShapeExpr ref(std::string label);
ShapeExpr shape_and(ShapeExpr lhs, ShapeExpr rhs);
ShapeExpr shape(TripleExpr expr, bool closed = false);

TripleExpr each_of(TripleExpr lhs, TripleExpr rhs);
TripleExpr one_of(TripleExpr lhs, TripleExpr rhs);
TripleExpr star(TripleExpr expr);
TripleExpr empty_triple();
TripleExpr repeat(TripleExpr expr, Cardinality card);
TripleExpr tc(EntityId predicate, ShapeExpr value, QualifierSpec qs);
TripleExpr tc(EntityId predicate, ShapeExpr value);  // open, empty qualifier spec

QualifierSpec open_qs(PropertySpec body);
QualifierSpec closed_qs(PropertySpec body);
PropertySpec each_of_qs(PropertySpec lhs, PropertySpec rhs);
PropertySpec one_of_qs(PropertySpec lhs, PropertySpec rhs);
PropertySpec star_qs(PropertySpec spec);
PropertySpec empty_qs();
PropertySpec repeat_qs(PropertySpec spec, Cardinality card);
PropertySpec prop_qs(EntityId property, ShapeExpr value);

struct Prefix {
  std::string name;  // without the trailing ':'
  std::string iri;
  bool operator==(const Prefix&) const = default;
};

class Schema {
 public:
  // Throws Error(InvalidArgument) on a duplicate label.
  void define(std::string label, ShapeExpr def);
  const ShapeExpr* find(std::string_view label) const;
  bool contains(std::string_view label) const { return find(label) != nullptr; }

  // Declaration order.
  const std::vector<std::string>& labels() const { return order_; }

  std::vector<Prefix> prefixes;

  // Structural equality of labels and definitions; prefixes are ignored.
  friend bool operator==(const Schema& a, const Schema& b) {
    return a.defs_ == b.defs_;
  }

 private:
  std::vector<std::string> order_;
  std::map<std::string, ShapeExpr, std::less<>> defs_;
};

std::set<EntityId> preds(const TripleExpr& te);
std::set<EntityId> preds(const PropertySpec& ps);

// Rewrites surface cardinalities into the core grammar:
//   x?      -> OneOf(x, Empty)
//   x+      -> EachOf(x, Star(x))
//   x{m,n}  -> m copies of x then (n-m) optionals, right-nested EachOf
//   x{m,*}  -> m copies of x then Star(x)
//   x{0,0}  -> OneOf(Empty, x with every value constraint emptied)
// Throws Error(RangeError) when min > max.
TripleExpr desugar(const TripleExpr& te);
PropertySpec desugar(const PropertySpec& ps);
ShapeExpr desugar(const ShapeExpr& se);
Schema desugar(const Schema& schema);

bool is_core(const TripleExpr& te);
bool is_core(const PropertySpec& ps);

std::size_t count_triple_constraints(const TripleExpr& te);

struct Diagnostic {
  enum class Kind { UnresolvedRef, EmptyValueSet, InvalidRange, BadPredicate };
  Kind kind;
  std::string label;
  std::string path;
  std::string message;
};

std::string_view to_string(Diagnostic::Kind kind);

std::vector<Diagnostic> well_formed(const Schema& schema);

}  // namespace wshex

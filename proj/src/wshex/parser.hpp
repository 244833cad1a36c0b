#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wshex/ast.hpp"
#include "wshex/lexer.hpp"

namespace wshex {

inline constexpr std::string_view kWikidataEntityIri = "http://www.wikidata.org/entity/";

struct SchemaParse {
  std::optional<Schema> schema;  // set iff diagnostics is empty
  std::vector<ParseDiagnostic> diagnostics;

  bool ok() const { return schema.has_value(); }
};

// Compact syntax:
//
//   schema      := prefixDecl* shapeDecl+
//   prefixDecl  := "PREFIX" PNAME ":" IRIREF
//   shapeDecl   := "<" NAME ">" shapeExpr
//   shapeExpr   := shapeAtom ("AND" shapeAtom)*
//   shapeAtom   := nodeConstr | shape | "@" shapeLabel | "(" shapeExpr ")"
//   shape       := "CLOSED"? "{" tripleExpr? "}"
//   tripleExpr  := eachOf ("|" eachOf)*
//   eachOf      := unaryTE (";" unaryTE)* ";"?
//   unaryTE     := predicate valueExpr qualifierBlock? cardinality?
//                | "(" tripleExpr? ")" cardinality?
//   qualifierBlock := "{|" propSpec? "|}" | "[|" propSpec? "|]"
//   propSpec    := qsEachOf ("|" qsEachOf)*
//   qsEachOf    := qsUnary ("," qsUnary)* ","?
//   qsUnary     := predicate valueExpr cardinality? | "(" propSpec? ")" cardinality?
//
// The default ':' prefix is the Wikidata entity namespace unless declared.
// `;`/`,` sequences fold to the right, AND folds to the left.
SchemaParse parse_schema(std::string_view text);

// Pretty printer; parse_schema(render_schema(s)) is structurally equal to s
// after desugaring.
std::string render_schema(const Schema& schema);

std::string render_shape_expr(const ShapeExpr& se);
std::string render_triple_expr(const TripleExpr& te);
std::string render_property_spec(const PropertySpec& ps);
std::string render_value(const Value& v);

}  // namespace wshex

#pragma once

// Conversion of ShEx entity schemas written against the Wikibase RDF
// serialization (wdt:/p:/ps:/pq:) into WShEx.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wshex/ast.hpp"
#include "wshex/lexer.hpp"

namespace wshex {

enum class ShexNamespace { Wdt, P, Ps, Pq, Wd, Xsd, Prov, Wikibase, Other };

std::string_view namespace_name(ShexNamespace ns);

struct ShexConstraint;

struct ShexValue {
  enum class Kind { Ref, Datatype, ValueSet, Any, Nested, Unsupported };
  Kind kind = Kind::Any;
  std::string label;                    // Ref
  ShexNamespace datatype_ns = ShexNamespace::Other;
  std::string datatype;                 // local name, e.g. "dateTime"
  std::vector<Value> values;            // ValueSet
  std::vector<ShexConstraint> nested;   // Nested
};

struct ShexConstraint {
  ShexNamespace ns = ShexNamespace::Other;
  std::string predicate;  // as written
  std::optional<EntityId> property;
  ShexValue value;
  Cardinality card;
  SourcePosition position;
  std::string text;  // source excerpt for reports
  // Set by the parser for constructs outside the subset; the constraint is
  // kept so that it is accounted for.
  std::optional<std::string> rejection;
};

struct ShexShape {
  std::string label;
  SourcePosition position;
  std::vector<ShexConstraint> constraints;
  std::vector<std::pair<std::string, std::string>> shape_rejections;  // (construct, reason)
};

struct ShexSchema {
  std::vector<Prefix> prefixes;
  std::vector<ShexShape> shapes;
};

struct ShexParse {
  std::optional<ShexSchema> schema;
  std::vector<ParseDiagnostic> diagnostics;
  bool ok() const { return schema.has_value(); }
};

ShexParse parse_shexc_subset(std::string_view text);

struct ConversionNote {
  std::string shape;
  std::string message;
};

struct Rejection {
  std::string shape;
  std::string constraint;
  std::string reason;
  SourcePosition position;
  bool shape_level = false;  // CLOSED / EXTRA rather than a triple constraint
};

struct ConversionReport {
  Schema converted;
  std::vector<ConversionNote> notes;
  std::vector<Rejection> rejected;
  std::size_t input_constraints = 0;   // top-level constraints read
  std::size_t mapped_constraints = 0;  // of those, represented in `converted`
};

ConversionReport convert(const ShexSchema& shex);

}  // namespace wshex

#pragma once

// Conformance engine for WShEx.
//
// Shape references are resolved against a greatest-fixed-point typing:
// every (node, label) pair met during validation starts out assumed to
// conform, is evaluated, and is refuted when its definition fails; refuting
// a pair re-queues the pairs whose evaluation consulted it. The schema is
// negation free, so refutation is monotone and the surviving pairs are the
// maximal typing.
//
// Triple expressions and property specifiers are matched as regular bag
// expressions: each statement (qualifier) chooses one triple constraint
// (property constraint) it satisfies, and the resulting multiset of choices
// is checked against the expression. This is equivalent to enumerating the
// partitions of the statement set.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wshex/ast.hpp"
#include "wshex/model.hpp"
#include "wshex/report.hpp"

namespace wshex {

inline constexpr std::uint64_t kDefaultStepBudget = 10'000'000;

struct ValidatorOptions {
  // Use the EachOfQs rule as printed: both operands must match the same
  // qualifier set. Off by default (partition semantics).
  bool pedantic = false;
  // Matching steps allowed per (node, shape) evaluation before EngineLimit.
  std::uint64_t step_budget = kDefaultStepBudget;
};

bool satisfies_cond(const NodeConstraint& cond, const Value& v);

struct Target {
  Value node;
  std::string label;
};

class Validator {
 public:
  // Throws Error(InvalidArgument) if the schema is not well formed.
  Validator(const WikibaseGraph& graph, const Schema& schema, ValidatorOptions options = {});
  ~Validator();
  Validator(const Validator&) = delete;
  Validator& operator=(const Validator&) = delete;

  // Throws Error(UnknownShape) for an undefined label.
  Verdict check(const Value& node, std::string_view label);

  // Failure path of a non-conforming pair; empty when it conforms.
  Trace explain(const Value& node, std::string_view label);

  // Direct access to the three relations for arbitrary (surface) expressions.
  // Shape references inside them resolve against the schema. Throws
  // Error(EngineLimit) when the step budget runs out.
  bool conforms(const Value& node, const ShapeExpr& se);
  bool matches_te(std::span<const std::size_t> statements, const TripleExpr& te);
  bool matches_qs(std::span<const Qualifier> qualifiers, const QualifierSpec& qs);

  // Validation using only the focus entity's own statements. References to
  // other entities (and shapes on other entities) are accepted without
  // looking at them; `approx` reports whether that happened.
  struct LocalResult {
    Verdict verdict;
    bool approx;
    Trace trace;
  };
  LocalResult check_local(const EntityId& focus, std::string_view label);

  // Pairs settled so far that conform.
  std::vector<Target> conforming_pairs() const;

  // Evaluates the definition of `label` once on `node`, answering every shape
  // reference from the settled typing without extending it.
  bool holds_under_typing(const Value& node, std::string_view label);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ValidationReport validate(const WikibaseGraph& graph, const Schema& schema, std::span<const Target> targets,
                          ValidatorOptions options = {});

// Splits `targets` across `jobs` workers, each with its own Validator; the
// report keeps the order of `targets`.
ValidationReport validate_parallel(const WikibaseGraph& graph, const Schema& schema,
                                   std::span<const Target> targets, ValidatorOptions options, unsigned jobs);

}  // namespace wshex

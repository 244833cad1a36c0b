#pragma once

// Reading Wikibase JSON entity dumps: one entity document per line, with or
// without the enclosing array framing.

#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wshex/ast.hpp"
#include "wshex/model.hpp"
#include "wshex/report.hpp"
#include "wshex/validator.hpp"

namespace wshex {

enum class IngestMode { FullGraph, LocalOnly };
enum class UnsupportedSnakPolicy { Skip, Error };

struct IngestOptions {
  IngestMode mode = IngestMode::FullGraph;
  UnsupportedSnakPolicy on_unsupported_snak = UnsupportedSnakPolicy::Skip;
  std::size_t max_line_bytes = std::size_t{256} << 20;
  bool strict = false;  // malformed lines abort instead of being counted
  unsigned jobs = 0;    // 0 = hardware concurrency
};

struct ClaimRecord {
  std::string id;
  EntityId property;
  Value value;
  std::vector<Qualifier> qualifiers;
  Rank rank = Rank::Normal;
};

struct EntityDocument {
  EntityId id;
  EntityKind entity_type = EntityKind::Item;
  std::map<EntityId, std::vector<ClaimRecord>> claims;
};

// Per-line tallies of what was dropped while decoding.
struct SnakCounters {
  std::uint64_t skipped_snaks = 0;      // somevalue / novalue
  std::uint64_t unsupported_snaks = 0;  // value snaks of an unknown datavalue type
  std::uint64_t references = 0;

  SnakCounters& operator+=(const SnakCounters& o);
};

struct IngestStats {
  std::uint64_t lines = 0;
  std::uint64_t entities = 0;
  std::uint64_t statements = 0;
  std::uint64_t malformed_lines = 0;
  std::uint64_t duplicate_entities = 0;
  std::uint64_t duplicate_statements = 0;
  SnakCounters snaks;
};

// nullopt for blank lines and the `[` / `]` framing lines. Throws
// Error(MalformedLine), Error(OversizeLine) or, under the Error policy,
// Error(UnsupportedSnak).
std::optional<EntityDocument> parse_entity_line(std::string_view line, const IngestOptions& options = {},
                                                SnakCounters* counters = nullptr);

std::vector<Statement> doc_to_statements(const EntityDocument& doc);

struct LoadedGraph {
  WikibaseGraph graph;
  IngestStats stats;
  std::vector<EntityId> documents;  // in input order
};

// Throws Error(Io) when the stream fails; in strict mode also the first
// line error.
LoadedGraph load_graph(std::istream& in, const IngestOptions& options = {});

// Validates every document against `label` using only its own statements.
// Records reach `sink` in input order.
IngestStats stream_validate(std::istream& in, const Schema& schema, const std::string& label,
                            const IngestOptions& options, const ValidatorOptions& validator_options,
                            const std::function<void(const ReportEntry&)>& sink);

}  // namespace wshex

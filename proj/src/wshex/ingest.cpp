#include "wshex/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <set>
#include <thread>

#include "json.hpp"
#include "wshex/error.hpp"

namespace wshex {

using nlohmann::json;

SnakCounters& SnakCounters::operator+=(const SnakCounters& o) {
  skipped_snaks += o.skipped_snaks;
  unsupported_snaks += o.unsupported_snaks;
  references += o.references;
  return *this;
}

namespace {

[[noreturn]] void malformed(const std::string& why) { throw Error(ErrorCode::MalformedLine, why); }

std::string_view trim_framing(std::string_view line) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
  while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
  if (!line.empty() && line.back() == ',') line.remove_suffix(1);
  while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
  return line;
}

Datatype string_datatype(std::string_view snak_datatype) {
  if (snak_datatype == "url") return Datatype::Url;
  if (snak_datatype == "external-id") return Datatype::ExternalIdentifier;
  if (snak_datatype == "commonsMedia") return Datatype::CommonsMedia;
  if (snak_datatype == "math") return Datatype::MathematicalExpression;
  if (snak_datatype == "geo-shape") return Datatype::GeographicShape;
  if (snak_datatype == "musical-notation") return Datatype::MusicalNotation;
  if (snak_datatype == "tabular-data") return Datatype::TabularData;
  return Datatype::String;
}

Value entity_value(const json& v) {
  std::string id;
  if (v.contains("id")) {
    id = v.at("id").get<std::string>();
  } else {
    auto type = v.value("entity-type", "item");
    auto n = v.at("numeric-id").get<std::uint64_t>();
    id = (type == "property" ? "P" : "Q") + std::to_string(n);
  }
  if (auto e = EntityId::parse(id)) return *e;
  if (!id.empty() && id.front() == 'L') {
    if (id.find("-F") != std::string::npos) return DataValue(Datatype::Form, id);
    if (id.find("-S") != std::string::npos) return DataValue(Datatype::Sense, id);
    return DataValue(Datatype::Lexeme, id);
  }
  malformed("bad entity id '" + id + "'");
}

std::optional<EntityId> quantity_unit(const std::string& unit) {
  if (unit.empty() || unit == "1") return std::nullopt;
  auto slash = unit.rfind('/');
  return EntityId::parse(slash == std::string::npos ? unit : unit.substr(slash + 1));
}

std::optional<Value> decode_snak(const json& snak, const IngestOptions& options, SnakCounters& counters) {
  if (snak.value("snaktype", "value") != "value") {
    ++counters.skipped_snaks;
    return std::nullopt;
  }
  if (!snak.contains("datavalue")) malformed("value snak without datavalue");
  const json& dv = snak.at("datavalue");
  const auto type = dv.at("type").get<std::string>();
  const json& v = dv.at("value");
  const auto snak_datatype = snak.value("datatype", "");

  if (type == "wikibase-entityid") return entity_value(v);
  if (type == "time") return DataValue::time(v.at("time").get<std::string>(), v.value("precision", 11));
  if (type == "string") return DataValue(string_datatype(snak_datatype), v.get<std::string>());
  if (type == "quantity")
    return DataValue::quantity(v.at("amount").get<std::string>(), quantity_unit(v.value("unit", "1")));
  if (type == "monolingualtext")
    return DataValue::monolingual(v.at("text").get<std::string>(), v.at("language").get<std::string>());
  if (type == "globecoordinate") {
    CoordinateValue c{v.at("latitude").get<double>(), v.at("longitude").get<double>()};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g,%.9g", c.latitude, c.longitude);
    return DataValue(Datatype::GlobeCoordinate, buf, c);
  }
  if (options.on_unsupported_snak == UnsupportedSnakPolicy::Error)
    throw Error(ErrorCode::UnsupportedSnak, "unsupported datavalue type '" + type + "'");
  ++counters.unsupported_snaks;
  return std::nullopt;
}

EntityId property_key(const std::string& key) {
  auto p = EntityId::parse(key);
  if (!p || !p->is_property()) malformed("claim key '" + key + "' is not a property id");
  return *p;
}

Rank parse_rank(const std::string& r) {
  if (r == "preferred") return Rank::Preferred;
  if (r == "normal") return Rank::Normal;
  if (r == "deprecated") return Rank::Deprecated;
  malformed("unknown rank '" + r + "'");
}

EntityDocument decode_document(const json& j, const IngestOptions& options, SnakCounters& counters) {
  if (!j.is_object()) malformed("entity line is not a JSON object");
  if (!j.contains("id") || !j.at("id").is_string()) malformed("entity without id");
  auto id = EntityId::parse(j.at("id").get<std::string>());
  if (!id) malformed("bad entity id '" + j.at("id").get<std::string>() + "'");

  EntityDocument doc;
  doc.id = *id;
  doc.entity_type = id->kind();
  if (j.contains("type")) {
    auto t = j.at("type").get<std::string>();
    if (t == "property") doc.entity_type = EntityKind::Property;
    else if (t == "item") doc.entity_type = EntityKind::Item;
    else malformed("unsupported entity type '" + t + "'");
  }

  if (!j.contains("claims")) return doc;
  const json& claims = j.at("claims");
  if (claims.is_array() && claims.empty()) return doc;  // older dumps write [] for no claims
  if (!claims.is_object()) malformed("claims is not an object");

  for (const auto& [key, list] : claims.items()) {
    EntityId property = property_key(key);
    for (const json& rec : list) {
      if (rec.contains("references")) counters.references += rec.at("references").size();
      auto value = decode_snak(rec.at("mainsnak"), options, counters);
      if (!value) continue;
      if (!rec.contains("id")) malformed("statement without id under " + key);

      ClaimRecord claim{rec.at("id").get<std::string>(), property, std::move(*value), {},
                        parse_rank(rec.value("rank", "normal"))};
      if (rec.contains("qualifiers")) {
        for (const auto& [qkey, snaks] : rec.at("qualifiers").items()) {
          EntityId qprop = property_key(qkey);
          for (const json& snak : snaks)
            if (auto qv = decode_snak(snak, options, counters)) claim.qualifiers.push_back({qprop, std::move(*qv)});
        }
      }
      doc.claims[property].push_back(std::move(claim));
    }
  }
  return doc;
}

struct LineResult {
  std::optional<EntityDocument> doc;
  SnakCounters counters;
  std::optional<Error> error;
  ReportEntry entry;  // local mode only
};

LineResult parse_line(const std::string& line, const IngestOptions& options) {
  LineResult r;
  try {
    r.doc = parse_entity_line(line, options, &r.counters);
  } catch (const Error& e) {
    r.error = e;
  }
  return r;
}

unsigned worker_count(unsigned requested) {
  if (requested) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& f) {
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
  if (jobs <= 1 || n < 32) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += jobs) f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

constexpr std::size_t kBatchLines = 2048;

// Reads up to kBatchLines lines; false once the stream is exhausted.
bool read_batch(std::istream& in, std::vector<std::string>& batch) {
  batch.clear();
  std::string line;
  while (batch.size() < kBatchLines && std::getline(in, line)) batch.push_back(std::move(line));
  if (in.bad()) throw Error(ErrorCode::Io, "read error on input stream");
  return !batch.empty();
}

[[noreturn]] void rethrow_with_line(const Error& e, std::uint64_t line_no) {
  throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
}

}  // namespace

std::optional<EntityDocument> parse_entity_line(std::string_view line, const IngestOptions& options,
                                                SnakCounters* counters) {
  if (line.size() > options.max_line_bytes)
    throw Error(ErrorCode::OversizeLine, "line of " + std::to_string(line.size()) + " bytes exceeds the limit");
  line = trim_framing(line);
  if (line.empty() || line == "[" || line == "]") return std::nullopt;

  SnakCounters local;
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) malformed("invalid JSON");
  EntityDocument doc;
  try {
    doc = decode_document(j, options, local);
  } catch (const json::exception& e) {
    malformed(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) malformed(e.what());
    throw;
  }
  if (counters) *counters += local;
  return doc;
}

std::vector<Statement> doc_to_statements(const EntityDocument& doc) {
  std::vector<Statement> out;
  for (const auto& [property, claims] : doc.claims)
    for (const auto& c : claims) {
      Statement st{c.id, doc.id, property, c.value, c.qualifiers, c.rank};
      normalize_qualifiers(st.qualifiers);
      out.push_back(std::move(st));
    }
  return out;
}

LoadedGraph load_graph(std::istream& in, const IngestOptions& options) {
  LoadedGraph out;
  std::set<EntityId> seen;
  std::vector<std::string> batch;
  std::vector<LineResult> results;
  const unsigned jobs = worker_count(options.jobs);

  while (read_batch(in, batch)) {
    results.assign(batch.size(), {});
    parallel_for(batch.size(), jobs, [&](std::size_t i) { results[i] = parse_line(batch[i], options); });

    for (auto& r : results) {
      const std::uint64_t line_no = ++out.stats.lines;
      if (r.error) {
        if (options.strict) rethrow_with_line(*r.error, line_no);
        ++out.stats.malformed_lines;
        continue;
      }
      if (!r.doc) continue;
      out.stats.snaks += r.counters;
      if (!seen.insert(r.doc->id).second) {
        if (options.strict) throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no) + ": duplicate entity " + r.doc->id.str());
        ++out.stats.duplicate_entities;
        continue;
      }
      ++out.stats.entities;
      out.documents.push_back(r.doc->id);
      for (auto& st : doc_to_statements(*r.doc)) {
        try {
          out.graph.add_statement(std::move(st));
          ++out.stats.statements;
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DuplicateStatementId) throw;
          if (options.strict) rethrow_with_line(e, line_no);
          ++out.stats.duplicate_statements;
        }
      }
    }
  }
  return out;
}

IngestStats stream_validate(std::istream& in, const Schema& schema, const std::string& label,
                            const IngestOptions& options, const ValidatorOptions& validator_options,
                            const std::function<void(const ReportEntry&)>& sink) {
  if (!schema.contains(label)) throw Error(ErrorCode::UnknownShape, "unknown shape <" + label + ">");
  auto diags = well_formed(schema);
  if (!diags.empty()) throw Error(ErrorCode::InvalidArgument, "schema is not well formed: " + diags.front().message);

  IngestStats stats;
  std::vector<std::string> batch;
  std::vector<LineResult> results;
  const unsigned jobs = worker_count(options.jobs);

  while (read_batch(in, batch)) {
    results.assign(batch.size(), {});
    parallel_for(batch.size(), jobs, [&](std::size_t i) {
      LineResult& r = results[i];
      r = parse_line(batch[i], options);
      if (!r.doc) return;
      try {
        WikibaseGraph graph;
        for (auto& st : doc_to_statements(*r.doc)) graph.add_statement(std::move(st));
        Validator validator(graph, schema, validator_options);
        auto local = validator.check_local(r.doc->id, label);
        r.entry = ReportEntry{r.doc->id.str(), label, local.verdict, std::move(local.trace), local.approx};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DuplicateStatementId) throw;
        r.error = Error(ErrorCode::MalformedLine, e.what());
        r.doc.reset();
      }
    });

    for (auto& r : results) {
      const std::uint64_t line_no = ++stats.lines;
      if (r.error) {
        if (options.strict) rethrow_with_line(*r.error, line_no);
        ++stats.malformed_lines;
        continue;
      }
      if (!r.doc) continue;
      stats.snaks += r.counters;
      ++stats.entities;
      for (const auto& [p, claims] : r.doc->claims) stats.statements += claims.size();
      sink(r.entry);
    }
  }
  return stats;
}

}  // namespace wshex

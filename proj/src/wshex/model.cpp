#include "wshex/model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>

#include "wshex/error.hpp"

namespace wshex {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DuplicateStatementId: return "DuplicateStatementId";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::UnknownShape: return "UnknownShape";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::OversizeLine: return "OversizeLine";
    case ErrorCode::UnsupportedSnak: return "UnsupportedSnak";
    case ErrorCode::EngineLimit: return "EngineLimit";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

EntityId::EntityId(EntityKind kind, std::uint64_t number) : kind_(kind), number_(number) {
  if (number == 0) throw Error(ErrorCode::InvalidArgument, "entity numbers start at 1");
}

std::optional<EntityId> EntityId::parse(std::string_view text) {
  if (text.size() < 2) return std::nullopt;
  EntityKind kind;
  if (text[0] == 'Q') {
    kind = EntityKind::Item;
  } else if (text[0] == 'P') {
    kind = EntityKind::Property;
  } else {
    return std::nullopt;
  }
  auto digits = text.substr(1);
  if (digits[0] == '0') return std::nullopt;
  std::uint64_t n = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  return EntityId(kind, n);
}

std::string EntityId::str() const {
  return (is_item() ? "Q" : "P") + std::to_string(number_);
}

namespace {

struct DatatypeName {
  Datatype type;
  std::string_view name;
};

constexpr std::array<DatatypeName, 17> kDatatypeNames{{
    {Datatype::String, "String"},
    {Datatype::Time, "Time"},
    {Datatype::Quantity, "Quantity"},
    {Datatype::MonolingualText, "MonolingualText"},
    {Datatype::Url, "URL"},
    {Datatype::ExternalIdentifier, "ExternalIdentifier"},
    {Datatype::GlobeCoordinate, "GlobeCoordinate"},
    {Datatype::CommonsMedia, "CommonsMedia"},
    {Datatype::MathematicalExpression, "MathematicalExpression"},
    {Datatype::GeographicShape, "GeographicShape"},
    {Datatype::MusicalNotation, "MusicalNotation"},
    {Datatype::TabularData, "TabularData"},
    {Datatype::Item, "Item"},
    {Datatype::Property, "Property"},
    {Datatype::Lexeme, "Lexeme"},
    {Datatype::Form, "Form"},
    {Datatype::Sense, "Sense"},
}};

constexpr std::array<Datatype, 17> kAllDatatypes = [] {
  std::array<Datatype, 17> out{};
  for (std::size_t i = 0; i < kDatatypeNames.size(); ++i) out[i] = kDatatypeNames[i].type;
  return out;
}();

bool structured_matches(Datatype type, const DataValue::Structured& s) {
  return std::visit(
      [type](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) return true;
        if constexpr (std::is_same_v<T, TimeValue>) return type == Datatype::Time;
        if constexpr (std::is_same_v<T, QuantityValue>) return type == Datatype::Quantity;
        if constexpr (std::is_same_v<T, MonolingualValue>) return type == Datatype::MonolingualText;
        if constexpr (std::is_same_v<T, CoordinateValue>) return type == Datatype::GlobeCoordinate;
      },
      s);
}

}  // namespace

std::string_view datatype_name(Datatype type) {
  for (const auto& d : kDatatypeNames)
    if (d.type == type) return d.name;
  return "?";
}

std::optional<Datatype> datatype_from_name(std::string_view name) {
  for (const auto& d : kDatatypeNames)
    if (d.name == name) return d.type;
  return std::nullopt;
}

std::span<const Datatype> all_datatypes() { return kAllDatatypes; }

DataValue::DataValue(Datatype type, std::string lexical, Structured structured)
    : type_(type), lexical_(std::move(lexical)), structured_(std::move(structured)) {
  if (lexical_.empty()) throw Error(ErrorCode::InvalidArgument, "empty lexical form");
  if (!structured_matches(type_, structured_))
    throw Error(ErrorCode::InvalidArgument,
                "structured value does not match datatype " + std::string(datatype_name(type_)));
}

DataValue DataValue::time(std::string timestamp, int precision) {
  auto lexical = timestamp;
  return {Datatype::Time, std::move(lexical), TimeValue{std::move(timestamp), precision}};
}

DataValue DataValue::year(int year) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+05d-00-00T00:00:00Z", year);
  return time(buf, 9);
}

DataValue DataValue::monolingual(std::string text, std::string language) {
  auto lexical = text;
  return {Datatype::MonolingualText, std::move(lexical),
          MonolingualValue{std::move(text), std::move(language)}};
}

DataValue DataValue::quantity(std::string amount, std::optional<EntityId> unit) {
  auto lexical = amount;
  return {Datatype::Quantity, std::move(lexical), QuantityValue{std::move(amount), unit}};
}

bool operator==(const DataValue& a, const DataValue& b) {
  if (a.type_ != b.type_ || a.lexical_ != b.lexical_) return false;
  if (a.type_ == Datatype::MonolingualText) {
    auto* ma = std::get_if<MonolingualValue>(&a.structured_);
    auto* mb = std::get_if<MonolingualValue>(&b.structured_);
    std::string la = ma ? ma->language : "";
    std::string lb = mb ? mb->language : "";
    return la == lb;
  }
  return true;
}

std::string value_key(const Value& v) {
  if (auto* e = as_entity(v)) return e->str();
  const auto& d = std::get<DataValue>(v);
  std::string key = "d:";
  key += datatype_name(d.type());
  key += ':';
  key += d.lexical();
  if (auto* m = std::get_if<MonolingualValue>(&d.structured())) {
    key += '@';
    key += m->language;
  }
  return key;
}

std::string value_to_string(const Value& v) {
  if (auto* e = as_entity(v)) return e->str();
  const auto& d = std::get<DataValue>(v);
  return std::string(datatype_name(d.type())) + "(" + d.lexical() + ")";
}

std::string_view rank_name(Rank rank) {
  switch (rank) {
    case Rank::Preferred: return "preferred";
    case Rank::Normal: return "normal";
    case Rank::Deprecated: return "deprecated";
  }
  return "normal";
}

void normalize_qualifiers(std::vector<Qualifier>& qualifiers) {
  auto less = [](const Qualifier& a, const Qualifier& b) {
    if (a.property != b.property) return a.property < b.property;
    return value_key(a.value) < value_key(b.value);
  };
  std::stable_sort(qualifiers.begin(), qualifiers.end(), less);
  qualifiers.erase(std::unique(qualifiers.begin(), qualifiers.end()), qualifiers.end());
}

void WikibaseGraph::register_entity(const EntityId& id) {
  (id.is_item() ? items_ : properties_).insert(id);
}

void WikibaseGraph::add_statement(Statement st) {
  if (!st.property.is_property())
    throw Error(ErrorCode::InvalidArgument, "statement predicate " + st.property.str() + " is not a property");
  for (const auto& q : st.qualifiers)
    if (!q.property.is_property())
      throw Error(ErrorCode::InvalidArgument, "qualifier " + q.property.str() + " is not a property");
  if (ids_.contains(st.id))
    throw Error(ErrorCode::DuplicateStatementId, "duplicate statement id " + st.id);

  normalize_qualifiers(st.qualifiers);
  register_entity(st.subject);
  register_entity(st.property);
  if (auto* e = as_entity(st.value)) register_entity(*e);
  for (const auto& q : st.qualifiers) {
    register_entity(q.property);
    if (auto* e = as_entity(q.value)) register_entity(*e);
  }

  std::size_t index = statements_.size();
  ids_.emplace(st.id, index);
  auto& bucket = st.subject.is_item() ? by_item_ : by_property_;
  bucket[st.subject.number()].push_back(index);
  statements_.push_back(std::move(st));
}

std::span<const std::size_t> WikibaseGraph::statement_indices(const EntityId& node) const {
  const auto& bucket = node.is_item() ? by_item_ : by_property_;
  auto it = bucket.find(node.number());
  if (it == bucket.end()) return {};
  return it->second;
}

std::vector<Statement> WikibaseGraph::neighs(const EntityId& node) const {
  std::vector<Statement> out;
  for (auto i : statement_indices(node)) out.push_back(statements_[i]);
  return out;
}

bool WikibaseGraph::contains_entity(const EntityId& id) const {
  return id.is_item() ? items_.contains(id) : properties_.contains(id);
}

std::vector<Value> WikibaseGraph::data_values() const {
  std::vector<Value> out;
  std::set<std::string> seen;
  auto add = [&](const Value& v) {
    if (is_entity(v)) return;
    if (seen.insert(value_key(v)).second) out.push_back(v);
  };
  for (const auto& st : statements_) {
    add(st.value);
    for (const auto& q : st.qualifiers) add(q.value);
  }
  return out;
}

std::vector<EntityId> WikibaseGraph::subjects() const {
  std::vector<EntityId> out;
  std::set<EntityId> seen;
  for (const auto& st : statements_)
    if (seen.insert(st.subject).second) out.push_back(st.subject);
  return out;
}

WikibaseGraph load_fixture_graph() {
  using namespace fixture;
  WikibaseGraph g;
  auto add = [&g](std::string id, EntityId s, EntityId p, Value v, std::vector<Qualifier> qs = {}) {
    g.add_statement(Statement{std::move(id), s, p, std::move(v), std::move(qs), Rank::Normal});
  };
  auto year = [](int y) -> Value { return DataValue::year(y); };

  add("Q80$0f1c2a90", timBl, instanceOf, Human);
  add("Q80$5a7e0b31", timBl, birthDate, year(1955));
  add("Q80$9c3d4e12", timBl, birthPlace, London);
  add("Q80$2b8f6c77", timBl, employer, CERN, {{start, year(1980)}, {end, year(1980)}});
  add("Q80$4fe7940f", timBl, employer, CERN, {{start, year(1984)}, {end, year(1994)}});
  add("Q80$7d21e5a4", timBl, awarded, PA, {{pointTime, year(2002)}, {togetherWith, vintCerf}});
  add("Q84$3e6a9b05", London, country, UK);
  add("Q92743$6b0c1d88", vintCerf, instanceOf, Human);
  add("Q92743$8e4f2a19", vintCerf, birthPlace, NewHaven);
  add("Q42944$1a9d7c63", CERN, awarded, PA, {{pointTime, year(2013)}});
  add("Q329157$c5b2e840", PA, country, Spain);
  return g;
}

}  // namespace wshex

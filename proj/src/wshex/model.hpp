#pragma once

// Wikibase graph model: items and properties, data values, and statements
// carrying a finite set of qualifiers.

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace wshex {

enum class EntityKind : std::uint8_t { Item, Property };

class EntityId {
 public:
  EntityId() = default;
  EntityId(EntityKind kind, std::uint64_t number);

  static EntityId item(std::uint64_t n) { return {EntityKind::Item, n}; }
  static EntityId property(std::uint64_t n) { return {EntityKind::Property, n}; }

  // Accepts "Q42" / "P31"; anything else (including Q0) yields nullopt.
  static std::optional<EntityId> parse(std::string_view text);

  EntityKind kind() const { return kind_; }
  std::uint64_t number() const { return number_; }
  bool is_item() const { return kind_ == EntityKind::Item; }
  bool is_property() const { return kind_ == EntityKind::Property; }

  std::string str() const;

  friend auto operator<=>(const EntityId&, const EntityId&) = default;

 private:
  EntityKind kind_ = EntityKind::Item;
  std::uint64_t number_ = 1;
};

enum class Datatype : std::uint8_t {
  String,
  Time,
  Quantity,
  MonolingualText,
  Url,
  ExternalIdentifier,
  GlobeCoordinate,
  CommonsMedia,
  MathematicalExpression,
  GeographicShape,
  MusicalNotation,
  TabularData,
  Item,
  Property,
  Lexeme,
  Form,
  Sense,
};

std::string_view datatype_name(Datatype type);
std::optional<Datatype> datatype_from_name(std::string_view name);
std::span<const Datatype> all_datatypes();

struct TimeValue {
  std::string timestamp;  // e.g. "+1984-01-01T00:00:00Z"
  int precision = 11;     // Wikibase precision code, 9 = year
  bool operator==(const TimeValue&) const = default;
};

struct QuantityValue {
  std::string amount;
  std::optional<EntityId> unit;
  bool operator==(const QuantityValue&) const = default;
};

struct MonolingualValue {
  std::string text;
  std::string language;
  bool operator==(const MonolingualValue&) const = default;
};

struct CoordinateValue {
  double latitude = 0;
  double longitude = 0;
  bool operator==(const CoordinateValue&) const = default;
};

class DataValue {
 public:
  using Structured = std::variant<std::monostate, TimeValue, QuantityValue,
                                  MonolingualValue, CoordinateValue>;

  // Throws Error(InvalidArgument) on empty lexical form or when the
  // structured record does not belong to `type`.
  DataValue(Datatype type, std::string lexical, Structured structured = {});

  static DataValue string(std::string s) { return {Datatype::String, std::move(s)}; }
  static DataValue time(std::string timestamp, int precision);
  static DataValue year(int year);
  static DataValue monolingual(std::string text, std::string language);
  static DataValue quantity(std::string amount, std::optional<EntityId> unit = {});

  Datatype type() const { return type_; }
  const std::string& lexical() const { return lexical_; }
  const Structured& structured() const { return structured_; }

  // Equal datatype and lexical form; monolingual text also compares the
  // language tag.
  friend bool operator==(const DataValue& a, const DataValue& b);

 private:
  Datatype type_;
  std::string lexical_;
  Structured structured_;
};

using Value = std::variant<EntityId, DataValue>;

inline bool is_entity(const Value& v) { return std::holds_alternative<EntityId>(v); }
inline const EntityId* as_entity(const Value& v) { return std::get_if<EntityId>(&v); }
inline const DataValue* as_data(const Value& v) { return std::get_if<DataValue>(&v); }

// Canonical text used as a hashing/ordering key ("Q5", "d:Time:+1955...").
std::string value_key(const Value& v);
std::string value_to_string(const Value& v);

struct Qualifier {
  EntityId property;
  Value value;
  bool operator==(const Qualifier&) const = default;
};

enum class Rank : std::uint8_t { Preferred, Normal, Deprecated };

std::string_view rank_name(Rank rank);

struct Statement {
  std::string id;
  EntityId subject;
  EntityId property;
  Value value;
  std::vector<Qualifier> qualifiers;
  Rank rank = Rank::Normal;

  bool operator==(const Statement&) const = default;
};

// Sorts by (property, value key) and removes duplicate pairs.
void normalize_qualifiers(std::vector<Qualifier>& qualifiers);

class WikibaseGraph {
 public:
  // Registers referenced entities; throws Error(DuplicateStatementId) when
  // the id is already taken and Error(InvalidArgument) on a non-property
  // predicate.
  void add_statement(Statement st);

  // Copy of the statements whose subject is `node`; empty for unknown nodes.
  std::vector<Statement> neighs(const EntityId& node) const;

  // Index-based access used by the validator.
  std::span<const std::size_t> statement_indices(const EntityId& node) const;
  const Statement& statement(std::size_t index) const { return statements_[index]; }

  const std::vector<Statement>& statements() const { return statements_; }
  const std::set<EntityId>& items() const { return items_; }
  const std::set<EntityId>& properties() const { return properties_; }
  bool contains_entity(const EntityId& id) const;
  std::vector<Value> data_values() const;
  std::vector<EntityId> subjects() const;

 private:
  void register_entity(const EntityId& id);

  std::set<EntityId> items_;
  std::set<EntityId> properties_;
  std::vector<Statement> statements_;
  std::unordered_map<std::string, std::size_t> ids_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_item_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_property_;
};

// The Tim Berners-Lee example graph: 11 statements, 10 properties.
WikibaseGraph load_fixture_graph();

namespace fixture {
inline const EntityId timBl = EntityId::item(80);
inline const EntityId vintCerf = EntityId::item(92743);
inline const EntityId London = EntityId::item(84);
inline const EntityId CERN = EntityId::item(42944);
inline const EntityId UK = EntityId::item(145);
inline const EntityId Spain = EntityId::item(29);
inline const EntityId PA = EntityId::item(329157);
inline const EntityId Human = EntityId::item(5);
inline const EntityId NewHaven = EntityId::item(49145);

inline const EntityId instanceOf = EntityId::property(31);
inline const EntityId birthDate = EntityId::property(569);
inline const EntityId birthPlace = EntityId::property(19);
inline const EntityId country = EntityId::property(27);
inline const EntityId employer = EntityId::property(108);
inline const EntityId awarded = EntityId::property(166);
inline const EntityId start = EntityId::property(580);
inline const EntityId end = EntityId::property(582);
inline const EntityId pointTime = EntityId::property(585);
inline const EntityId togetherWith = EntityId::property(1706);
}  // namespace fixture

}  // namespace wshex

template <>
struct std::hash<wshex::EntityId> {
  std::size_t operator()(const wshex::EntityId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.number() * 2 + (id.is_property() ? 1 : 0));
  }
};

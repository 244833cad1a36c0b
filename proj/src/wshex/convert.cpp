#include "wshex/convert.hpp"

#include <algorithm>
#include <map>

#include "wshex/parser.hpp"

namespace wshex {

std::string_view namespace_name(ShexNamespace ns) {
  switch (ns) {
    case ShexNamespace::Wdt: return "wdt";
    case ShexNamespace::P: return "p";
    case ShexNamespace::Ps: return "ps";
    case ShexNamespace::Pq: return "pq";
    case ShexNamespace::Wd: return "wd";
    case ShexNamespace::Xsd: return "xsd";
    case ShexNamespace::Prov: return "prov";
    case ShexNamespace::Wikibase: return "wikibase";
    case ShexNamespace::Other: return "other";
  }
  return "other";
}

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

ShexNamespace classify(std::string_view iri, std::string_view prefix_name) {
  if (ends_with(iri, "/prop/direct/")) return ShexNamespace::Wdt;
  if (ends_with(iri, "/prop/statement/")) return ShexNamespace::Ps;
  if (ends_with(iri, "/prop/qualifier/")) return ShexNamespace::Pq;
  if (ends_with(iri, "/prop/")) return ShexNamespace::P;
  if (ends_with(iri, "/entity/")) return ShexNamespace::Wd;
  if (ends_with(iri, "XMLSchema#")) return ShexNamespace::Xsd;
  if (ends_with(iri, "/prov#")) return ShexNamespace::Prov;
  if (ends_with(iri, "wikiba.se/ontology#")) return ShexNamespace::Wikibase;
  static const std::map<std::string_view, ShexNamespace> by_name{
      {"wdt", ShexNamespace::Wdt}, {"p", ShexNamespace::P},     {"ps", ShexNamespace::Ps},
      {"pq", ShexNamespace::Pq},   {"wd", ShexNamespace::Wd},   {"xsd", ShexNamespace::Xsd},
      {"prov", ShexNamespace::Prov}, {"wikibase", ShexNamespace::Wikibase}};
  if (auto it = by_name.find(prefix_name); it != by_name.end()) return it->second;
  return ShexNamespace::Other;
}

std::optional<Datatype> xsd_datatype(std::string_view local) {
  if (local == "dateTime") return Datatype::Time;
  if (local == "string") return Datatype::String;
  if (local == "decimal") return Datatype::Quantity;
  if (local == "anyURI") return Datatype::Url;
  return std::nullopt;
}

bool keyword_is(const Token& t, std::string_view kw) {
  if (t.kind != Tok::Ident || t.text.size() != kw.size()) return false;
  for (std::size_t i = 0; i < kw.size(); ++i)
    if (std::toupper(static_cast<unsigned char>(t.text[i])) != kw[i]) return false;
  return true;
}

class ShexParser {
 public:
  explicit ShexParser(std::string_view text) : text_(text) {
    auto lexed = tokenize(text);
    toks_ = std::move(lexed.tokens);
    diags_ = std::move(lexed.diagnostics);
  }

  ShexParse run() {
    ShexParse out;
    if (diags_.empty()) {
      try {
        while (peek().kind != Tok::End) {
          if (keyword_is(peek(), "PREFIX"))
            prefix_decl();
          else
            schema_.shapes.push_back(shape_decl());
        }
        if (schema_.shapes.empty()) fail(peek(), "expected shape declaration", {"'<label>'"});
      } catch (const Failure&) {
      }
    }
    out.diagnostics = std::move(diags_);
    if (out.diagnostics.empty()) out.schema = std::move(schema_);
    return out;
  }

 private:
  struct Failure {};
  struct Name {
    ShexNamespace ns;
    std::string local;
  };

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(const Token& at, std::string message, std::vector<std::string> expected = {}) {
    diags_.push_back({at.pos, std::move(message), std::move(expected)});
    throw Failure{};
  }

  const Token& expect(Tok kind, std::string_view what) {
    if (peek().kind != kind)
      fail(peek(), "expected " + std::string(what) + ", found " + std::string(describe(peek().kind)),
           {std::string(describe(kind))});
    return next();
  }

  void prefix_decl() {
    next();
    const Token& name = expect(Tok::PName, "prefix name");
    if (name.text.back() != ':') fail(name, "prefix name must end with ':'");
    const Token& iri = expect(Tok::Angle, "IRI");
    std::string prefix = name.text.substr(0, name.text.size() - 1);
    prefixes_[prefix] = iri.text;
    schema_.prefixes.push_back({prefix, iri.text});
  }

  Name resolve(const Token& t) {
    if (t.kind == Tok::Angle) {
      auto cut = t.text.find_last_of("/#");
      if (cut == std::string::npos) return {ShexNamespace::Other, t.text};
      return {classify(t.text.substr(0, cut + 1), ""), t.text.substr(cut + 1)};
    }
    auto colon = t.text.find(':');
    std::string prefix = t.text.substr(0, colon);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail(t, "undeclared prefix '" + prefix + ":'");
    return {classify(it->second, prefix), t.text.substr(colon + 1)};
  }

  std::string excerpt(std::size_t from, std::size_t to) const {
    std::string out;
    bool space = false;
    for (char c : text_.substr(from, to - from)) {
      if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
        space = !out.empty();
        continue;
      }
      if (space) out += ' ';
      space = false;
      out += c;
    }
    return out;
  }

  ShexShape shape_decl() {
    const Token& label = peek();
    if (label.kind != Tok::Angle)
      fail(label, "expected shape declaration, found " + std::string(describe(label.kind)), {"'<label>'"});
    next();
    ShexShape shape{label.text, label.pos, {}, {}};
    while (true) {
      if (keyword_is(peek(), "CLOSED")) {
        next();
        shape.shape_rejections.emplace_back("CLOSED", "ClosedUnsupported");
      } else if (keyword_is(peek(), "EXTRA")) {
        std::size_t from = next().pos.byte_offset;
        while (peek().kind == Tok::PName || peek().kind == Tok::Angle) next();
        shape.shape_rejections.emplace_back(excerpt(from, peek().pos.byte_offset), "ExtraUnsupported");
      } else {
        break;
      }
    }
    if (peek().kind != Tok::LBrace) fail(peek(), "expected '{' opening the shape of <" + label.text + ">", {"'{'"});
    shape.constraints = block();
    if (skip_semantic_actions()) shape.shape_rejections.emplace_back("semantic action", "SemanticActionsUnsupported");
    return shape;
  }

  std::vector<ShexConstraint> block() {
    expect(Tok::LBrace, "'{'");
    std::vector<ShexConstraint> out;
    while (peek().kind != Tok::RBrace) {
      out.push_back(constraint());
      if (!accept(Tok::Semi)) break;
    }
    if (peek().kind == Tok::Pipe) fail(peek(), "alternatives are outside the supported subset");
    expect(Tok::RBrace, "'}'");
    return out;
  }

  bool skip_semantic_actions() {
    bool any = false;
    while (peek().kind == Tok::Percent) {
      any = true;
      next();
      if (peek().kind == Tok::PName || peek().kind == Tok::Angle) next();
      if (accept(Tok::Percent)) continue;
      expect(Tok::LBrace, "'{' or '%'");
      while (!(peek().kind == Tok::Percent && peek(1).kind == Tok::RBrace)) {
        if (peek().kind == Tok::End) fail(peek(), "unterminated semantic action");
        next();
      }
      next();
      next();
    }
    return any;
  }

  ShexConstraint constraint() {
    const Token& start = peek();
    ShexConstraint c;
    c.position = start.pos;
    if (start.kind == Tok::LBracePipe || start.kind == Tok::LBracketPipe)
      fail(start, "qualifier blocks are WShEx syntax, not ShEx");
    if (start.kind == Tok::Ident && start.text == "a") {
      next();
      c.ns = ShexNamespace::Other;
      c.predicate = "a";
    } else if (start.kind == Tok::PName || start.kind == Tok::Angle) {
      next();
      Name n = resolve(start);
      if (n.ns == ShexNamespace::Wd)
        fail(start, "predicate '" + start.text + "' is in the entity namespace (WShEx input is not accepted here)");
      c.ns = n.ns;
      c.predicate = start.kind == Tok::Angle ? "<" + start.text + ">" : start.text;
      if (auto id = EntityId::parse(n.local); id && id->is_property()) c.property = *id;
      predicate_local_ = n.local;
    } else {
      fail(start, "expected predicate, found " + std::string(describe(start.kind)), {"prefixed name", "IRI"});
    }
    std::string local = predicate_local_;

    c.value = value_expr();
    if (peek().kind == Tok::LBracePipe || peek().kind == Tok::LBracketPipe)
      fail(peek(), "qualifier blocks are WShEx syntax, not ShEx");
    if (auto card = cardinality()) c.card = *card;
    bool actions = skip_semantic_actions();
    c.text = excerpt(start.pos.byte_offset, peek().pos.byte_offset);
    c.rejection = classify_rejection(c, local, actions);
    return c;
  }

  static std::optional<std::string> classify_rejection(const ShexConstraint& c, const std::string& local,
                                                       bool actions) {
    if (actions) return "SemanticActionsUnsupported";
    switch (c.ns) {
      case ShexNamespace::Prov: return "ReferencesUnsupported";
      case ShexNamespace::Wikibase: return local == "rank" ? "RanksUnsupported" : "UnsupportedPredicate";
      case ShexNamespace::Wdt:
      case ShexNamespace::P:
      case ShexNamespace::Ps:
      case ShexNamespace::Pq: break;
      default: return "UnsupportedPredicate";
    }
    if (!c.property) return "UnsupportedPredicate";
    if (c.value.kind == ShexValue::Kind::Unsupported) return "UnsupportedValue";
    if (c.value.kind == ShexValue::Kind::Datatype && !xsd_datatype(c.value.datatype)) return "UnsupportedDatatype";
    if (c.ns == ShexNamespace::P) {
      if (c.value.kind != ShexValue::Kind::Nested) return "StatementNodeUnsupported";
      std::size_t statement_values = 0;
      for (const auto& child : c.value.nested) {
        if (child.rejection) return child.rejection;
        if (child.ns == ShexNamespace::Ps) {
          if (child.property != c.property) return "MismatchedStatementProperty";
          ++statement_values;
        } else if (child.ns != ShexNamespace::Pq) {
          return "UnsupportedPredicate";
        }
      }
      if (statement_values != 1) return "MissingStatementValue";
      return std::nullopt;
    }
    if (c.value.kind == ShexValue::Kind::Nested) return "NestedShapeUnsupported";
    return std::nullopt;
  }

  ShexValue value_expr() {
    ShexValue v;
    const Token& t = peek();
    switch (t.kind) {
      case Tok::At:
        next();
        v.kind = ShexValue::Kind::Ref;
        v.label = expect(Tok::Angle, "shape label after '@'").text;
        return v;
      case Tok::Dot: next(); v.kind = ShexValue::Kind::Any; return v;
      case Tok::LBrace: {
        std::string saved = predicate_local_;
        v.kind = ShexValue::Kind::Nested;
        v.nested = block();
        predicate_local_ = saved;
        return v;
      }
      case Tok::LBracket: {
        next();
        v.kind = ShexValue::Kind::ValueSet;
        while (!accept(Tok::RBracket)) {
          if (peek().kind == Tok::End) fail(peek(), "unterminated value set", {"']'"});
          if (auto val = set_value())
            v.values.push_back(std::move(*val));
          else
            v.kind = ShexValue::Kind::Unsupported;
        }
        if (v.kind == ShexValue::Kind::ValueSet && v.values.empty()) v.kind = ShexValue::Kind::Unsupported;
        return v;
      }
      case Tok::PName: {
        next();
        Name n = resolve(t);
        v.kind = n.ns == ShexNamespace::Xsd ? ShexValue::Kind::Datatype : ShexValue::Kind::Unsupported;
        v.datatype_ns = n.ns;
        v.datatype = n.local;
        return v;
      }
      case Tok::Ident:
        if (keyword_is(t, "IRI") || keyword_is(t, "LITERAL") || keyword_is(t, "NONLITERAL") || keyword_is(t, "BNODE")) {
          next();
          v.kind = ShexValue::Kind::Unsupported;
          return v;
        }
        [[fallthrough]];
      default:
        fail(t, "expected value expression, found " + std::string(describe(t.kind)),
             {"'@<label>'", "datatype", "'['", "'.'", "'{'"});
    }
  }

  std::optional<Value> set_value() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::PName: {
        Name n = resolve(t);
        if (n.ns != ShexNamespace::Wd) return std::nullopt;
        if (auto id = EntityId::parse(n.local)) return Value(*id);
        return std::nullopt;
      }
      case Tok::Angle: {
        Name n = resolve(t);
        if (n.ns != ShexNamespace::Wd) return std::nullopt;
        if (auto id = EntityId::parse(n.local)) return Value(*id);
        return std::nullopt;
      }
      case Tok::String: {
        if (t.text.empty()) return std::nullopt;
        if (accept(Tok::At)) return Value(DataValue::monolingual(t.text, expect(Tok::Ident, "language tag").text));
        if (accept(Tok::Carets)) {
          const Token& dt = next();
          if (dt.kind != Tok::PName) fail(dt, "expected datatype IRI after '^^'");
          Name n = resolve(dt);
          auto type = n.ns == ShexNamespace::Xsd ? xsd_datatype(n.local) : std::nullopt;
          if (!type) return std::nullopt;
          if (*type == Datatype::Time) return Value(DataValue::time(t.text, 11));
          return Value(DataValue(*type, t.text));
        }
        return Value(DataValue::string(t.text));
      }
      case Tok::Number: return Value(DataValue::quantity(t.text));
      default: fail(t, "expected value, found " + std::string(describe(t.kind)));
    }
  }

  std::optional<Cardinality> cardinality() {
    switch (peek().kind) {
      case Tok::Question: next(); return Cardinality::optional();
      case Tok::Star: next(); return Cardinality::star();
      case Tok::Plus: next(); return Cardinality::plus();
      case Tok::LBrace:
        if (peek(1).kind != Tok::Number) return std::nullopt;
        break;
      default: return std::nullopt;
    }
    next();
    unsigned lo = count(next());
    std::optional<unsigned> hi = lo;
    if (accept(Tok::Comma)) {
      if (accept(Tok::Star) || peek().kind == Tok::RBrace)
        hi.reset();
      else
        hi = count(expect(Tok::Number, "upper bound"));
    }
    const Token& close = expect(Tok::RBrace, "'}'");
    if (hi && lo > *hi) fail(close, "cardinality has min > max");
    return Cardinality::range(lo, hi);
  }

  unsigned count(const Token& t) {
    if (t.kind != Tok::Number || !std::all_of(t.text.begin(), t.text.end(), ::isdigit) || t.text.size() > 9)
      fail(t, "expected a non-negative integer bound", {"number"});
    return static_cast<unsigned>(std::stoul(t.text));
  }

  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<ParseDiagnostic> diags_;
  std::map<std::string, std::string> prefixes_;
  std::string predicate_local_;
  ShexSchema schema_;
};

template <class Expr, class Combine>
Expr fold_right(std::vector<Expr> items, Combine combine) {
  Expr acc = std::move(items.back());
  for (std::size_t i = items.size() - 1; i-- > 0;) acc = combine(std::move(items[i]), std::move(acc));
  return acc;
}

ShapeExpr convert_value(const ShexValue& v) {
  switch (v.kind) {
    case ShexValue::Kind::Ref: return ref(v.label);
    case ShexValue::Kind::Datatype: return datatype(*xsd_datatype(v.datatype));
    case ShexValue::Kind::ValueSet: return value_set(v.values);
    default: return any_value();
  }
}

bool is_many(const Cardinality& c) { return !c.max || *c.max > 1; }

std::string card_text(const Cardinality& c) { return c.is_exactly_one() ? "1" : c.str(); }

class Converter {
 public:
  ConversionReport run(const ShexSchema& shex) {
    for (const auto& shape : shex.shapes) convert_shape(shape);
    return std::move(report_);
  }

 private:
  struct Group {
    std::vector<const ShexConstraint*> direct;
    std::vector<const ShexConstraint*> blocks;
  };

  void note(const std::string& shape, std::string message) { report_.notes.push_back({shape, std::move(message)}); }

  static TripleExpr with_card(TripleExpr t, const Cardinality& card) {
    if (card.is_exactly_one()) return t;
    return repeat(std::move(t), card);
  }

  void convert_shape(const ShexShape& shape) {
    for (const auto& [construct, reason] : shape.shape_rejections)
      report_.rejected.push_back({shape.label, construct, reason, shape.position, true});

    std::vector<EntityId> order;
    std::map<EntityId, Group> groups;
    for (const auto& c : shape.constraints) {
      ++report_.input_constraints;
      std::optional<std::string> reason = c.rejection;
      if (!reason && c.ns != ShexNamespace::Wdt && c.ns != ShexNamespace::P) reason = "StatementPatternOutsideBlock";
      if (reason) {
        report_.rejected.push_back({shape.label, c.text, *reason, c.position, false});
        continue;
      }
      if (!groups.contains(*c.property)) order.push_back(*c.property);
      auto& g = groups[*c.property];
      (c.ns == ShexNamespace::Wdt ? g.direct : g.blocks).push_back(&c);
    }

    std::vector<TripleExpr> tcs;
    for (const auto& p : order) {
      const Group& g = groups[p];
      if (g.direct.size() == 1 && g.blocks.size() == 1) {
        tcs.push_back(merged(shape.label, *g.direct.front(), *g.blocks.front()));
        report_.mapped_constraints += 2;
        continue;
      }
      for (const auto* c : g.direct) tcs.push_back(direct(shape.label, *c));
      for (const auto* c : g.blocks) tcs.push_back(with_card(from_block(shape.label, *c), c->card));
      report_.mapped_constraints += g.direct.size() + g.blocks.size();
    }
    TripleExpr te = tcs.empty() ? empty_triple() : fold_right(std::move(tcs), each_of);
    report_.converted.define(shape.label, wshex::shape(std::move(te)));
  }

  TripleExpr direct(const std::string& shape, const ShexConstraint& c) {
    if (c.card == Cardinality::optional())
      note(shape, c.predicate + " constrains only the truthy statement; cardinality ? kept for all :" +
                      c.property->str() + " statements");
    return with_card(tc(*c.property, convert_value(c.value)), c.card);
  }

  // Statement value from ps:, qualifier specifier from the pq: constraints.
  TripleExpr from_block(const std::string& shape, const ShexConstraint& block) {
    const ShexConstraint* statement = nullptr;
    std::vector<PropertySpec> quals;
    for (const auto& child : block.value.nested) {
      if (child.ns == ShexNamespace::Ps) {
        statement = &child;
        if (!child.card.is_exactly_one())
          note(shape, child.predicate + " cardinality " + child.card.str() + " ignored; each statement has one value");
        continue;
      }
      PropertySpec spec = prop_qs(*child.property, convert_value(child.value));
      if (!child.card.is_exactly_one()) spec = repeat_qs(std::move(spec), child.card);
      if (is_many(child.card))
        note(shape, "qualifier " + child.predicate + " keeps source cardinality " + child.card.str() +
                        " inside :" + block.property->str());
      quals.push_back(std::move(spec));
    }
    PropertySpec body = quals.empty() ? empty_qs() : fold_right(std::move(quals), each_of_qs);
    return tc(*block.property, convert_value(statement->value), open_qs(std::move(body)));
  }

  TripleExpr merged(const std::string& shape, const ShexConstraint& direct_c, const ShexConstraint& block) {
    TripleExpr t = from_block(shape, block);
    const auto& core = std::get<TripleConstraint>(t.node);
    if (!(convert_value(direct_c.value) == *core.value))
      note(shape, direct_c.predicate + " and the " + block.predicate + " statement value differ; using the ps: value");
    if (!(direct_c.card == block.card))
      note(shape, direct_c.predicate + " cardinality " + card_text(direct_c.card) + " differs from " + block.predicate +
                      " cardinality " + card_text(block.card) + "; using the latter");
    return with_card(std::move(t), block.card);
  }

  ConversionReport report_;
};

}  // namespace

ShexParse parse_shexc_subset(std::string_view text) { return ShexParser(text).run(); }

ConversionReport convert(const ShexSchema& shex) { return Converter().run(shex); }

}  // namespace wshex

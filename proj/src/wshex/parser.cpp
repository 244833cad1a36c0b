#include "wshex/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>

#include "wshex/error.hpp"

namespace wshex {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool keyword_is(const Token& t, std::string_view kw) {
  if (t.kind != Tok::Ident || t.text.size() != kw.size()) return false;
  for (std::size_t i = 0; i < kw.size(); ++i)
    if (std::toupper(static_cast<unsigned char>(t.text[i])) != kw[i]) return false;
  return true;
}

bool opens(Tok k) {
  return k == Tok::LBrace || k == Tok::LBracePipe || k == Tok::LBracketPipe || k == Tok::LParen ||
         k == Tok::LBracket;
}
bool closes(Tok k) {
  return k == Tok::RBrace || k == Tok::PipeRBrace || k == Tok::PipeRBracket || k == Tok::RParen ||
         k == Tok::RBracket;
}

class Parser {
 public:
  explicit Parser(std::string_view text) {
    auto lexed = tokenize(text);
    toks_ = std::move(lexed.tokens);
    diags_ = std::move(lexed.diagnostics);
    // Lexer errors surface as Invalid tokens; the parser reports where they
    // break the grammar, so keep only the first lexer message per position.
  }

  SchemaParse run() {
    bool any_shape = false;
    while (peek().kind != Tok::End) {
      try {
        if (keyword_is(peek(), "PREFIX")) {
          prefix_decl();
        } else {
          shape_decl();
          any_shape = true;
        }
      } catch (const Failure&) {
        sync_top();
      }
    }
    if (!any_shape && diags_.empty())
      diags_.push_back({peek().pos, "expected shape declaration", {"'<label>'"}});
    for (const auto& [label, pos] : refs_)
      if (!schema_.contains(label)) diags_.push_back({pos, "unresolved shape reference @<" + label + ">", {}});
    for (const auto& d : well_formed(schema_))
      if (d.kind != Diagnostic::Kind::UnresolvedRef) diags_.push_back({{}, d.message + " in " + d.path, {}});

    std::stable_sort(diags_.begin(), diags_.end(), [](const ParseDiagnostic& a, const ParseDiagnostic& b) {
      return a.position.byte_offset < b.position.byte_offset;
    });
    SchemaParse out;
    out.diagnostics = std::move(diags_);
    if (out.diagnostics.empty()) out.schema = std::move(schema_);
    return out;
  }

 private:
  struct Failure {};

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
    if (at.kind == Tok::Invalid) {
      // The lexer already reported this position.
      bool seen = std::any_of(diags_.begin(), diags_.end(),
                              [&](const ParseDiagnostic& d) { return d.position == at.pos; });
      if (seen) throw Failure{};
    }
    diags_.push_back({at.pos, std::move(message), std::move(expected)});
    throw Failure{};
  }

  const Token& expect(Tok kind, std::string_view what) {
    if (peek().kind != kind)
      fail(peek(), "expected " + std::string(what) + ", found " + std::string(describe(peek().kind)),
           {std::string(describe(kind))});
    return next();
  }

  // Skips to the next top-level declaration.
  void sync_top() {
    int depth = 0;
    bool moved = false;
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (moved && depth == 0 && (keyword_is(t, "PREFIX") || (t.kind == Tok::Angle && prev_kind() != Tok::At &&
                                                               !keyword_is(toks_[pos_ - 1], "PREFIX") &&
                                                               toks_[pos_ - 1].kind != Tok::PName)))
        return;
      if (opens(t.kind)) ++depth;
      if (closes(t.kind) && depth > 0) --depth;
      next();
      moved = true;
    }
  }

  // Skips to a separator or closer at the current nesting level.
  void sync_to(std::initializer_list<Tok> stops) {
    int depth = 0;
    while (peek().kind != Tok::End) {
      Tok k = peek().kind;
      if (depth == 0 && std::find(stops.begin(), stops.end(), k) != stops.end()) return;
      if (depth == 0 && closes(k)) return;
      if (opens(k)) ++depth;
      if (closes(k)) --depth;
      next();
    }
  }

  Tok prev_kind() const { return pos_ == 0 ? Tok::End : toks_[pos_ - 1].kind; }

  void prefix_decl() {
    next();  // PREFIX
    const Token& name = expect(Tok::PName, "prefix name");
    if (name.text.back() != ':') fail(name, "prefix name must end with ':'");
    const Token& iri = expect(Tok::Angle, "IRI");
    std::string prefix = name.text.substr(0, name.text.size() - 1);
    prefixes_[prefix] = iri.text;
    auto it = std::find_if(schema_.prefixes.begin(), schema_.prefixes.end(),
                           [&](const Prefix& p) { return p.name == prefix; });
    if (it != schema_.prefixes.end())
      it->iri = iri.text;
    else
      schema_.prefixes.push_back({prefix, iri.text});
  }

  void shape_decl() {
    const Token& label = peek();
    if (label.kind != Tok::Angle)
      fail(label, "expected shape declaration, found " + std::string(describe(label.kind)), {"'<label>'"});
    next();
    if (label.text.empty()) fail(label, "empty shape label");
    auto se = shape_expr();
    if (schema_.contains(label.text)) {
      diags_.push_back({label.pos, "duplicate shape label <" + label.text + ">", {}});
      return;
    }
    schema_.define(label.text, std::move(se));
  }

  ShapeExpr shape_expr() {
    ShapeExpr acc = shape_atom();
    while (keyword_is(peek(), "AND")) {
      next();
      acc = shape_and(std::move(acc), shape_atom());
    }
    return acc;
  }

  ShapeExpr shape_atom() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::At: {
        next();
        const Token& label = expect(Tok::Angle, "shape label after '@'");
        refs_.emplace_back(label.text, label.pos);
        return ref(label.text);
      }
      case Tok::LBracket: {
        next();
        std::vector<Value> values;
        while (peek().kind != Tok::RBracket) {
          if (peek().kind == Tok::End) fail(peek(), "unterminated value set", {"']'"});
          values.push_back(value());
        }
        if (values.empty()) fail(peek(), "empty value set", {"value"});
        next();
        return value_set(std::move(values));
      }
      case Tok::Dot: next(); return any_value();
      case Tok::LBrace: return shape_body(false);
      case Tok::LParen: {
        next();
        auto inner = shape_expr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Ident: {
        if (keyword_is(t, "CLOSED")) {
          next();
          if (peek().kind != Tok::LBrace) fail(peek(), "expected '{' after CLOSED", {"'{'"});
          return shape_body(true);
        }
        if (auto dt = datatype_from_name(t.text)) {
          next();
          return datatype(*dt);
        }
        std::vector<std::string> known;
        for (auto d : all_datatypes()) known.emplace_back(datatype_name(d));
        fail(t, "unknown datatype '" + t.text + "'", std::move(known));
      }
      default:
        fail(t, "expected shape expression, found " + std::string(describe(t.kind)),
             {"'@<label>'", "datatype", "'['", "'.'", "'{'", "'('"});
    }
  }

  ShapeExpr shape_body(bool closed) {
    expect(Tok::LBrace, "'{'");
    TripleExpr te = empty_triple();
    if (peek().kind != Tok::RBrace) te = triple_expr();
    expect(Tok::RBrace, "'}'");
    return shape(std::move(te), closed);
  }

  static bool ends_sequence(Tok k) {
    return k == Tok::RBrace || k == Tok::RParen || k == Tok::Pipe || k == Tok::End || k == Tok::PipeRBrace ||
           k == Tok::PipeRBracket;
  }

  TripleExpr triple_expr() {
    std::vector<TripleExpr> alts;
    alts.push_back(each_of_seq());
    while (accept(Tok::Pipe)) alts.push_back(each_of_seq());
    return fold_right(std::move(alts), one_of);
  }

  TripleExpr each_of_seq() {
    std::vector<TripleExpr> items;
    bool failed = false;
    while (!ends_sequence(peek().kind)) {
      try {
        items.push_back(unary_te());
      } catch (const Failure&) {
        failed = true;
        sync_to({Tok::Semi});
        if (accept(Tok::Semi)) continue;
        break;
      }
      if (!accept(Tok::Semi)) break;
    }
    if (items.empty()) {
      if (!failed) fail(peek(), "expected triple constraint", {"predicate", "'('"});
      return empty_triple();
    }
    return fold_right(std::move(items), each_of);
  }

  TripleExpr unary_te() {
    if (accept(Tok::LParen)) {
      TripleExpr inner = empty_triple();
      if (peek().kind != Tok::RParen) inner = triple_expr();
      expect(Tok::RParen, "')'");
      if (auto card = cardinality()) return repeat(std::move(inner), *card);
      return inner;
    }
    EntityId p = predicate();
    ShapeExpr v = shape_atom();
    QualifierSpec qs = open_qs(empty_qs());
    if (peek().kind == Tok::LBracePipe || peek().kind == Tok::LBracketPipe) qs = qualifier_block();
    auto card = cardinality();
    if (card && (peek().kind == Tok::LBracePipe || peek().kind == Tok::LBracketPipe))
      fail(peek(), "qualifier block must precede the cardinality");
    auto t = tc(p, std::move(v), std::move(qs));
    if (card) return repeat(std::move(t), *card);
    return t;
  }

  QualifierSpec qualifier_block() {
    const Token& open = next();
    bool closed = open.kind == Tok::LBracketPipe;
    Tok closer = closed ? Tok::PipeRBracket : Tok::PipeRBrace;
    PropertySpec body = empty_qs();
    try {
      if (peek().kind != closer) body = prop_spec();
      expect(closer, closed ? "'|]'" : "'|}'");
    } catch (const Failure&) {
      sync_to({closer});
      if (!accept(closer)) throw;
    }
    return closed ? closed_qs(std::move(body)) : open_qs(std::move(body));
  }

  PropertySpec prop_spec() {
    std::vector<PropertySpec> alts;
    alts.push_back(qs_each_of());
    while (accept(Tok::Pipe)) alts.push_back(qs_each_of());
    return fold_right(std::move(alts), one_of_qs);
  }

  PropertySpec qs_each_of() {
    std::vector<PropertySpec> items;
    while (!ends_sequence(peek().kind)) {
      items.push_back(qs_unary());
      if (!accept(Tok::Comma)) break;
    }
    if (items.empty()) fail(peek(), "expected qualifier constraint", {"predicate", "'('"});
    return fold_right(std::move(items), each_of_qs);
  }

  PropertySpec qs_unary() {
    if (accept(Tok::LParen)) {
      PropertySpec inner = empty_qs();
      if (peek().kind != Tok::RParen) inner = prop_spec();
      expect(Tok::RParen, "')'");
      if (auto card = cardinality()) return repeat_qs(std::move(inner), *card);
      return inner;
    }
    EntityId p = predicate();
    ShapeExpr v = shape_atom();
    auto spec = prop_qs(p, std::move(v));
    if (auto card = cardinality()) return repeat_qs(std::move(spec), *card);
    return spec;
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
    const Token& open = next();
    unsigned lo = count(next());
    std::optional<unsigned> hi = lo;
    if (accept(Tok::Comma)) {
      if (accept(Tok::Star) || peek().kind == Tok::RBrace)
        hi.reset();
      else
        hi = count(expect(Tok::Number, "upper bound"));
    }
    expect(Tok::RBrace, "'}'");
    if (hi && lo > *hi) {
      diags_.push_back({open.pos, "cardinality {" + std::to_string(lo) + "," + std::to_string(*hi) +
                                      "} has min > max", {}});
      hi = lo;
    }
    return Cardinality::range(lo, hi);
  }

  unsigned count(const Token& t) {
    if (t.kind != Tok::Number || !std::all_of(t.text.begin(), t.text.end(), ::isdigit) || t.text.size() > 9)
      fail(t, "expected a non-negative integer bound", {"number"});
    return static_cast<unsigned>(std::stoul(t.text));
  }

  EntityId predicate() {
    const Token& t = peek();
    if (t.kind != Tok::PName)
      fail(t, "expected predicate, found " + std::string(describe(t.kind)), {"prefixed name"});
    next();
    auto id = resolve(t);
    if (!id || !id->is_property()) fail(t, "predicate '" + t.text + "' is not a property id", {":P<n>"});
    return *id;
  }

  std::optional<EntityId> resolve(const Token& t) {
    auto colon = t.text.find(':');
    std::string prefix = t.text.substr(0, colon);
    if (!prefix.empty() && !prefixes_.contains(prefix)) fail(t, "undeclared prefix '" + prefix + ":'");
    return EntityId::parse(std::string_view(t.text).substr(colon + 1));
  }

  Value value() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::PName: {
        next();
        auto id = resolve(t);
        if (!id) fail(t, "'" + t.text + "' is not an entity id", {":Q<n>", ":P<n>"});
        return *id;
      }
      case Tok::String: {
        next();
        if (t.text.empty()) fail(t, "empty literal");
        if (accept(Tok::At)) {
          const Token& lang = expect(Tok::Ident, "language tag");
          return DataValue::monolingual(t.text, lang.text);
        }
        if (accept(Tok::Carets)) {
          const Token& dt = expect(Tok::Ident, "datatype name");
          auto type = datatype_from_name(dt.text);
          if (!type) fail(dt, "unknown datatype '" + dt.text + "'");
          if (*type == Datatype::Item || *type == Datatype::Property) {
            auto id = EntityId::parse(t.text);
            if (!id) fail(t, "'" + t.text + "' is not an entity id");
            return *id;
          }
          return DataValue(*type, t.text);
        }
        return DataValue::string(t.text);
      }
      case Tok::Number: next(); return DataValue::quantity(t.text);
      default:
        fail(t, "expected value, found " + std::string(describe(t.kind)),
             {"prefixed name", "string literal", "number", "']'"});
    }
  }

  template <class Expr, class Combine>
  static Expr fold_right(std::vector<Expr> items, Combine combine) {
    Expr acc = std::move(items.back());
    for (std::size_t i = items.size() - 1; i-- > 0;) acc = combine(std::move(items[i]), std::move(acc));
    return acc;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<ParseDiagnostic> diags_;
  std::map<std::string, std::string> prefixes_;
  std::vector<std::pair<std::string, SourcePosition>> refs_;
  Schema schema_;
};

// ---------------------------------------------------------------------------
// Rendering

bool is_empty(const TripleExpr& te) { return std::holds_alternative<EmptyTriple>(te.node); }
bool is_seq(const TripleExpr& te) { return std::holds_alternative<EachOf>(te.node); }
bool is_alt(const TripleExpr& te) { return std::holds_alternative<OneOf>(te.node); }
bool is_empty(const PropertySpec& ps) { return std::holds_alternative<EmptyQs>(ps.node); }
bool is_seq(const PropertySpec& ps) { return std::holds_alternative<EachOfQs>(ps.node); }
bool is_alt(const PropertySpec& ps) { return std::holds_alternative<OneOfQs>(ps.node); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

std::string atom(const ShapeExpr& se);
std::string te_str(const TripleExpr& te, std::string_view sep = " ; ");
std::string ps_str(const PropertySpec& ps);

std::string cond_str(const NodeConstraint& c) {
  return std::visit(overloaded{
                        [](const ValueSetCond& vs) {
                          std::string out = "[";
                          for (const auto& v : vs.values) out += " " + render_value(v);
                          return out + " ]";
                        },
                        [](const DatatypeCond& d) { return std::string(datatype_name(d.type)); },
                        [](const AnyValueCond&) { return std::string("."); },
                    },
                    c);
}

std::string se_str(const ShapeExpr& se) {
  if (auto* a = std::get_if<ShapeAnd>(&se.node)) {
    std::string lhs = std::holds_alternative<ShapeAnd>(a->lhs->node) ? se_str(*a->lhs) : atom(*a->lhs);
    std::string rhs = std::holds_alternative<ShapeAnd>(a->rhs->node) ? "(" + se_str(*a->rhs) + ")" : atom(*a->rhs);
    return lhs + " AND " + rhs;
  }
  return atom(se);
}

std::string atom(const ShapeExpr& se) {
  return std::visit(overloaded{
                        [](const NodeConstraint& c) { return cond_str(c); },
                        [&](const ShapeAnd&) { return "(" + se_str(se) + ")"; },
                        [](const ShapeRef& r) { return "@<" + r.label + ">"; },
                        [](const Shape& s) {
                          std::string out = s.closed ? "CLOSED " : "";
                          if (is_empty(*s.expr)) return out + "{ }";
                          return out + "{ " + te_str(*s.expr) + " }";
                        },
                    },
                    se.node);
}

std::string qs_str(const QualifierSpec& qs) {
  bool closed = qs.openness == Openness::Closed;
  std::string body = is_empty(*qs.body) ? " " : " " + ps_str(*qs.body) + " ";
  return closed ? "[|" + body + "|]" : "{|" + body + "|}";
}

std::string tc_str(const TripleConstraint& t) {
  std::string out = ":" + t.predicate.str() + " " + atom(*t.value);
  bool trivial_qs = t.qualifiers.openness == Openness::Open && is_empty(*t.qualifiers.body);
  if (!trivial_qs) out += " " + qs_str(t.qualifiers);
  return out;
}

std::string te_paren(const TripleExpr& te) { return is_empty(te) ? "( )" : "(" + te_str(te) + ")"; }
std::string te_unary(const TripleExpr& te) {
  if (auto* t = std::get_if<TripleConstraint>(&te.node)) return tc_str(*t);
  return te_paren(te);
}

std::string te_str(const TripleExpr& te, std::string_view sep) {
  return std::visit(
      overloaded{
          [&](const EachOf& e) {
            std::string lhs = is_seq(*e.lhs) || is_alt(*e.lhs) || is_empty(*e.lhs) ? te_paren(*e.lhs) : te_str(*e.lhs);
            std::string rhs = is_alt(*e.rhs) || is_empty(*e.rhs) ? te_paren(*e.rhs) : te_str(*e.rhs, sep);
            return lhs + std::string(sep) + rhs;
          },
          [&](const OneOf& e) {
            std::string lhs = is_alt(*e.lhs) || is_empty(*e.lhs) ? te_paren(*e.lhs) : te_str(*e.lhs);
            std::string rhs = is_empty(*e.rhs) ? te_paren(*e.rhs) : te_str(*e.rhs);
            return lhs + " | " + rhs;
          },
          [](const Star& s) { return te_unary(*s.expr) + " *"; },
          [](const Repeat& r) {
            auto card = r.card.str();
            return card.empty() ? te_unary(*r.expr) : te_unary(*r.expr) + " " + card;
          },
          [](const TripleConstraint& t) { return tc_str(t); },
          [](const EmptyTriple&) { return std::string("( )"); },
      },
      te.node);
}

std::string ps_paren(const PropertySpec& ps) { return is_empty(ps) ? "( )" : "(" + ps_str(ps) + ")"; }
std::string ps_unary(const PropertySpec& ps) {
  if (auto* p = std::get_if<PropQs>(&ps.node)) return ":" + p->property.str() + " " + atom(*p->value);
  return ps_paren(ps);
}

std::string ps_str(const PropertySpec& ps) {
  return std::visit(
      overloaded{
          [](const EachOfQs& e) {
            std::string lhs = is_seq(*e.lhs) || is_alt(*e.lhs) || is_empty(*e.lhs) ? ps_paren(*e.lhs) : ps_str(*e.lhs);
            std::string rhs = is_alt(*e.rhs) || is_empty(*e.rhs) ? ps_paren(*e.rhs) : ps_str(*e.rhs);
            return lhs + ", " + rhs;
          },
          [](const OneOfQs& e) {
            std::string lhs = is_alt(*e.lhs) || is_empty(*e.lhs) ? ps_paren(*e.lhs) : ps_str(*e.lhs);
            std::string rhs = is_empty(*e.rhs) ? ps_paren(*e.rhs) : ps_str(*e.rhs);
            return lhs + " | " + rhs;
          },
          [](const StarQs& s) { return ps_unary(*s.spec) + " *"; },
          [](const RepeatQs& r) {
            auto card = r.card.str();
            return card.empty() ? ps_unary(*r.spec) : ps_unary(*r.spec) + " " + card;
          },
          [](const PropQs& p) { return ":" + p.property.str() + " " + atom(*p.value); },
          [](const EmptyQs&) { return std::string("( )"); },
      },
      ps.node);
}

std::string top_str(const ShapeExpr& se) {
  auto* s = std::get_if<Shape>(&se.node);
  if (!s) return se_str(se);
  std::string out = s->closed ? "CLOSED {" : "{";
  if (is_empty(*s->expr)) return out + "\n}";
  return out + "\n  " + te_str(*s->expr, " ;\n  ") + "\n}";
}

}  // namespace

SchemaParse parse_schema(std::string_view text) { return Parser(text).run(); }

std::string render_value(const Value& v) {
  if (auto* e = as_entity(v)) return ":" + e->str();
  const auto& d = std::get<DataValue>(v);
  switch (d.type()) {
    case Datatype::String: return "\"" + escape(d.lexical()) + "\"";
    case Datatype::MonolingualText: {
      auto* m = std::get_if<MonolingualValue>(&d.structured());
      return "\"" + escape(d.lexical()) + "\"@" + (m ? m->language : std::string("und"));
    }
    case Datatype::Quantity: {
      static const std::regex number(R"([+-]?[0-9]+(\.[0-9]+)?)");
      if (std::regex_match(d.lexical(), number)) return d.lexical();
      break;
    }
    default: break;
  }
  return "\"" + escape(d.lexical()) + "\"^^" + std::string(datatype_name(d.type()));
}

std::string render_shape_expr(const ShapeExpr& se) { return se_str(se); }
std::string render_triple_expr(const TripleExpr& te) { return te_str(te); }
std::string render_property_spec(const PropertySpec& ps) { return ps_str(ps); }

std::string render_schema(const Schema& schema) {
  std::string out;
  bool has_default = std::any_of(schema.prefixes.begin(), schema.prefixes.end(),
                                 [](const Prefix& p) { return p.name.empty(); });
  if (!has_default) out += "PREFIX : <" + std::string(kWikidataEntityIri) + ">\n";
  for (const auto& p : schema.prefixes) out += "PREFIX " + p.name + ": <" + p.iri + ">\n";
  out += "\n";
  for (const auto& label : schema.labels()) out += "<" + label + "> " + top_str(*schema.find(label)) + "\n";
  return out;
}

}  // namespace wshex

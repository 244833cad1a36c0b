#pragma once

// Brute-force reference semantics used to check the validator.
//
// The typing is computed by Kleene iteration from the full set of
// (value, label) pairs down to the greatest fixed point. Triple and property
// expressions are matched by enumerating every split of the statement (or
// qualifier) set as bitmasks, directly on the surface AST: cardinalities are
// interpreted as "between m and n pieces" instead of being desugared.

#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wshex/ast.hpp"
#include "wshex/model.hpp"

namespace oracle {

using namespace wshex;

class Oracle {
 public:
  Oracle(const WikibaseGraph& graph, const Schema& schema, bool pedantic = false,
         std::vector<Value> extra_nodes = {})
      : graph_(graph), schema_(schema), pedantic_(pedantic) {
    for (const auto& q : graph.items()) add_node(q);
    for (const auto& p : graph.properties()) add_node(p);
    for (const auto& d : graph.data_values()) add_node(d);
    for (const auto& v : extra_nodes) add_node(v);
    solve();
  }

  bool conforms(const Value& v, const std::string& label) const {
    return typing_.contains({value_key(v), label});
  }

  std::size_t typing_size() const { return typing_.size(); }

 private:
  using Pair = std::pair<std::string, std::string>;

  void add_node(const Value& v) {
    if (keys_.insert(value_key(v)).second) nodes_.push_back(v);
  }

  void solve() {
    for (const auto& v : nodes_)
      for (const auto& l : schema_.labels()) typing_.insert({value_key(v), l});
    bool changed = true;
    while (changed) {
      changed = false;
      std::set<Pair> next;
      for (const auto& v : nodes_)
        for (const auto& l : schema_.labels()) {
          if (!typing_.contains({value_key(v), l})) continue;
          if (se_holds(v, *schema_.find(l)))
            next.insert({value_key(v), l});
          else
            changed = true;
        }
      typing_ = std::move(next);
    }
  }

  static bool cond_holds(const NodeConstraint& c, const Value& v) {
    if (auto* vs = std::get_if<ValueSetCond>(&c)) {
      for (const auto& x : vs->values)
        if (value_key(x) == value_key(v)) return true;
      return false;
    }
    if (auto* dt = std::get_if<DatatypeCond>(&c)) {
      if (auto* e = as_entity(v)) {
        if (dt->type == Datatype::Item) return e->kind() == EntityKind::Item;
        if (dt->type == Datatype::Property) return e->kind() == EntityKind::Property;
        return false;
      }
      return as_data(v)->type() == dt->type;
    }
    return true;
  }

  bool se_holds(const Value& v, const ShapeExpr& se) {
    if (auto* c = std::get_if<NodeConstraint>(&se.node)) return cond_holds(*c, v);
    if (auto* a = std::get_if<ShapeAnd>(&se.node)) return se_holds(v, *a->lhs) && se_holds(v, *a->rhs);
    if (auto* r = std::get_if<ShapeRef>(&se.node)) return typing_.contains({value_key(v), r->label});
    const auto& s = std::get<Shape>(se.node);
    std::set<EntityId> mentioned;
    collect_preds(*s.expr, mentioned);
    std::vector<const Statement*> ts;
    if (auto* e = as_entity(v))
      for (const auto& st : graph_.statements())
        if (st.subject == *e && (s.closed || mentioned.contains(st.property))) ts.push_back(&st);
    if (ts.size() > 20) return false;
    std::uint32_t all = ts.empty() ? 0 : (std::uint32_t{1} << ts.size()) - 1;
    Memo memo;
    return te_holds(ts, memo, all, *s.expr);
  }

  static void collect_preds(const TripleExpr& te, std::set<EntityId>& out) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, EachOf> || std::is_same_v<T, OneOf>) {
            collect_preds(*n.lhs, out);
            collect_preds(*n.rhs, out);
          } else if constexpr (std::is_same_v<T, Star> || std::is_same_v<T, Repeat>) {
            collect_preds(*n.expr, out);
          } else if constexpr (std::is_same_v<T, TripleConstraint>) {
            out.insert(n.predicate);
          }
        },
        te.node);
  }

  static void collect_preds(const PropertySpec& ps, std::set<EntityId>& out) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, EachOfQs> || std::is_same_v<T, OneOfQs>) {
            collect_preds(*n.lhs, out);
            collect_preds(*n.rhs, out);
          } else if constexpr (std::is_same_v<T, StarQs> || std::is_same_v<T, RepeatQs>) {
            collect_preds(*n.spec, out);
          } else if constexpr (std::is_same_v<T, PropQs>) {
            out.insert(n.property);
          }
        },
        ps.node);
  }

  // Every submask of `mask`, including 0 and `mask` itself.
  template <class F>
  static bool any_split(std::uint32_t mask, F&& f) {
    for (std::uint32_t sub = mask;; sub = (sub - 1) & mask) {
      if (f(sub, mask ^ sub)) return true;
      if (sub == 0) return false;
    }
  }

  // Between lo and hi (hi < 0: unbounded) pieces, each matched by `piece`.
  template <class F>
  static bool pieces(std::uint32_t mask, int lo, int hi, F&& piece) {
    if (mask == 0 && lo == 0) return true;
    if (hi == 0) return false;
    for (std::uint32_t sub = mask;; sub = (sub - 1) & mask) {
      bool allowed = sub != 0 || lo > 0;
      if (allowed && piece(sub) && pieces(mask ^ sub, lo > 0 ? lo - 1 : 0, hi < 0 ? -1 : hi - 1, piece))
        return true;
      if (sub == 0) return false;
    }
  }

  using Memo = std::map<std::pair<std::uint32_t, const void*>, bool>;

  bool te_holds(const std::vector<const Statement*>& ts, Memo& memo, std::uint32_t mask, const TripleExpr& te) {
    auto key = std::make_pair(mask, static_cast<const void*>(&te));
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool r = std::visit(
        [&](const auto& n) -> bool {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, EachOf>) {
            return any_split(mask, [&](std::uint32_t a, std::uint32_t b) {
              return te_holds(ts, memo, a, *n.lhs) && te_holds(ts, memo, b, *n.rhs);
            });
          } else if constexpr (std::is_same_v<T, OneOf>) {
            return te_holds(ts, memo, mask, *n.lhs) || te_holds(ts, memo, mask, *n.rhs);
          } else if constexpr (std::is_same_v<T, Star>) {
            return pieces(mask, 0, -1, [&](std::uint32_t s) { return te_holds(ts, memo, s, *n.expr); });
          } else if constexpr (std::is_same_v<T, Repeat>) {
            int hi = n.card.max ? static_cast<int>(*n.card.max) : -1;
            return pieces(mask, static_cast<int>(n.card.min), hi,
                          [&](std::uint32_t s) { return te_holds(ts, memo, s, *n.expr); });
          } else if constexpr (std::is_same_v<T, TripleConstraint>) {
            if (std::popcount(mask) != 1) return false;
            const Statement& st = *ts[std::countr_zero(mask)];
            return st.property == n.predicate && se_holds(st.value, *n.value) && qs_holds(st.qualifiers, n.qualifiers);
          } else {
            return mask == 0;
          }
        },
        te.node);
    memo[key] = r;
    return r;
  }

  bool qs_holds(const std::vector<Qualifier>& quals, const QualifierSpec& qs) {
    std::set<EntityId> mentioned;
    collect_preds(*qs.body, mentioned);
    std::vector<const Qualifier*> s;
    for (const auto& q : quals)
      if (qs.openness == Openness::Closed || mentioned.contains(q.property)) s.push_back(&q);
    std::uint32_t all = s.empty() ? 0 : (std::uint32_t{1} << s.size()) - 1;
    return ps_holds(s, all, *qs.body);
  }

  bool ps_holds(const std::vector<const Qualifier*>& s, std::uint32_t mask, const PropertySpec& ps) {
    return std::visit(
        [&](const auto& n) -> bool {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, EachOfQs>) {
            if (pedantic_) return ps_holds(s, mask, *n.lhs) && ps_holds(s, mask, *n.rhs);
            return any_split(mask, [&](std::uint32_t a, std::uint32_t b) {
              return ps_holds(s, a, *n.lhs) && ps_holds(s, b, *n.rhs);
            });
          } else if constexpr (std::is_same_v<T, OneOfQs>) {
            return ps_holds(s, mask, *n.lhs) || ps_holds(s, mask, *n.rhs);
          } else if constexpr (std::is_same_v<T, StarQs>) {
            return pieces(mask, 0, -1, [&](std::uint32_t x) { return ps_holds(s, x, *n.spec); });
          } else if constexpr (std::is_same_v<T, RepeatQs>) {
            int hi = n.card.max ? static_cast<int>(*n.card.max) : -1;
            return pieces(mask, static_cast<int>(n.card.min), hi,
                          [&](std::uint32_t x) { return ps_holds(s, x, *n.spec); });
          } else if constexpr (std::is_same_v<T, PropQs>) {
            if (std::popcount(mask) != 1) return false;
            const Qualifier& q = *s[std::countr_zero(mask)];
            return q.property == n.property && se_holds(q.value, *n.value);
          } else {
            return mask == 0;
          }
        },
        ps.node);
  }

  const WikibaseGraph& graph_;
  const Schema& schema_;
  bool pedantic_;
  std::vector<Value> nodes_;
  std::set<std::string> keys_;
  std::set<Pair> typing_;
};

}  // namespace oracle

#include "wshex/validator.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <thread>
#include <unordered_map>

#include "wshex/error.hpp"
#include "wshex/parser.hpp"

namespace wshex {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

class Budget {
 public:
  explicit Budget(std::uint64_t limit) : limit_(limit) {}
  void reset() { used_ = 0; }
  void step(std::uint64_t n = 1) {
    used_ += n;
    if (used_ > limit_)
      throw Error(ErrorCode::EngineLimit, "step budget of " + std::to_string(limit_) + " exhausted");
  }

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

using Counts = std::vector<std::uint32_t>;

struct CompiledQs;

// A triple constraint or a property constraint, numbered in depth-first
// order so that every subexpression owns a contiguous range of leaves.
struct Leaf {
  EntityId property;
  const ShapeExpr* value;
  const CompiledQs* qs;  // null for property constraints
};

struct BagNode {
  enum class Kind : std::uint8_t { Each, One, Star, Leaf, Empty };
  Kind kind;
  int lhs = -1;  // Star keeps its operand here
  int rhs = -1;
  int leaf = -1;
  int lo = 0;
  int hi = 0;
};

struct Bag {
  std::vector<BagNode> nodes;
  int root = -1;
  std::vector<Leaf> leaves;
  std::vector<bool> under_star;  // leaves outside any Star are used at most once
  std::set<EntityId> preds;
};

struct CompiledQs {
  Openness openness;
  const PropertySpec* body;
  Bag bag;
};

bool is_zero(const Counts& v, int lo, int hi) {
  for (int i = lo; i < hi; ++i)
    if (v[i]) return false;
  return true;
}

void clear_range(Counts& v, int lo, int hi) {
  for (int i = lo; i < hi; ++i) v[i] = 0;
}

// Decides whether a vector of per-leaf counts is in the bag language of the
// compiled expression.
class BagMatcher {
 public:
  BagMatcher(const Bag& bag, Budget& budget) : bag_(bag), budget_(budget) {}

  bool match(int n, const Counts& v) {
    budget_.step();
    const BagNode& node = bag_.nodes[n];
    switch (node.kind) {
      case BagNode::Kind::Leaf: return v[node.leaf] == 1;
      case BagNode::Kind::Empty: return true;
      case BagNode::Kind::Each: {
        const BagNode& a = bag_.nodes[node.lhs];
        const BagNode& b = bag_.nodes[node.rhs];
        Counts va = v, vb = v;
        clear_range(va, b.lo, b.hi);
        clear_range(vb, a.lo, a.hi);
        return match(node.lhs, va) && match(node.rhs, vb);
      }
      case BagNode::Kind::One: {
        const BagNode& a = bag_.nodes[node.lhs];
        const BagNode& b = bag_.nodes[node.rhs];
        return (is_zero(v, b.lo, b.hi) && match(node.lhs, v)) || (is_zero(v, a.lo, a.hi) && match(node.rhs, v));
      }
      case BagNode::Kind::Star: return match_star(n, v);
    }
    return false;
  }

 private:
  std::string key(int n, const Counts& v) const {
    const BagNode& node = bag_.nodes[n];
    std::string k = std::to_string(n) + ":";
    for (int i = node.lo; i < node.hi; ++i) k += std::to_string(v[i]) + ",";
    return k;
  }

  // Breadth-first search from the empty bag, adding one non-empty repetition
  // of the operand at a time, until `v` is reached.
  bool match_star(int n, const Counts& v) {
    const BagNode& node = bag_.nodes[n];
    if (is_zero(v, node.lo, node.hi)) return true;
    auto k = key(n, v);
    if (auto it = star_memo_.find(k); it != star_memo_.end()) return it->second;

    bool found = false;
    std::set<Counts> seen;
    std::deque<Counts> queue{Counts(v.size(), 0)};
    while (!queue.empty() && !found) {
      Counts cur = std::move(queue.front());
      queue.pop_front();
      Counts rest = v;
      for (std::size_t i = 0; i < v.size(); ++i) rest[i] -= cur[i];
      for (const Counts& u : gen(node.lhs, rest)) {
        if (is_zero(u, node.lo, node.hi)) continue;
        budget_.step();
        Counts nxt = cur;
        for (int i = node.lo; i < node.hi; ++i) nxt[i] += u[i];
        if (nxt == v) {
          found = true;
          break;
        }
        if (seen.insert(nxt).second) queue.push_back(std::move(nxt));
      }
    }
    star_memo_.emplace(std::move(k), found);
    return found;
  }

  // All count vectors below `bound` matched by node n.
  const std::vector<Counts>& gen(int n, const Counts& bound) {
    auto k = key(n, bound);
    if (auto it = gen_memo_.find(k); it != gen_memo_.end()) return it->second;
    const BagNode& node = bag_.nodes[n];
    std::set<Counts> out;
    Counts zero(bound.size(), 0);
    switch (node.kind) {
      case BagNode::Kind::Leaf:
        if (bound[node.leaf] >= 1) {
          Counts e = zero;
          e[node.leaf] = 1;
          out.insert(std::move(e));
        }
        break;
      case BagNode::Kind::Empty: out.insert(zero); break;
      case BagNode::Kind::One: {
        const auto& a = gen(node.lhs, bound);
        out.insert(a.begin(), a.end());
        const auto& b = gen(node.rhs, bound);
        out.insert(b.begin(), b.end());
        break;
      }
      case BagNode::Kind::Each: {
        const auto& a = gen(node.lhs, bound);
        const auto& b = gen(node.rhs, bound);
        for (const auto& x : a)
          for (const auto& y : b) {
            budget_.step();
            Counts s = x;
            for (std::size_t i = 0; i < s.size(); ++i) s[i] += y[i];
            out.insert(std::move(s));
          }
        break;
      }
      case BagNode::Kind::Star: {
        std::deque<Counts> queue{zero};
        out.insert(zero);
        while (!queue.empty()) {
          Counts cur = std::move(queue.front());
          queue.pop_front();
          Counts rest = bound;
          for (std::size_t i = 0; i < rest.size(); ++i) rest[i] -= cur[i];
          for (const Counts& u : gen(node.lhs, rest)) {
            if (is_zero(u, node.lo, node.hi)) continue;
            budget_.step();
            Counts nxt = cur;
            for (std::size_t i = 0; i < nxt.size(); ++i) nxt[i] += u[i];
            if (out.insert(nxt).second) queue.push_back(std::move(nxt));
          }
        }
        break;
      }
    }
    return gen_memo_.emplace(std::move(k), std::vector<Counts>(out.begin(), out.end())).first->second;
  }

  const Bag& bag_;
  Budget& budget_;
  std::unordered_map<std::string, bool> star_memo_;
  std::map<std::string, std::vector<Counts>> gen_memo_;
};

std::string describe_cond(const NodeConstraint& c) { return render_shape_expr(cond(c)); }

std::string node_name(const Value& v) { return value_to_string(v); }

}  // namespace

bool satisfies_cond(const NodeConstraint& c, const Value& v) {
  return std::visit(overloaded{
                        [&](const ValueSetCond& vs) {
                          return std::find(vs.values.begin(), vs.values.end(), v) != vs.values.end();
                        },
                        [&](const DatatypeCond& d) {
                          if (auto* e = as_entity(v)) {
                            return (d.type == Datatype::Item && e->is_item()) ||
                                   (d.type == Datatype::Property && e->is_property());
                          }
                          return std::get<DataValue>(v).type() == d.type;
                        },
                        [](const AnyValueCond&) { return true; },
                    },
                    c);
}

struct Validator::Impl {
  Impl(const WikibaseGraph& g, const Schema& s, ValidatorOptions o)
      : graph(g), schema(desugar(s)), options(o), budget(o.step_budget) {}

  const WikibaseGraph& graph;
  Schema schema;  // desugared
  ValidatorOptions options;
  Budget budget;

  std::unordered_map<const TripleExpr*, std::unique_ptr<Bag>> te_cache;
  std::unordered_map<const QualifierSpec*, std::unique_ptr<CompiledQs>> qs_cache;
  std::deque<ShapeExpr> adhoc_se;
  std::deque<TripleExpr> adhoc_te;
  std::deque<QualifierSpec> adhoc_qs;

  struct Pair {
    Value node;
    std::string label;
    bool refuted = false;
    bool uncertain = false;  // refuted while an engine limit was in play
    bool queued = false;
    std::vector<int> dependents;
  };
  std::vector<Pair> pairs;
  std::unordered_map<std::string, int> pair_index;
  std::deque<int> worklist;
  int current = -1;
  bool consulted_uncertain = false;

  enum class Mode { Fixpoint, Frozen, Local };
  Mode mode = Mode::Fixpoint;
  EntityId focus;
  bool approx = false;
  std::set<std::string> local_in_progress;
  std::set<std::string> explained;

  const ShapeExpr& definition(std::string_view label) const {
    const ShapeExpr* def = schema.find(label);
    if (!def) throw Error(ErrorCode::UnknownShape, "unknown shape <" + std::string(label) + ">");
    return *def;
  }

  static std::string pair_key(const Value& v, std::string_view label) {
    return value_key(v) + "@" + std::string(label);
  }

  // -- compilation ----------------------------------------------------------

  const Bag& compile(const TripleExpr& te) {
    auto& slot = te_cache[&te];
    if (!slot) {
      auto bag = std::make_unique<Bag>();
      bag->root = build(*bag, te, false);
      slot = std::move(bag);
    }
    return *slot;
  }

  const CompiledQs& compile(const QualifierSpec& qs) {
    auto& slot = qs_cache[&qs];
    if (!slot) {
      auto c = std::make_unique<CompiledQs>();
      c->openness = qs.openness;
      c->body = qs.body.get();
      c->bag.root = build(c->bag, *qs.body, false);
      slot = std::move(c);
    }
    return *slot;
  }

  int push(Bag& bag, BagNode node) {
    bag.nodes.push_back(node);
    return static_cast<int>(bag.nodes.size()) - 1;
  }

  int add_leaf(Bag& bag, Leaf leaf, bool starred) {
    int index = static_cast<int>(bag.leaves.size());
    bag.preds.insert(leaf.property);
    bag.leaves.push_back(leaf);
    bag.under_star.push_back(starred);
    return push(bag, {BagNode::Kind::Leaf, -1, -1, index, index, index + 1});
  }

  template <class Pairwise>
  int binary(Bag& bag, BagNode::Kind kind, const Pairwise& e, bool starred) {
    int lo = static_cast<int>(bag.leaves.size());
    int l = build(bag, *e.lhs, starred);
    int r = build(bag, *e.rhs, starred);
    return push(bag, {kind, l, r, -1, lo, static_cast<int>(bag.leaves.size())});
  }

  int build(Bag& bag, const TripleExpr& te, bool starred) {
    return std::visit(
        overloaded{
            [&](const EachOf& e) { return binary(bag, BagNode::Kind::Each, e, starred); },
            [&](const OneOf& e) { return binary(bag, BagNode::Kind::One, e, starred); },
            [&](const Star& s) {
              int lo = static_cast<int>(bag.leaves.size());
              int c = build(bag, *s.expr, true);
              return push(bag, {BagNode::Kind::Star, c, -1, -1, lo, static_cast<int>(bag.leaves.size())});
            },
            [&](const TripleConstraint& t) {
              return add_leaf(bag, {t.predicate, t.value.get(), &compile(t.qualifiers)}, starred);
            },
            [&](const EmptyTriple&) {
              int lo = static_cast<int>(bag.leaves.size());
              return push(bag, {BagNode::Kind::Empty, -1, -1, -1, lo, lo});
            },
            [](const Repeat&) -> int { throw Error(ErrorCode::InvalidArgument, "surface cardinality in core expression"); },
        },
        te.node);
  }

  int build(Bag& bag, const PropertySpec& ps, bool starred) {
    return std::visit(
        overloaded{
            [&](const EachOfQs& e) { return binary(bag, BagNode::Kind::Each, e, starred); },
            [&](const OneOfQs& e) { return binary(bag, BagNode::Kind::One, e, starred); },
            [&](const StarQs& s) {
              int lo = static_cast<int>(bag.leaves.size());
              int c = build(bag, *s.spec, true);
              return push(bag, {BagNode::Kind::Star, c, -1, -1, lo, static_cast<int>(bag.leaves.size())});
            },
            [&](const PropQs& p) { return add_leaf(bag, {p.property, p.value.get(), nullptr}, starred); },
            [&](const EmptyQs&) {
              int lo = static_cast<int>(bag.leaves.size());
              return push(bag, {BagNode::Kind::Empty, -1, -1, -1, lo, lo});
            },
            [](const RepeatQs&) -> int { throw Error(ErrorCode::InvalidArgument, "surface cardinality in core expression"); },
        },
        ps.node);
  }

  // -- shape references -----------------------------------------------------

  int intern(const Value& v, std::string_view label) {
    auto key = pair_key(v, label);
    if (auto it = pair_index.find(key); it != pair_index.end()) return it->second;
    int id = static_cast<int>(pairs.size());
    pairs.push_back(Pair{v, std::string(label), false, false, false, {}});
    pairs.back().queued = true;
    pair_index.emplace(std::move(key), id);
    worklist.push_back(id);
    return id;
  }

  bool ref(const Value& v, const std::string& label) {
    switch (mode) {
      case Mode::Local: {
        auto* e = as_entity(v);
        if (e && *e != focus) {
          approx = true;
          return true;
        }
        auto key = pair_key(v, label);
        if (local_in_progress.contains(key)) return true;
        local_in_progress.insert(key);
        bool ok = false;
        try {
          ok = eval(v, definition(label));
        } catch (...) {
          local_in_progress.erase(key);
          throw;
        }
        local_in_progress.erase(key);
        return ok;
      }
      case Mode::Frozen: {
        auto it = pair_index.find(pair_key(v, label));
        return it != pair_index.end() && !pairs[it->second].refuted;
      }
      case Mode::Fixpoint: break;
    }
    int id = intern(v, label);
    if (current >= 0) pairs[id].dependents.push_back(current);
    if (pairs[id].refuted && pairs[id].uncertain) consulted_uncertain = true;
    return !pairs[id].refuted;
  }

  void run_worklist() {
    while (!worklist.empty()) {
      int id = worklist.front();
      worklist.pop_front();
      pairs[id].queued = false;
      if (pairs[id].refuted) continue;
      Value node = pairs[id].node;
      std::string label = pairs[id].label;

      int saved = current;
      current = id;
      consulted_uncertain = false;
      budget.reset();
      bool ok = false;
      bool limit = false;
      try {
        ok = eval(node, definition(label));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::EngineLimit) {
          current = saved;
          throw;
        }
        limit = true;
      }
      current = saved;
      if (ok) continue;
      pairs[id].refuted = true;
      pairs[id].uncertain = limit || consulted_uncertain;
      for (int d : pairs[id].dependents) {
        if (!pairs[d].refuted && !pairs[d].queued) {
          pairs[d].queued = true;
          worklist.push_back(d);
        }
      }
    }
  }

  // Evaluates `f` until it no longer discovers unsettled pairs.
  template <class F>
  auto settle(F&& f) {
    run_worklist();
    while (true) {
      std::size_t before = pairs.size();
      budget.reset();
      auto result = f();
      if (pairs.size() == before) return result;
      run_worklist();
    }
  }

  // -- the three relations ----------------------------------------------------

  bool eval(const Value& v, const ShapeExpr& se) {
    return std::visit(overloaded{
                          [&](const NodeConstraint& c) { return satisfies_cond(c, v); },
                          [&](const ShapeAnd& a) { return eval(v, *a.lhs) && eval(v, *a.rhs); },
                          [&](const ShapeRef& r) { return ref(v, r.label); },
                          [&](const Shape& s) { return eval_shape(v, s); },
                      },
                      se.node);
  }

  bool is_remote(const Value& v) const {
    auto* e = as_entity(v);
    return mode == Mode::Local && e && *e != focus;
  }

  std::vector<std::size_t> neighbourhood(const Value& v, const Shape& s, const Bag& bag) const {
    std::vector<std::size_t> ts;
    if (auto* e = as_entity(v))
      for (auto idx : graph.statement_indices(*e))
        if (s.closed || bag.preds.contains(graph.statement(idx).property)) ts.push_back(idx);
    return ts;
  }

  bool eval_shape(const Value& v, const Shape& s) {
    if (is_remote(v)) {
      approx = true;
      return true;
    }
    budget.step();
    const Bag& bag = compile(*s.expr);
    return match_statements(neighbourhood(v, s, bag), bag);
  }

  bool statement_fits(const Statement& st, const Leaf& leaf) {
    return leaf.property == st.property && eval(st.value, *leaf.value) && match_qs(st.qualifiers, *leaf.qs);
  }

  std::optional<std::vector<std::vector<int>>> statement_candidates(std::span<const std::size_t> ts, const Bag& bag) {
    std::vector<std::vector<int>> cands;
    for (auto idx : ts) {
      const Statement& st = graph.statement(idx);
      std::vector<int> c;
      for (int i = 0; i < static_cast<int>(bag.leaves.size()); ++i)
        if (statement_fits(st, bag.leaves[i])) c.push_back(i);
      if (c.empty()) return std::nullopt;
      cands.push_back(std::move(c));
    }
    return cands;
  }

  bool match_statements(std::span<const std::size_t> ts, const Bag& bag) {
    auto cands = statement_candidates(ts, bag);
    return cands && assign_and_match(bag, *cands);
  }

  // Each item picks one of its candidate leaves; accept if any resulting
  // count vector is in the bag language.
  bool assign_and_match(const Bag& bag, const std::vector<std::vector<int>>& cands) {
    std::set<Counts> frontier{Counts(bag.leaves.size(), 0)};
    for (const auto& c : cands) {
      std::set<Counts> next;
      for (const auto& v : frontier)
        for (int leaf : c) {
          if (!bag.under_star[leaf] && v[leaf] >= 1) continue;
          budget.step();
          Counts w = v;
          ++w[leaf];
          next.insert(std::move(w));
        }
      if (next.empty()) return false;
      frontier.swap(next);
    }
    BagMatcher matcher(bag, budget);
    for (const auto& v : frontier)
      if (matcher.match(bag.root, v)) return true;
    return false;
  }

  std::vector<const Qualifier*> visible_qualifiers(std::span<const Qualifier> quals, const CompiledQs& qs) const {
    std::vector<const Qualifier*> out;
    for (const auto& q : quals)
      if (qs.openness == Openness::Closed || qs.bag.preds.contains(q.property)) out.push_back(&q);
    return out;
  }

  std::optional<std::vector<std::vector<int>>> qualifier_candidates(const std::vector<const Qualifier*>& quals,
                                                                    const Bag& bag) {
    std::vector<std::vector<int>> cands;
    for (const Qualifier* q : quals) {
      std::vector<int> c;
      for (int i = 0; i < static_cast<int>(bag.leaves.size()); ++i)
        if (bag.leaves[i].property == q->property && eval(q->value, *bag.leaves[i].value)) c.push_back(i);
      if (c.empty()) return std::nullopt;
      cands.push_back(std::move(c));
    }
    return cands;
  }

  bool match_qs(std::span<const Qualifier> quals, const CompiledQs& qs) {
    auto visible = visible_qualifiers(quals, qs);
    if (options.pedantic) return literal_qs(visible, *qs.body);
    auto cands = qualifier_candidates(visible, qs.bag);
    return cands && assign_and_match(qs.bag, *cands);
  }

  // Qualifier rules as printed, including EachOfQs checking both operands
  // against the same set.
  bool literal_qs(const std::vector<const Qualifier*>& quals, const PropertySpec& ps) {
    if (quals.size() > 24) throw Error(ErrorCode::EngineLimit, "too many qualifiers for literal matching");
    std::map<std::pair<const PropertySpec*, std::uint64_t>, bool> memo;
    std::uint64_t all = quals.empty() ? 0 : (std::uint64_t{1} << quals.size()) - 1;
    return literal(quals, ps, all, memo);
  }

  bool literal(const std::vector<const Qualifier*>& quals, const PropertySpec& ps, std::uint64_t mask,
               std::map<std::pair<const PropertySpec*, std::uint64_t>, bool>& memo) {
    budget.step();
    auto key = std::make_pair(&ps, mask);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    bool r = std::visit(
        overloaded{
            [&](const EachOfQs& e) { return literal(quals, *e.lhs, mask, memo) && literal(quals, *e.rhs, mask, memo); },
            [&](const OneOfQs& e) { return literal(quals, *e.lhs, mask, memo) || literal(quals, *e.rhs, mask, memo); },
            [&](const StarQs& s) {
              if (mask == 0) return true;
              for (std::uint64_t sub = mask; sub; sub = (sub - 1) & mask)
                if (literal(quals, *s.spec, sub, memo) && literal(quals, ps, mask ^ sub, memo)) return true;
              return false;
            },
            [&](const PropQs& p) {
              if (std::popcount(mask) != 1) return false;
              const Qualifier* q = quals[std::countr_zero(mask)];
              return q->property == p.property && eval(q->value, *p.value);
            },
            [&](const EmptyQs&) { return mask == 0; },
            [](const RepeatQs&) -> bool { throw Error(ErrorCode::InvalidArgument, "surface cardinality in core expression"); },
        },
        ps.node);
    memo[key] = r;
    return r;
  }

  // -- failure traces ---------------------------------------------------------

  static constexpr int kMaxRefDepth = 8;

  static Trace concat(Trace head, const Trace& tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  }

  std::optional<Trace> why(const Value& v, const ShapeExpr& se, int depth) {
    return std::visit(
        overloaded{
            [&](const NodeConstraint& c) -> std::optional<Trace> {
              if (satisfies_cond(c, v)) return std::nullopt;
              return Trace{{"Cond", describe_cond(c) + " rejects " + node_name(v)}};
            },
            [&](const ShapeAnd& a) -> std::optional<Trace> {
              if (auto t = why(v, *a.lhs, depth)) return concat({{"AND", ""}}, *t);
              if (auto t = why(v, *a.rhs, depth)) return concat({{"AND", ""}}, *t);
              return std::nullopt;
            },
            [&](const ShapeRef& r) -> std::optional<Trace> {
              if (ref(v, r.label)) return std::nullopt;
              Trace t{{"Ref", "@<" + r.label + "> on " + node_name(v)}};
              if (depth < kMaxRefDepth && explained.insert(pair_key(v, r.label)).second)
                if (auto sub = why(v, definition(r.label), depth + 1)) t = concat(std::move(t), *sub);
              return t;
            },
            [&](const Shape& s) { return why_shape(v, s, depth); },
        },
        se.node);
  }

  std::optional<Trace> why_shape(const Value& v, const Shape& s, int depth) {
    if (is_remote(v)) return std::nullopt;
    const Bag& bag = compile(*s.expr);
    auto ts = neighbourhood(v, s, bag);
    if (match_statements(ts, bag)) return std::nullopt;
    Trace head{{s.closed ? "ClosedShape" : "OpenShape", ""}};

    Counts counts(bag.leaves.size(), 0);
    for (auto idx : ts) {
      const Statement& st = graph.statement(idx);
      std::string what = ":" + st.property.str() + " (statement " + st.id + ")";
      const Leaf* same = nullptr;
      int chosen = -1;
      for (int i = 0; i < static_cast<int>(bag.leaves.size()); ++i) {
        if (bag.leaves[i].property != st.property) continue;
        if (!same) same = &bag.leaves[i];
        if (statement_fits(st, bag.leaves[i])) {
          chosen = i;
          break;
        }
      }
      if (chosen >= 0) {
        ++counts[chosen];
        continue;
      }
      if (!same) return concat(head, {{"TripleConstraint", "no constraint allows " + what}});
      head.push_back({"TripleConstraint", what});
      if (auto t = why(st.value, *same->value, depth)) return concat(head, *t);
      if (auto t = why_qs(st.qualifiers, *same->qs, depth)) return concat(head, *t);
      return head;
    }
    BagMatcher matcher(bag, budget);
    return concat(head, why_bag(bag, matcher, bag.root, counts, false));
  }

  std::optional<Trace> why_qs(std::span<const Qualifier> quals, const CompiledQs& qs, int depth) {
    if (match_qs(quals, qs)) return std::nullopt;
    Trace head{{qs.openness == Openness::Open ? "OpenQs" : "CloseQs", ""}};
    auto visible = visible_qualifiers(quals, qs);
    if (options.pedantic) {
      std::map<std::pair<const PropertySpec*, std::uint64_t>, bool> memo;
      std::uint64_t all = visible.empty() ? 0 : (std::uint64_t{1} << visible.size()) - 1;
      return concat(head, why_literal(visible, *qs.body, all, memo));
    }
    Counts counts(qs.bag.leaves.size(), 0);
    for (const Qualifier* q : visible) {
      std::string what = ":" + q->property.str() + " = " + node_name(q->value);
      const Leaf* same = nullptr;
      int chosen = -1;
      for (int i = 0; i < static_cast<int>(qs.bag.leaves.size()); ++i) {
        const Leaf& leaf = qs.bag.leaves[i];
        if (leaf.property != q->property) continue;
        if (!same) same = &leaf;
        if (eval(q->value, *leaf.value)) {
          chosen = i;
          break;
        }
      }
      if (chosen >= 0) {
        ++counts[chosen];
        continue;
      }
      if (!same) return concat(head, {{"PropertyQs", "no constraint allows qualifier " + what}});
      head.push_back({"PropertyQs", what});
      if (auto t = why(q->value, *same->value, depth)) return concat(head, *t);
      return head;
    }
    BagMatcher matcher(qs.bag, budget);
    return concat(head, why_bag(qs.bag, matcher, qs.bag.root, counts, true));
  }

  Trace why_literal(const std::vector<const Qualifier*>& quals, const PropertySpec& ps, std::uint64_t mask,
                    std::map<std::pair<const PropertySpec*, std::uint64_t>, bool>& memo) {
    return std::visit(
        overloaded{
            [&](const EachOfQs& e) -> Trace {
              Trace head{{"EachOfQs", "both operands must match the same qualifier set"}};
              if (!literal(quals, *e.lhs, mask, memo)) return concat(head, why_literal(quals, *e.lhs, mask, memo));
              return concat(head, why_literal(quals, *e.rhs, mask, memo));
            },
            [&](const OneOfQs&) -> Trace { return {{"OneOfQs", "no alternative matches"}}; },
            [&](const StarQs&) -> Trace { return {{"StarQs", "qualifiers cannot be split into repetitions"}}; },
            [&](const PropQs& p) -> Trace {
              return {{"PropertyQs", ":" + p.property.str() + " expects exactly one qualifier, found " +
                                         std::to_string(std::popcount(mask))}};
            },
            [&](const EmptyQs&) -> Trace { return {{"EmptyQs", "expects no qualifiers"}}; },
            [](const RepeatQs&) -> Trace { return {}; },
        },
        ps.node);
  }

  Trace why_bag(const Bag& bag, BagMatcher& matcher, int n, const Counts& v, bool qualifiers) {
    const BagNode& node = bag.nodes[n];
    auto name = [qualifiers](const char* te_rule, const char* qs_rule) {
      return std::string(qualifiers ? qs_rule : te_rule);
    };
    switch (node.kind) {
      case BagNode::Kind::Leaf: {
        const Leaf& leaf = bag.leaves[node.leaf];
        return {{name("TripleConstraint", "PropertyQs"),
                 ":" + leaf.property.str() + " expects exactly one matching " +
                     (qualifiers ? "qualifier" : "statement") + ", found " + std::to_string(v[node.leaf])}};
      }
      case BagNode::Kind::Empty:
        return {{name("Empty", "EmptyQs"), qualifiers ? "expects no qualifiers" : "expects no statements"}};
      case BagNode::Kind::Each: {
        const BagNode& a = bag.nodes[node.lhs];
        const BagNode& b = bag.nodes[node.rhs];
        Counts va = v, vb = v;
        clear_range(va, b.lo, b.hi);
        clear_range(vb, a.lo, a.hi);
        Trace head{{name("EachOf", "EachOfQs"), ""}};
        if (!matcher.match(node.lhs, va)) return concat(head, why_bag(bag, matcher, node.lhs, va, qualifiers));
        return concat(head, why_bag(bag, matcher, node.rhs, vb, qualifiers));
      }
      case BagNode::Kind::One: {
        const BagNode& a = bag.nodes[node.lhs];
        const BagNode& b = bag.nodes[node.rhs];
        Trace head{{name("OneOf", "OneOfQs"), "no alternative matches"}};
        if (is_zero(v, b.lo, b.hi)) return concat(head, why_bag(bag, matcher, node.lhs, v, qualifiers));
        if (is_zero(v, a.lo, a.hi)) return concat(head, why_bag(bag, matcher, node.rhs, v, qualifiers));
        return head;
      }
      case BagNode::Kind::Star:
        return {{name("Star", "StarQs"), "cannot be split into repetitions"}};
    }
    return {};
  }
};

Validator::Validator(const WikibaseGraph& graph, const Schema& schema, ValidatorOptions options) {
  auto diags = well_formed(schema);
  if (!diags.empty()) {
    std::string msg = "schema is not well formed:";
    for (const auto& d : diags) msg += " [" + d.label + "] " + d.message + ";";
    throw Error(ErrorCode::InvalidArgument, msg);
  }
  impl_ = std::make_unique<Impl>(graph, schema, options);
}

Validator::~Validator() = default;

Verdict Validator::check(const Value& node, std::string_view label) {
  impl_->definition(label);
  impl_->mode = Impl::Mode::Fixpoint;
  int id = impl_->intern(node, label);
  impl_->run_worklist();
  const auto& p = impl_->pairs[id];
  if (!p.refuted) return Verdict::Conforming;
  return p.uncertain ? Verdict::EngineLimit : Verdict::NonConforming;
}

Trace Validator::explain(const Value& node, std::string_view label) {
  switch (check(node, label)) {
    case Verdict::Conforming: return {};
    case Verdict::EngineLimit:
      return {{"EngineLimit", "step budget of " + std::to_string(impl_->options.step_budget) + " exhausted"}};
    case Verdict::NonConforming: break;
  }
  const ShapeExpr& def = impl_->definition(label);
  try {
    return impl_->settle([&] {
      impl_->explained.clear();
      impl_->explained.insert(Impl::pair_key(node, label));
      return impl_->why(node, def, 0).value_or(Trace{});
    });
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EngineLimit) throw;
    return {{"EngineLimit", e.what()}};
  }
}

bool Validator::conforms(const Value& node, const ShapeExpr& se) {
  impl_->mode = Impl::Mode::Fixpoint;
  const ShapeExpr& core = impl_->adhoc_se.emplace_back(desugar(se));
  return impl_->settle([&] { return impl_->eval(node, core); });
}

bool Validator::matches_te(std::span<const std::size_t> statements, const TripleExpr& te) {
  impl_->mode = Impl::Mode::Fixpoint;
  const TripleExpr& core = impl_->adhoc_te.emplace_back(desugar(te));
  const Bag& bag = impl_->compile(core);
  return impl_->settle([&] { return impl_->match_statements(statements, bag); });
}

bool Validator::matches_qs(std::span<const Qualifier> qualifiers, const QualifierSpec& qs) {
  impl_->mode = Impl::Mode::Fixpoint;
  const QualifierSpec& core = impl_->adhoc_qs.emplace_back(QualifierSpec{qs.openness, desugar(*qs.body)});
  const CompiledQs& compiled = impl_->compile(core);
  return impl_->settle([&] { return impl_->match_qs(qualifiers, compiled); });
}

Validator::LocalResult Validator::check_local(const EntityId& focus, std::string_view label) {
  auto& impl = *impl_;
  const ShapeExpr& def = impl.definition(label);
  impl.mode = Impl::Mode::Local;
  impl.focus = focus;
  impl.approx = false;
  impl.local_in_progress.clear();
  impl.budget.reset();
  LocalResult out{Verdict::Conforming, false, {}};
  try {
    impl.local_in_progress.insert(Impl::pair_key(focus, label));
    bool ok = impl.eval(focus, def);
    out.approx = impl.approx;
    if (!ok) {
      out.verdict = Verdict::NonConforming;
      impl.explained.clear();
      impl.budget.reset();
      out.trace = impl.why(focus, def, 0).value_or(Trace{});
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EngineLimit) {
      impl.mode = Impl::Mode::Fixpoint;
      throw;
    }
    out.verdict = Verdict::EngineLimit;
    out.approx = impl.approx;
    out.trace = {{"EngineLimit", e.what()}};
  }
  impl.mode = Impl::Mode::Fixpoint;
  return out;
}

std::vector<Target> Validator::conforming_pairs() const {
  std::vector<Target> out;
  for (const auto& p : impl_->pairs)
    if (!p.refuted) out.push_back({p.node, p.label});
  return out;
}

bool Validator::holds_under_typing(const Value& node, std::string_view label) {
  const ShapeExpr& def = impl_->definition(label);
  impl_->mode = Impl::Mode::Frozen;
  impl_->budget.reset();
  bool ok = false;
  try {
    ok = impl_->eval(node, def);
  } catch (...) {
    impl_->mode = Impl::Mode::Fixpoint;
    throw;
  }
  impl_->mode = Impl::Mode::Fixpoint;
  return ok;
}

namespace {

std::string target_name(const Value& v) {
  if (auto* e = as_entity(v)) return e->str();
  return value_to_string(v);
}

void check_targets(const Schema& schema, std::span<const Target> targets) {
  for (const auto& t : targets)
    if (!schema.contains(t.label)) throw Error(ErrorCode::UnknownShape, "unknown shape <" + t.label + ">");
}

ReportEntry run_target(Validator& validator, const Target& t) {
  ReportEntry e;
  e.node = target_name(t.node);
  e.shape = t.label;
  e.verdict = validator.check(t.node, t.label);
  if (e.verdict != Verdict::Conforming) e.trace = validator.explain(t.node, t.label);
  return e;
}

}  // namespace

ValidationReport validate(const WikibaseGraph& graph, const Schema& schema, std::span<const Target> targets,
                          ValidatorOptions options) {
  check_targets(schema, targets);
  Validator validator(graph, schema, options);
  ValidationReport report;
  for (const auto& t : targets) report.entries.push_back(run_target(validator, t));
  return report;
}

ValidationReport validate_parallel(const WikibaseGraph& graph, const Schema& schema,
                                   std::span<const Target> targets, ValidatorOptions options, unsigned jobs) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(targets.size())));
  if (jobs <= 1) return validate(graph, schema, targets, options);
  check_targets(schema, targets);

  ValidationReport report;
  report.entries.resize(targets.size());
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        Validator validator(graph, schema, options);
        for (std::size_t i = w; i < targets.size(); i += jobs) report.entries[i] = run_target(validator, targets[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return report;
}

}  // namespace wshex

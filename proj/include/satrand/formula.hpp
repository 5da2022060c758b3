#pragma once

#include <algorithm>
#include <memory>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "satrand/cnf.hpp"

namespace satrand {

/// Immutable Boolean expression DAG over {var, not, and, or, iff, xor}.
///
/// Handles share nodes, so a subformula referenced from several places is
/// encoded once. The empty conjunction is TRUE and the empty disjunction is
/// FALSE; there is no separate constant node.
class Formula {
 public:
  enum class Kind { Var, Not, And, Or, Iff, Xor };

  static Formula var(Var v) {
    if (v == 0) throw InvalidInput("formula variable index must be >= 1");
    return Formula(std::make_shared<const Node>(Node{Kind::Var, v, {}}));
  }
  static Formula literal(Literal l) { return l.positive ? var(l.var) : negate(var(l.var)); }
  static Formula negate(Formula f) { return make(Kind::Not, {std::move(f)}); }
  static Formula conj(std::vector<Formula> fs) { return make(Kind::And, std::move(fs)); }
  static Formula disj(std::vector<Formula> fs) { return make(Kind::Or, std::move(fs)); }
  static Formula iff(Formula a, Formula b) { return make(Kind::Iff, {std::move(a), std::move(b)}); }
  static Formula exclusive_or(Formula a, Formula b) { return make(Kind::Xor, {std::move(a), std::move(b)}); }
  static Formula truth() { return conj({}); }
  static Formula falsity() { return disj({}); }

  Kind kind() const { return node_->kind; }
  Var variable() const { return node_->var; }
  const std::vector<Formula>& children() const { return node_->children; }

  bool is_truth() const { return kind() == Kind::And && children().empty(); }
  bool is_falsity() const { return kind() == Kind::Or && children().empty(); }

  /// Identity of the underlying node (shared subformulas compare equal).
  const void* id() const { return node_.get(); }

  Var max_var() const {
    Var best = 0;
    visit([&](const Formula& f) {
      if (f.kind() == Kind::Var) best = std::max(best, f.variable());
    });
    return best;
  }

  /// Number of distinct nodes in the DAG.
  std::size_t node_count() const {
    std::size_t n = 0;
    visit([&](const Formula&) { ++n; });
    return n;
  }

  bool evaluate(const Assignment& a) const {
    std::unordered_map<const void*, bool> memo;
    return eval(a, memo);
  }

 private:
  struct Node {
    Kind kind;
    Var var;
    std::vector<Formula> children;
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Formula make(Kind k, std::vector<Formula> cs) {
    return Formula(std::make_shared<const Node>(Node{k, 0, std::move(cs)}));
  }

  template <class F>
  void visit(F&& fn) const {
    std::unordered_set<const void*> seen;
    std::vector<Formula> stack{*this};
    while (!stack.empty()) {
      Formula f = stack.back();
      stack.pop_back();
      if (!seen.insert(f.id()).second) continue;
      fn(f);
      for (const auto& c : f.children()) stack.push_back(c);
    }
  }

  bool eval(const Assignment& a, std::unordered_map<const void*, bool>& memo) const {
    if (auto it = memo.find(id()); it != memo.end()) return it->second;
    bool r = false;
    const auto& cs = children();
    switch (kind()) {
      case Kind::Var: r = a[variable()]; break;
      case Kind::Not: r = !cs[0].eval(a, memo); break;
      case Kind::And:
        r = std::all_of(cs.begin(), cs.end(), [&](const Formula& c) { return c.eval(a, memo); });
        break;
      case Kind::Or:
        r = std::any_of(cs.begin(), cs.end(), [&](const Formula& c) { return c.eval(a, memo); });
        break;
      case Kind::Iff: r = cs[0].eval(a, memo) == cs[1].eval(a, memo); break;
      case Kind::Xor: r = cs[0].eval(a, memo) != cs[1].eval(a, memo); break;
    }
    memo.emplace(id(), r);
    return r;
  }

  std::shared_ptr<const Node> node_;
};

/// Incremental Tseitin encoder. Gate variables are allocated in `cnf` after
/// the variables it already has, in post-order, so every gate is numbered
/// above all of its inputs.
class TseitinEncoder {
 public:
  explicit TseitinEncoder(CnfInstance& cnf) : cnf_(cnf) {}

  /// Returns a literal equivalent to `f` under the definition clauses.
  Literal encode(const Formula& f) {
    cnf_.reserve_vars(f.max_var());
    return encode_node(f);
  }

 private:
  Literal encode_node(const Formula& f) {
    if (auto it = memo_.find(f.id()); it != memo_.end()) return it->second;
    Literal out;
    const auto& cs = f.children();
    switch (f.kind()) {
      case Formula::Kind::Var:
        out = Literal::pos(f.variable());
        break;
      case Formula::Kind::Not:
        out = ~encode_node(cs[0]);
        break;
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        const bool is_and = f.kind() == Formula::Kind::And;
        if (cs.size() == 1) {
          out = encode_node(cs[0]);
          break;
        }
        std::vector<Literal> in;
        in.reserve(cs.size());
        for (const auto& c : cs) in.push_back(encode_node(c));
        Literal g = Literal::pos(cnf_.new_var());
        // AND: g -> li, (l1 & .. & lk) -> g.  OR is the dual.
        Literal gate = is_and ? g : ~g;
        std::vector<Literal> big{~gate};
        for (Literal l : in) {
          Literal li = is_and ? l : ~l;
          cnf_.add_clause({~gate, li});
          big.push_back(~li);
        }
        // big = (gate | ~l1 | ... | ~lk) with `gate` first
        big[0] = gate;
        cnf_.add_clause(Clause(std::move(big)));
        out = g;
        break;
      }
      case Formula::Kind::Xor:
      case Formula::Kind::Iff: {
        Literal a = encode_node(cs[0]);
        Literal b = encode_node(cs[1]);
        Literal g = Literal::pos(cnf_.new_var());
        cnf_.add_clause({~g, a, b});
        cnf_.add_clause({~g, ~a, ~b});
        cnf_.add_clause({g, ~a, b});
        cnf_.add_clause({g, a, ~b});
        out = f.kind() == Formula::Kind::Xor ? g : ~g;
        break;
      }
    }
    memo_.emplace(f.id(), out);
    return out;
  }

  CnfInstance& cnf_;
  std::unordered_map<const void*, Literal> memo_;
};

/// Definition clauses of `f`. Variables 1..input_variables are the formula's
/// inputs; the rest are gates. The root literal is NOT asserted.
struct TseitinResult {
  CnfInstance cnf;
  Literal root;
  Var input_variables = 0;

  Var num_gates() const { return cnf.num_variables() - input_variables; }
  bool is_gate(Var v) const { return v > input_variables; }
};

inline TseitinResult tseitin(const Formula& f, Var num_inputs = 0) {
  TseitinResult r;
  r.input_variables = std::max(num_inputs, f.max_var());
  r.cnf = CnfInstance(r.input_variables);
  TseitinEncoder enc(r.cnf);
  r.root = enc.encode(f);
  return r;
}

/// CNF satisfiable exactly by the (extended) models of `f`.
inline TseitinResult tseitin_assert(const Formula& f, Var num_inputs = 0) {
  TseitinResult r = tseitin(f, num_inputs);
  r.cnf.add_clause({r.root});
  return r;
}

}  // namespace satrand

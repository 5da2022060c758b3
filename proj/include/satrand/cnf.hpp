#pragma once

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "satrand/error.hpp"

namespace satrand {

using Var = std::uint32_t;

/// A variable occurrence. `positive == false` is the negated form.
struct Literal {
  Var var = 0;
  bool positive = true;

  static Literal pos(Var v) { return {v, true}; }
  static Literal neg(Var v) { return {v, false}; }

  static Literal from_dimacs(std::int64_t lit) {
    if (lit == 0) throw InvalidInput("literal 0 is not a variable occurrence");
    return {static_cast<Var>(lit < 0 ? -lit : lit), lit > 0};
  }
  std::int64_t to_dimacs() const {
    return positive ? static_cast<std::int64_t>(var) : -static_cast<std::int64_t>(var);
  }

  Literal operator~() const { return {var, !positive}; }
  Literal with_sign(bool flip) const { return {var, positive != flip}; }

  auto operator<=>(const Literal&) const = default;
};

/// Disjunction of literals. Repeated occurrences of the same literal are
/// collapsed (first occurrence kept); complementary pairs are kept as given.
class Clause {
 public:
  Clause() = default;
  Clause(std::initializer_list<Literal> lits) : Clause(std::vector<Literal>(lits)) {}
  explicit Clause(std::vector<Literal> lits) {
    literals_.reserve(lits.size());
    for (const Literal& l : lits) {
      if (l.var == 0) throw InvalidInput("variable index must be >= 1");
      if (std::find(literals_.begin(), literals_.end(), l) == literals_.end())
        literals_.push_back(l);
    }
  }
  static Clause from_dimacs(std::initializer_list<std::int64_t> lits) {
    std::vector<Literal> out;
    for (auto l : lits) out.push_back(Literal::from_dimacs(l));
    return Clause(std::move(out));
  }

  const std::vector<Literal>& literals() const { return literals_; }
  std::size_t size() const { return literals_.size(); }
  bool empty() const { return literals_.empty(); }
  const Literal& operator[](std::size_t i) const { return literals_[i]; }
  auto begin() const { return literals_.begin(); }
  auto end() const { return literals_.end(); }

  Var max_var() const {
    Var v = 0;
    for (const auto& l : literals_) v = std::max(v, l.var);
    return v;
  }

  bool operator==(const Clause&) const = default;

 private:
  std::vector<Literal> literals_;
};

/// Total 0/1 assignment over variables 1..size().
class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(Var num_vars) : values_(num_vars, 0) {}
  explicit Assignment(std::vector<std::uint8_t> bits) : values_(std::move(bits)) {
    for (auto& b : values_) b = b ? 1 : 0;
  }

  Var size() const { return static_cast<Var>(values_.size()); }
  bool operator[](Var v) const { return values_.at(v - 1) != 0; }
  void set(Var v, bool value) { values_.at(v - 1) = value ? 1 : 0; }
  bool holds(Literal l) const { return (*this)[l.var] == l.positive; }

  const std::vector<std::uint8_t>& bits() const { return values_; }

  /// The restriction to variables 1..n.
  Assignment prefix(Var n) const {
    if (n > size()) throw InvalidInput("assignment shorter than requested prefix");
    return Assignment(std::vector<std::uint8_t>(values_.begin(), values_.begin() + n));
  }

  bool operator==(const Assignment&) const = default;

 private:
  std::vector<std::uint8_t> values_;
};

class CnfInstance {
 public:
  CnfInstance() = default;
  explicit CnfInstance(Var num_vars) : num_vars_(num_vars) {}
  CnfInstance(Var num_vars, std::vector<Clause> clauses) : num_vars_(num_vars) {
    clauses_.reserve(clauses.size());
    for (auto& c : clauses) add_clause(std::move(c));
  }

  Var num_variables() const { return num_vars_; }
  std::size_t num_clauses() const { return clauses_.size(); }
  const std::vector<Clause>& clauses() const { return clauses_; }

  Var new_var() { return ++num_vars_; }
  void reserve_vars(Var n) { num_vars_ = std::max(num_vars_, n); }

  void add_clause(Clause c) {
    for (const auto& l : c)
      if (l.var > num_vars_)
        throw InvalidInput("literal " + std::to_string(l.to_dimacs()) + " exceeds variable count " +
                           std::to_string(num_vars_));
    clauses_.push_back(std::move(c));
  }
  void add_clause(std::initializer_list<Literal> lits) { add_clause(Clause(lits)); }

  /// Appends every clause of `other` (whose variables must already exist here).
  void append(const CnfInstance& other) {
    for (const auto& c : other.clauses()) add_clause(c);
  }

  bool operator==(const CnfInstance&) const = default;

 private:
  Var num_vars_ = 0;
  std::vector<Clause> clauses_;
};

inline bool satisfies(const Clause& c, const Assignment& a) {
  return std::any_of(c.begin(), c.end(), [&](const Literal& l) { return a.holds(l); });
}

inline bool satisfies(const CnfInstance& inst, const Assignment& a) {
  if (a.size() < inst.num_variables()) return false;
  return std::all_of(inst.clauses().begin(), inst.clauses().end(),
                     [&](const Clause& c) { return satisfies(c, a); });
}

/// Number of literals of `c` made true by `a`.
inline int satisfied_count(const Clause& c, const Assignment& a) {
  return static_cast<int>(std::count_if(c.begin(), c.end(), [&](const Literal& l) { return a.holds(l); }));
}

// ---------------------------------------------------------------------------
// DIMACS

namespace detail {

inline bool parse_int(std::string_view tok, std::int64_t& out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && p == tok.data() + tok.size();
}

}  // namespace detail

/// Reads DIMACS CNF: `c` comment lines, a `p cnf <vars> <clauses>` header,
/// then zero-terminated clauses which may span lines.
inline CnfInstance parse_dimacs(std::istream& in) {
  bool have_header = false;
  std::int64_t declared_vars = 0, declared_clauses = 0;
  CnfInstance inst;
  std::vector<Literal> pending;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    if (tok[0] == 'c') continue;
    if (tok == "%") break;
    if (tok == "p") {
      std::string fmt, extra;
      std::string nv, nc;
      if (have_header) throw ParseError("line " + std::to_string(lineno) + ": duplicate header");
      if (!(ls >> fmt >> nv >> nc) || fmt != "cnf" || (ls >> extra) ||
          !detail::parse_int(nv, declared_vars) || !detail::parse_int(nc, declared_clauses) ||
          declared_vars < 0 || declared_clauses < 0 || declared_vars > 0x7fffffff)
        throw ParseError("line " + std::to_string(lineno) + ": malformed header '" + line + "'");
      have_header = true;
      inst = CnfInstance(static_cast<Var>(declared_vars));
      continue;
    }
    if (!have_header) throw ParseError("line " + std::to_string(lineno) + ": clause before 'p cnf' header");
    do {
      std::int64_t v;
      if (!detail::parse_int(tok, v))
        throw ParseError("line " + std::to_string(lineno) + ": bad literal '" + tok + "'");
      if (v == 0) {
        if (pending.empty()) throw ParseError("line " + std::to_string(lineno) + ": zero-length clause");
        inst.add_clause(Clause(std::move(pending)));
        pending.clear();
        continue;
      }
      if ((v < 0 ? -v : v) > declared_vars)
        throw ParseError("line " + std::to_string(lineno) + ": variable " + std::to_string(v < 0 ? -v : v) +
                         " exceeds declared count " + std::to_string(declared_vars));
      pending.push_back(Literal::from_dimacs(v));
    } while (ls >> tok);
  }
  if (!have_header) throw ParseError("missing 'p cnf' header");
  if (!pending.empty()) throw ParseError("last clause is not terminated by 0");
  if (static_cast<std::int64_t>(inst.num_clauses()) != declared_clauses)
    throw ParseError("header declares " + std::to_string(declared_clauses) + " clauses, found " +
                     std::to_string(inst.num_clauses()));
  return inst;
}

inline CnfInstance parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in);
}

inline std::string emit_dimacs(const CnfInstance& inst) {
  std::string out = "p cnf " + std::to_string(inst.num_variables()) + " " + std::to_string(inst.num_clauses()) + "\n";
  for (const auto& c : inst.clauses()) {
    for (const auto& l : c) {
      out += std::to_string(l.to_dimacs());
      out += ' ';
    }
    out += "0\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// 3CNF conversion

/// Result of a width normalization. Variables 1..original_variables are the
/// input's; everything above is a split or padding variable.
struct ThreeCnf {
  CnfInstance cnf;
  Var original_variables = 0;

  Var num_dummies() const { return cnf.num_variables() - original_variables; }
  bool is_dummy(Var v) const { return v > original_variables; }
};

namespace detail {

inline void split_into(CnfInstance& out, const Clause& c) {
  const auto& lits = c.literals();
  // Chain: (l1 l2 s1) (-s1 l3 s2) ... (-s_{k-3} l_{k-1} l_k)
  Literal carry = lits[0];
  std::size_t i = 1;
  bool first = true;
  while (lits.size() - i > 2) {
    Var s = out.new_var();
    if (first) {
      out.add_clause({lits[0], lits[1], Literal::pos(s)});
      i = 2;
      first = false;
    } else {
      out.add_clause({carry, lits[i], Literal::pos(s)});
      ++i;
    }
    carry = Literal::neg(s);
  }
  out.add_clause({carry, lits[i], lits[i + 1]});
}

}  // namespace detail

/// Converts to exactly-3CNF (or, with pad_short == false, to at-most-3CNF).
///
/// Long clauses are split with a chain of fresh variables. Unit and binary
/// clauses are expanded over every polarity of fresh padding variables, so
/// the output is strictly 3-regular. Tautologies are kept.
inline ThreeCnf to_three_cnf(const CnfInstance& in, bool pad_short = true) {
  ThreeCnf result{CnfInstance(in.num_variables()), in.num_variables()};
  CnfInstance& out = result.cnf;
  for (std::size_t ci = 0; ci < in.num_clauses(); ++ci) {
    const Clause& c = in.clauses()[ci];
    switch (c.size()) {
      case 0:
        throw InvalidInput("clause " + std::to_string(ci + 1) + " is empty; the instance is trivially unsatisfiable");
      case 1:
        if (pad_short) {
          Var p = out.new_var(), q = out.new_var();
          for (bool sq : {true, false})
            for (bool sp : {true, false}) out.add_clause({c[0], Literal{p, sp}, Literal{q, sq}});
        } else {
          out.add_clause(c);
        }
        break;
      case 2:
        if (pad_short) {
          Var p = out.new_var();
          out.add_clause({c[0], c[1], Literal::pos(p)});
          out.add_clause({c[0], c[1], Literal::neg(p)});
        } else {
          out.add_clause(c);
        }
        break;
      case 3:
        out.add_clause(c);
        break;
      default:
        detail::split_into(out, c);
    }
  }
  return result;
}

/// Splits clauses wider than three; shorter clauses are left alone.
inline ThreeCnf split_long_clauses(const CnfInstance& in) { return to_three_cnf(in, false); }

inline bool is_exact_three_cnf(const CnfInstance& inst) {
  return std::all_of(inst.clauses().begin(), inst.clauses().end(), [](const Clause& c) { return c.size() == 3; });
}

}  // namespace satrand

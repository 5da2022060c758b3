#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "satrand/bit_matrix.hpp"
#include "satrand/cnf.hpp"

namespace satrand {

// XOR building blocks. Every helper appends clauses (and fresh variables) to
// the CNF it is given.

/// g <-> (a <-> b), i.e. g = a xor b xor 1:
/// (g|a|b) (g|~a|~b) (~g|~a|b) (~g|a|~b)
inline Literal add_xnor_gate(CnfInstance& cnf, Literal a, Literal b) {
  Literal g = Literal::pos(cnf.new_var());
  cnf.add_clause({g, a, b});
  cnf.add_clause({g, ~a, ~b});
  cnf.add_clause({~g, ~a, b});
  cnf.add_clause({~g, a, ~b});
  return g;
}

/// z <-> (a & b): (~z|a) (~z|b) (z|~a|~b)
inline Literal add_and_gate(CnfInstance& cnf, Literal a, Literal b) {
  Literal z = Literal::pos(cnf.new_var());
  cnf.add_clause({~z, a});
  cnf.add_clause({~z, b});
  cnf.add_clause({z, ~a, ~b});
  return z;
}

namespace detail {

/// Folds terms[0..k-2] into one literal g with
/// xor(terms[0..k-2]) = g xor ((k-2) & 1). Requires k >= 2.
inline Literal fold_xor_prefix(CnfInstance& cnf, const std::vector<Literal>& terms) {
  Literal acc = terms[0];
  for (std::size_t i = 1; i + 1 < terms.size(); ++i) acc = add_xnor_gate(cnf, acc, terms[i]);
  return acc;
}

inline bool fold_parity(std::size_t k) { return k >= 2 && ((k - 2) & 1U) != 0; }

}  // namespace detail

/// Clauses asserting xor(terms) == value. For three terms and value = true
/// this is the six-clause pattern
///   (z|y1|y2) (z|~y1|~y2) (~z|~y1|y2) (~z|y1|~y2) (z|~y3) (y3|~z).
inline void add_xor_assertion(CnfInstance& cnf, const std::vector<Literal>& terms, bool value) {
  if (terms.empty()) {
    if (value) cnf.add_clause(Clause{});
    return;
  }
  if (terms.size() == 1) {
    cnf.add_clause({terms[0].with_sign(!value)});
    return;
  }
  Literal g = detail::fold_xor_prefix(cnf, terms);
  Literal last = terms.back();
  const bool differ = value != detail::fold_parity(terms.size());  // g xor last == differ
  if (differ) {
    cnf.add_clause({g, last});
    cnf.add_clause({~g, ~last});
  } else {
    cnf.add_clause({g, ~last});
    cnf.add_clause({last, ~g});
  }
}

/// A variable equal to xor(terms) (the term itself when there is only one
/// positive term).
inline Var define_xor(CnfInstance& cnf, const std::vector<Literal>& terms) {
  if (terms.size() == 1 && terms[0].positive) return terms[0].var;
  Var c = cnf.new_var();
  std::vector<Literal> all = terms;
  all.push_back(Literal::pos(c));
  add_xor_assertion(cnf, all, false);
  return c;
}

/// Literals whose disjunction equals xor(terms) xor parity.
///
/// One term: the term itself. Two terms a, b: the pair encoding
/// z1 <-> (a & ~b), z2 <-> (b & ~a) (or the XNOR variant). More terms are
/// first folded down to two with a chain of XNOR gates.
inline std::vector<Literal> xor_disjuncts(CnfInstance& cnf, const std::vector<Literal>& terms, bool parity) {
  if (terms.empty()) throw InvalidInput("xor_disjuncts: empty xor");
  if (terms.size() == 1) return {terms[0].with_sign(parity)};
  Literal a = detail::fold_xor_prefix(cnf, terms);
  Literal b = terms.back();
  const bool p = parity != detail::fold_parity(terms.size());
  if (!p) return {add_and_gate(cnf, a, ~b), add_and_gate(cnf, b, ~a)};
  return {add_and_gate(cnf, a, b), add_and_gate(cnf, ~a, ~b)};
}

/// Secret of the solution-set randomizer: Y = R X over GF(2).
struct GfSecret {
  BitMatrix r;
  BitMatrix r_inv;
  Var original_n = 0;
  std::uint64_t seed = 0;
  std::size_t row_weight = 0;  // 0 = dense

  bool operator==(const GfSecret&) const = default;
};

/// Substitutes x_i = xor_j r_inv[i][j] y_j into every clause. Variables
/// 1..n of the result are the y's; all others are encoding dummies.
inline CnfInstance gf_substitute(const CnfInstance& inst, const BitMatrix& r_inv) {
  const Var n = inst.num_variables();
  if (r_inv.rows() != n || r_inv.cols() != n) throw InvalidInput("substitution matrix must be n x n");
  std::vector<std::vector<Literal>> rows(n);
  for (Var i = 0; i < n; ++i)
    for (std::size_t j : r_inv.row_support(i)) rows[i].push_back(Literal::pos(static_cast<Var>(j + 1)));

  CnfInstance out(n);
  std::vector<Clause> wide;
  for (const Clause& c : inst.clauses()) {
    std::vector<Literal> lits;
    for (const Literal& l : c) {
      auto d = xor_disjuncts(out, rows[l.var - 1], !l.positive);
      lits.insert(lits.end(), d.begin(), d.end());
    }
    wide.emplace_back(std::move(lits));
  }
  for (auto& c : wide) out.add_clause(std::move(c));
  return split_long_clauses(out).cnf;
}

struct GfRandomized {
  CnfInstance instance;
  GfSecret secret;
};

/// Randomizes the solution set. With row_weight set, the substitution
/// matrix R^-1 has at most row_weight ones per row so the output grows
/// linearly; otherwise R is a dense uniform full-rank matrix.
inline GfRandomized gf_randomize(const CnfInstance& inst, std::uint64_t seed,
                                 std::optional<std::size_t> row_weight = std::nullopt) {
  const Var n = inst.num_variables();
  GfSecret s;
  s.original_n = n;
  s.seed = seed;
  s.row_weight = row_weight.value_or(0);
  if (n == 0) return {inst, std::move(s)};
  if (row_weight) {
    s.r_inv = random_sparse_full_rank(n, *row_weight, seed);
    s.r = gf2_invert(s.r_inv);
  } else {
    s.r = random_full_rank(n, seed);
    s.r_inv = gf2_invert(s.r);
  }
  return {gf_substitute(inst, s.r_inv), std::move(s)};
}

/// X = R^-1 Y, restricted to the variables of `original` (a prefix of the
/// randomized instance's originals). Dummies are dropped; FraudDetected is
/// raised if the result falsifies a clause of `original`.
inline Assignment gf_derandomize(const Assignment& sol, const GfSecret& secret, const CnfInstance& original) {
  if (sol.size() < secret.original_n)
    throw InvalidInput("solution covers fewer variables than the randomized instance's y-block");
  if (original.num_variables() > secret.original_n)
    throw InvalidInput("original instance has more variables than the randomized one");
  std::vector<std::uint8_t> y(sol.bits().begin(), sol.bits().begin() + secret.original_n);
  Assignment x = Assignment(gf2_apply(secret.r_inv, y)).prefix(original.num_variables());
  for (std::size_t i = 0; i < original.num_clauses(); ++i)
    if (!satisfies(original.clauses()[i], x))
      throw FraudDetected("derandomized solution falsifies original clause " + std::to_string(i + 1));
  return x;
}

/// Y = R X: maps an original solution to the y-block of a randomized one.
inline std::vector<std::uint8_t> gf_forward(const Assignment& x, const GfSecret& secret) {
  return gf2_apply(secret.r, x.bits());
}

}  // namespace satrand

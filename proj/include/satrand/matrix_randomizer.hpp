#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "satrand/bit_matrix.hpp"
#include "satrand/cnf.hpp"
#include "satrand/linear_system.hpp"
#include "satrand/rng.hpp"

namespace satrand {

/// Column of the first slack variable of clause `clause` (0-based) in the
/// system produced by encode_linear, as a 1-based variable index.
inline Var first_slack_var(Var num_original, std::size_t clause) {
  return num_original + 2 * static_cast<Var>(clause) + 1;
}

/// Clause (l1 | l2 | l3) becomes l1' + l2' + l3' + d1 + d2 = 3 where a
/// positive literal contributes +x and a negated one 1 - x; the constants
/// are folded into the right-hand side, giving rhs = 3 - #negations.
/// Variables: x_1..x_n, then two slack variables per clause.
inline LinearSystem encode_linear(const CnfInstance& cnf) {
  const Var n = cnf.num_variables();
  const Var total = n + 2 * static_cast<Var>(cnf.num_clauses());
  LinearSystem sys(total);
  for (std::size_t i = 0; i < cnf.num_clauses(); ++i) {
    const Clause& c = cnf.clauses()[i];
    if (c.size() != 3)
      throw InvalidInput("clause " + std::to_string(i + 1) + " has width " + std::to_string(c.size()) +
                         "; the linear encoding needs exactly three literals");
    LinearConstraint row{std::vector<std::int64_t>(total, 0), 3};
    for (const Literal& l : c) {
      if (l.positive) {
        row.coeffs[l.var - 1] += 1;
      } else {
        row.coeffs[l.var - 1] -= 1;
        row.rhs -= 1;
      }
    }
    const Var d = first_slack_var(n, i);
    row.coeffs[d - 1] = 1;
    row.coeffs[d] = 1;
    sys.add(std::move(row));
  }
  return sys;
}

/// Slack values completing a clause with `satisfied` true literals:
/// 3 -> (0,0), 2 -> (1,0), 1 -> (1,1).
inline std::pair<int, int> dummy_completion(int satisfied) {
  switch (satisfied) {
    case 3: return {0, 0};
    case 2: return {1, 0};
    case 1: return {1, 1};
    default:
      throw InvalidInput("dummy_completion: clause with " + std::to_string(satisfied) +
                         " satisfied literals has no completion");
  }
}

/// As above, but the two-satisfied case picks which slack is set by a coin.
inline std::pair<int, int> dummy_completion(int satisfied, Rng& rng) {
  auto d = dummy_completion(satisfied);
  if (satisfied == 2 && rng.coin()) std::swap(d.first, d.second);
  return d;
}

/// Extends a satisfying assignment of a 3CNF to a solution of its
/// encode_linear system. Throws FraudDetected if a clause is unsatisfied.
inline Assignment extend_to_linear_solution(const CnfInstance& cnf, const Assignment& x, Rng* coin = nullptr) {
  const Var n = cnf.num_variables();
  if (x.size() != n) throw InvalidInput("assignment does not cover the instance's variables");
  Assignment out(n + 2 * static_cast<Var>(cnf.num_clauses()));
  for (Var v = 1; v <= n; ++v) out.set(v, x[v]);
  for (std::size_t i = 0; i < cnf.num_clauses(); ++i) {
    const Clause& c = cnf.clauses()[i];
    // Counted per occurrence so that x | ~x | y stays consistent with the row.
    int k = 0;
    for (const auto& l : c) k += x.holds(l);
    if (k == 0) throw FraudDetected("clause " + std::to_string(i + 1) + " is not satisfied");
    auto [d1, d2] = coin ? dummy_completion(k, *coin) : dummy_completion(k);
    const Var d = first_slack_var(n, i);
    out.set(d, d1 != 0);
    out.set(d + 1, d2 != 0);
  }
  return out;
}

/// The client's secret for the row-mixing randomization.
struct MatrixSecret {
  BitMatrix r;
  Var original_n = 0;
  Var dummy_offset = 0;
  std::vector<int> negation_constants;
  std::uint64_t seed = 0;

  std::size_t num_constraints() const { return r.rows(); }
  Var system_vars() const { return dummy_offset + 2 * static_cast<Var>(r.rows()); }

  bool operator==(const MatrixSecret&) const = default;
};

/// Rows of r * A with right-hand side r * B, in integer arithmetic.
inline LinearSystem apply_row_mix(const LinearSystem& sys, const BitMatrix& r) {
  const std::size_t m = sys.num_constraints();
  if (r.rows() != m || r.cols() != m) throw InvalidInput("mixing matrix must be m x m");
  IntMatrix ab(m, sys.num_vars() + 1);
  for (std::size_t i = 0; i < m; ++i) {
    for (Var j = 0; j < sys.num_vars(); ++j) ab(i, j) = sys[i].coeffs[j];
    ab(i, sys.num_vars()) = sys[i].rhs;
  }
  IntMatrix mixed = int_mat_mul(r, ab);
  LinearSystem out(sys.num_vars());
  for (std::size_t i = 0; i < m; ++i) {
    LinearConstraint row{std::vector<std::int64_t>(sys.num_vars()), mixed(i, sys.num_vars())};
    for (Var j = 0; j < sys.num_vars(); ++j) row.coeffs[j] = mixed(i, j);
    out.add(std::move(row));
  }
  return out;
}

struct MatrixRandomized {
  LinearSystem system;
  MatrixSecret secret;
};

/// RAX = RB with R a random GF(2)-full-rank m x m matrix (odd determinant,
/// so invertible over the rationals and the 0/1 solution set is unchanged).
/// `sys` must come from encode_linear over `original_n` variables.
inline MatrixRandomized randomize_system(const LinearSystem& sys, Var original_n, std::uint64_t seed) {
  const std::size_t m = sys.num_constraints();
  if (sys.num_vars() != original_n + 2 * m) throw InvalidInput("system is not an encode_linear output for n vars");
  MatrixSecret secret;
  secret.r = m == 0 ? BitMatrix() : random_full_rank(m, seed);
  secret.original_n = original_n;
  secret.dummy_offset = original_n;
  secret.seed = seed;
  for (const auto& row : sys.constraints()) secret.negation_constants.push_back(static_cast<int>(3 - row.rhs));
  return {apply_row_mix(sys, secret.r), std::move(secret)};
}

/// Projects a solution of the randomized system onto x_1..x_n (1 = true)
/// and checks it against `original`, whose variables must be a prefix of the
/// encoded ones. Throws FraudDetected if the projection falsifies a clause.
inline Assignment derandomize_solution(const Assignment& sol, const MatrixSecret& secret, const CnfInstance& original) {
  if (sol.size() != secret.system_vars())
    throw InvalidInput("solution has " + std::to_string(sol.size()) + " variables, the randomized system has " +
                       std::to_string(secret.system_vars()));
  if (original.num_variables() > secret.original_n)
    throw InvalidInput("original instance has more variables than the encoded one");
  Assignment x = sol.prefix(original.num_variables());
  for (std::size_t i = 0; i < original.num_clauses(); ++i)
    if (!satisfies(original.clauses()[i], x))
      throw FraudDetected("derandomized solution falsifies original clause " + std::to_string(i + 1));
  return x;
}

/// Full pipeline from an arbitrary CNF: exact-3CNF conversion (when needed),
/// linear encoding and row mixing.
struct MatrixPipeline {
  ThreeCnf three_cnf;
  LinearSystem encoded;
  MatrixRandomized randomized;
};

inline MatrixPipeline matrix_randomize_cnf(const CnfInstance& cnf, std::uint64_t seed) {
  MatrixPipeline p;
  p.three_cnf = is_exact_three_cnf(cnf) ? ThreeCnf{cnf, cnf.num_variables()} : to_three_cnf(cnf);
  p.encoded = encode_linear(p.three_cnf.cnf);
  p.randomized = randomize_system(p.encoded, p.three_cnf.cnf.num_variables(), seed);
  return p;
}

}  // namespace satrand

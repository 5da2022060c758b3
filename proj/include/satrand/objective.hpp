#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "satrand/formula.hpp"
#include "satrand/matrix_randomizer.hpp"
#include "satrand/mincost.hpp"
#include "satrand/solution_set.hpp"

namespace satrand {

/// Output bits of the compiled cost circuit, most significant first.
struct CostCircuitSecret {
  std::vector<Var> output_bits;
  unsigned width = 0;
  unsigned beta = 0;
  Var first_internal_var = 0;  // adder gates and output wires live in
  Var last_internal_var = 0;   // [first_internal_var, last_internal_var]

  bool is_internal(Var v) const { return v >= first_internal_var && v <= last_internal_var; }

  /// Weights 2^(width - j) on b_1..b_width.
  std::vector<CostTerm> cost_terms() const {
    std::vector<CostTerm> out;
    for (unsigned j = 0; j < width; ++j) out.push_back({output_bits[j], std::uint64_t{1} << (width - 1 - j)});
    return out;
  }

  bool operator==(const CostCircuitSecret&) const = default;
};

inline unsigned ceil_log2(std::uint64_t n) { return n <= 1 ? 0 : static_cast<unsigned>(std::bit_width(n - 1)); }

/// Width needed for a sum of n values below 2^beta.
inline unsigned cost_circuit_width(unsigned beta, Var n) { return beta + ceil_log2(n); }

namespace detail {

/// A circuit wire: a constant or a formula.
struct Wire {
  int constant = 0;  // 0, 1, or -1 for "not constant"
  std::optional<Formula> f;

  static Wire zero() { return {0, std::nullopt}; }
  static Wire of(Formula g) { return {-1, std::move(g)}; }
  Formula formula() const {
    if (constant == 1) return Formula::truth();
    if (constant == 0) return Formula::falsity();
    return *f;
  }
};

inline Wire wire_xor(const Wire& a, const Wire& b) {
  if (a.constant == 0) return b;
  if (b.constant == 0) return a;
  if (a.constant == 1 && b.constant == 1) return Wire::zero();
  if (a.constant == 1) return Wire::of(Formula::negate(b.formula()));
  if (b.constant == 1) return Wire::of(Formula::negate(a.formula()));
  return Wire::of(Formula::exclusive_or(*a.f, *b.f));
}

inline Wire wire_and(const Wire& a, const Wire& b) {
  if (a.constant == 0 || b.constant == 0) return Wire::zero();
  if (a.constant == 1) return b;
  if (b.constant == 1) return a;
  return Wire::of(Formula::conj({*a.f, *b.f}));
}

inline Wire wire_or(const Wire& a, const Wire& b) {
  if (a.constant == 1 || b.constant == 1) return {1, std::nullopt};
  if (a.constant == 0) return b;
  if (b.constant == 0) return a;
  return Wire::of(Formula::disj({*a.f, *b.f}));
}

/// Ripple-carry addition of two LSB-first words.
inline std::vector<Wire> ripple_add(std::vector<Wire> a, std::vector<Wire> b) {
  const std::size_t len = std::max(a.size(), b.size());
  a.resize(len, Wire::zero());
  b.resize(len, Wire::zero());
  std::vector<Wire> sum;
  Wire carry = Wire::zero();
  for (std::size_t j = 0; j < len; ++j) {
    Wire half = wire_xor(a[j], b[j]);
    sum.push_back(wire_xor(half, carry));
    carry = wire_or(wire_and(a[j], b[j]), wire_and(carry, half));
  }
  sum.push_back(carry);
  return sum;
}

}  // namespace detail

struct CompiledCost {
  CnfInstance cnf;  // original clauses followed by the circuit's definitions
  CostCircuitSecret secret;
};

/// Compiles sum c_i x_i into a balanced tree of ripple-carry adders and
/// conjoins its Tseitin encoding with the original CNF. In every model the
/// output bits hold the cost in binary.
inline CompiledCost compile_cost_circuit(const MincostInstance& inst, std::optional<unsigned> beta = std::nullopt) {
  inst.validate();
  const Var n = inst.cnf.num_variables();
  std::uint64_t max_cost = 0;
  for (auto c : inst.costs) max_cost = std::max(max_cost, c);
  unsigned b = beta.value_or(std::max(1U, static_cast<unsigned>(std::bit_width(max_cost))));
  if (b == 0 || b > 32) throw InvalidInput("cost bit width must be in 1..32");
  if (std::bit_width(max_cost) > b)
    throw InvalidInput("cost " + std::to_string(max_cost) + " exceeds 2^" + std::to_string(b) + " - 1");
  const unsigned width = cost_circuit_width(b, n);

  // x_i & c_i: bit j is x_i when bit j of c_i is set, else constant 0.
  std::vector<std::vector<detail::Wire>> words;
  for (Var v = 1; v <= n; ++v) {
    const std::uint64_t c = inst.cost_of(v);
    if (c == 0) continue;
    std::vector<detail::Wire> w;
    for (unsigned j = 0; j < b; ++j)
      w.push_back(((c >> j) & 1U) ? detail::Wire::of(Formula::var(v)) : detail::Wire::zero());
    words.push_back(std::move(w));
  }
  while (words.size() > 1) {
    std::vector<std::vector<detail::Wire>> next;
    for (std::size_t i = 0; i + 1 < words.size(); i += 2) next.push_back(detail::ripple_add(words[i], words[i + 1]));
    if (words.size() % 2) next.push_back(words.back());
    words = std::move(next);
  }
  std::vector<detail::Wire> total = words.empty() ? std::vector<detail::Wire>{} : words[0];
  // Bits above `width` are identically zero: the sum is below n * 2^beta.
  total.resize(width, detail::Wire::zero());

  CompiledCost out{inst.cnf, {}};
  out.secret.width = width;
  out.secret.beta = b;
  out.secret.first_internal_var = n + 1;
  TseitinEncoder enc(out.cnf);
  for (unsigned j = width; j-- > 0;) {
    Literal l = enc.encode(total[j].formula());
    Var bit;
    const bool fresh_gate = l.positive && l.var > n &&
                            std::find(out.secret.output_bits.begin(), out.secret.output_bits.end(), l.var) ==
                                out.secret.output_bits.end();
    if (fresh_gate) {
      bit = l.var;
    } else {
      bit = out.cnf.new_var();
      out.cnf.add_clause({Literal::neg(bit), l});
      out.cnf.add_clause({Literal::pos(bit), ~l});
    }
    out.secret.output_bits.push_back(bit);
  }
  out.secret.last_internal_var = out.cnf.num_variables();
  return out;
}

/// Decodes the output bits of a model of the compiled CNF.
inline std::uint64_t decode_cost(const CostCircuitSecret& s, const Assignment& a) {
  return evaluate_cost(s.cost_terms(), a);
}

enum class ObjectiveMethod { kMatrix, kSolutionSet };

struct MincostSecret {
  ObjectiveMethod method = ObjectiveMethod::kMatrix;
  CostCircuitSecret circuit;
  std::variant<MatrixSecret, GfSecret> inner;
  Var compiled_vars = 0;  // variables of the compiled CNF before randomization
};

/// The outsourced artifact: the randomized constraints plus a cost that
/// only mentions circuit output bits.
struct RandomizedMincost {
  std::variant<LinearSystem, CnfInstance> instance;
  std::vector<CostTerm> cost;
  MincostSecret secret;
};

/// Compiles the cost into a circuit, then randomizes the combined CNF with
/// the chosen method. For every model the output-bit cost equals the
/// original cost of its derandomization.
inline RandomizedMincost randomize_mincost(const MincostInstance& inst, std::uint64_t seed, ObjectiveMethod method,
                                           std::optional<unsigned> beta = std::nullopt,
                                           std::optional<std::size_t> row_weight = std::nullopt) {
  CompiledCost compiled = compile_cost_circuit(inst, beta);
  RandomizedMincost out;
  out.secret.method = method;
  out.secret.circuit = compiled.secret;
  out.secret.compiled_vars = compiled.cnf.num_variables();
  if (method == ObjectiveMethod::kMatrix) {
    MatrixPipeline p = matrix_randomize_cnf(compiled.cnf, seed);
    out.instance = std::move(p.randomized.system);
    out.secret.inner = std::move(p.randomized.secret);
    out.cost = compiled.secret.cost_terms();
    return out;
  }
  GfRandomized g = gf_randomize(compiled.cnf, seed, row_weight);
  // Each output bit is an xor of y's after substitution; expose it as a
  // single variable so the cost stays linear.
  const auto terms = compiled.secret.cost_terms();
  for (const auto& t : terms) {
    std::vector<Literal> ys;
    for (std::size_t j : g.secret.r_inv.row_support(t.var - 1)) ys.push_back(Literal::pos(static_cast<Var>(j + 1)));
    out.cost.push_back({define_xor(g.instance, ys), t.weight});
  }
  out.instance = std::move(g.instance);
  out.secret.inner = std::move(g.secret);
  return out;
}

/// Maps a model of the randomized instance back to the original variables,
/// checking it against the original clauses.
inline Assignment derandomize_mincost(const Assignment& sol, const MincostSecret& secret, const CnfInstance& original) {
  if (const auto* m = std::get_if<MatrixSecret>(&secret.inner)) return derandomize_solution(sol, *m, original);
  return gf_derandomize(sol, std::get<GfSecret>(secret.inner), original);
}

struct Max3SatReduction {
  MincostInstance mincost;
  std::uint64_t offset = 0;  // max satisfied = offset - min cost
};

/// For each clause i a fresh u_i <-> ~(l1 | l2 | l3) with cost 1, i.e. the
/// complement of y_i <-> (l1 | l2 | l3). Minimizing sum u_i = m - sum y_i
/// has the same argmin as minimizing -sum y_i. The original clauses are not
/// kept as hard constraints.
inline Max3SatReduction max3sat_to_mincost(const Max3SatInstance& inst) {
  inst.validate();
  const Var n = inst.cnf.num_variables();
  Max3SatReduction r;
  r.offset = inst.cnf.num_clauses();
  CnfInstance cnf(n);
  for (const Clause& c : inst.cnf.clauses()) {
    const Literal u = Literal::pos(cnf.new_var());
    std::vector<Literal> big{u};
    for (const Literal& l : c) {
      cnf.add_clause({~u, ~l});
      big.push_back(l);
    }
    cnf.add_clause(Clause(std::move(big)));
  }
  r.mincost.cnf = std::move(cnf);
  r.mincost.costs.assign(r.mincost.cnf.num_variables(), 0);
  for (Var v = n + 1; v <= r.mincost.cnf.num_variables(); ++v) r.mincost.costs[v - 1] = 1;
  return r;
}

}  // namespace satrand

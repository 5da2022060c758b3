#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "satrand/cnf.hpp"
#include "satrand/linear_system.hpp"
#include "satrand/mincost.hpp"
#include "satrand/sat_solver.hpp"

namespace satrand {

// Exhaustive ground-truth engines. Enumeration is lexicographic over
// x_1..x_n with false before true, so the first witness is reproducible.

inline constexpr Var kDefaultSatVarLimit = 24;
inline constexpr Var kDefaultLinearVarLimit = 64;

/// Called once per model; return false to stop the enumeration.
using ModelCallback = std::function<bool(const Assignment&)>;

namespace detail {

/// Depth-first model enumeration over x_1..x_n in order, with unit
/// propagation. Propagated values are forced, so models still come out in
/// lexicographic order and counts are exact.
class CnfEnumerator {
 public:
  CnfEnumerator(const CnfInstance& inst, Var projection)
      : inst_(inst), n_(inst.num_variables()), projection_(projection), value_(n_), state_(n_ + 1, -1),
        false_count_(inst.num_clauses(), 0), true_count_(inst.num_clauses(), 0), occ_(n_ + 1) {
    for (std::size_t c = 0; c < inst.num_clauses(); ++c)
      for (const Literal& l : inst.clauses()[c]) occ_[l.var].push_back({c, l.positive});
  }

  std::uint64_t run(const ModelCallback& cb) {
    cb_ = &cb;
    count_ = 0;
    for (const auto& c : inst_.clauses()) {
      if (c.empty()) return 0;
      if (c.size() == 1 && !enqueue(c.begin()->var, c.begin()->positive)) return 0;
    }
    if (!propagate()) return 0;
    search(1);
    return count_;
  }

 private:
  enum class Status { kDone, kJump, kStop };

  struct Occ {
    std::size_t clause;
    bool positive;
  };

  bool enqueue(Var v, bool b) {
    if (state_[v] >= 0) return state_[v] == static_cast<int>(b);
    state_[v] = b;
    value_.set(v, b);
    trail_.push_back(v);
    return true;
  }

  /// Updates clause counters for trail entries from head_ on, forcing the
  /// last open literal of any clause that has no other way to be satisfied.
  bool propagate() {
    while (head_ < trail_.size()) {
      const Var v = trail_[head_++];
      const bool b = state_[v] == 1;
      bool conflict = false;
      for (const Occ& o : occ_[v]) {
        if (o.positive == b) {
          ++true_count_[o.clause];
          continue;
        }
        const auto& clause = inst_.clauses()[o.clause];
        const std::size_t f = ++false_count_[o.clause];
        if (conflict || true_count_[o.clause] > 0) continue;
        if (f == clause.size()) conflict = true;
        else if (f + 1 == clause.size())
          for (const Literal& l : clause)
            if (state_[l.var] < 0) {
              enqueue(l.var, l.positive);
              break;
            }
      }
      if (conflict) return false;
    }
    return true;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      const Var v = trail_.back();
      trail_.pop_back();
      if (head_ > trail_.size()) {
        const bool b = state_[v] == 1;
        for (const Occ& o : occ_[v]) {
          if (o.positive == b)
            --true_count_[o.clause];
          else
            --false_count_[o.clause];
        }
      }
      state_[v] = -1;
    }
    head_ = std::min(head_, mark);
  }

  Status search(Var from) {
    Var v = from;
    while (v <= n_ && state_[v] >= 0) ++v;
    if (v > n_) {
      ++count_;
      if (!(*cb_)(value_)) return Status::kStop;
      return projection_ < n_ ? Status::kJump : Status::kDone;
    }
    for (bool b : {false, true}) {
      const std::size_t mark = trail_.size();
      Status r = Status::kDone;
      enqueue(v, b);
      if (propagate()) r = search(v + 1);
      undo(mark);
      if (r == Status::kStop) return r;
      if (r == Status::kJump && v > projection_) return r;
    }
    return Status::kDone;
  }

  const CnfInstance& inst_;
  Var n_;
  Var projection_;
  Assignment value_;
  std::vector<int> state_;
  std::vector<std::size_t> false_count_, true_count_;
  std::vector<std::vector<Occ>> occ_;
  std::vector<Var> trail_;
  std::size_t head_ = 0;
  const ModelCallback* cb_ = nullptr;
  std::uint64_t count_ = 0;
};

}  // namespace detail

/// Enumerates models. With projection < n only the first model of each
/// distinct assignment to x_1..x_projection is reported.
inline std::uint64_t for_each_model(const CnfInstance& inst, const ModelCallback& cb,
                                    Var var_limit = kDefaultSatVarLimit, std::optional<Var> projection = std::nullopt) {
  if (inst.num_variables() > var_limit)
    throw LimitExceeded("instance has " + std::to_string(inst.num_variables()) + " variables, oracle limit is " +
                        std::to_string(var_limit));
  const Var p = std::min(projection.value_or(inst.num_variables()), inst.num_variables());
  detail::CnfEnumerator e(inst, p);
  return e.run(cb);
}

/// One model per distinct assignment to x_1..x_k, in no particular order.
/// Uses clause learning plus a blocking clause per reported projection, so
/// it copes with large auxiliary encodings as long as the number of
/// projections is modest.
inline std::uint64_t for_each_projected_model(const CnfInstance& inst, Var k, const ModelCallback& cb,
                                              Var var_limit = kDefaultSatVarLimit) {
  if (inst.num_variables() > var_limit)
    throw LimitExceeded("instance has " + std::to_string(inst.num_variables()) + " variables, oracle limit is " +
                        std::to_string(var_limit));
  k = std::min(k, inst.num_variables());
  CdclSolver solver(inst);
  std::uint64_t count = 0;
  while (solver.solve()) {
    const Assignment a = solver.model();
    ++count;
    if (!cb(a) || k == 0) break;
    std::vector<Literal> block;
    for (Var v = 1; v <= k; ++v) block.push_back(Literal{v, !a[v]});
    if (!solver.add_clause(Clause(std::move(block)))) break;
  }
  return count;
}

inline std::optional<Assignment> cdcl_solve(const CnfInstance& inst) {
  CdclSolver solver(inst);
  if (!solver.solve()) return std::nullopt;
  return solver.model();
}

struct SatOracleResult {
  bool satisfiable = false;
  std::optional<Assignment> witness;
  std::uint64_t count = 0;  // models (or distinct projections)
};

/// Without a projection: lexicographic enumeration, the witness is the
/// lexicographically first model. With one: distinct projections counted
/// by for_each_projected_model.
inline SatOracleResult brute_sat(const CnfInstance& inst, Var var_limit = kDefaultSatVarLimit,
                                 std::optional<Var> projection = std::nullopt) {
  SatOracleResult r;
  auto keep = [&](const Assignment& a) {
    if (!r.witness) r.witness = a;
    return true;
  };
  r.count = projection ? for_each_projected_model(inst, *projection, keep, var_limit)
                       : for_each_model(inst, keep, var_limit);
  r.satisfiable = r.count > 0;
  return r;
}

// ---------------------------------------------------------------------------
// 0/1 linear systems

namespace detail {

struct SparseRow {
  std::vector<std::pair<Var, std::int64_t>> terms;  // 0-based var
  std::int64_t rhs = 0;
};

__extension__ using i128 = __int128;
__extension__ using u128 = unsigned __int128;

inline constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

inline std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % kPrime);
}

inline std::uint64_t mod_inv(std::uint64_t a) {
  std::uint64_t result = 1, e = kPrime - 2;
  for (; e; e >>= 1, a = mod_mul(a, a))
    if (e & 1) result = mod_mul(result, a);
  return result;
}

inline std::uint64_t to_mod(std::int64_t v) {
  const std::int64_t r = v % static_cast<std::int64_t>(kPrime);
  return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(kPrime) : r);
}

inline std::int64_t lift(std::uint64_t v) {
  return v > kPrime / 2 ? -static_cast<std::int64_t>(kPrime - v) : static_cast<std::int64_t>(v);
}

inline std::vector<SparseRow> raw_rows(const LinearSystem& sys) {
  std::vector<SparseRow> out;
  for (const auto& row : sys.constraints()) {
    SparseRow s;
    for (Var j = 0; j < row.coeffs.size(); ++j)
      if (row.coeffs[j] != 0) s.terms.push_back({j, row.coeffs[j]});
    s.rhs = row.rhs;
    out.push_back(std::move(s));
  }
  return out;
}

/// Reduced echelon form with pivots taken from the last column backwards,
/// which makes the later variables the dependent ones. Elimination runs
/// modulo a 61-bit prime; the result is lifted to small integers and accepted
/// only if every original row is exactly the matching combination of lifted
/// rows. Equal rank then makes the two row spaces, and so the two solution
/// sets, identical. Otherwise the rows are returned unreduced.
/// Returns std::nullopt when the system is inconsistent.
inline std::optional<std::vector<SparseRow>> reduce_rows(const LinearSystem& sys) {
  const Var n = sys.num_vars();
  std::vector<std::vector<std::uint64_t>> a;
  for (const auto& row : sys.constraints()) {
    std::vector<std::uint64_t> r(n + 1);
    for (Var j = 0; j < n; ++j) r[j] = to_mod(row.coeffs[j]);
    r[n] = to_mod(row.rhs);
    a.push_back(std::move(r));
  }
  std::vector<std::pair<std::size_t, Var>> pivots;  // (row, column)
  std::vector<std::uint8_t> used(a.size(), 0);
  for (Var col = n; col-- > 0;) {
    std::size_t p = a.size();
    for (std::size_t r = 0; r < a.size(); ++r)
      if (!used[r] && a[r][col] != 0) {
        p = r;
        break;
      }
    if (p == a.size()) continue;
    used[p] = 1;
    pivots.push_back({p, col});
    const std::uint64_t inv = mod_inv(a[p][col]);
    for (auto& x : a[p]) x = mod_mul(x, inv);
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == p || a[r][col] == 0) continue;
      const std::uint64_t g = a[r][col];
      for (std::size_t j = 0; j <= n; ++j)
        if (a[p][j]) a[r][j] = (a[r][j] + kPrime - mod_mul(g, a[p][j])) % kPrime;
    }
  }
  for (std::size_t r = 0; r < a.size(); ++r)
    if (!used[r] && a[r][n] != 0) {
      // Inconsistent modulo p. Confirm over the integers by search instead.
      return raw_rows(sys);
    }

  std::vector<SparseRow> out;
  for (auto [r, col] : pivots) {
    SparseRow s;
    for (Var j = 0; j < n; ++j)
      if (a[r][j] != 0) s.terms.push_back({j, lift(a[r][j])});
    s.rhs = lift(a[r][n]);
    out.push_back(std::move(s));
  }
  constexpr std::int64_t kSmall = std::int64_t{1} << 24;
  for (const auto& s : out) {
    if (std::abs(s.rhs) > kSmall) return raw_rows(sys);
    for (auto [v, c] : s.terms)
      if (std::abs(c) > kSmall) return raw_rows(sys);
  }
  std::vector<i128> acc(n + 1);
  for (const auto& row : sys.constraints()) {
    for (Var j = 0; j < n; ++j) acc[j] = row.coeffs[j];
    acc[n] = row.rhs;
    for (std::size_t k = 0; k < pivots.size(); ++k) {
      const i128 f = row.coeffs[pivots[k].second];
      if (f == 0) continue;
      for (auto [v, c] : out[k].terms) acc[v] -= f * c;
      acc[n] -= f * out[k].rhs;
    }
    for (const auto& x : acc)
      if (x != 0) return raw_rows(sys);
  }
  return out;
}

/// Depth-first search over x_1..x_n (false first) with interval bound
/// propagation on every row. Optional branch-and-bound on a non-negative
/// linear cost.
class LinearSearch {
 public:
  LinearSearch(Var n, std::vector<SparseRow> rows, const std::vector<std::uint64_t>* weights)
      : n_(n), rows_(std::move(rows)), weights_(weights), value_(n, -1), occ_(n), fixed_(rows_.size(), 0),
        lo_(rows_.size(), 0), hi_(rows_.size(), 0), queued_(rows_.size(), 0) {
    for (std::size_t r = 0; r < rows_.size(); ++r)
      for (auto [v, c] : rows_[r].terms) {
        occ_[v].push_back({r, c});
        (c < 0 ? lo_[r] : hi_[r]) += c;
      }
  }

  /// Visits every solution (or, in minimize mode, improving ones).
  template <class OnSolution>
  void run(OnSolution&& on_solution) {
    for (std::size_t r = 0; r < rows_.size(); ++r) enqueue(r);
    if (!propagate()) return;
    search(on_solution);
  }

  void set_bound(std::uint64_t b) {
    bound_ = b;
    have_bound_ = true;
  }
  std::uint64_t current_cost() const { return cost_; }

 private:
  struct Occ {
    std::size_t row;
    std::int64_t coeff;
  };

  void enqueue(std::size_t r) {
    if (!queued_[r]) {
      queued_[r] = 1;
      queue_.push_back(r);
    }
  }

  void assign(Var v, int b) {
    value_[v] = static_cast<std::int8_t>(b);
    trail_.push_back(v);
    for (const Occ& o : occ_[v]) {
      (o.coeff < 0 ? lo_[o.row] : hi_[o.row]) -= o.coeff;
      if (b) fixed_[o.row] += o.coeff;
      enqueue(o.row);
    }
    if (b && weights_) cost_ += (*weights_)[v];
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      Var v = trail_.back();
      trail_.pop_back();
      const int b = value_[v];
      for (const Occ& o : occ_[v]) {
        (o.coeff < 0 ? lo_[o.row] : hi_[o.row]) += o.coeff;
        if (b) fixed_[o.row] -= o.coeff;
      }
      if (b && weights_) cost_ -= (*weights_)[v];
      value_[v] = -1;
    }
  }

  bool propagate() {
    bool ok = true;
    for (std::size_t qi = 0; qi < queue_.size(); ++qi) {
      const std::size_t r = queue_[qi];
      queued_[r] = 0;
      if (!ok) continue;
      const std::int64_t need = rows_[r].rhs - fixed_[r];
      if (need < lo_[r] || need > hi_[r]) {
        ok = false;
        continue;
      }
      const std::int64_t up = hi_[r] - need;   // room above
      const std::int64_t down = need - lo_[r]; // room below
      for (auto [v, c] : rows_[r].terms) {
        if (value_[v] >= 0) continue;
        // Setting v to 1 moves `need - c`; setting it to 0 drops c from the
        // unassigned range.
        if (c > 0) {
          if (c > down) assign(v, 0);
          else if (c > up) assign(v, 1);
        } else {
          if (-c > up) assign(v, 0);
          else if (-c > down) assign(v, 1);
        }
        if (value_[v] >= 0) {
          // re-read bounds for this row after the forced assignment
          const std::int64_t nd = rows_[r].rhs - fixed_[r];
          if (nd < lo_[r] || nd > hi_[r]) {
            ok = false;
            break;
          }
        }
      }
    }
    queue_.clear();
    return ok;
  }

  template <class OnSolution>
  bool search(OnSolution& on_solution) {
    if (have_bound_ && cost_ >= bound_) return true;
    Var v = 0;
    while (v < n_ && value_[v] >= 0) ++v;
    if (v == n_) return on_solution(value_);
    for (int b : {0, 1}) {
      const std::size_t mark = trail_.size();
      assign(v, b);
      bool keep_going = true;
      if (propagate()) keep_going = search(on_solution);
      undo_to(mark);
      if (!keep_going) return false;
      if (have_bound_ && cost_ >= bound_) return true;
    }
    return true;
  }

  Var n_;
  std::vector<SparseRow> rows_;
  const std::vector<std::uint64_t>* weights_;
  std::vector<std::int8_t> value_;
  std::vector<std::vector<Occ>> occ_;
  std::vector<std::int64_t> fixed_, lo_, hi_;
  std::vector<std::uint8_t> queued_;
  std::vector<std::size_t> queue_;
  std::vector<Var> trail_;
  std::uint64_t cost_ = 0;
  std::uint64_t bound_ = 0;
  bool have_bound_ = false;
};

inline Assignment to_assignment(const std::vector<std::int8_t>& v) {
  std::vector<std::uint8_t> bits(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) bits[i] = v[i] == 1;
  return Assignment(std::move(bits));
}

}  // namespace detail

/// Enumerates every 0/1 solution. The rows are first brought to reduced
/// echelon form (same solution set), then searched with bound propagation.
inline std::uint64_t for_each_linear_solution(const LinearSystem& sys, const ModelCallback& cb,
                                              Var var_limit = kDefaultLinearVarLimit) {
  if (sys.num_vars() > var_limit)
    throw LimitExceeded("system has " + std::to_string(sys.num_vars()) + " variables, oracle limit is " +
                        std::to_string(var_limit));
  auto rows = detail::reduce_rows(sys);
  if (!rows) return 0;
  std::uint64_t count = 0;
  detail::LinearSearch s(sys.num_vars(), std::move(*rows), nullptr);
  s.run([&](const std::vector<std::int8_t>& v) {
    ++count;
    return cb(detail::to_assignment(v));
  });
  return count;
}

struct LinearOracleResult {
  bool feasible = false;
  std::optional<Assignment> witness;
  std::uint64_t count = 0;
};

inline LinearOracleResult brute_linear(const LinearSystem& sys, Var var_limit = kDefaultLinearVarLimit) {
  LinearOracleResult r;
  r.count = for_each_linear_solution(
      sys,
      [&](const Assignment& a) {
        if (!r.witness) r.witness = a;
        return true;
      },
      var_limit);
  r.feasible = r.count > 0;
  return r;
}

/// Lexicographically first 0/1 solution, without counting the rest.
inline std::optional<Assignment> first_linear_solution(const LinearSystem& sys,
                                                       Var var_limit = kDefaultLinearVarLimit) {
  std::optional<Assignment> out;
  for_each_linear_solution(
      sys,
      [&](const Assignment& a) {
        out = a;
        return false;
      },
      var_limit);
  return out;
}

struct MinResult {
  bool feasible = false;
  std::uint64_t cost = 0;
  std::optional<Assignment> argmin;  // lexicographically first optimum
};

/// Minimum of sum(weights[v-1] * x_v) over the 0/1 solutions.
inline MinResult brute_linear_min(const LinearSystem& sys, const std::vector<CostTerm>& cost,
                                  Var var_limit = kDefaultLinearVarLimit) {
  if (sys.num_vars() > var_limit)
    throw LimitExceeded("system has " + std::to_string(sys.num_vars()) + " variables, oracle limit is " +
                        std::to_string(var_limit));
  std::vector<std::uint64_t> w(sys.num_vars(), 0);
  for (const auto& t : cost) {
    if (t.var == 0 || t.var > sys.num_vars()) throw InvalidInput("cost term outside the system's variables");
    w[t.var - 1] += t.weight;
  }
  MinResult r;
  auto rows = detail::reduce_rows(sys);
  if (!rows) return r;
  detail::LinearSearch s(sys.num_vars(), std::move(*rows), &w);
  s.run([&](const std::vector<std::int8_t>& v) {
    r.feasible = true;
    r.cost = s.current_cost();
    r.argmin = detail::to_assignment(v);
    s.set_bound(r.cost);
    return true;
  });
  return r;
}

// ---------------------------------------------------------------------------
// Optimization oracles over CNF

/// With a projection the cost must be determined by x_1..x_projection; one
/// model per projection is then enough.
inline MinResult brute_mincost(const MincostInstance& inst, Var var_limit = kDefaultSatVarLimit,
                               std::optional<Var> projection = std::nullopt) {
  inst.validate();
  MinResult r;
  auto consider = [&](const Assignment& a) {
    const std::uint64_t c = inst.cost(a);
    if (!r.feasible || c < r.cost || (c == r.cost && a.bits() < r.argmin->bits())) {
      r.feasible = true;
      r.cost = c;
      r.argmin = a;
    }
    return true;
  };
  if (projection)
    for_each_projected_model(inst.cnf, *projection, consider, var_limit);
  else
    for_each_model(inst.cnf, consider, var_limit);
  return r;
}

struct MaxSatResult {
  std::size_t max_satisfied = 0;
  Assignment argmax;
};

/// Plain enumeration of all 2^n assignments.
inline MaxSatResult brute_max3sat(const Max3SatInstance& inst, Var var_limit = kDefaultSatVarLimit) {
  const Var n = inst.cnf.num_variables();
  if (n > var_limit)
    throw LimitExceeded("instance has " + std::to_string(n) + " variables, oracle limit is " + std::to_string(var_limit));
  MaxSatResult best{0, Assignment(n)};
  bool first = true;
  Assignment a(n);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    // lexicographic: x_1 is the most significant position
    for (Var v = 1; v <= n; ++v) a.set(v, (bits >> (n - v)) & 1U);
    std::size_t sat = 0;
    for (const auto& c : inst.cnf.clauses()) sat += satisfies(c, a);
    if (first || sat > best.max_satisfied) {
      best = {sat, a};
      first = false;
    }
  }
  return best;
}

}  // namespace satrand

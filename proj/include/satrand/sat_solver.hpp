#pragma once

#include <cstdint>
#include <vector>

#include "satrand/cnf.hpp"

namespace satrand {

/// Conflict-driven clause learning solver: two watched literals, first-UIP
/// learning, activity-ordered decisions with phase saving and Luby restarts.
/// Clauses may be added between calls to solve(), which makes it usable for
/// model enumeration with blocking clauses.
class CdclSolver {
 public:
  explicit CdclSolver(Var n)
      : n_(n), assigns_(n, kUndef), level_(n, 0), reason_(n, -1), activity_(n, 0.0), phase_(n, 0), seen_(n, 0),
        heap_pos_(n, -1), watches_(2 * static_cast<std::size_t>(n)) {
    for (Var v = 0; v < n_; ++v) heap_insert(v);
  }

  explicit CdclSolver(const CnfInstance& inst) : CdclSolver(inst.num_variables()) {
    for (const Clause& c : inst.clauses()) add_clause(c);
  }

  Var num_vars() const { return n_; }

  /// Returns false once the clause set is known to be unsatisfiable.
  bool add_clause(const Clause& c) {
    if (!ok_) return false;
    backtrack(0);
    std::vector<int> lits;
    for (const Literal& l : c) {
      if (l.var == 0 || l.var > n_) throw InvalidInput("clause mentions a variable the solver does not have");
      const int p = lit(l);
      const int v = value(p);
      if (v == kTrue) return true;
      if (v == kFalse) continue;
      bool dup = false;
      for (int q : lits) {
        if (q == p) dup = true;
        if (q == (p ^ 1)) return true;
      }
      if (!dup) lits.push_back(p);
    }
    if (lits.empty()) return ok_ = false;
    if (lits.size() == 1) {
      enqueue(lits[0], -1);
      return ok_ = propagate() < 0;
    }
    attach(std::move(lits));
    return true;
  }

  bool solve() {
    if (!ok_) return false;
    backtrack(0);
    if (propagate() >= 0) return ok_ = false;
    for (std::uint64_t restart = 0;; ++restart) {
      const std::uint64_t budget = 100 * luby(restart);
      std::uint64_t conflicts = 0;
      for (;;) {
        const int confl = propagate();
        if (confl >= 0) {
          if (decision_level() == 0) return ok_ = false;
          learn(confl);
          ++conflicts;
          var_inc_ *= 1.0 / 0.95;
          continue;
        }
        if (conflicts >= budget) {
          backtrack(0);
          break;
        }
        const int v = pick_branch();
        if (v < 0) return true;
        trail_lim_.push_back(trail_.size());
        enqueue(2 * v + (phase_[v] ? 0 : 1), -1);
      }
    }
  }

  /// Model of the last successful solve().
  Assignment model() const {
    std::vector<std::uint8_t> bits(n_);
    for (Var v = 0; v < n_; ++v) bits[v] = assigns_[v] == kTrue;
    return Assignment(std::move(bits));
  }

 private:
  static constexpr int kFalse = 0, kTrue = 1, kUndef = 2;

  static int lit(const Literal& l) { return 2 * static_cast<int>(l.var - 1) + (l.positive ? 0 : 1); }

  int value(int p) const {
    const int a = assigns_[p >> 1];
    return a == kUndef ? kUndef : a ^ (p & 1);
  }

  std::size_t decision_level() const { return trail_lim_.size(); }

  void enqueue(int p, int reason) {
    const int v = p >> 1;
    assigns_[v] = (p & 1) ? kFalse : kTrue;
    level_[v] = static_cast<int>(decision_level());
    reason_[v] = reason;
    trail_.push_back(p);
  }

  int attach(std::vector<int> lits) {
    const int ci = static_cast<int>(clauses_.size());
    watches_[lits[0]].push_back(ci);
    watches_[lits[1]].push_back(ci);
    clauses_.push_back(std::move(lits));
    return ci;
  }

  /// Index of a conflicting clause, or -1.
  int propagate() {
    while (qhead_ < trail_.size()) {
      const int falsified = trail_[qhead_++] ^ 1;
      auto& ws = watches_[falsified];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        const int ci = ws[i++];
        auto& c = clauses_[ci];
        if (c[0] == falsified) std::swap(c[0], c[1]);
        if (value(c[0]) == kTrue) {
          ws[j++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k)
          if (value(c[k]) != kFalse) {
            std::swap(c[1], c[k]);
            watches_[c[1]].push_back(ci);
            moved = true;
            break;
          }
        if (moved) continue;
        ws[j++] = ci;
        if (value(c[0]) == kFalse) {
          while (i < ws.size()) ws[j++] = ws[i++];
          ws.resize(j);
          qhead_ = trail_.size();
          return ci;
        }
        enqueue(c[0], ci);
      }
      ws.resize(j);
    }
    return -1;
  }

  void learn(int confl) {
    std::vector<int> learnt{-1};
    int paths = 0, p = -1;
    std::size_t idx = trail_.size();
    do {
      const auto& c = clauses_[confl];
      for (std::size_t k = p < 0 ? 0 : 1; k < c.size(); ++k) {
        const int q = c[k], v = q >> 1;
        if (seen_[v] || level_[v] == 0) continue;
        seen_[v] = 1;
        bump(v);
        if (level_[v] >= static_cast<int>(decision_level()))
          ++paths;
        else
          learnt.push_back(q);
      }
      while (!seen_[trail_[--idx] >> 1]) {
      }
      p = trail_[idx];
      confl = reason_[p >> 1];
      seen_[p >> 1] = 0;
      --paths;
    } while (paths > 0);
    learnt[0] = p ^ 1;

    std::size_t back = 0;
    for (std::size_t k = 1; k < learnt.size(); ++k) {
      seen_[learnt[k] >> 1] = 0;
      if (back == 0 || level_[learnt[k] >> 1] > level_[learnt[back] >> 1]) back = k;
    }
    int target = 0;
    if (back) {
      std::swap(learnt[1], learnt[back]);
      target = level_[learnt[1] >> 1];
    }
    backtrack(static_cast<std::size_t>(target));
    if (learnt.size() == 1) {
      enqueue(learnt[0], -1);
    } else {
      const int first = learnt[0];
      enqueue(first, attach(std::move(learnt)));
    }
  }

  void backtrack(std::size_t lvl) {
    if (decision_level() <= lvl) return;
    for (std::size_t k = trail_.size(); k-- > trail_lim_[lvl];) {
      const int v = trail_[k] >> 1;
      phase_[v] = assigns_[v] == kTrue;
      assigns_[v] = kUndef;
      reason_[v] = -1;
      if (heap_pos_[v] < 0) heap_insert(v);
    }
    trail_.resize(trail_lim_[lvl]);
    trail_lim_.resize(lvl);
    qhead_ = trail_.size();
  }

  int pick_branch() {
    while (!heap_.empty()) {
      const int v = heap_pop();
      if (assigns_[v] == kUndef) return v;
    }
    return -1;
  }

  static std::uint64_t luby(std::uint64_t i) {
    std::uint64_t size = 1, seq = 0;
    while (size < i + 1) {
      ++seq;
      size = 2 * size + 1;
    }
    while (size - 1 != i) {
      size = (size - 1) / 2;
      --seq;
      i %= size;
    }
    return std::uint64_t{1} << seq;
  }

  void bump(int v) {
    if ((activity_[v] += var_inc_) > 1e100) {
      for (auto& a : activity_) a *= 1e-100;
      var_inc_ *= 1e-100;
    }
    if (heap_pos_[v] >= 0) sift_up(heap_pos_[v]);
  }

  bool before(int a, int b) const { return activity_[a] > activity_[b] || (activity_[a] == activity_[b] && a < b); }

  void heap_insert(int v) {
    heap_pos_[v] = static_cast<int>(heap_.size());
    heap_.push_back(v);
    sift_up(heap_pos_[v]);
  }

  int heap_pop() {
    const int top = heap_[0];
    heap_pos_[top] = -1;
    const int last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
      heap_[0] = last;
      heap_pos_[last] = 0;
      sift_down(0);
    }
    return top;
  }

  void sift_up(int i) {
    const int v = heap_[i];
    while (i > 0) {
      const int parent = (i - 1) / 2;
      if (!before(v, heap_[parent])) break;
      heap_[i] = heap_[parent];
      heap_pos_[heap_[i]] = i;
      i = parent;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
  }

  void sift_down(int i) {
    const int v = heap_[i];
    const int size = static_cast<int>(heap_.size());
    for (;;) {
      int child = 2 * i + 1;
      if (child >= size) break;
      if (child + 1 < size && before(heap_[child + 1], heap_[child])) ++child;
      if (!before(heap_[child], v)) break;
      heap_[i] = heap_[child];
      heap_pos_[heap_[i]] = i;
      i = child;
    }
    heap_[i] = v;
    heap_pos_[v] = i;
  }

  Var n_;
  bool ok_ = true;
  std::vector<int> assigns_, level_, reason_;
  std::vector<double> activity_;
  std::vector<std::uint8_t> phase_, seen_;
  std::vector<int> heap_, heap_pos_;
  double var_inc_ = 1.0;
  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<int> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
};

}  // namespace satrand

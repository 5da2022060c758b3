#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "satrand/cnf.hpp"
#include "satrand/rng.hpp"

namespace satrand {

/// Secret of the isomorphism randomizer: variable v is renamed to
/// permutation[v-1] and its polarity is inverted when flips[v-1] is set.
struct IsoSecret {
  std::vector<Var> permutation;
  std::vector<std::uint8_t> flips;
  std::uint64_t seed = 0;

  Var num_variables() const { return static_cast<Var>(permutation.size()); }

  static IsoSecret identity(Var n) {
    IsoSecret s;
    s.permutation.resize(n);
    s.flips.assign(n, 0);
    for (Var v = 1; v <= n; ++v) s.permutation[v - 1] = v;
    return s;
  }

  bool is_bijection() const {
    std::vector<std::uint8_t> seen(permutation.size(), 0);
    for (Var p : permutation) {
      if (p == 0 || p > permutation.size() || seen[p - 1]) return false;
      seen[p - 1] = 1;
    }
    return flips.size() == permutation.size();
  }

  bool operator==(const IsoSecret&) const = default;
};

inline IsoSecret make_iso_secret(Var n, std::uint64_t seed) {
  Rng rng(seed);
  IsoSecret s = IsoSecret::identity(n);
  s.seed = seed;
  rng.shuffle(std::span<Var>(s.permutation));
  for (auto& f : s.flips) f = rng.coin() ? 1 : 0;
  return s;
}

/// Renames and flips every literal; clause order is kept.
inline CnfInstance iso_apply(const CnfInstance& inst, const IsoSecret& secret) {
  if (secret.num_variables() != inst.num_variables() || !secret.is_bijection())
    throw InvalidInput("iso secret does not match the instance's variable count");
  CnfInstance out(inst.num_variables());
  for (const auto& c : inst.clauses()) {
    std::vector<Literal> lits;
    lits.reserve(c.size());
    for (const auto& l : c) lits.push_back({secret.permutation[l.var - 1], l.positive != (secret.flips[l.var - 1] != 0)});
    out.add_clause(Clause(std::move(lits)));
  }
  return out;
}

struct IsoRandomized {
  CnfInstance instance;
  IsoSecret secret;
};

/// Variable permutation plus polarity flipping, with the clause order
/// shuffled as well. n, m and the clause-length multiset are unchanged.
inline IsoRandomized iso_randomize(const CnfInstance& inst, std::uint64_t seed) {
  IsoSecret secret = make_iso_secret(inst.num_variables(), seed);
  CnfInstance mapped = iso_apply(inst, secret);
  std::vector<Clause> clauses = mapped.clauses();
  Rng rng(mix_seed(seed, 1));
  rng.shuffle(std::span<Clause>(clauses));
  return {CnfInstance(inst.num_variables(), std::move(clauses)), std::move(secret)};
}

/// x_v = y_{perm(v)} xor flip(v).
inline Assignment iso_derandomize(const Assignment& solution, const IsoSecret& secret) {
  if (solution.size() != secret.num_variables())
    throw InvalidInput("solution covers " + std::to_string(solution.size()) + " variables, secret expects " +
                       std::to_string(secret.num_variables()));
  Assignment x(secret.num_variables());
  for (Var v = 1; v <= secret.num_variables(); ++v)
    x.set(v, solution[secret.permutation[v - 1]] != (secret.flips[v - 1] != 0));
  return x;
}

}  // namespace satrand

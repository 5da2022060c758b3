// Permutes and flips the variables of a random 3CNF, solves the copy and
// maps the model back.

#include <iostream>

#include "satrand/satrand.hpp"

using namespace satrand;

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 1;
  Rng rng(seed);
  CnfInstance f(12);
  for (int i = 0; i < 40; ++i) {
    std::vector<Literal> lits;
    while (lits.size() < 3) {
      const Var v = static_cast<Var>(rng.below(12)) + 1;
      bool fresh = true;
      for (const auto& l : lits) fresh = fresh && l.var != v;
      if (fresh) lits.push_back(Literal{v, rng.coin()});
    }
    f.add_clause(Clause(lits));
  }

  const IsoRandomized r = iso_randomize(f, seed);
  std::cout << "instance: " << f.num_variables() << " vars, " << f.num_clauses() << " clauses (seed " << seed << ")\n";
  const auto sol = cdcl_solve(r.instance);
  if (!sol) {
    std::cout << "unsatisfiable (" << brute_sat(f).count << " models by enumeration)\n";
    return 0;
  }
  const Assignment x = iso_derandomize(*sol, r.secret);
  std::cout << "randomized model satisfies randomized copy: " << satisfies(r.instance, *sol) << "\n";
  std::cout << "derandomized model satisfies original:      " << satisfies(f, x) << "\n";
  std::cout << "model counts: original " << brute_sat(f).count << ", randomized " << brute_sat(r.instance).count
            << "\n";
}

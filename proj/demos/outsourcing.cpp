// Sends randomized copies of one instance to a mix of simulated providers
// and prints the cross-checked report.

#include <iostream>

#include "satrand/satrand.hpp"

using namespace satrand;

int main(int argc, char** argv) {
  const std::string mix = argc > 1 ? argv[1] : "honest,lazy,malicious-unsat,malicious-corrupt";
  Rng rng(3);
  CnfInstance f(10);
  for (int i = 0; i < 30; ++i) {
    std::vector<Literal> lits;
    while (lits.size() < 3) {
      const Var v = static_cast<Var>(rng.below(10)) + 1;
      bool fresh = true;
      for (const auto& l : lits) fresh = fresh && l.var != v;
      if (fresh) lits.push_back(Literal{v, rng.coin()});
    }
    f.add_clause(Clause(lits));
  }
  for (Method m : {Method::kIso, Method::kMatrix, Method::kSolutionSet})
    std::cout << outsource(f, m, parse_provider_mix(mix), 42).to_text(false) << "\n";
}

// Encodes (x1 v x2 v x3) & (-x1 v x2 v -x3) as 0/1 linear equations, mixes
// the rows, solves the mixed system and maps the answer back.

#include <iostream>

#include "satrand/satrand.hpp"

using namespace satrand;

int main() {
  const CnfInstance f = parse_dimacs("p cnf 3 2\n1 2 3 0\n-1 2 -3 0");
  const LinearSystem encoded = encode_linear(f);
  std::cout << "encoded\n" << emit_opb(encoded);

  const MatrixRandomized r = randomize_system(encoded, f.num_variables(), 7);
  std::cout << "\nrandomized (seed 7)\n" << emit_opb(r.system);

  const auto sol = first_linear_solution(r.system);
  if (!sol) {
    std::cout << "infeasible\n";
    return 1;
  }
  const Assignment x = derandomize_solution(*sol, r.secret, f);
  std::cout << "\nprovider solution:";
  for (Var v = 1; v <= sol->size(); ++v) std::cout << ' ' << ((*sol)[v] ? "" : "-") << v;
  std::cout << "\noriginal solution:";
  for (Var v = 1; v <= x.size(); ++v) std::cout << ' ' << (x[v] ? "" : "-") << v;
  std::cout << "\n";
}

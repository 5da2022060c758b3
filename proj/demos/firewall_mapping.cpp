// Maps a two-rule policy through fixed field bijections, shows that port
// frequencies survive the mapping, and checks two orderings of independent
// rules for equivalence.

#include <iostream>

#include "satrand/satrand.hpp"

using namespace satrand;
using namespace satrand::firewall;

int main() {
  const auto layout = HeaderLayout::standard();
  const auto original = parse_policy(
      "10.11.12.* 100 10.14.15.* 80 accept\n"
      "152.15.10.* 99 152.15.*.* 80 accept\n"
      "default deny\n",
      layout);
  const auto secret = FieldMappingSecret::from_pairs(
      layout, {{{10, 23}, {152, 163}, {100, 41}}, {{11, 170}, {14, 76}, {15, 201}}, {{12, 55}, {15, 142}, {10, 97}}},
      {{100, 471}, {99, 15717}, {80, 2313}});
  const auto mapped = map_fields(original, secret);
  std::cout << "original\n" << emit_policy(original) << "\nmapped\n" << emit_policy(mapped) << "\n";

  std::cout << "port frequencies (original -> mapped):";
  for (const auto& [port, n] : port_histogram(original)) std::cout << ' ' << port << 'x' << n;
  std::cout << " ->";
  for (const auto& [port, n] : port_histogram(mapped)) std::cout << ' ' << port << 'x' << n;
  std::cout << "\n\n";

  // The two rules never match the same header, so either order is the same policy.
  FirewallPolicy swapped = original;
  std::swap(swapped.rules[0], swapped.rules[1]);
  const CnfInstance cnf = equivalence_cnf(original, swapped, layout);
  std::cout << "equivalence CNF: " << cnf.num_variables() << " vars, " << cnf.num_clauses() << " clauses, "
            << (cdcl_solve(cnf) ? "policies differ" : "policies equivalent") << "\n";

  FirewallPolicy opened = original;
  opened.default_action = Action::kAccept;
  if (auto w = cdcl_solve(equivalence_cnf(original, opened, layout))) {
    const auto h = decode_witness(*w, layout, original, opened);
    std::cout << "default accept differs on header with src port " << h.src_port << ", dst port " << h.dst_port
              << "\n";
  }
}

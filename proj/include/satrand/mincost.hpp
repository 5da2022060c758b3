#pragma once

#include <cstdint>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "satrand/cnf.hpp"

namespace satrand {

/// CNF plus a non-negative cost per variable, charged when it is true.
struct MincostInstance {
  CnfInstance cnf;
  std::vector<std::uint64_t> costs;  // costs[v-1]; missing entries are zero

  std::uint64_t cost_of(Var v) const { return v - 1 < costs.size() ? costs[v - 1] : 0; }

  std::uint64_t cost(const Assignment& a) const {
    std::uint64_t total = 0;
    for (Var v = 1; v <= costs.size() && v <= a.size(); ++v)
      if (a[v]) total += costs[v - 1];
    return total;
  }

  void validate() const {
    if (costs.size() > cnf.num_variables()) throw InvalidInput("cost assigned to a variable outside the CNF");
  }
};

struct Max3SatInstance {
  CnfInstance cnf;

  void validate() const {
    if (!is_exact_three_cnf(cnf)) throw InvalidInput("MAX3SAT instance must have exactly three literals per clause");
  }
};

/// One `w <var> <weight>` term of a linear objective.
struct CostTerm {
  Var var = 0;
  std::uint64_t weight = 0;
  bool operator==(const CostTerm&) const = default;
};

inline std::uint64_t evaluate_cost(const std::vector<CostTerm>& terms, const Assignment& a) {
  std::uint64_t total = 0;
  for (const auto& t : terms)
    if (a[t.var]) total += t.weight;
  return total;
}

/// Cost sidecar: `c` comment lines and `w <var> <cost>` lines.
inline std::vector<CostTerm> parse_cost_terms(std::istream& in) {
  std::vector<CostTerm> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == 'c') continue;
    std::string var, weight, extra;
    std::int64_t v, w;
    if (tag != "w" || !(ls >> var >> weight) || (ls >> extra) || !detail::parse_int(var, v) ||
        !detail::parse_int(weight, w) || v < 1 || w < 0)
      throw ParseError("cost line " + std::to_string(lineno) + ": expected 'w <var> <non-negative cost>'");
    out.push_back({static_cast<Var>(v), static_cast<std::uint64_t>(w)});
  }
  return out;
}

inline std::vector<CostTerm> parse_cost_terms(const std::string& text) {
  std::istringstream in(text);
  return parse_cost_terms(in);
}

inline std::string emit_cost_terms(const std::vector<CostTerm>& terms) {
  std::string out;
  for (const auto& t : terms) out += "w " + std::to_string(t.var) + " " + std::to_string(t.weight) + "\n";
  return out;
}

inline std::vector<CostTerm> cost_terms(const MincostInstance& inst) {
  std::vector<CostTerm> out;
  for (Var v = 1; v <= inst.costs.size(); ++v)
    if (inst.costs[v - 1] != 0) out.push_back({v, inst.costs[v - 1]});
  return out;
}

inline MincostInstance make_mincost(CnfInstance cnf, const std::vector<CostTerm>& terms) {
  MincostInstance inst{std::move(cnf), {}};
  inst.costs.assign(inst.cnf.num_variables(), 0);
  for (const auto& t : terms) {
    if (t.var > inst.cnf.num_variables())
      throw InvalidInput("cost on variable " + std::to_string(t.var) + " which the CNF does not have");
    inst.costs[t.var - 1] += t.weight;
  }
  return inst;
}

}  // namespace satrand
